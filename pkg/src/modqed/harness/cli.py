"""Command-line front end.

    modqed simulate CONFIG [--output out.csv]
    modqed resonance CONFIG [--k-max N]
    modqed sweep SWEEP [--output out.csv] [--workers N]
    modqed compare CONFIG [--kind ajc|jc|dce] [--threshold X] [--json]

Exit codes: 0 success, 2 configuration problem, 3 integration failure,
4 oscillation-fit failure.
"""

from __future__ import annotations

import argparse
import json
import sys

from ..errors import ConfigurationError, FitError, IntegrationError
from .config import load_config
from .runner import compare, resonance_table, run
from .sweep import sweep


def _cmd_simulate(args) -> int:
    cfg = load_config(args.config)
    traj = run(cfg, csv_path=args.output)
    out = args.output if args.output is not None else cfg.csv_path
    print(f"samples: {traj.times.size}  t_end: {traj.times[-1]:.6g}")
    print(f"max |norm^2 - 1|: {traj.norm_error.max():.3e}")
    print(f"final <n>: {traj.n_mean[-1]:.6g}  max <n>: {traj.n_mean.max():.6g}")
    print(f"final P_e: {traj.p_e[-1]:.6g}  max P_e: {traj.p_e.max():.6g}")
    if out is not None:
        print(f"wrote {out}")
    return 0


def _cmd_resonance(args) -> int:
    cfg = load_config(args.config)
    xi = cfg.resonance.xi if cfg.resonance is not None else 0.0
    rows = resonance_table(cfg.params, cfg.profile, args.k_max, xi=xi)
    print(f"{'kind':<5} {'K':>2} {'xi':>12} {'eta':>12} {'|theta_K|':>12} "
          f"{'delta':>12} {'delta_K':>12}  note")
    for r in rows:
        print(
            f"{r['kind']:<5} {r['K']:>2} {r['xi']:>12.6g} {r['eta']:>12.6g} "
            f"{abs(r['theta_K']):>12.6g} {r['delta']:>12.6g} {r['delta_K']:>12.6g}  {r['note']}"
        )
    return 0


def _cmd_sweep(args) -> int:
    header, rows, output = sweep(args.sweep, output=args.output, workers=args.workers)
    failures = sum(1 for r in rows if r.get("status") != "ok")
    print(f"{len(rows)} points, {failures} failed")
    if output is not None:
        print(f"wrote {output}")
    else:
        print(",".join(header))
        from .sweep import _format_cell

        for row in rows:
            print(",".join(_format_cell(row.get(k, "")) for k in header))
    return 0


def _cmd_compare(args) -> int:
    cfg = load_config(args.config)
    report = compare(cfg, effective_kind=args.kind, threshold=args.threshold)
    if args.json:
        payload = {
            "sup_distance": report.sup_distance,
            "threshold": report.threshold,
            "validity_horizon": report.validity_horizon,
            "exceeded": report.exceeded,
            "advisory_horizon": report.advisory_horizon,
            "advisory_exceeded": report.advisory_exceeded,
            "rms": report.rms,
        }
        print(json.dumps(payload, indent=2))
        return 0
    print(f"sup population distance: {report.sup_distance:.6g} (threshold {report.threshold:g})")
    if report.exceeded:
        print(f"validity horizon: t = {report.validity_horizon:.6g}")
    else:
        print(f"distance stayed below threshold up to t_end = {report.validity_horizon:.6g}")
    if report.advisory_exceeded:
        print(f"dispersive advisory tripped at t = {report.advisory_horizon:.6g}")
    for name, value in report.rms.items():
        print(f"RMS {name}: {value:.6g}")
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="modqed",
        description="Driven qubit-cavity simulations: exact integration, "
        "resonance tables, sweeps, and effective-model comparisons.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("simulate", help="integrate one config and emit CSV")
    p.add_argument("config")
    p.add_argument("--output", help="CSV path (overrides [output].csv)")
    p.set_defaults(fn=_cmd_simulate)

    p = sub.add_parser("resonance", help="print the resonance table for a config")
    p.add_argument("config")
    p.add_argument("--k-max", type=int, default=3)
    p.set_defaults(fn=_cmd_resonance)

    p = sub.add_parser("sweep", help="run a parameter-sweep file")
    p.add_argument("sweep")
    p.add_argument("--output", help="aggregated CSV path (overrides sweep file)")
    p.add_argument("--workers", type=int)
    p.set_defaults(fn=_cmd_sweep)

    p = sub.add_parser("compare", help="exact vs effective dynamics report")
    p.add_argument("config")
    p.add_argument("--kind", choices=["ajc", "jc", "dce"], help="effective model (default: config's)")
    p.add_argument("--threshold", type=float, default=0.1)
    p.add_argument("--json", action="store_true")
    p.set_defaults(fn=_cmd_compare)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.fn(args)
    except ConfigurationError as exc:
        print(f"configuration error: {exc}", file=sys.stderr)
        return 2
    except IntegrationError as exc:
        print(f"integration failure: {exc}", file=sys.stderr)
        return 3
    except FitError as exc:
        print(f"fit failure: {exc}", file=sys.stderr)
        return 4


if __name__ == "__main__":
    sys.exit(main())
