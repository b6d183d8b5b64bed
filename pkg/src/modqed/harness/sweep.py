"""Parameter sweeps: a Cartesian grid of config overrides, run in parallel.

A sweep file names a base experiment config and a table of axes, each a
dotted config key with a list of values:

    base = "fig2.toml"            # path relative to this file, or an
                                  # inline [base] table instead
    max_runs = 64                 # required hard bound on grid size
    workers = 2                   # optional, default one per CPU
    fit_observable = "n_mean"     # optional: fit A sin^2(nu t)+B per point
    output = "sweep.csv"          # optional aggregated CSV path

    [axes]
    "resonance.xi_in_delta_units" = [-4.0, -2.0, 0.0, 2.0, 4.0]

Points run independently (processes when workers > 1) and are always
reported in grid order: the aggregated CSV is byte-identical for any
worker count. A failing point gets status="error" and the sweep moves on;
a failing fit leaves the fit columns empty but the point stays "ok".
"""

from __future__ import annotations

import copy
import itertools
import math
import os
from concurrent.futures import ProcessPoolExecutor
from pathlib import Path

from ..dynamics import fit_oscillation
from ..errors import ConfigurationError, FitError
from .config import build_config, load_config_dict
from .runner import run

_SWEEP_KEYS = {"base", "max_runs", "workers", "fit_observable", "output", "axes"}

_RESULT_COLUMNS = (
    "status",
    "max_n_mean",
    "final_n_mean",
    "max_P_e",
    "max_P_g",
    "fit_frequency",
    "fit_amplitude",
    "fit_residual",
    "error",
)


def _set_dotted(mapping: dict, dotted: str, value) -> None:
    parts = dotted.split(".")
    node = mapping
    for part in parts[:-1]:
        nxt = node.setdefault(part, {})
        if not isinstance(nxt, dict):
            raise ConfigurationError(
                f"axis key {dotted!r} descends through non-table entry {part!r}"
            )
        node = nxt
    node[parts[-1]] = value


def _run_point(task):
    idx, raw, fit_observable = task
    row = {name: "" for name in _RESULT_COLUMNS}
    try:
        cfg = build_config(raw)
        traj = run(cfg)
    except Exception as exc:
        row["status"] = "error"
        row["error"] = f"{type(exc).__name__}: {exc}"
        return idx, row
    row["status"] = "ok"
    row["max_n_mean"] = float(traj.n_mean.max())
    row["final_n_mean"] = float(traj.n_mean[-1])
    row["max_P_e"] = float(traj.p_e.max())
    row["max_P_g"] = float(traj.p_g.max())
    if fit_observable:
        try:
            fit = fit_oscillation(traj, fit_observable)
            row["fit_frequency"] = fit.frequency
            row["fit_amplitude"] = fit.amplitude
            row["fit_residual"] = fit.residual
        except FitError as exc:
            row["error"] = f"FitError: {exc}"
    return idx, row


def load_sweep(path) -> dict:
    path = Path(path)
    spec = load_config_dict(path)
    unknown = sorted(set(spec) - _SWEEP_KEYS)
    if unknown:
        raise ConfigurationError(f"unknown sweep keys: {', '.join(map(repr, unknown))}")

    base = spec.get("base")
    if isinstance(base, str):
        base_raw = load_config_dict(path.parent / base)
    elif isinstance(base, dict):
        base_raw = base
    else:
        raise ConfigurationError(
            "sweep needs 'base': either a config file path or an inline table"
        )

    axes = spec.get("axes")
    if not isinstance(axes, dict) or not axes:
        raise ConfigurationError("sweep needs a non-empty [axes] table")
    for key, values in axes.items():
        if not isinstance(values, list) or not values:
            raise ConfigurationError(f"axis {key!r} must be a non-empty list of values")

    max_runs = spec.get("max_runs")
    if not isinstance(max_runs, int) or isinstance(max_runs, bool) or max_runs < 1:
        raise ConfigurationError("sweep needs integer max_runs >= 1")
    n_points = math.prod(len(v) for v in axes.values())
    if n_points > max_runs:
        raise ConfigurationError(
            f"grid has {n_points} points, above the configured max_runs={max_runs}"
        )

    workers = spec.get("workers")
    if workers is not None and (
        isinstance(workers, bool) or not isinstance(workers, int) or workers < 1
    ):
        raise ConfigurationError(f"workers must be a positive integer, got {workers!r}")

    output = spec.get("output")
    if output is not None:
        if not isinstance(output, str):
            raise ConfigurationError(f"output must be a path string, got {output!r}")
        output = path.parent / output

    fit_observable = spec.get("fit_observable")
    if fit_observable is not None and not isinstance(fit_observable, str):
        raise ConfigurationError(f"fit_observable must be a string, got {fit_observable!r}")

    return {
        "base_raw": base_raw,
        "axes": axes,
        "workers": workers,
        "output": output,
        "fit_observable": fit_observable,
    }


def sweep(path, output=None, workers=None):
    """Run every grid point; returns (header, rows) and writes the CSV.

    rows come back in grid order (itertools.product over axes in file
    order), independent of scheduling.
    """
    plan = load_sweep(path)
    axes = plan["axes"]
    fit_observable = plan["fit_observable"]
    if workers is None:
        workers = plan["workers"]
    if output is None:
        output = plan["output"]

    axis_keys = list(axes.keys())
    tasks = []
    combos = list(itertools.product(*(axes[k] for k in axis_keys)))
    for idx, combo in enumerate(combos):
        raw = copy.deepcopy(plan["base_raw"])
        for key, value in zip(axis_keys, combo):
            _set_dotted(raw, key, value)
        tasks.append((idx, raw, fit_observable))

    if workers is None:
        workers = min(os.cpu_count() or 1, len(tasks))
    results = {}
    if workers <= 1 or len(tasks) == 1:
        for task in tasks:
            idx, row = _run_point(task)
            results[idx] = row
    else:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            for idx, row in pool.map(_run_point, tasks):
                results[idx] = row

    header = axis_keys + list(_RESULT_COLUMNS)
    rows = []
    for idx, combo in enumerate(combos):
        row = dict(zip(axis_keys, combo))
        row.update(results[idx])
        rows.append(row)

    if output is not None:
        write_sweep_csv(header, rows, output)
    return header, rows, output


def _format_cell(value) -> str:
    if value == "" or value is None:
        return ""
    if isinstance(value, str):
        return value.replace(",", ";").replace("\n", " ")
    if isinstance(value, bool):
        return str(value).lower()
    if isinstance(value, int):
        return str(value)
    return "%.17g" % value


def write_sweep_csv(header, rows, path) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w", newline="") as fh:
        fh.write(",".join(header) + "\n")
        for row in rows:
            fh.write(",".join(_format_cell(row.get(k, "")) for k in header) + "\n")
    return path
