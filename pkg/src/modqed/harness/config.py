"""TOML experiment configuration.

One file describes one simulation. All frequencies are dimensionless
ratios against the cavity frequency, and the key names say so; omega
itself must stay 1.0. Unknown keys are hard errors anywhere in the file:
a typo in a physics parameter must not run silently.

Top-level keys (defaults in parentheses):

    omega (1.0, fixed)          Omega0_over_omega (1.0)
    g0_over_omega (required)    kappa_over_omega, gamma_over_omega,
                                gamma_ph_over_omega (optional loss rates)
    epsilon_over_omega (0.0)    eta_over_omega (exactly one of this and
    s = [s1, s2, ...]           the [resonance] table; with epsilon = 0
    c = [c0, c1, ...]           both may be omitted)
    target ("atom")             frame ("interaction" or "lab")
    initial_state ("g,0", or a list of {state, re, im} tables)
    t_end (required, units of 1/omega)
    n_max (required)

    [resonance]   kind ("ajc"|"jc"|"dce"), K (1),
                  xi_over_omega or xi_in_delta_units (0.0)
    [integrator]  method ("adaptive"|"rk4"), rel_tol (1e-9),
                  abs_tol (1e-12), max_step (2*pi/(50*eta)),
                  sample_stride (20)
    [output]      csv (optional path, relative to the config file)

xi_in_delta_units scales xi by the dispersive shift delta = g0^2/Delta_-,
the natural unit when hunting the photon-generation resonances.
"""

from __future__ import annotations

import math
import sys
from dataclasses import dataclass
from pathlib import Path

if sys.version_info >= (3, 11):
    import tomllib
else:
    import tomli as tomllib

import numpy as np

from ..dynamics import IntegratorConfig, default_max_step
from ..errors import ConfigurationError
from ..hamiltonians import ResonanceKind, ResonanceSpec, resonance_frequency
from ..hilbert import QuantumState, SpaceDescriptor, basis_index, build_space, state_from_label
from ..modulation import ModulationProfile, ModulationTarget, SystemParams, deltas

_TOP_KEYS = {
    "omega",
    "Omega0_over_omega",
    "g0_over_omega",
    "kappa_over_omega",
    "gamma_over_omega",
    "gamma_ph_over_omega",
    "epsilon_over_omega",
    "eta_over_omega",
    "s",
    "c",
    "target",
    "frame",
    "initial_state",
    "t_end",
    "n_max",
    "resonance",
    "integrator",
    "output",
}
_RESONANCE_KEYS = {"kind", "K", "xi_over_omega", "xi_in_delta_units"}
_INTEGRATOR_KEYS = {"method", "rel_tol", "abs_tol", "max_step", "sample_stride"}
_OUTPUT_KEYS = {"csv"}


@dataclass(frozen=True)
class ExperimentConfig:
    params: SystemParams
    profile: ModulationProfile
    resonance: ResonanceSpec | None
    space: SpaceDescriptor
    initial_state: QuantumState
    t_end: float
    frame: str
    integrator: IntegratorConfig
    csv_path: Path | None


def load_config_dict(path) -> dict:
    """Raw TOML mapping; parse errors surface with the file name."""
    path = Path(path)
    try:
        with open(path, "rb") as fh:
            return tomllib.load(fh)
    except FileNotFoundError:
        raise ConfigurationError(f"config file not found: {path}") from None
    except tomllib.TOMLDecodeError as exc:
        raise ConfigurationError(f"{path}: {exc}") from None


def _reject_unknown(table: dict, allowed: set, where: str) -> None:
    unknown = sorted(set(table) - allowed)
    if unknown:
        raise ConfigurationError(
            f"unknown key{'s' if len(unknown) > 1 else ''} in {where}: "
            + ", ".join(repr(k) for k in unknown)
        )


def _number(table: dict, key: str, where: str, default=None, required=False):
    if key not in table:
        if required:
            raise ConfigurationError(f"{where} is missing required key {key!r}")
        return default
    v = table[key]
    if isinstance(v, bool) or not isinstance(v, (int, float)):
        raise ConfigurationError(f"{where} key {key!r} must be a number, got {v!r}")
    return float(v)


def _parse_initial_state(raw, space: SpaceDescriptor) -> QuantumState:
    if isinstance(raw, str):
        return state_from_label(space, raw)
    if isinstance(raw, list):
        amps = np.zeros(space.dim, dtype=complex)
        for entry in raw:
            if not isinstance(entry, dict):
                raise ConfigurationError(
                    "initial_state entries must be tables like {state='g,0', re=1.0, im=0.0}"
                )
            _reject_unknown(entry, {"state", "re", "im"}, "initial_state entry")
            label = entry.get("state")
            if not isinstance(label, str):
                raise ConfigurationError("initial_state entry needs a 'state' label")
            atom, _, m_str = label.partition(",")
            try:
                idx = basis_index(space, atom.strip(), int(m_str))
            except (ValueError, ConfigurationError) as exc:
                raise ConfigurationError(f"bad initial_state label {label!r}: {exc}") from None
            amps[idx] += complex(
                _number(entry, "re", "initial_state entry", default=0.0),
                _number(entry, "im", "initial_state entry", default=0.0),
            )
        norm = np.linalg.norm(amps)
        if norm == 0:
            raise ConfigurationError("initial_state amplitudes are all zero")
        return QuantumState(space, amps / norm)
    raise ConfigurationError(
        f"initial_state must be a label string or a list of amplitude entries, got {raw!r}"
    )


def build_config(raw: dict, base_dir=None) -> ExperimentConfig:
    """Validate a raw mapping and assemble the runnable configuration."""
    if not isinstance(raw, dict):
        raise ConfigurationError("config root must be a table")
    _reject_unknown(raw, _TOP_KEYS, "config")

    omega = _number(raw, "omega", "config", default=1.0)
    if omega != 1.0:
        raise ConfigurationError(
            f"omega must be 1.0 (every other parameter is a ratio against it), got {omega}"
        )
    params = SystemParams(
        omega=omega,
        Omega0=_number(raw, "Omega0_over_omega", "config", default=1.0),
        g0=_number(raw, "g0_over_omega", "config", required=True),
        kappa=_number(raw, "kappa_over_omega", "config"),
        gamma=_number(raw, "gamma_over_omega", "config"),
        gamma_ph=_number(raw, "gamma_ph_over_omega", "config"),
    )

    epsilon = _number(raw, "epsilon_over_omega", "config", default=0.0)
    target_raw = raw.get("target", "atom")
    try:
        target = ModulationTarget(target_raw)
    except ValueError:
        raise ConfigurationError(
            f"target must be 'atom' or 'coupling', got {target_raw!r}"
        ) from None
    s = raw.get("s", [])
    c = raw.get("c", [])
    if not isinstance(s, list) or not isinstance(c, list):
        raise ConfigurationError("s and c must be arrays of numbers")
    eta_explicit = _number(raw, "eta_over_omega", "config")

    res_tab = raw.get("resonance")
    resonance = None
    if res_tab is not None and eta_explicit is not None:
        raise ConfigurationError("give exactly one of eta_over_omega and [resonance], not both")
    if res_tab is None and eta_explicit is None and epsilon != 0.0:
        raise ConfigurationError(
            "a drive with epsilon_over_omega != 0 needs eta_over_omega or a [resonance] table"
        )

    def make_profile(eta):
        return ModulationProfile(epsilon=epsilon, eta=eta, s=s, c=c, target=target)

    if res_tab is not None:
        _reject_unknown(res_tab, _RESONANCE_KEYS, "[resonance]")
        kind_raw = res_tab.get("kind")
        try:
            kind = ResonanceKind(kind_raw)
        except ValueError:
            raise ConfigurationError(
                f"[resonance].kind must be one of "
                f"{[k.value for k in ResonanceKind]}, got {kind_raw!r}"
            ) from None
        order = res_tab.get("K", 1)
        if isinstance(order, bool) or not isinstance(order, int):
            raise ConfigurationError(f"[resonance].K must be an integer, got {order!r}")
        xi = _number(res_tab, "xi_over_omega", "[resonance]")
        xi_units = _number(res_tab, "xi_in_delta_units", "[resonance]")
        if xi is not None and xi_units is not None:
            raise ConfigurationError(
                "give exactly one of [resonance].xi_over_omega and xi_in_delta_units"
            )
        if xi_units is not None:
            # delta depends only on Delta_-, not on eta, so a placeholder eta works
            _, dm = deltas(params, make_profile(1.0))
            if dm == 0.0:
                raise ConfigurationError(
                    "xi_in_delta_units is undefined at Delta_- = 0 (delta diverges)"
                )
            xi = xi_units * params.g0**2 / dm
        resonance = ResonanceSpec(kind=kind, K=order, xi=xi if xi is not None else 0.0)
        eta = resonance_frequency(resonance, params, make_profile(1.0))
    elif eta_explicit is not None:
        eta = eta_explicit
    else:
        # undriven: eta only sets the (unused) drive period
        eta = 2.0 * params.omega
    profile = make_profile(eta)

    frame = raw.get("frame", "interaction")
    if frame not in ("interaction", "lab"):
        raise ConfigurationError(f"frame must be 'interaction' or 'lab', got {frame!r}")
    if frame == "lab" and target is ModulationTarget.COUPLING:
        raise ConfigurationError(
            "frame='lab' models atom-frequency modulation only; "
            "coupling modulation is defined in the interaction picture"
        )

    if "n_max" not in raw:
        raise ConfigurationError("config is missing required key 'n_max'")
    n_max = raw["n_max"]
    if isinstance(n_max, bool) or not isinstance(n_max, int):
        raise ConfigurationError(f"n_max must be an integer, got {n_max!r}")
    space = build_space(n_max)
    psi0 = _parse_initial_state(raw.get("initial_state", "g,0"), space)

    t_end = _number(raw, "t_end", "config", required=True)
    if not (math.isfinite(t_end) and t_end > 0):
        raise ConfigurationError(f"t_end must be positive and finite, got {t_end}")

    int_tab = raw.get("integrator", {})
    _reject_unknown(int_tab, _INTEGRATOR_KEYS, "[integrator]")
    method = int_tab.get("method", "adaptive")
    stride = int_tab.get("sample_stride", 20)
    if isinstance(stride, bool) or not isinstance(stride, int):
        raise ConfigurationError(
            f"[integrator].sample_stride must be an integer, got {stride!r}"
        )
    max_step = _number(int_tab, "max_step", "[integrator]")
    if max_step is None:
        max_step = default_max_step(params, profile)
    integrator = IntegratorConfig(
        method=method,
        rel_tol=_number(int_tab, "rel_tol", "[integrator]", default=1e-9),
        abs_tol=_number(int_tab, "abs_tol", "[integrator]", default=1e-12),
        max_step=max_step,
        sample_stride=stride,
    )

    out_tab = raw.get("output", {})
    _reject_unknown(out_tab, _OUTPUT_KEYS, "[output]")
    csv_path = out_tab.get("csv")
    if csv_path is not None:
        if not isinstance(csv_path, str):
            raise ConfigurationError(f"[output].csv must be a path string, got {csv_path!r}")
        csv_path = Path(csv_path)
        if base_dir is not None and not csv_path.is_absolute():
            csv_path = Path(base_dir) / csv_path

    return ExperimentConfig(
        params=params,
        profile=profile,
        resonance=resonance,
        space=space,
        initial_state=psi0,
        t_end=float(t_end),
        frame=frame,
        integrator=integrator,
        csv_path=csv_path,
    )


def load_config(path) -> ExperimentConfig:
    path = Path(path)
    return build_config(load_config_dict(path), base_dir=path.parent)
