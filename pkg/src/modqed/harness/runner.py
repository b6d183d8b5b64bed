"""Run configured simulations, emit CSV, compare exact against effective.

CSV numbers are written with 17 significant digits so a parsed file
reproduces the stored float64 values bitwise; two runs of the same config
produce byte-identical files.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from ..dynamics import Trajectory, evolve, evolve_constant
from ..errors import ConfigurationError
from ..hamiltonians import (
    ResonanceKind,
    ResonanceSpec,
    coupling_builder,
    effective_hamiltonian,
    interaction_builder,
    rabi_builder,
    resonance_table,
)
from ..modulation import ModulationTarget
from .config import ExperimentConfig

__all__ = [
    "run",
    "compare",
    "ComparisonReport",
    "select_builder",
    "write_trajectory_csv",
    "read_trajectory_csv",
    "resonance_table",
]


def select_builder(config: ExperimentConfig):
    if config.profile.target is ModulationTarget.COUPLING:
        return coupling_builder(config.params, config.profile, config.space)
    if config.frame == "lab":
        return rabi_builder(config.params, config.profile, config.space)
    return interaction_builder(config.params, config.profile, config.space)


def write_trajectory_csv(traj: Trajectory, path) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    nf = traj.space.n_fock
    header = ["t", "norm_error", "n_mean", "P_g", "P_e"]
    header += [f"P_g_{m}" for m in range(nf)]
    header += [f"P_e_{m}" for m in range(nf)]
    cols = np.column_stack(
        [traj.times, traj.norm_error, traj.n_mean, traj.p_g, traj.p_e, traj.pops]
    )
    with open(path, "w", newline="") as fh:
        fh.write(",".join(header) + "\n")
        for row in cols:
            fh.write(",".join("%.17g" % v for v in row) + "\n")
    return path


def read_trajectory_csv(path) -> dict:
    """Columns of an emitted file, keyed by header name."""
    path = Path(path)
    with open(path, "r", newline="") as fh:
        header = fh.readline().strip().split(",")
        data = np.loadtxt(fh, delimiter=",", ndmin=2)
    if data.shape[1] != len(header):
        raise ConfigurationError(f"{path}: {len(header)} columns in header, {data.shape[1]} in data")
    return {name: data[:, i].copy() for i, name in enumerate(header)}


def run(config: ExperimentConfig, csv_path=None, sample_times=None) -> Trajectory:
    """Integrate one configuration; write CSV when a path is configured."""
    builder = select_builder(config)
    traj = evolve(
        builder,
        config.initial_state,
        config.t_end,
        config.integrator,
        sample_times=sample_times,
    )
    target = csv_path if csv_path is not None else config.csv_path
    if target is not None:
        write_trajectory_csv(traj, target)
    return traj


def _initial_atom(config: ExperimentConfig) -> str:
    nf = config.space.n_fock
    amps = config.initial_state.amplitudes
    mass_g = float(np.sum(np.abs(amps[:nf]) ** 2))
    if mass_g > 1.0 - 1e-12:
        return "g"
    if mass_g < 1e-12:
        return "e"
    return "mixed"


@dataclass(frozen=True)
class ComparisonReport:
    """Exact vs effective dynamics on the shared sample grid.

    sup_distance is the largest entrywise population-table gap over the
    run; validity_horizon is the first sampled time the gap exceeds the
    threshold (t_end when it never does, with exceeded=False).
    advisory_horizon tracks the dispersive-regime figure of merit
    g0 sqrt(<n>)/|Delta_-| crossing 0.3 on the exact run.
    """

    sup_distance: float
    rms: dict
    threshold: float
    validity_horizon: float
    exceeded: bool
    advisory_horizon: float
    advisory_exceeded: bool
    exact: Trajectory
    effective: Trajectory


def compare(config: ExperimentConfig, effective_kind=None, threshold: float = 0.1) -> ComparisonReport:
    """Twin runs: exact picture vs the matching static effective generator."""
    if config.resonance is None:
        raise ConfigurationError("compare needs a [resonance] table in the config")
    if effective_kind is None:
        kind = config.resonance.kind
    elif isinstance(effective_kind, ResonanceKind):
        kind = effective_kind
    else:
        try:
            kind = ResonanceKind(effective_kind)
        except ValueError:
            raise ConfigurationError(
                f"effective_kind must be one of {[k.value for k in ResonanceKind]}, "
                f"got {effective_kind!r}"
            ) from None
    spec = ResonanceSpec(kind=kind, K=config.resonance.K, xi=config.resonance.xi)

    exact = run(config)
    h_eff = effective_hamiltonian(
        spec, config.params, config.profile, config.space, initial_atom=_initial_atom(config)
    )
    eff = evolve_constant(h_eff, config.initial_state, exact.times)

    gap = np.abs(exact.pops - eff.pops).max(axis=1)
    sup = float(gap.max())
    over = np.nonzero(gap > threshold)[0]
    exceeded = over.size > 0
    horizon = float(exact.times[over[0]]) if exceeded else float(config.t_end)

    rms = {
        name: float(np.sqrt(np.mean((exact.observable(name) - eff.observable(name)) ** 2)))
        for name in ("n_mean", "P_g", "P_e")
    }

    from ..modulation import deltas

    _, dm = deltas(config.params, config.profile)
    merit = config.params.g0 * np.sqrt(np.clip(exact.n_mean, 0.0, None)) / abs(dm)
    adv = np.nonzero(merit > 0.3)[0]
    advisory_exceeded = adv.size > 0
    advisory_horizon = float(exact.times[adv[0]]) if advisory_exceeded else float(config.t_end)
    if advisory_exceeded:
        warnings.warn(
            f"dispersive figure of merit g0*sqrt(<n>)/|Delta_-| exceeds 0.3 from "
            f"t={advisory_horizon:.6g}; the effective picture is not trustworthy there",
            RuntimeWarning,
            stacklevel=2,
        )

    return ComparisonReport(
        sup_distance=sup,
        rms=rms,
        threshold=threshold,
        validity_horizon=horizon,
        exceeded=exceeded,
        advisory_horizon=advisory_horizon,
        advisory_exceeded=advisory_exceeded,
        exact=exact,
        effective=eff,
    )
