"""Schrodinger-equation integration and trajectory analysis.

evolve() drives any Hamiltonian builder with either an embedded adaptive
pair (DOP853) or a fixed-step classic RK4. The state is never renormalized:
norm drift is kept as an error signal and must stay below 1e-8 over a run
at default tolerances.

Sampling happens on accepted steps (every cfg.sample_stride of them) or,
when sample_times is given to the adaptive method, by dense-output
interpolation on an exact caller-chosen grid. The latter is what makes
twin-run comparisons (frames, truncation levels, exact vs effective)
meaningful at the 1e-6 level: both runs share bitwise-identical times.
"""

from __future__ import annotations

import enum
import math
import re
import warnings
from dataclasses import dataclass, field

import numpy as np
from scipy.integrate import DOP853
from scipy.optimize import least_squares

from .errors import ConfigurationError, FitError, IntegrationError
from .hilbert import QuantumState, SpaceDescriptor, photon_numbers
from .modulation import ModulationProfile, SystemParams, deltas


class IntegratorMethod(enum.Enum):
    ADAPTIVE = "adaptive"
    RK4 = "rk4"


@dataclass(frozen=True)
class IntegratorConfig:
    """Step control. max_step doubles as the fixed step for the RK4 method."""

    method: IntegratorMethod = IntegratorMethod.ADAPTIVE
    rel_tol: float = 1e-9
    abs_tol: float = 1e-12
    max_step: float | None = None
    sample_stride: int = 20

    def __post_init__(self):
        if isinstance(self.method, str):
            try:
                object.__setattr__(self, "method", IntegratorMethod(self.method))
            except ValueError:
                raise ConfigurationError(
                    f"unknown integrator method {self.method!r}; "
                    f"expected one of {[m.value for m in IntegratorMethod]}"
                ) from None
        for name in ("rel_tol", "abs_tol"):
            v = getattr(self, name)
            if not (0.0 < v <= 1e-4):
                raise ConfigurationError(f"{name} must lie in (0, 1e-4], got {v}")
        if self.max_step is not None and not (
            math.isfinite(self.max_step) and self.max_step > 0
        ):
            raise ConfigurationError(f"max_step must be positive and finite, got {self.max_step}")
        if not isinstance(self.sample_stride, (int, np.integer)) or self.sample_stride < 1:
            raise ConfigurationError(f"sample_stride must be an integer >= 1, got {self.sample_stride}")
        if self.method is IntegratorMethod.RK4 and self.max_step is None:
            raise ConfigurationError("the fixed-step method needs max_step as its step size")


def default_max_step(params: SystemParams, profile: ModulationProfile) -> float:
    """2*pi/(50*eta): fifty steps per drive period.

    Without a drive (epsilon = 0) the fastest retained phase sets the scale
    instead: max(|Delta_+|, |Delta_-|, omega).
    """
    if profile.epsilon != 0.0:
        return 2.0 * math.pi / (50.0 * profile.eta)
    dp, dm = deltas(params, profile)
    fastest = max(abs(dp), abs(dm), params.omega)
    return 2.0 * math.pi / (50.0 * fastest)


@dataclass(frozen=True)
class Trajectory:
    """Recorded observables along one integration.

    pops holds the joint-basis probability table, one row per sample, in
    the atom-major column order of hilbert.py. norm_error is ||psi||^2 - 1
    in magnitude; times are strictly increasing.
    """

    space: SpaceDescriptor
    times: np.ndarray
    pops: np.ndarray
    norm_error: np.ndarray
    final_amplitudes: np.ndarray
    n_mean: np.ndarray = field(init=False)
    p_g: np.ndarray = field(init=False)
    p_e: np.ndarray = field(init=False)

    def __post_init__(self):
        if np.any(np.diff(self.times) <= 0):
            raise ValueError("trajectory times must be strictly increasing")
        m = photon_numbers(self.space)
        nf = self.space.n_fock
        object.__setattr__(self, "n_mean", self.pops @ m)
        object.__setattr__(self, "p_g", self.pops[:, :nf].sum(axis=1))
        object.__setattr__(self, "p_e", self.pops[:, nf:].sum(axis=1))

    def population(self, atom: str, m: int) -> np.ndarray:
        from .hilbert import basis_index

        return self.pops[:, basis_index(self.space, atom, m)]

    def observable(self, name: str) -> np.ndarray:
        """Resolve a column by name: n_mean, P_g, P_e, or P_{g|e}_{m}."""
        if name == "n_mean":
            return self.n_mean
        if name == "P_g":
            return self.p_g
        if name == "P_e":
            return self.p_e
        match = re.fullmatch(r"P_([ge])_(\d+)", name)
        if match:
            m = int(match.group(2))
            if m > self.space.n_max:
                raise ConfigurationError(f"observable {name!r} exceeds n_max={self.space.n_max}")
            return self.population(match.group(1), m)
        raise ConfigurationError(f"unknown observable {name!r}")

    @property
    def final_state(self) -> QuantumState:
        return QuantumState(self.space, self.final_amplitudes)


def _check_initial_tail(psi0: QuantumState) -> None:
    space = psi0.space
    m = photon_numbers(space)
    tail = float(np.sum(np.abs(psi0.amplitudes[m >= space.n_max - 2]) ** 2))
    if tail > 1e-9:
        raise ConfigurationError(
            f"initial state carries {tail:.3e} probability within two levels of the "
            f"truncation edge (n_max={space.n_max}); enlarge the space"
        )


def _finalize(space, times, pops, norm_err, y_final, drift_tol=1e-8) -> Trajectory:
    times = np.asarray(times, dtype=float)
    pops = np.asarray(pops, dtype=float)
    norm_err = np.asarray(norm_err, dtype=float)
    worst = float(norm_err.max()) if norm_err.size else 0.0
    if worst > drift_tol:
        warnings.warn(
            f"norm drift {worst:.3e} exceeds {drift_tol:.1e}; tighten tolerances",
            RuntimeWarning,
            stacklevel=3,
        )
    return Trajectory(
        space=space,
        times=times,
        pops=pops,
        norm_error=norm_err,
        final_amplitudes=y_final.copy(),
    )


def evolve(
    builder,
    psi0: QuantumState,
    t_end: float,
    cfg: IntegratorConfig | None = None,
    sample_times: np.ndarray | None = None,
) -> Trajectory:
    """Integrate i dpsi/dt = H(t) psi from t=0 to t_end.

    builder maps a time to the Hamiltonian matrix. With the default
    adaptive method, samples land on every sample_stride-th accepted step
    plus t_end, or exactly on sample_times when given. The fixed-step
    method records on its own uniform grid and rejects sample_times.
    """
    if cfg is None:
        cfg = IntegratorConfig()
    if not (math.isfinite(t_end) and t_end > 0):
        raise ConfigurationError(f"t_end must be positive and finite, got {t_end}")
    _check_initial_tail(psi0)
    space = psi0.space
    y0 = psi0.amplitudes.astype(np.complex128, copy=True)

    if sample_times is not None:
        if cfg.method is IntegratorMethod.RK4:
            raise ConfigurationError(
                "sample_times requires the adaptive method; the fixed-step "
                "integrator records on its own grid"
            )
        sample_times = np.asarray(sample_times, dtype=float)
        if sample_times.ndim != 1 or sample_times.size == 0:
            raise ConfigurationError("sample_times must be a non-empty 1-d array")
        if np.any(np.diff(sample_times) <= 0):
            raise ConfigurationError("sample_times must be strictly increasing")
        if sample_times[0] < 0 or sample_times[-1] > t_end * (1 + 1e-12):
            raise ConfigurationError("sample_times must lie within [0, t_end]")

    def rhs(t, y):
        return -1j * (builder(t) @ y)

    times: list[float] = []
    pops: list[np.ndarray] = []
    norm_err: list[float] = []

    def record(t: float, y: np.ndarray) -> None:
        p = np.abs(y) ** 2
        times.append(t)
        pops.append(p)
        norm_err.append(abs(float(p.sum()) - 1.0))

    if cfg.method is IntegratorMethod.RK4:
        return _evolve_rk4(builder, y0, t_end, cfg, space, record, times, pops, norm_err)

    max_step = cfg.max_step if cfg.max_step is not None else np.inf
    solver = DOP853(
        rhs, 0.0, y0, t_bound=t_end, rtol=cfg.rel_tol, atol=cfg.abs_tol, max_step=max_step
    )

    if sample_times is None:
        record(0.0, y0)
        accepted = 0
        while solver.status == "running":
            message = solver.step()
            if solver.status == "failed":
                raise IntegrationError(
                    f"adaptive step failed near t={solver.t:.9g}: {message or 'step-size underflow'}"
                )
            accepted += 1
            if accepted % cfg.sample_stride == 0 and solver.t < t_end:
                record(solver.t, solver.y)
        record(solver.t, solver.y)
    else:
        pending = 0
        while pending < sample_times.size and sample_times[pending] <= 0.0:
            record(float(sample_times[pending]), y0)
            pending += 1
        while solver.status == "running":
            message = solver.step()
            if solver.status == "failed":
                raise IntegrationError(
                    f"adaptive step failed near t={solver.t:.9g}: {message or 'step-size underflow'}"
                )
            if pending < sample_times.size and sample_times[pending] <= solver.t:
                sol = solver.dense_output()
                while pending < sample_times.size and sample_times[pending] <= solver.t:
                    ts = float(sample_times[pending])
                    record(ts, sol(ts))
                    pending += 1
        while pending < sample_times.size:
            # grid points equal to t_end up to roundoff
            record(float(sample_times[pending]), solver.y)
            pending += 1

    return _finalize(space, times, pops, norm_err, solver.y, drift_tol=1e-8)


def _evolve_rk4(builder, y0, t_end, cfg, space, record, times, pops, norm_err) -> Trajectory:
    n_steps = max(1, math.ceil(t_end / cfg.max_step))
    h = t_end / n_steps
    y = y0
    record(0.0, y)
    for i in range(n_steps):
        t = i * h
        k1 = -1j * (builder(t) @ y)
        half = builder(t + 0.5 * h)
        k2 = -1j * (half @ (y + 0.5 * h * k1))
        k3 = -1j * (half @ (y + 0.5 * h * k2))
        k4 = -1j * (builder(t + h) @ (y + h * k3))
        y = y + (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4)
        step_no = i + 1
        if step_no % cfg.sample_stride == 0 and step_no != n_steps:
            record(step_no * h, y)
    record(t_end, y)
    return _finalize(space, times, pops, norm_err, y, drift_tol=1e-8)


def evolve_constant(
    h: np.ndarray, psi0: QuantumState, times: np.ndarray
) -> Trajectory:
    """Propagate a time-independent Hamiltonian by eigendecomposition.

    Exact up to the dense eigensolver: used both as an oracle for the
    steppers and as the cheap path for effective (static) generators.
    """
    times = np.asarray(times, dtype=float)
    if np.any(np.diff(times) <= 0) or times[0] < 0:
        raise ConfigurationError("times must be strictly increasing and non-negative")
    _check_initial_tail(psi0)
    space = psi0.space
    evals, vecs = np.linalg.eigh(h)
    coeffs = vecs.conj().T @ psi0.amplitudes
    phases = np.exp(-1j * np.outer(times, evals))
    states = (phases * coeffs) @ vecs.T
    pops = np.abs(states) ** 2
    norm_err = np.abs(pops.sum(axis=1) - 1.0)
    return Trajectory(
        space=space,
        times=times,
        pops=pops,
        norm_error=norm_err,
        final_amplitudes=states[-1].copy(),
    )


@dataclass(frozen=True)
class FrameEquivalenceReport:
    distance: float
    lab: Trajectory
    interaction: Trajectory


def frame_populations_equivalence(
    params: SystemParams,
    profile: ModulationProfile,
    psi0: QuantumState,
    t_end: float,
    cfg: IntegratorConfig | None = None,
) -> FrameEquivalenceReport:
    """Sup-over-time population distance between lab and interaction frames.

    The free part removed by the frame change is diagonal in the joint
    basis, so the populations must agree; the distance measures integrator
    error only and should stay below max(10*rel_tol, 1e-6).
    """
    from .hamiltonians import interaction_builder, rabi_builder

    if cfg is None:
        cfg = IntegratorConfig()
    inter = evolve(interaction_builder(params, profile, psi0.space), psi0, t_end, cfg)
    lab = evolve(
        rabi_builder(params, profile, psi0.space), psi0, t_end, cfg, sample_times=inter.times
    )
    distance = float(np.abs(inter.pops - lab.pops).max())
    return FrameEquivalenceReport(distance=distance, lab=lab, interaction=inter)


@dataclass(frozen=True)
class TruncationReport:
    n_list: tuple
    max_n_diff: float
    tail_max: tuple
    converged: bool
    grids_shared: bool


def truncation_check(run, n_list) -> TruncationReport:
    """Re-run a simulation at several truncation levels and compare.

    run is a closure n_max -> Trajectory. Reports the largest |<n>|
    difference between consecutive levels and each level's maximal
    population within two rungs of its own edge; a tail above 1e-6 flags
    non-convergence. When the closure samples all levels on one shared
    grid the comparison is exact, otherwise <n> is interpolated.
    """
    n_list = tuple(int(n) for n in n_list)
    if len(n_list) < 2 or any(b <= a for a, b in zip(n_list, n_list[1:])):
        raise ConfigurationError("n_list needs at least two increasing entries")
    trajs = [run(n) for n in n_list]
    tails = []
    for traj in trajs:
        m = photon_numbers(traj.space)
        tails.append(float(traj.pops[:, m >= traj.space.n_max - 2].sum(axis=1).max()))
    max_diff = 0.0
    shared = True
    for a, b in zip(trajs, trajs[1:]):
        if a.times.shape == b.times.shape and np.array_equal(a.times, b.times):
            diff = float(np.abs(a.n_mean - b.n_mean).max())
        else:
            shared = False
            nb = np.interp(a.times, b.times, b.n_mean)
            diff = float(np.abs(a.n_mean - nb).max())
        max_diff = max(max_diff, diff)
    converged = all(t <= 1e-6 for t in tails)
    return TruncationReport(
        n_list=n_list,
        max_n_diff=max_diff,
        tail_max=tuple(tails),
        converged=converged,
        grids_shared=shared,
    )


@dataclass(frozen=True)
class FitResult:
    frequency: float
    amplitude: float
    offset: float
    residual: float


def _fit_candidates(t: np.ndarray, y: np.ndarray) -> list[float]:
    """Angular-frequency guesses for the cos(2 nu t) component of y."""
    n = t.size
    tu = np.linspace(t[0], t[-1], n)
    yu = np.interp(tu, t, y) if not np.allclose(np.diff(t), tu[1] - tu[0]) else y
    spec = np.abs(np.fft.rfft(yu - yu.mean()))
    spec[0] = 0.0
    dw = 2.0 * math.pi / (tu[-1] - tu[0])
    order = np.argsort(spec)[::-1][:5]
    cands = []
    for k in order:
        if spec[k] == 0.0 or k == 0:
            continue
        # parabolic peak interpolation when neighbors exist
        kf = float(k)
        if 1 <= k < spec.size - 1:
            a, b, c = spec[k - 1], spec[k], spec[k + 1]
            denom = a - 2 * b + c
            if denom != 0:
                kf += 0.5 * (a - c) / denom
        cands.append(0.5 * kf * dw)
    imax, imin = int(np.argmax(y)), int(np.argmin(y))
    dt = abs(t[imax] - t[imin])
    if dt > 0:
        cands.append(0.5 * math.pi / dt)
    return cands or [math.pi / (t[-1] - t[0])]


def fit_oscillation(traj: Trajectory, observable: str) -> FitResult:
    """Least-squares fit of A sin^2(nu t) + B to a named observable.

    Initial guesses come from the FFT of the signal (plus an
    extremum-spacing fallback); every candidate is refined and the lowest
    residual wins. Fails when the best RMS residual exceeds 0.2 |A|. Spans
    shorter than 1.5 oscillation periods only warn: the refinement often
    still converges there, but the result deserves suspicion.
    """
    t = traj.times
    y = traj.observable(observable)
    if t.size < 8:
        raise FitError("too few samples to fit an oscillation")
    spread = float(np.ptp(y))
    if spread == 0.0:
        raise FitError(f"observable {observable!r} is constant; no oscillation to fit")

    def model(p, tt):
        a, b, nu = p
        return a * np.sin(nu * tt) ** 2 + b

    best = None
    for nu0 in _fit_candidates(t, y):
        x0 = np.array([spread, float(y.min()), nu0])
        try:
            res = least_squares(lambda p: model(p, t) - y, x0, method="lm", max_nfev=2000)
        except Exception:
            continue
        rms = float(np.sqrt(np.mean(res.fun**2)))
        if best is None or rms < best[0]:
            best = (rms, res.x)
    if best is None:
        raise FitError("oscillation fit did not converge for any initial guess")
    rms, (a, b, nu) = best
    nu = abs(float(nu))
    a, b = float(a), float(b)
    if rms > 0.2 * abs(a):
        raise FitError(
            f"no dominant sin^2 oscillation in {observable!r}: "
            f"RMS residual {rms:.3e} > 0.2*|A| = {0.2 * abs(a):.3e}"
        )
    span_periods = nu * (t[-1] - t[0]) / math.pi
    if span_periods < 1.5:
        warnings.warn(
            f"trajectory spans only {span_periods:.2f} oscillation periods; "
            "the fitted frequency may be poorly constrained",
            RuntimeWarning,
            stacklevel=2,
        )
    return FitResult(frequency=nu, amplitude=a, offset=b, residual=rms)
