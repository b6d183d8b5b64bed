"""Hamiltonian builders and resonance bookkeeping.

Exact generators come in three flavors: the lab-frame generator (atom
frequency modulated), its interaction picture with respect to the
time-dependent free part, and the coupling-modulated interaction picture.
Time-independent effective generators cover the three first-class
resonances (AJC, JC, DCE) in their final rotating frames, plus the
intermediate DCE form used to study where the quadratic approximation
breaks.

Builders named *_builder return a closure t -> ndarray used by the
integrator; the single-shot functions evaluate one time and assert
Hermiticity. All matrices follow the atom-major basis of hilbert.py.
"""

from __future__ import annotations

import cmath
import dataclasses
import enum
import math
import warnings
from dataclasses import dataclass

import numpy as np

from .errors import (
    ConfigurationError,
    DegenerateResonanceError,
    DispersiveRegimeError,
)
from .hilbert import SpaceDescriptor, build_operators
from .modulation import (
    ModulationProfile,
    ModulationTarget,
    SystemParams,
    check_modulation_strength,
    complex_g,
    deltas,
    evaluate_f,
    lambda_coefficients,
    series_fourier_coefficient,
)


class ResonanceKind(enum.Enum):
    AJC = "ajc"
    JC = "jc"
    DCE = "dce"


@dataclass(frozen=True)
class ResonanceSpec:
    """Which resonance to target, at which order K, with frequency shift xi."""

    kind: ResonanceKind
    K: int = 1
    xi: float = 0.0

    def __post_init__(self):
        if isinstance(self.kind, str):
            try:
                object.__setattr__(self, "kind", ResonanceKind(self.kind.lower()))
            except ValueError:
                raise ConfigurationError(f"bad resonance kind {self.kind!r}") from None
        if not isinstance(self.kind, ResonanceKind):
            raise ConfigurationError(f"bad resonance kind {self.kind!r}")
        if not isinstance(self.K, (int, np.integer)) or self.K < 1:
            raise ConfigurationError(f"resonance order K must be an integer >= 1, got {self.K!r}")
        if not math.isfinite(self.xi):
            raise ConfigurationError("xi must be finite")


def resonance_frequency(
    spec: ResonanceSpec, params: SystemParams, profile: ModulationProfile
) -> float:
    """Modulation frequency hitting the requested resonance.

    First-order targets: eta_AJC = Delta_+ - xi, eta_JC = |Delta_-| - xi,
    eta_DCE = 2 omega - 2 xi; a K-th order process divides the result by K.
    Only epsilon*c_0 of the profile enters (through Delta_pm), so no
    fixed-point iteration in eta is needed.
    """
    dp, dm = deltas(params, profile)
    if spec.kind is ResonanceKind.AJC:
        eta1 = dp - spec.xi
    elif spec.kind is ResonanceKind.JC:
        if dm == 0.0:
            raise DegenerateResonanceError("JC resonance undefined at Delta_- = 0")
        eta1 = abs(dm) - spec.xi
    else:
        eta1 = 2.0 * params.omega - 2.0 * spec.xi
    eta = eta1 / spec.K
    if eta <= 0:
        raise ConfigurationError(
            f"resonance {spec.kind.value} (K={spec.K}, xi={spec.xi}) gives eta={eta} <= 0"
        )
    if abs(spec.xi) > 0.1 * eta:
        warnings.warn(
            f"|xi|/eta = {abs(spec.xi) / eta:.3g} exceeds 0.1; xi should be a small shift",
            RuntimeWarning,
            stacklevel=2,
        )
    return eta


@dataclass(frozen=True)
class DispersiveQuantities:
    """Dispersive shift and resonant weights at the profile's drive frequency.

    delta_K keeps only the leading correction g0^2/Delta_+ on top of delta;
    the omitted pieces are O((epsilon/eta)^2) relative, so K > 1 tunings
    based on it may need an empirical xi sweep.
    """

    delta: float
    delta_K: float
    theta: complex
    theta_K: complex


def dispersive_quantities(
    params: SystemParams, profile: ModulationProfile, spec: ResonanceSpec
) -> DispersiveQuantities:
    dp, dm = deltas(params, profile)
    if dm == 0.0:
        raise DispersiveRegimeError("dispersive quantities undefined at Delta_- = 0")
    delta = params.g0**2 / dm
    delta_K = delta + params.g0**2 / dp
    lam = lambda_coefficients(profile)
    lam1 = lam[0] if len(lam) else 0j
    theta = lam1 * profile.epsilon / profile.eta
    theta_K = series_fourier_coefficient(profile, spec.K)
    return DispersiveQuantities(delta=delta, delta_K=delta_K, theta=theta, theta_K=theta_K)


def _require_hermitian(h: np.ndarray) -> np.ndarray:
    scale = max(1.0, float(np.abs(h).max()))
    dev = float(np.abs(h - h.conj().T).max())
    if dev > 1e-12 * scale:
        raise ValueError(f"generator is not Hermitian: max deviation {dev:.3e}")
    return h


def _fast_waveform(profile: ModulationProfile):
    """Scalar f(t) without numpy overhead, for per-step builder calls."""
    sin_terms = [
        (k * profile.eta, profile.s_k(k)) for k in range(1, profile.kmax + 1) if profile.s_k(k)
    ]
    cos_terms = [
        (k * profile.eta, profile.c_k(k)) for k in range(1, profile.kmax + 1) if profile.c_k(k)
    ]
    c0 = profile.c_k(0)

    def f(t: float) -> float:
        val = c0
        for w, amp in sin_terms:
            val += amp * math.sin(w * t)
        for w, amp in cos_terms:
            val += amp * math.cos(w * t)
        return val

    return f


def _fast_periodic_phase(profile: ModulationProfile):
    """Scalar periodic part of Xi_pm(t), precomputed coefficient lists."""
    r = profile.epsilon / profile.eta
    one_minus_cos = [
        (k * profile.eta, r * profile.s_k(k) / k)
        for k in range(1, profile.kmax + 1)
        if profile.s_k(k)
    ]
    sin_part = [
        (k * profile.eta, r * profile.c_k(k) / k)
        for k in range(1, profile.kmax + 1)
        if profile.c_k(k)
    ]

    def periodic(t: float) -> float:
        val = 0.0
        for w, amp in one_minus_cos:
            val += amp * (1.0 - math.cos(w * t))
        for w, amp in sin_part:
            val += amp * math.sin(w * t)
        return val

    return periodic


def _coupling_blocks(space: SpaceDescriptor):
    """Mm = a sigma_+ and Mp = a^dag sigma_+ with their daggers."""
    ops = build_operators(space)
    mm = ops.a @ ops.sigma_plus
    mp = ops.a_dag @ ops.sigma_plus
    return mm, mm.conj().T.copy(), mp, mp.conj().T.copy()


def rabi_builder(params: SystemParams, profile: ModulationProfile, space: SpaceDescriptor):
    """Lab-frame generator omega n + Omega(t) sigma_z / 2 + g0 (a + a^dag)(sigma_+ + sigma_-)."""
    if profile.target is not ModulationTarget.ATOM:
        raise ConfigurationError("the lab-frame builder models atom-frequency modulation only")
    check_modulation_strength(params, profile)
    ops = build_operators(space)
    coupling = params.g0 * (ops.a + ops.a_dag) @ (ops.sigma_plus + ops.sigma_minus)
    base_diag = params.omega * np.real(np.diag(ops.n)).copy()
    half_sz = 0.5 * np.real(np.diag(ops.sigma_z)).copy()
    f = _fast_waveform(profile)
    eps = profile.epsilon
    omega0 = params.Omega0
    dim = space.dim

    def build(t: float) -> np.ndarray:
        h = coupling.copy()
        h.flat[:: dim + 1] += base_diag + (omega0 + eps * f(t)) * half_sz
        return h

    return build


def interaction_builder(params: SystemParams, profile: ModulationProfile, space: SpaceDescriptor):
    """Interaction picture of the lab generator w.r.t. its time-dependent free part.

    H_I(t) = g0 [ e^{i Xi_-} a sigma_+ + e^{i Xi_+} a^dag sigma_+ ] + h.c.
    The free part is diagonal in the joint basis, so populations agree with
    the lab frame at all times.
    """
    if profile.target is not ModulationTarget.ATOM:
        raise ConfigurationError(
            "interaction_builder models atom-frequency modulation; "
            "use coupling_builder for a modulated coupling"
        )
    check_modulation_strength(params, profile)
    mm, mmd, mp, mpd = _coupling_blocks(space)
    dp, dm = deltas(params, profile)
    periodic = _fast_periodic_phase(profile)
    g0 = params.g0

    def build(t: float) -> np.ndarray:
        p = periodic(t)
        cm = g0 * cmath.exp(1j * (dm * t + p))
        cp = g0 * cmath.exp(1j * (dp * t + p))
        return cm * mm + cm.conjugate() * mmd + cp * mp + cp.conjugate() * mpd

    return build


def coupling_builder(params: SystemParams, profile: ModulationProfile, space: SpaceDescriptor):
    """Interaction picture with a modulated coupling g0(t) = g0 + epsilon f(t).

    H_I(t) = g0(t) [ e^{i (Omega0 - omega) t} a sigma_+
                   + e^{i (Omega0 + omega) t} a^dag sigma_+ ] + h.c.
    """
    if profile.target is not ModulationTarget.COUPLING:
        raise ConfigurationError("coupling_builder requires target = coupling")
    tt = np.linspace(0.0, profile.period(), 2048)
    if params.g0 + profile.epsilon * np.min(evaluate_f(profile, tt)) < 0:
        warnings.warn(
            "g0(t) = g0 + epsilon f(t) changes sign over one drive period",
            RuntimeWarning,
            stacklevel=2,
        )
    mm, mmd, mp, mpd = _coupling_blocks(space)
    wm = params.Omega0 - params.omega
    wp = params.Omega0 + params.omega
    f = _fast_waveform(profile)
    g0 = params.g0
    eps = profile.epsilon

    def build(t: float) -> np.ndarray:
        g = g0 + eps * f(t)
        cm = g * cmath.exp(1j * wm * t)
        cp = g * cmath.exp(1j * wp * t)
        return cm * mm + cm.conjugate() * mmd + cp * mp + cp.conjugate() * mpd

    return build


def rabi_hamiltonian(
    params: SystemParams, profile: ModulationProfile, space: SpaceDescriptor, t: float
) -> np.ndarray:
    return _require_hermitian(rabi_builder(params, profile, space)(t))


def interaction_hamiltonian(
    params: SystemParams, profile: ModulationProfile, space: SpaceDescriptor, t: float
) -> np.ndarray:
    return _require_hermitian(interaction_builder(params, profile, space)(t))


def coupling_modulated_hamiltonian(
    params: SystemParams, profile: ModulationProfile, space: SpaceDescriptor, t: float
) -> np.ndarray:
    return _require_hermitian(coupling_builder(params, profile, space)(t))


def _dispersive_advisory(params: SystemParams, dm: float) -> None:
    if params.g0 > 0.3 * abs(dm):
        warnings.warn(
            f"g0/|Delta_-| = {params.g0 / abs(dm):.3g} exceeds 0.3; "
            "the dispersive expansion is unreliable here",
            RuntimeWarning,
            stacklevel=3,
        )


def effective_hamiltonian(
    spec: ResonanceSpec,
    params: SystemParams,
    profile: ModulationProfile,
    space: SpaceDescriptor,
    initial_atom: str = "g",
) -> np.ndarray:
    """Time-independent effective generator in the resonance's rotating frame.

    AJC:  [xi + delta (1 + 2n)] sigma_z / 2 + (g theta a^dag sigma_+ + h.c.)
    JC :  [xi + delta (1 + 2n)] sigma_z / 2 + (g theta a sigma_+ + h.c.),
          with theta -> -theta^*, xi -> -xi when Delta_- < 0
    DCE:  (xi - delta) n - delta (theta^* a^2 + h.c.)   for the atom in 'g';
          delta -> -delta for the atom in 'e' (superpositions unsupported)

    For K > 1 the pair (delta, theta) is replaced by (delta_K, theta_K).
    The rotating frames are diagonal in the joint basis for AJC/JC, and
    near-identity in the dispersive regime for DCE, so joint-basis
    populations are the observables to compare against exact runs.
    """
    check_modulation_strength(params, profile)
    dp, dm = deltas(params, profile)
    dq = dispersive_quantities(params, profile, spec)
    _dispersive_advisory(params, dm)
    de = dq.delta if spec.K == 1 else dq.delta_K
    th = dq.theta if spec.K == 1 else dq.theta_K
    g = complex_g(params, profile)
    ops = build_operators(space)
    xi = spec.xi

    if spec.kind in (ResonanceKind.AJC, ResonanceKind.JC):
        if spec.kind is ResonanceKind.JC and dm < 0:
            th = -np.conj(th)
            xi = -xi
        diag = 0.5 * (xi * ops.sigma_z + de * (ops.sigma_z + 2.0 * ops.n @ ops.sigma_z))
        ladder = ops.a_dag if spec.kind is ResonanceKind.AJC else ops.a
        coupling = g * th * ladder @ ops.sigma_plus
        h = diag + coupling + coupling.conj().T
    else:
        if initial_atom not in ("g", "e"):
            raise ConfigurationError(
                "the quadratic DCE form needs a definite initial atom state 'g' or 'e'; "
                "atom superpositions are not supported"
            )
        de_eff = de if initial_atom == "g" else -de
        a2 = ops.a @ ops.a
        quad = -de_eff * np.conj(th) * a2
        h = (xi - de_eff) * ops.n + quad + quad.conj().T
    return _require_hermitian(h)


def dce_intermediate_hamiltonian(
    spec: ResonanceSpec,
    params: SystemParams,
    profile: ModulationProfile,
    space: SpaceDescriptor,
    t: float = 0.0,
    form: str = "pre",
) -> np.ndarray:
    """Stages of the DCE reduction, for studying where it breaks.

    form="pre": the time-independent generator before the dispersive
    transformation,
        xi n + (Delta_- + xi) sigma_z / 2 + (g a sigma_+ + g theta a^dag sigma_+ + h.c.)
    form="effective": the quadratic form evaluated at time t, including the
    cubic correction responsible for the growth interruption,
        (xi + delta sigma_z) n + delta sigma_z (theta^* a^2 + h.c.)
        - (2 delta / Delta_-) (g e^{i Delta_- t} a n sigma_+ + h.c.)
    """
    if spec.kind is not ResonanceKind.DCE:
        raise ConfigurationError("intermediate form is defined for the DCE resonance")
    dp, dm = deltas(params, profile)
    dq = dispersive_quantities(params, profile, spec)
    _dispersive_advisory(params, dm)
    g = complex_g(params, profile)
    th = dq.theta if spec.K == 1 else dq.theta_K
    ops = build_operators(space)
    if form == "pre":
        ladder = g * ops.a @ ops.sigma_plus + g * th * ops.a_dag @ ops.sigma_plus
        h = spec.xi * ops.n + 0.5 * (dm + spec.xi) * ops.sigma_z + ladder + ladder.conj().T
    elif form == "effective":
        delta = dq.delta
        a2 = ops.a @ ops.a
        quad = delta * np.conj(th) * ops.sigma_z @ a2
        corr = -(2.0 * delta / dm) * g * cmath.exp(1j * dm * t) * (
            ops.a @ ops.n @ ops.sigma_plus
        )
        h = (
            spec.xi * ops.n
            + delta * ops.sigma_z @ ops.n
            + quad
            + quad.conj().T
            + corr
            + corr.conj().T
        )
    else:
        raise ConfigurationError(f"form must be 'pre' or 'effective', got {form!r}")
    return _require_hermitian(h)


def resonance_table(
    params: SystemParams,
    profile: ModulationProfile,
    K_max: int,
    xi=0.0,
) -> list:
    """Resonance frequencies and weights for K = 1..K_max, all three kinds.

    xi is either a single shift applied to every kind or a mapping
    {ResonanceKind: xi}. Each row records eta, theta_K at that eta, and the
    dispersive shifts, so rows are directly comparable across kinds.
    """
    if K_max < 1:
        raise ConfigurationError(f"K_max must be >= 1, got {K_max}")
    if isinstance(xi, dict):
        def xi_of(kind):
            return float(xi.get(kind, 0.0))
    else:
        def xi_of(kind):
            return float(xi)

    rows = []
    for K in range(1, K_max + 1):
        for kind in ResonanceKind:
            spec = ResonanceSpec(kind=kind, K=K, xi=xi_of(kind))
            try:
                eta = resonance_frequency(spec, params, profile)
            except ConfigurationError as exc:
                rows.append(
                    {"kind": kind.value, "K": K, "xi": xi_of(kind), "eta": math.nan,
                     "theta_K": complex("nan"), "delta": math.nan, "delta_K": math.nan,
                     "note": str(exc)}
                )
                continue
            tuned = dataclasses.replace(profile, eta=eta)
            theta_K = series_fourier_coefficient(tuned, K)
            try:
                dq = dispersive_quantities(params, tuned, spec)
                delta, delta_K, note = dq.delta, dq.delta_K, ""
            except DispersiveRegimeError as exc:
                delta, delta_K, note = math.nan, math.nan, str(exc)
            rows.append(
                {"kind": kind.value, "K": K, "xi": xi_of(kind), "eta": eta,
                 "theta_K": theta_K, "delta": delta, "delta_K": delta_K,
                 "note": note}
            )
    return rows
