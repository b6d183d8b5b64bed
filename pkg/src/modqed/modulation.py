"""System parameters and the harmonic modulation profile.

The modulated quantity (atom frequency or coupling) follows

    Omega(t) = Omega0 + epsilon * f(t)
    f(t)     = sum_k [ s_k sin(k eta t) + c_k cos(k eta t) ]

with c_0 a DC offset. Derived quantities used throughout:

    Lambda_k  = -(c_k + i s_k) / (2 k),            k >= 1
    Delta_pm  = Omega0 + epsilon c_0 +/- omega
    Xi_pm(t)  = integral_0^t [Omega(tau) +/- omega] dtau   (closed form)
    g         = g0 * exp[i (epsilon/eta) sum_k s_k / k]    (|g| = g0)

Everything is in units of the cavity frequency omega, hbar = 1. The
coefficient lists are indexed the way configs spell them: s[0] is s_1
(there is no s_0), while c[0] is the DC coefficient c_0.
"""

from __future__ import annotations

import enum
import math
import warnings
from dataclasses import dataclass

import numpy as np

from .errors import ConfigurationError

MAX_HARMONIC = 16


class ModulationTarget(enum.Enum):
    ATOM = "atom"
    COUPLING = "coupling"


@dataclass(frozen=True)
class SystemParams:
    """Static system frequencies and optional loss rates (units of omega)."""

    omega: float = 1.0
    Omega0: float = 1.0
    g0: float = 1e-2
    kappa: float | None = None
    gamma: float | None = None
    gamma_ph: float | None = None

    def __post_init__(self):
        if not (self.omega > 0 and math.isfinite(self.omega)):
            raise ConfigurationError(f"omega must be positive, got {self.omega}")
        if not (self.Omega0 > 0 and math.isfinite(self.Omega0)):
            raise ConfigurationError(f"Omega0 must be positive, got {self.Omega0}")
        if not (self.g0 > 0 and math.isfinite(self.g0)):
            raise ConfigurationError(f"g0 must be positive, got {self.g0}")
        for name in ("kappa", "gamma", "gamma_ph"):
            val = getattr(self, name)
            if val is not None and (val < 0 or not math.isfinite(val)):
                raise ConfigurationError(f"{name} must be >= 0, got {val}")


@dataclass(frozen=True)
class ModulationProfile:
    """Harmonic drive: amplitude, frequency, Fourier table, and target.

    s holds s_1..s_K, c holds c_0..c_K. Keep the lists short; harmonics
    above MAX_HARMONIC are rejected rather than silently accepted.
    """

    epsilon: float
    eta: float
    s: tuple = ()
    c: tuple = ()
    target: ModulationTarget = ModulationTarget.ATOM

    def __post_init__(self):
        object.__setattr__(self, "s", tuple(float(v) for v in self.s))
        object.__setattr__(self, "c", tuple(float(v) for v in self.c))
        if self.epsilon < 0 or not math.isfinite(self.epsilon):
            raise ConfigurationError(f"epsilon must be >= 0, got {self.epsilon}")
        if not (self.eta > 0 and math.isfinite(self.eta)):
            raise ConfigurationError(f"eta must be positive, got {self.eta}")
        if len(self.s) > MAX_HARMONIC or len(self.c) > MAX_HARMONIC + 1:
            raise ConfigurationError(f"at most {MAX_HARMONIC} harmonics are supported")
        if not all(math.isfinite(v) for v in self.s + self.c):
            raise ConfigurationError("non-finite Fourier coefficient")
        if not isinstance(self.target, ModulationTarget):
            raise ConfigurationError(f"bad modulation target {self.target!r}")

    @property
    def kmax(self) -> int:
        """Largest harmonic index with a stored coefficient."""
        return max(len(self.s), len(self.c) - 1, 0)

    def s_k(self, k: int) -> float:
        return self.s[k - 1] if 1 <= k <= len(self.s) else 0.0

    def c_k(self, k: int) -> float:
        return self.c[k] if 0 <= k < len(self.c) else 0.0

    def period(self) -> float:
        return 2.0 * math.pi / self.eta


def check_modulation_strength(params: SystemParams, profile: ModulationProfile) -> None:
    """Advisory: the derivation assumes a weak drive, epsilon << Omega0."""
    if profile.epsilon > 0.5 * params.Omega0:
        warnings.warn(
            f"epsilon/Omega0 = {profile.epsilon / params.Omega0:.3g} exceeds 0.5; "
            "the weak-modulation assumption is strained",
            RuntimeWarning,
            stacklevel=3,
        )


def evaluate_f(profile: ModulationProfile, t):
    """Drive waveform f(t); t may be a scalar or an array."""
    t = np.asarray(t, dtype=float)
    out = np.zeros_like(t)
    for k in range(1, len(profile.s) + 1):
        if profile.s[k - 1]:
            out = out + profile.s[k - 1] * np.sin(k * profile.eta * t)
    for k in range(len(profile.c)):
        if profile.c[k]:
            out = out + profile.c[k] * np.cos(k * profile.eta * t)
    if out.ndim == 0:
        return float(out)
    return out


def lambda_k(profile: ModulationProfile, k: int) -> complex:
    """Harmonic weight Lambda_k = -(c_k + i s_k)/(2k)."""
    if k < 1:
        raise ConfigurationError(f"harmonic index k must be >= 1, got {k}")
    return -(profile.c_k(k) + 1j * profile.s_k(k)) / (2.0 * k)


def lambda_coefficients(profile: ModulationProfile) -> np.ndarray:
    """Lambda_k for k = 1..kmax (empty array if the profile has no harmonics)."""
    kmax = profile.kmax
    lam = np.zeros(kmax, dtype=complex)
    for k in range(1, kmax + 1):
        lam[k - 1] = lambda_k(profile, k)
    return lam


def deltas(params: SystemParams, profile: ModulationProfile) -> tuple:
    """(Delta_plus, Delta_minus); depends on the drive only through epsilon*c_0."""
    base = params.Omega0 + profile.epsilon * profile.c_k(0)
    return base + params.omega, base - params.omega


def phase_xi(params: SystemParams, profile: ModulationProfile, t):
    """Accumulated phases (Xi_plus(t), Xi_minus(t)) in closed form.

    Xi_pm(t) = Delta_pm t
             + (epsilon/eta) sum_k [ (s_k/k)(1 - cos k eta t) + (c_k/k) sin k eta t ]
    """
    dp, dm = deltas(params, profile)
    t = np.asarray(t, dtype=float)
    periodic = np.zeros_like(t)
    r = profile.epsilon / profile.eta
    for k in range(1, profile.kmax + 1):
        sk, ck = profile.s_k(k), profile.c_k(k)
        if sk:
            periodic = periodic + (r * sk / k) * (1.0 - np.cos(k * profile.eta * t))
        if ck:
            periodic = periodic + (r * ck / k) * np.sin(k * profile.eta * t)
    xp = dp * t + periodic
    xm = dm * t + periodic
    if xp.ndim == 0:
        return float(xp), float(xm)
    return xp, xm


def complex_g(params: SystemParams, profile: ModulationProfile) -> complex:
    """Coupling with the constant drive phase absorbed; |g| equals g0."""
    phase = (profile.epsilon / profile.eta) * sum(
        profile.s_k(k) / k for k in range(1, profile.kmax + 1)
    )
    return params.g0 * complex(math.cos(phase), math.sin(phase))


def periodic_generator(profile: ModulationProfile, t):
    """X(t) = (epsilon/eta) sum_k (Lambda_k e^{-i k eta t} - Lambda_k^* e^{i k eta t}).

    exp(X(t)) is the periodic factor relating g0 e^{i Xi_pm} to g e^{i Delta_pm t}.
    """
    t = np.asarray(t, dtype=float)
    lam = lambda_coefficients(profile)
    r = profile.epsilon / profile.eta
    out = np.zeros(t.shape, dtype=complex)
    for k in range(1, profile.kmax + 1):
        z = np.exp(-1j * k * profile.eta * t)
        out = out + r * (lam[k - 1] * z - np.conj(lam[k - 1]) / z)
    if out.ndim == 0:
        return complex(out)
    return out


def coefficient_series(
    params: SystemParams,
    profile: ModulationProfile,
    sign: int,
    order: int,
    t: float,
) -> complex:
    """Partial sum of the harmonic expansion of g0 e^{i Xi_pm(t)}.

    Returns g e^{i Delta_pm t} * sum_{l=0}^{order} X(t)^l / l!, which converges
    to the exact coefficient as order grows. sign selects Delta_+ (+1) or
    Delta_- (-1).
    """
    if sign not in (+1, -1):
        raise ConfigurationError(f"sign must be +1 or -1, got {sign!r}")
    if order < 0:
        raise ConfigurationError(f"order must be >= 0, got {order}")
    dp, dm = deltas(params, profile)
    delta = dp if sign > 0 else dm
    x = periodic_generator(profile, t)
    acc = 1.0 + 0j
    term = 1.0 + 0j
    for l in range(1, order + 1):
        term *= x / l
        acc += term
    return complex_g(params, profile) * complex(np.exp(1j * delta * t)) * acc


def series_fourier_coefficient(profile: ModulationProfile, K: int, order: int | None = None) -> complex:
    """Coefficient of e^{-i K eta t} in sum_{l<=order} X^l / l! (default order = K).

    This is the resonant weight theta_K of a K-th order process: it collects
    Lambda_K epsilon/eta plus every multinomial cross term up to (epsilon/eta)^K.
    """
    if K < 0:
        raise ConfigurationError(f"K must be >= 0, got {K}")
    if order is None:
        order = max(K, 1)
    kmax = profile.kmax
    coef = 1.0 + 0j if K == 0 else 0j
    if kmax == 0 or profile.epsilon == 0.0:
        return coef
    lam = lambda_coefficients(profile)
    r = profile.epsilon / profile.eta
    # Laurent polynomial of X over z = e^{-i eta t}, stored centered
    x = np.zeros(2 * kmax + 1, dtype=complex)
    for k in range(1, kmax + 1):
        x[kmax + k] += r * lam[k - 1]
        x[kmax - k] -= r * np.conj(lam[k - 1])
    term = np.array([1.0 + 0j])
    for l in range(1, order + 1):
        term = np.convolve(term, x) / l
        center = (len(term) - 1) // 2
        if abs(K) <= center:
            coef += term[center + K]
    return coef
