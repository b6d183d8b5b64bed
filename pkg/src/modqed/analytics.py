"""Closed-form predictions used to cross-validate exact runs.

Covers the resonant-regime three-level formulas with their xi branches,
the hyperbolic photon-growth law of the squeezing generator, the pulled
cavity frequency in both its exact and expanded forms, and the
feasibility budget comparing photon creation rates against cavity and
atom decoherence rates.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass

import numpy as np

from .errors import ConfigurationError, DispersiveRegimeError, ResonantRegimeError
from .hamiltonians import ResonanceKind, ResonanceSpec, dispersive_quantities
from .modulation import (
    ModulationProfile,
    SystemParams,
    complex_g,
    deltas,
    evaluate_f,
    lambda_coefficients,
)


@dataclass(frozen=True)
class ResonantAJCPrediction:
    """Three-level closed form near the first AJC resonance.

    Valid in the resonant regime |Delta_-| << g0 where the dispersive
    ladder collapses to {|g,0>, |e,1>, |g,2>}. The drive is tuned to
    eta = Delta_+ - xi_branch; chi is the slow frequency of the resulting
    periodic population exchange.
    """

    branch: str
    xi_plus: float
    xi_minus: float
    xi: float
    eta: float
    y: float
    q: float
    chi: float

    def p_g0(self, t):
        return np.cos(self.chi * np.asarray(t, dtype=float)) ** 2

    def p_e1(self, t):
        s = math.sin(self.y + self.q) ** 2
        return s * np.sin(self.chi * np.asarray(t, dtype=float)) ** 2

    def p_g2(self, t):
        c = math.cos(self.y - self.q) ** 2
        return c * np.sin(self.chi * np.asarray(t, dtype=float)) ** 2


def resonant_ajc_prediction(
    params: SystemParams, profile: ModulationProfile, branch: str = "minus"
) -> ResonantAJCPrediction:
    """Branch shifts xi_pm = Delta_-/2 +- sqrt(2) g0 and the slow frequency.

    tan y = sqrt[(2 sqrt2 g0 + Delta_-)/(2 sqrt2 g0 - Delta_-)] with
    y in (0, pi/2); q = 0 on the minus branch, pi/2 on the plus branch;
    chi = g0 |theta| sin(y + q) with theta evaluated at the branch's own
    drive frequency. The profile's eta field is ignored here.
    """
    if branch not in ("plus", "minus"):
        raise ConfigurationError(f"branch must be 'plus' or 'minus', got {branch!r}")
    dp, dm = deltas(params, profile)
    g0 = params.g0
    lim = 2.0 * math.sqrt(2.0) * g0
    if abs(dm) >= lim:
        raise ResonantRegimeError(
            f"|Delta_-| = {abs(dm):.3g} is outside the resonant regime "
            f"(needs < 2*sqrt(2)*g0 = {lim:.3g})"
        )
    if abs(dm) > 0.3 * g0:
        warnings.warn(
            f"|Delta_-|/g0 = {abs(dm) / g0:.3g} exceeds 0.3; the three-level "
            "closed form degrades away from the resonant regime",
            RuntimeWarning,
            stacklevel=2,
        )
    root2 = math.sqrt(2.0) * g0
    xi_plus = dm / 2.0 + root2
    xi_minus = dm / 2.0 - root2
    xi = xi_minus if branch == "minus" else xi_plus
    q = 0.0 if branch == "minus" else math.pi / 2.0
    y = math.atan(math.sqrt((lim + dm) / (lim - dm)))
    eta = dp - xi
    lam = lambda_coefficients(profile)
    lam1 = lam[0] if len(lam) else 0j
    theta = lam1 * profile.epsilon / eta
    chi = g0 * abs(theta) * math.sin(y + q)
    return ResonantAJCPrediction(
        branch=branch,
        xi_plus=xi_plus,
        xi_minus=xi_minus,
        xi=xi,
        eta=eta,
        y=y,
        q=q,
        chi=abs(chi),
    )


def dce_growth(
    params: SystemParams, profile: ModulationProfile, spec: ResonanceSpec, t
):
    """Squeezing-law mean photon number sinh^2(2 |delta theta_K| t)."""
    if spec.kind is not ResonanceKind.DCE:
        raise ConfigurationError("growth law applies to the DCE resonance")
    dq = dispersive_quantities(params, profile, spec)
    rate = 2.0 * abs(dq.delta * dq.theta_K)
    tt = np.asarray(t, dtype=float)
    out = np.sinh(rate * tt) ** 2
    return float(out) if np.isscalar(t) else out


def pulled_frequency(
    params: SystemParams,
    profile: ModulationProfile,
    t,
    sigma_z: int,
    form: str = "expanded",
):
    """Cavity frequency pulled by a dispersively coupled atom.

    form="expanded": (omega + sigma_z delta) - sigma_z delta (epsilon/Delta_-) f(t),
    first order in epsilon f / Delta_-.
    form="exact": omega + sigma_z g0^2 / (Delta_- + epsilon f(t)), which
    diverges where the modulated detuning crosses zero; a profile whose
    swing reaches zero detuning anywhere in a drive period raises a warning
    in either form.
    """
    if sigma_z not in (-1, 1):
        raise ConfigurationError(f"sigma_z must be +1 or -1, got {sigma_z!r}")
    if form not in ("expanded", "exact"):
        raise ConfigurationError(f"form must be 'expanded' or 'exact', got {form!r}")
    dp, dm = deltas(params, profile)
    if dm == 0.0:
        raise DispersiveRegimeError("frequency pulling undefined at Delta_- = 0")
    scan = evaluate_f(profile, np.linspace(0.0, profile.period(), 512, endpoint=False))
    if np.any(np.sign(dm + profile.epsilon * scan) != np.sign(dm)):
        warnings.warn(
            "modulated detuning Delta_- + epsilon f(t) reaches zero within a "
            "drive period; frequency pulling is singular there",
            RuntimeWarning,
            stacklevel=2,
        )
    f = evaluate_f(profile, t)
    detuning = dm + profile.epsilon * f
    delta = params.g0**2 / dm
    if form == "exact":
        out = params.omega + sigma_z * params.g0**2 / detuning
    else:
        out = (params.omega + sigma_z * delta) - sigma_z * delta * (
            profile.epsilon / dm
        ) * f
    return float(out) if np.isscalar(t) else np.asarray(out)


@dataclass(frozen=True)
class DecoherenceBudget:
    """Photon creation rates vs loss rates, all in units of omega.

    rate_dce is the pair-creation rate |delta theta_K| at the configured
    drive frequency; rate_ajc is the joint excitation rate |g theta_K|.
    Ratios are rate/loss, +inf where the loss rate is zero.
    """

    rate_dce: float
    rate_ajc: float
    kappa: float
    gamma: float
    gamma_ph: float
    ratios_dce: tuple
    ratios_ajc: tuple
    verdict: str

    @property
    def feasible(self) -> bool:
        return self.verdict == "feasible"


def decoherence_budget(
    params: SystemParams, profile: ModulationProfile, spec: ResonanceSpec
) -> DecoherenceBudget:
    """Verdict 'feasible' when both creation rates beat every loss rate.

    Both rates use theta_K at the profile's own eta, so the budget
    describes the drive actually configured rather than two differently
    retuned drives.
    """
    missing = [n for n in ("kappa", "gamma", "gamma_ph") if getattr(params, n) is None]
    if missing:
        raise ConfigurationError(
            f"decoherence budget needs loss rates {', '.join(missing)} in the system parameters"
        )
    dq = dispersive_quantities(params, profile, spec)
    g = complex_g(params, profile)
    rate_dce = abs(dq.delta * dq.theta_K)
    rate_ajc = abs(g * dq.theta_K)
    losses = (params.kappa, params.gamma, params.gamma_ph)

    def ratios(rate):
        return tuple(rate / r if r > 0 else math.inf for r in losses)

    limiting = max(losses)
    ok = rate_dce > limiting and rate_ajc > limiting
    return DecoherenceBudget(
        rate_dce=rate_dce,
        rate_ajc=rate_ajc,
        kappa=params.kappa,
        gamma=params.gamma,
        gamma_ph=params.gamma_ph,
        ratios_dce=ratios(rate_dce),
        ratios_ajc=ratios(rate_ajc),
        verdict="feasible" if ok else "infeasible",
    )
