import math

import numpy as np
import pytest

from modqed.dynamics import (
    FitResult,
    IntegratorConfig,
    IntegratorMethod,
    Trajectory,
    default_max_step,
    evolve,
    evolve_constant,
    fit_oscillation,
    frame_populations_equivalence,
    truncation_check,
)
from modqed.errors import ConfigurationError, FitError
from modqed.hamiltonians import interaction_builder
from modqed.hilbert import QuantumState, basis_state, build_operators, build_space
from modqed.modulation import ModulationProfile, SystemParams


def static_builder(h):
    return lambda t: h


def jc_resonant_hamiltonian(space, g0):
    """g0 (a sigma_+ + h.c.): exact flop |e,0> <-> |g,1| at frequency g0."""
    ops = build_operators(space)
    v = g0 * ops.a @ ops.sigma_plus
    return v + v.conj().T


class TestIntegratorConfig:
    def test_defaults(self):
        cfg = IntegratorConfig()
        assert cfg.method is IntegratorMethod.ADAPTIVE
        assert cfg.rel_tol == 1e-9

    def test_string_method_coerced(self):
        assert IntegratorConfig(method="rk4", max_step=0.1).method is IntegratorMethod.RK4

    def test_tolerance_bounds(self):
        with pytest.raises(ConfigurationError):
            IntegratorConfig(rel_tol=1e-3)
        with pytest.raises(ConfigurationError):
            IntegratorConfig(abs_tol=0.0)

    def test_rk4_needs_step(self):
        with pytest.raises(ConfigurationError):
            IntegratorConfig(method="rk4")

    def test_bad_method(self):
        with pytest.raises(ConfigurationError):
            IntegratorConfig(method="euler")

    def test_default_max_step(self):
        params = SystemParams(Omega0=1.4)
        driven = ModulationProfile(epsilon=0.2, eta=2.402, s=[1.0])
        assert default_max_step(params, driven) == pytest.approx(2 * math.pi / (50 * 2.402))
        quiet = ModulationProfile(epsilon=0.0, eta=2.0)
        assert default_max_step(params, quiet) == pytest.approx(2 * math.pi / (50 * 2.4))


class TestEvolve:
    def test_zero_hamiltonian_is_identity(self):
        sp = build_space(5)
        psi0 = basis_state(sp, "e", 1)
        traj = evolve(static_builder(np.zeros((sp.dim, sp.dim))), psi0, 5.0,
                      IntegratorConfig(max_step=0.5))
        assert np.allclose(traj.pops, traj.pops[0])
        assert np.allclose(traj.final_amplitudes, psi0.amplitudes)

    def test_matches_eigendecomposition(self):
        sp = build_space(3)
        h = jc_resonant_hamiltonian(sp, 0.3)
        psi0 = basis_state(sp, "e", 0)
        cfg = IntegratorConfig(max_step=0.2)
        traj = evolve(static_builder(h), psi0, 20.0, cfg)
        oracle = evolve_constant(h, psi0, traj.times)
        assert np.abs(traj.pops - oracle.pops).max() < 10 * cfg.rel_tol

    def test_rk4_matches_adaptive(self):
        sp = build_space(3)
        params = SystemParams(Omega0=1.2, g0=0.05)
        prof = ModulationProfile(epsilon=0.2, eta=2.2, s=[1.0])
        build = interaction_builder(params, prof, sp)
        psi0 = basis_state(sp, "g", 0)
        ref = evolve(build, psi0, 30.0, IntegratorConfig(max_step=0.05))
        rk = evolve(build, psi0, 30.0, IntegratorConfig(method="rk4", max_step=0.01))
        assert np.abs(ref.pops[-1] - rk.pops[-1]).max() < 1e-8

    def test_norm_drift_is_tiny(self):
        sp = build_space(3)
        h = jc_resonant_hamiltonian(sp, 0.5)
        traj = evolve(static_builder(h), basis_state(sp, "e", 0), 50.0,
                      IntegratorConfig(max_step=0.1))
        assert traj.norm_error.max() < 1e-8

    def test_energy_conserved_for_static_hamiltonian(self):
        sp = build_space(3)
        h = jc_resonant_hamiltonian(sp, 0.5)
        psi0 = basis_state(sp, "e", 0)
        traj = evolve(static_builder(h), psi0, 40.0, IntegratorConfig(max_step=0.1))
        e0 = np.vdot(psi0.amplitudes, h @ psi0.amplitudes).real
        ef = np.vdot(traj.final_amplitudes, h @ traj.final_amplitudes).real
        assert abs(ef - e0) < 1e-8 * np.linalg.norm(h, 2)

    def test_times_strictly_increasing_and_endpoints(self):
        sp = build_space(3)
        traj = evolve(static_builder(np.zeros((sp.dim, sp.dim))), basis_state(sp, "g", 0),
                      3.0, IntegratorConfig(max_step=0.07, sample_stride=3))
        assert traj.times[0] == 0.0
        assert traj.times[-1] == 3.0
        assert np.all(np.diff(traj.times) > 0)

    def test_initial_tail_rejected(self):
        sp = build_space(4)
        amps = np.zeros(sp.dim, dtype=complex)
        amps[3] = 1.0  # |g,3> sits within two rungs of n_max=4
        with pytest.raises(ConfigurationError):
            evolve(static_builder(np.zeros((sp.dim, sp.dim))),
                   QuantumState(sp, amps), 1.0, IntegratorConfig(max_step=0.1))

    def test_t_end_validation(self):
        sp = build_space(3)
        with pytest.raises(ConfigurationError):
            evolve(static_builder(np.zeros((sp.dim, sp.dim))), basis_state(sp, "g", 0),
                   -1.0, IntegratorConfig(max_step=0.1))

    def test_sample_times_exact_grid(self):
        sp = build_space(3)
        h = jc_resonant_hamiltonian(sp, 0.3)
        psi0 = basis_state(sp, "e", 0)
        grid = np.linspace(0.0, 10.0, 41)
        traj = evolve(static_builder(h), psi0, 10.0, IntegratorConfig(), sample_times=grid)
        assert np.array_equal(traj.times, grid)
        oracle = evolve_constant(h, psi0, grid)
        assert np.abs(traj.pops - oracle.pops).max() < 1e-8

    def test_sample_times_validation(self):
        sp = build_space(3)
        psi0 = basis_state(sp, "g", 0)
        z = static_builder(np.zeros((sp.dim, sp.dim)))
        with pytest.raises(ConfigurationError):
            evolve(z, psi0, 1.0, IntegratorConfig(), sample_times=np.array([0.0, 0.0, 1.0]))
        with pytest.raises(ConfigurationError):
            evolve(z, psi0, 1.0, IntegratorConfig(), sample_times=np.array([0.5, 2.0]))
        with pytest.raises(ConfigurationError):
            evolve(z, psi0, 1.0, IntegratorConfig(method="rk4", max_step=0.1),
                   sample_times=np.array([0.5]))


class TestTrajectory:
    def test_observable_resolution(self):
        sp = build_space(4)
        h = jc_resonant_hamiltonian(sp, 0.4)
        traj = evolve(static_builder(h), basis_state(sp, "e", 0), 5.0,
                      IntegratorConfig(max_step=0.1))
        assert np.allclose(traj.observable("P_e"), traj.p_e)
        assert np.allclose(traj.observable("P_g_1"), traj.population("g", 1))
        assert np.allclose(traj.observable("n_mean"), traj.n_mean)
        with pytest.raises(ConfigurationError):
            traj.observable("P_g_9")
        with pytest.raises(ConfigurationError):
            traj.observable("momentum")

    def test_marginals_sum_to_one(self):
        sp = build_space(3)
        h = jc_resonant_hamiltonian(sp, 0.4)
        traj = evolve(static_builder(h), basis_state(sp, "e", 0), 8.0,
                      IntegratorConfig(max_step=0.1))
        assert np.abs(traj.p_g + traj.p_e - 1.0).max() < 1e-8


class TestRK4Order:
    @pytest.mark.filterwarnings("ignore::RuntimeWarning")
    def test_global_error_slope_is_four(self):
        """Halving the step on a two-level flop divides the error by ~16."""
        sp = build_space(4)
        g0 = 0.5
        h = jc_resonant_hamiltonian(sp, g0)
        psi0 = basis_state(sp, "e", 0)
        t_end = 6.0

        def global_error(step):
            traj = evolve(static_builder(h), psi0, t_end,
                          IntegratorConfig(method="rk4", max_step=step, sample_stride=10**9))
            exact = np.sin(g0 * t_end) ** 2
            return abs(traj.population("g", 1)[-1] - exact)

        steps = np.array([0.4, 0.2, 0.1, 0.05])
        errs = np.array([global_error(s) for s in steps])
        slope = np.polyfit(np.log(steps), np.log(errs), 1)[0]
        assert slope == pytest.approx(4.0, abs=0.2)


class TestFrameEquivalence:
    def test_driven_system_populations_agree(self):
        params = SystemParams(Omega0=1.004, g0=0.04)
        prof = ModulationProfile(epsilon=0.1, eta=2.0585685, s=[1.0])
        psi0 = basis_state(build_space(4), "g", 0)
        cfg = IntegratorConfig(max_step=default_max_step(params, prof))
        report = frame_populations_equivalence(params, prof, psi0, 200.0, cfg)
        assert report.distance < max(10 * cfg.rel_tol, 1e-6)
        assert np.array_equal(report.lab.times, report.interaction.times)

    def test_negligible_coupling_gives_zero_distance(self):
        params = SystemParams(Omega0=1.3, g0=1e-12)
        prof = ModulationProfile(epsilon=0.0, eta=2.0)
        psi0 = basis_state(build_space(3), "g", 0)
        report = frame_populations_equivalence(
            params, prof, psi0, 10.0, IntegratorConfig(max_step=0.1))
        assert report.distance < 1e-12


class TestTruncationCheck:
    def test_resonant_exchange_needs_few_photons(self):
        params = SystemParams(Omega0=1.004, g0=0.04)
        prof = ModulationProfile(epsilon=0.1, eta=2.0585685, s=[1.0])
        grid = np.linspace(0.0, 150.0, 151)

        def run(n_max):
            sp = build_space(n_max)
            return evolve(interaction_builder(params, prof, sp), basis_state(sp, "g", 0),
                          150.0, IntegratorConfig(max_step=default_max_step(params, prof)),
                          sample_times=grid)

        report = truncation_check(run, (7, 12))
        assert report.grids_shared
        assert report.max_n_diff < 1e-8
        assert report.converged

    def test_edge_leakage_is_flagged(self):
        params = SystemParams(Omega0=1.004, g0=0.04)
        prof = ModulationProfile(epsilon=0.1, eta=2.0585685, s=[1.0])

        def run(n_max):
            sp = build_space(n_max)
            return evolve(interaction_builder(params, prof, sp), basis_state(sp, "g", 0),
                          150.0, IntegratorConfig(max_step=default_max_step(params, prof)))

        report = truncation_check(run, (5, 10))
        assert report.tail_max[0] > 1e-6
        assert not report.converged

    def test_undriven_truncation_trivial(self):
        params = SystemParams(Omega0=1.4, g0=1e-10)
        prof = ModulationProfile(epsilon=0.0, eta=2.0)

        def run(n_max):
            sp = build_space(n_max)
            return evolve(interaction_builder(params, prof, sp), basis_state(sp, "g", 0),
                          5.0, IntegratorConfig(max_step=0.1))

        report = truncation_check(run, (3, 6))
        assert report.max_n_diff < 1e-12

    def test_n_list_validation(self):
        with pytest.raises(ConfigurationError):
            truncation_check(lambda n: None, (5,))
        with pytest.raises(ConfigurationError):
            truncation_check(lambda n: None, (5, 5))


def synthetic_trajectory(times, values):
    """Wrap a P_g_0 signal into a minimal two-level Trajectory."""
    sp = build_space(1)
    pops = np.zeros((times.size, sp.dim))
    pops[:, 0] = values
    pops[:, 2] = 1.0 - values
    final = np.zeros(sp.dim, dtype=complex)
    final[0] = math.sqrt(max(values[-1], 0.0))
    final[2] = math.sqrt(max(1.0 - values[-1], 0.0))
    return Trajectory(space=sp, times=times, pops=pops,
                      norm_error=np.zeros(times.size), final_amplitudes=final)


class TestFitOscillation:
    def test_recovers_synthetic_frequency(self):
        chi = 7e-5
        t = np.linspace(0.0, 1.5 * math.pi / chi, 4000)
        traj = synthetic_trajectory(t, 0.3 + 0.6 * np.sin(chi * t) ** 2)
        fit = fit_oscillation(traj, "P_g_0")
        assert isinstance(fit, FitResult)
        assert fit.frequency == pytest.approx(chi, rel=0.01)
        assert fit.amplitude == pytest.approx(0.6, rel=0.01)
        assert fit.offset == pytest.approx(0.3, abs=0.01)

    def test_short_span_warns_but_can_fit(self):
        chi = 1e-3
        t = np.linspace(0.0, 1.1 * math.pi / chi, 3000)
        traj = synthetic_trajectory(t, 0.5 * np.sin(chi * t) ** 2)
        with pytest.warns(RuntimeWarning):
            fit = fit_oscillation(traj, "P_g_0")
        assert fit.frequency == pytest.approx(chi, rel=0.05)

    def test_mild_noise_tolerated(self):
        rng = np.random.default_rng(11)
        chi = 2e-3
        t = np.linspace(0.0, 4 * math.pi / chi, 3000)
        clean = 0.1 + 0.8 * np.sin(chi * t) ** 2
        noisy = np.clip(clean + 0.01 * rng.normal(size=t.size), 0.0, 1.0)
        fit = fit_oscillation(synthetic_trajectory(t, noisy), "P_g_0")
        assert fit.frequency == pytest.approx(chi, rel=0.02)

    def test_constant_signal_fails(self):
        t = np.linspace(0.0, 10.0, 200)
        with pytest.raises(FitError):
            fit_oscillation(synthetic_trajectory(t, np.full(t.size, 0.25)), "P_g_0")

    def test_structureless_signal_fails(self):
        rng = np.random.default_rng(5)
        t = np.linspace(0.0, 10.0, 500)
        values = np.clip(0.5 + 0.3 * rng.normal(size=t.size), 0.0, 1.0)
        with pytest.raises(FitError):
            fit_oscillation(synthetic_trajectory(t, values), "P_g_0")
