"""Non-stationary qubit-cavity dynamics in a truncated joint space.

Exact integration of the driven Rabi model (atom-frequency or coupling
modulation), the static effective generators for the AJC, JC, and DCE
resonances, closed-form cross-checks, and a config-driven harness with a
CLI. Everything is expressed in units of the cavity frequency.
"""

from .analytics import (
    DecoherenceBudget,
    ResonantAJCPrediction,
    dce_growth,
    decoherence_budget,
    pulled_frequency,
    resonant_ajc_prediction,
)
from .dynamics import (
    FitResult,
    FrameEquivalenceReport,
    IntegratorConfig,
    IntegratorMethod,
    Trajectory,
    TruncationReport,
    default_max_step,
    evolve,
    evolve_constant,
    fit_oscillation,
    frame_populations_equivalence,
    truncation_check,
)
from .errors import (
    ConfigurationError,
    DegenerateResonanceError,
    DispersiveRegimeError,
    FitError,
    IntegrationError,
    ResonantRegimeError,
)
from .hamiltonians import (
    DispersiveQuantities,
    ResonanceKind,
    ResonanceSpec,
    coupling_builder,
    coupling_modulated_hamiltonian,
    dce_intermediate_hamiltonian,
    dispersive_quantities,
    effective_hamiltonian,
    interaction_builder,
    interaction_hamiltonian,
    rabi_builder,
    rabi_hamiltonian,
    resonance_frequency,
    resonance_table,
)
from .hilbert import (
    OperatorSet,
    PopulationTable,
    QuantumState,
    SpaceDescriptor,
    basis_index,
    basis_state,
    build_operators,
    build_space,
    expectation,
    norm_error,
    photon_numbers,
    populations,
    real_expectation,
    state_from_label,
)
from .modulation import (
    ModulationProfile,
    ModulationTarget,
    SystemParams,
    check_modulation_strength,
    coefficient_series,
    complex_g,
    deltas,
    evaluate_f,
    lambda_coefficients,
    lambda_k,
    periodic_generator,
    phase_xi,
    series_fourier_coefficient,
)

__version__ = "0.1.0"
