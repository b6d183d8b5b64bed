"""Truncated two-level-atom + single-mode Fock space.

Conventions
-----------
Basis ordering is atom-major and fixed everywhere, including CSV output:

    index = atom_bit * (n_max + 1) + m,   atom_bit 0 = 'g', 1 = 'e'

so the first n_max+1 amplitudes belong to |g,m> and the rest to |e,m>.
Operators are dense complex numpy arrays of shape (dim, dim) with
dim = 2*(n_max+1). sigma_z = |e><e| - |g><g|, sigma_plus = |e><g|.
hbar = 1 and all frequencies are angular, in units of the cavity omega.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import ConfigurationError

ATOM_LABELS = ("g", "e")


@dataclass(frozen=True)
class SpaceDescriptor:
    """Truncated joint space with Fock levels 0..n_max."""

    n_max: int

    def __post_init__(self):
        if not isinstance(self.n_max, (int, np.integer)) or self.n_max < 1:
            raise ConfigurationError(f"n_max must be an integer >= 1, got {self.n_max!r}")

    @property
    def n_fock(self) -> int:
        return self.n_max + 1

    @property
    def dim(self) -> int:
        return 2 * (self.n_max + 1)


def build_space(n_max: int) -> SpaceDescriptor:
    return SpaceDescriptor(int(n_max))


def basis_index(space: SpaceDescriptor, atom: str, m: int) -> int:
    """Flat index of |atom, m> in the fixed atom-major ordering."""
    if atom not in ATOM_LABELS:
        raise ConfigurationError(f"atom must be 'g' or 'e', got {atom!r}")
    if not 0 <= m <= space.n_max:
        raise ConfigurationError(f"photon number {m} outside 0..{space.n_max}")
    return ATOM_LABELS.index(atom) * space.n_fock + m


@dataclass(frozen=True)
class QuantumState:
    """Normalized state vector on a SpaceDescriptor.

    The constructor enforces normalization to 1e-8; evolution never
    renormalizes, so a violation here signals an upstream numerical problem.
    """

    space: SpaceDescriptor
    amplitudes: np.ndarray

    def __post_init__(self):
        amps = np.asarray(self.amplitudes, dtype=complex)
        if amps.shape != (self.space.dim,):
            raise ConfigurationError(
                f"amplitude vector has shape {amps.shape}, expected ({self.space.dim},)"
            )
        object.__setattr__(self, "amplitudes", amps)
        if abs(np.vdot(amps, amps).real - 1.0) > 1e-8:
            raise ConfigurationError("state vector is not normalized (|norm^2 - 1| > 1e-8)")


def basis_state(space: SpaceDescriptor, atom: str, m: int) -> QuantumState:
    amps = np.zeros(space.dim, dtype=complex)
    amps[basis_index(space, atom, m)] = 1.0
    return QuantumState(space, amps)


def state_from_label(space: SpaceDescriptor, label: str) -> QuantumState:
    """Parse labels of the form 'g,0' or 'e,12'."""
    parts = label.replace(" ", "").split(",")
    if len(parts) != 2 or parts[0] not in ATOM_LABELS:
        raise ConfigurationError(f"bad state label {label!r}, expected e.g. 'g,0'")
    try:
        m = int(parts[1])
    except ValueError as exc:
        raise ConfigurationError(f"bad photon number in state label {label!r}") from exc
    return basis_state(space, parts[0], m)


@dataclass(frozen=True)
class OperatorSet:
    """Dense operators on the full joint space, all shape (dim, dim)."""

    a: np.ndarray
    a_dag: np.ndarray
    n: np.ndarray
    sigma_plus: np.ndarray
    sigma_minus: np.ndarray
    sigma_z: np.ndarray
    identity: np.ndarray


def fock_ladder(n_fock: int) -> np.ndarray:
    """Annihilation operator on the bare Fock factor, a[m-1, m] = sqrt(m)."""
    a = np.zeros((n_fock, n_fock), dtype=complex)
    ms = np.arange(1, n_fock)
    a[ms - 1, ms] = np.sqrt(ms)
    return a


def build_operators(space: SpaceDescriptor) -> OperatorSet:
    nf = space.n_fock
    a_f = fock_ladder(nf)
    eye_f = np.eye(nf, dtype=complex)
    eye_2 = np.eye(2, dtype=complex)
    sp_2 = np.array([[0, 0], [1, 0]], dtype=complex)  # |e><g| in (g, e) ordering
    sz_2 = np.array([[-1, 0], [0, 1]], dtype=complex)
    return OperatorSet(
        a=np.kron(eye_2, a_f),
        a_dag=np.kron(eye_2, a_f.conj().T),
        n=np.kron(eye_2, np.diag(np.arange(nf, dtype=complex))),
        sigma_plus=np.kron(sp_2, eye_f),
        sigma_minus=np.kron(sp_2.T, eye_f),
        sigma_z=np.kron(sz_2, eye_f),
        identity=np.kron(eye_2, eye_f),
    )


def photon_numbers(space: SpaceDescriptor) -> np.ndarray:
    """Photon number carried by each basis index (length dim, real)."""
    return np.tile(np.arange(space.n_fock, dtype=float), 2)


def expectation(op: np.ndarray, psi: QuantumState) -> complex:
    return complex(np.vdot(psi.amplitudes, op @ psi.amplitudes))


def real_expectation(op: np.ndarray, psi: QuantumState) -> float:
    """Expectation of a Hermitian operator; asserts the imaginary residual."""
    val = expectation(op, psi)
    scale = max(1.0, abs(val))
    if abs(val.imag) > 1e-10 * scale:
        raise ValueError(
            f"imaginary residual {val.imag:.3e} too large for a Hermitian expectation"
        )
    return val.real


@dataclass(frozen=True)
class PopulationTable:
    """Joint-basis populations with the marginals used everywhere downstream."""

    space: SpaceDescriptor
    joint: np.ndarray = field(repr=False)  # shape (dim,), real, basis order

    def prob(self, atom: str, m: int) -> float:
        return float(self.joint[basis_index(self.space, atom, m)])

    @property
    def p_g(self) -> float:
        return float(self.joint[: self.space.n_fock].sum())

    @property
    def p_e(self) -> float:
        return float(self.joint[self.space.n_fock :].sum())

    @property
    def n_mean(self) -> float:
        return float(self.joint @ photon_numbers(self.space))

    def as_dict(self) -> dict:
        nf = self.space.n_fock
        return {
            (atom, m): float(self.joint[i * nf + m])
            for i, atom in enumerate(ATOM_LABELS)
            for m in range(nf)
        }


def populations(psi: QuantumState) -> PopulationTable:
    return PopulationTable(psi.space, np.abs(psi.amplitudes) ** 2)


def norm_error(psi: QuantumState) -> float:
    return abs(float(np.vdot(psi.amplitudes, psi.amplitudes).real) - 1.0)
