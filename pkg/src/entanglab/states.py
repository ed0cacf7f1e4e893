"""The system/apparatus states of an ideal qubit measurement.

System S and apparatus A are qubits. Basis index 0 is ``|s1>`` / ``|a1>``
and index 1 is ``|s2>`` / ``|a2>``; composite indices follow the S-first
convention of :mod:`entanglab.qlinalg`, so ``|s1 a1>`` is index 0 and
``|s2 a2>`` is index 3.

Two normalizations differ from the usual textbook printing of these
formulas: the collapsed mixture carries Born weights ``|c_i|^2`` and the
reduced states carry no extra factor of one half, so every density operator
here has unit trace.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .qlinalg import (
    QUBIT_PAIR,
    BipartiteShape,
    DensityOperator,
    NORM_TOL,
    Operator,
    StateVector,
    ValidationError,
    apply,
    density_of,
    eig_hermitian,
    entropy,
    partial_trace,
    tensor,
)

SCHMIDT_TOL = 1e-9
# eigenvalue gap at or below which the reduced-state eigenbasis is not unique
AMBIGUITY_TOL = 2e-9


@dataclass(frozen=True)
class Amplitudes:
    c1: complex
    c2: complex

    def __post_init__(self):
        c1, c2 = complex(self.c1), complex(self.c2)
        if not (np.isfinite(c1) and np.isfinite(c2)):
            raise ValidationError("amplitudes must be finite")
        residual = abs(abs(c1) ** 2 + abs(c2) ** 2 - 1.0)
        if residual > NORM_TOL:
            raise ValidationError(f"amplitudes not normalized: ||c1|^2 + |c2|^2 - 1| = {residual:.3e}")
        object.__setattr__(self, "c1", c1)
        object.__setattr__(self, "c2", c2)

    @property
    def weights(self) -> tuple[float, float]:
        return abs(self.c1) ** 2, abs(self.c2) ** 2

    @classmethod
    def from_weight(cls, p1: float) -> Amplitudes:
        """Real non-negative amplitudes with ``|c1|^2 = p1``."""
        if not 0.0 <= p1 <= 1.0:
            raise ValidationError(f"branch weight must lie in [0, 1], got {p1}")
        return cls(np.sqrt(p1), np.sqrt(1.0 - p1))


EQUAL = Amplitudes(1 / np.sqrt(2), 1 / np.sqrt(2))


def _as_amplitudes(a) -> Amplitudes:
    return a if isinstance(a, Amplitudes) else Amplitudes(*a)


@dataclass(frozen=True)
class MeasurementState:
    psi: StateVector
    amplitudes: Amplitudes
    shape: BipartiteShape = QUBIT_PAIR

    def __post_init__(self):
        expected = np.zeros(4, dtype=complex)
        expected[0], expected[3] = self.amplitudes.c1, self.amplitudes.c2
        if self.psi.dim != 4 or np.max(np.abs(self.psi.amps - expected)) > NORM_TOL:
            raise ValidationError("psi is not c1|s1 a1> + c2|s2 a2> for the given amplitudes")

    def density(self) -> DensityOperator:
        return density_of(self.psi)


@dataclass(frozen=True)
class HalfLifeClock:
    half_life_T: float
    t: float

    def __post_init__(self):
        if not self.half_life_T > 0:
            raise ValidationError(f"half-life must be positive, got {self.half_life_T}")
        if not self.t >= 0:
            raise ValidationError(f"time must be non-negative, got {self.t}")

    @property
    def survival(self) -> float:
        return 2.0 ** (-self.t / self.half_life_T)


def superposition(a) -> StateVector:
    """Single-qubit state ``c1|s1> + c2|s2>``."""
    a = _as_amplitudes(a)
    return StateVector(np.array([a.c1, a.c2]), label="S")


# |s_i>|a_j> -> |s_i>|a_{i xor j}>: a CNOT with S as control
PREMEASUREMENT = Operator(
    np.array(
        [[1, 0, 0, 0],
         [0, 1, 0, 0],
         [0, 0, 0, 1],
         [0, 0, 1, 0]],
        dtype=complex,
    ),
    unitary=True,
)

POINTER_READY = StateVector.basis(2, 0, label="A")


def premeasure(a) -> MeasurementState:
    """Couple S to a ready pointer with the controlled-shift unitary."""
    a = _as_amplitudes(a)
    before = tensor(superposition(a), POINTER_READY)
    after = apply(PREMEASUREMENT, before)
    return MeasurementState(StateVector(after.amps, label="SA"), a)


def collapse_mixture(a) -> DensityOperator:
    """Incoherent mixture of the two pointer branches with Born weights."""
    p1, p2 = _as_amplitudes(a).weights
    return DensityOperator.diagonal([p1, 0.0, 0.0, p2])


def reduced_states(m: MeasurementState) -> tuple[DensityOperator, DensityOperator]:
    """Local states of S and A.

    Built directly from the branch weights; :func:`entanglab.qlinalg.partial_trace`
    is the independent route and the two must agree.
    """
    p1, p2 = m.amplitudes.weights
    local = DensityOperator.diagonal([p1, p2])
    return local, local


def entanglement_report(psi: StateVector, shape: BipartiteShape = QUBIT_PAIR) -> tuple[int, float]:
    """Return ``(schmidt_rank, entanglement_entropy)`` of a pure bipartite state."""
    rho_s = partial_trace(density_of(psi), shape, keep="S")
    spectrum = np.linalg.eigvalsh(rho_s.matrix)
    rank = int(np.sum(spectrum > SCHMIDT_TOL))
    return rank, entropy(rho_s)


def basis_ambiguity(rho: DensityOperator) -> tuple[bool, float]:
    """Whether the eigenbasis of a qubit density operator is non-unique.

    Returns ``(ambiguous, gap)`` where ``gap`` is the eigenvalue difference.
    """
    if rho.dim != 2:
        raise ValidationError(f"basis_ambiguity expects a qubit density operator, got dim {rho.dim}")
    vals = eig_hermitian(rho).values
    gap = float(vals[0] - vals[1])
    return gap <= AMBIGUITY_TOL, gap


def cat_amplitudes(clock: HalfLifeClock) -> Amplitudes:
    """Branch amplitudes of the nucleus/cat pair at time ``clock.t``.

    ``c1`` is the undecayed (cat alive) branch, with weight ``2**(-t/T)``.
    """
    return Amplitudes.from_weight(clock.survival)
