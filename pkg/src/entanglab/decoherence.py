"""Environment-qubit decoherence of a system/apparatus pair.

Each environment qubit starts in ``|0>`` and is rotated by ``+theta_k`` when
the apparatus reads ``a1`` and by ``-theta_k`` when it reads ``a2``. The two
conditional environment states then overlap by ``prod_k cos(2 theta_k)``,
which multiplies every element of the SA density operator connecting
different pointer readings. Diagonal (pointer) entries are untouched.

The analytic map lives in :func:`decohered_state`; :func:`simulate_env_exact`
builds the full SA+E pure state for up to ten environment qubits and traces
the environment out, so the two can be checked against each other.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .qlinalg import (
    DensityOperator,
    StateVector,
    ValidationError,
    density_of,
    unitarity_residual,
    UNITARY_TOL,
)
from .states import EQUAL, MeasurementState, premeasure

MAX_EXACT_QUBITS = 10
RESTORE_TOL = 1e-10
INVARIANCE_TOL = 1e-12

# stand-in for a macroscopic detector: ten maximally coupled qubits
DETECTOR_QUBITS = 10
DETECTOR_THETA = np.pi / 4


@dataclass(frozen=True)
class EnvironmentSpec:
    thetas: tuple[float, ...]

    def __post_init__(self):
        thetas = tuple(float(t) for t in np.atleast_1d(self.thetas))
        if not thetas:
            raise ValidationError("environment needs at least one qubit")
        if not np.all(np.isfinite(thetas)):
            raise ValidationError("coupling angles must be finite")
        object.__setattr__(self, "thetas", thetas)

    @classmethod
    def uniform(cls, n: int, theta: float) -> EnvironmentSpec:
        if n < 1:
            raise ValidationError(f"environment needs at least one qubit, got {n}")
        return cls((theta,) * n)

    @property
    def n(self) -> int:
        return len(self.thetas)


@dataclass(frozen=True)
class DecoherenceReport:
    """Outcome of coupling to an environment and then undoing the coupling.

    ``coherence_*`` values are ``|rho[0, 3]|``, the magnitude of the
    ``|s1 a1><s2 a2|`` element of the reduced SA state. ``coherence_decohered``
    is after the forward coupling, ``coherence_after`` after the inverse.
    The ``detector_*`` fields repeat the forward/inverse run with the
    ten-qubit, fully coupled detector environment.
    """

    factor_r: float
    coherence_before: float
    coherence_decohered: float
    coherence_after: float
    restore_residual: float
    reversible: bool
    detector_factor: float
    detector_coherence: float
    detector_reversible: bool


def decoherence_factor(env: EnvironmentSpec) -> float:
    return float(np.prod(np.cos(2 * np.asarray(env.thetas))))


def _pointer_mask(dim_s: int = 2, dim_a: int = 2) -> np.ndarray:
    a_index = np.tile(np.arange(dim_a), dim_s)
    return a_index[:, None] != a_index[None, :]


def decohered_state(rho_sa: DensityOperator, env: EnvironmentSpec) -> DensityOperator:
    if rho_sa.dim != 4:
        raise ValidationError(f"expected a two-qubit SA state, got dim {rho_sa.dim}")
    r = decoherence_factor(env)
    # Schur product with [[1, r], [r, 1]] on the pointer index stays PSD for |r| <= 1
    assert abs(r) <= 1.0
    m = np.array(rho_sa.matrix)
    m[_pointer_mask()] *= r
    return DensityOperator(m)


def _rotation(theta: float) -> np.ndarray:
    c, s = np.cos(theta), np.sin(theta)
    return np.array([[c, -s], [s, c]], dtype=complex)


def _sa_vector(state) -> np.ndarray:
    if isinstance(state, MeasurementState):
        return state.psi.amps
    if isinstance(state, StateVector) and state.dim == 4:
        return state.amps
    raise ValidationError("expected a MeasurementState or a dim-4 StateVector")


def _check_exact(env: EnvironmentSpec) -> None:
    if env.n > MAX_EXACT_QUBITS:
        raise ValidationError(
            f"exact simulation supports at most {MAX_EXACT_QUBITS} environment qubits, got {env.n}"
        )


def _couple(full: np.ndarray, thetas: Sequence[float], sign: float) -> np.ndarray:
    """Apply (sign=+1) or undo (sign=-1) the pointer-controlled rotations.

    ``full`` has shape ``(2, 2, 2, ..., 2)``: S, A, then one axis per
    environment qubit.
    """
    out = np.array(full)
    order = range(len(thetas)) if sign > 0 else reversed(range(len(thetas)))
    for k in order:
        axis = 1 + k  # axis within the A-sliced array (S, E_1, ..., E_n)
        for a, branch in ((0, 1.0), (1, -1.0)):
            rot = _rotation(sign * branch * thetas[k])
            if unitarity_residual(rot) > UNITARY_TOL:
                raise ArithmeticError("environment rotation lost unitarity")
            block = out[:, a]
            block = np.moveaxis(np.tensordot(rot, block, axes=([1], [axis])), 0, axis)
            out[:, a] = block
    return out


def _initial_full(psi_sa: np.ndarray, n: int) -> np.ndarray:
    env0 = np.zeros(2**n, dtype=complex)
    env0[0] = 1.0
    return np.kron(psi_sa, env0).reshape((2, 2) + (2,) * n)


def _trace_env(full: np.ndarray) -> DensityOperator:
    m = full.reshape(4, -1)
    rho = m @ m.conj().T
    return DensityOperator((rho + rho.conj().T) / 2)


def simulate_env_exact(m, env: EnvironmentSpec) -> DensityOperator:
    """Reduced SA state after exact unitary coupling to ``env``."""
    _check_exact(env)
    full = _initial_full(_sa_vector(m), env.n)
    return _trace_env(_couple(full, env.thetas, +1.0))


def branch_coherence(rho: DensityOperator) -> float:
    return float(abs(rho.matrix[0, 3]))


def _forward_inverse(psi_sa: np.ndarray, env: EnvironmentSpec):
    full0 = _initial_full(psi_sa, env.n)
    forward = _couple(full0, env.thetas, +1.0)
    back = _couple(forward, env.thetas, -1.0)
    return _trace_env(forward), _trace_env(back), float(np.max(np.abs(back - full0)))


def reverse_and_check(m, env: EnvironmentSpec) -> DecoherenceReport:
    _check_exact(env)
    psi = _sa_vector(m)
    rho0 = density_of(StateVector(psi))
    decohered, restored, _ = _forward_inverse(psi, env)
    residual = float(np.max(np.abs(restored.matrix - rho0.matrix)))

    detector = EnvironmentSpec.uniform(DETECTOR_QUBITS, DETECTOR_THETA)
    det_forward, det_restored, _ = _forward_inverse(psi, detector)
    det_residual = float(np.max(np.abs(det_restored.matrix - rho0.matrix)))

    return DecoherenceReport(
        factor_r=decoherence_factor(env),
        coherence_before=branch_coherence(rho0),
        coherence_decohered=branch_coherence(decohered),
        coherence_after=branch_coherence(restored),
        restore_residual=residual,
        reversible=residual <= RESTORE_TOL,
        detector_factor=decoherence_factor(detector),
        detector_coherence=branch_coherence(det_forward),
        detector_reversible=det_residual <= RESTORE_TOL,
    )


def pointer_basis_check(env: EnvironmentSpec) -> bool:
    """True if the coupling leaves both pointer branches exactly invariant.

    Also requires that an equal superposition of the branches keeps its
    diagonal while its coherence is scaled by the decoherence factor, i.e.
    the environment monitors the pointer basis and nothing else.
    """
    for a in ((1.0, 0.0), (0.0, 1.0)):
        m = premeasure(a)
        before = m.density().matrix
        after = simulate_env_exact(m, env).matrix
        if np.max(np.abs(after - before)) > INVARIANCE_TOL:
            return False
    m = premeasure(EQUAL)
    before = m.density()
    after = simulate_env_exact(m, env)
    diag_ok = np.max(np.abs(np.diag(after.matrix) - np.diag(before.matrix))) <= INVARIANCE_TOL
    expected = abs(decoherence_factor(env)) * branch_coherence(before)
    coherence_ok = abs(branch_coherence(after) - expected) <= INVARIANCE_TOL
    return bool(diag_ok and coherence_ok)

