"""Dense complex linear algebra for small Hilbert spaces.

Values are immutable: every array stored on a :class:`StateVector`,
:class:`Operator` or :class:`DensityOperator` is copied on construction and
marked read-only. Composite systems use a row-major, S-first index
convention, ``index = i_s * dim_a + i_a``.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterator, Literal

import numpy as np

MAX_DIM = 4096

NORM_TOL = 1e-12
UNITARY_TOL = 1e-12
HERMITIAN_TOL = 1e-12
TRACE_TOL = 1e-12
PSD_TOL = 1e-12
EIG_RESIDUAL_TOL = 1e-10
DEGENERACY_TOL = 1e-9


class ValidationError(ValueError):
    """Input violates a structural invariant (norm, shape, hermiticity...)."""


class NotUnitaryError(ValidationError):
    def __init__(self, residual: float):
        self.residual = float(residual)
        super().__init__(
            f"operator is not unitary: max|U^dag U - I| = {self.residual:.3e} "
            f"(tolerance {UNITARY_TOL:g})"
        )


def _frozen(a: np.ndarray) -> np.ndarray:
    a = np.array(a, dtype=complex, copy=True)
    a.setflags(write=False)
    return a


def _check_finite(a: np.ndarray, what: str) -> None:
    if not np.all(np.isfinite(a)):
        raise ValidationError(f"{what} contains NaN or Inf entries")


@dataclass(frozen=True)
class StateVector:
    """Normalized complex amplitude vector over a finite basis."""

    amps: np.ndarray
    label: str | None = None

    def __post_init__(self):
        amps = _frozen(self.amps)
        if amps.ndim != 1 or amps.size == 0:
            raise ValidationError(f"state vector must be 1-D and non-empty, got shape {amps.shape}")
        if amps.size > MAX_DIM:
            raise ValidationError(f"dimension {amps.size} exceeds the cap of {MAX_DIM}")
        _check_finite(amps, "state vector")
        residual = abs(np.linalg.norm(amps) - 1.0)
        if residual > NORM_TOL:
            raise ValidationError(f"state vector not normalized: |norm - 1| = {residual:.3e}")
        object.__setattr__(self, "amps", amps)

    @classmethod
    def basis(cls, dim: int, index: int, label: str | None = None) -> StateVector:
        amps = np.zeros(dim, dtype=complex)
        amps[index] = 1.0
        return cls(amps, label)

    @classmethod
    def from_unnormalized(cls, amps, label: str | None = None) -> StateVector:
        amps = np.asarray(amps, dtype=complex)
        norm = np.linalg.norm(amps)
        if norm == 0:
            raise ValidationError("cannot normalize the zero vector")
        return cls(amps / norm, label)

    @property
    def dim(self) -> int:
        return self.amps.size

    def probabilities(self) -> np.ndarray:
        return np.abs(self.amps) ** 2

    def __len__(self) -> int:
        return self.dim


@dataclass(frozen=True)
class Operator:
    """Square complex matrix acting on a ``dim``-dimensional space."""

    matrix: np.ndarray
    unitary: bool = field(default=False)

    def __post_init__(self):
        m = _frozen(self.matrix)
        if m.ndim != 2 or m.shape[0] != m.shape[1]:
            raise ValidationError(f"operator must be square, got shape {m.shape}")
        _check_finite(m, "operator")
        object.__setattr__(self, "matrix", m)
        if self.unitary:
            res = unitarity_residual(m)
            if res > UNITARY_TOL:
                raise NotUnitaryError(res)

    @property
    def dim(self) -> int:
        return self.matrix.shape[0]

    @property
    def dagger(self) -> Operator:
        return Operator(self.matrix.conj().T, unitary=self.unitary)

    def __matmul__(self, other: Operator) -> Operator:
        return Operator(self.matrix @ other.matrix, unitary=self.unitary and other.unitary)


@dataclass(frozen=True)
class DensityOperator:
    """Hermitian, positive semidefinite, unit-trace matrix."""

    matrix: np.ndarray

    def __post_init__(self):
        m = _frozen(self.matrix)
        if m.ndim != 2 or m.shape[0] != m.shape[1]:
            raise ValidationError(f"density operator must be square, got shape {m.shape}")
        if m.shape[0] > MAX_DIM:
            raise ValidationError(f"dimension {m.shape[0]} exceeds the cap of {MAX_DIM}")
        _check_finite(m, "density operator")
        herm = np.max(np.abs(m - m.conj().T))
        if herm > HERMITIAN_TOL:
            raise ValidationError(f"density operator not Hermitian: max|rho - rho^dag| = {herm:.3e}")
        tr = np.trace(m).real
        if abs(tr - 1.0) > TRACE_TOL:
            raise ValidationError(f"density operator trace is {tr!r}, expected 1")
        lam_min = np.linalg.eigvalsh(m).min()
        if lam_min < -PSD_TOL:
            raise ValidationError(f"density operator has negative eigenvalue {lam_min:.3e}")
        object.__setattr__(self, "matrix", m)

    @property
    def dim(self) -> int:
        return self.matrix.shape[0]

    @classmethod
    def maximally_mixed(cls, dim: int) -> DensityOperator:
        return cls(np.eye(dim, dtype=complex) / dim)

    @classmethod
    def diagonal(cls, weights) -> DensityOperator:
        return cls(np.diag(np.asarray(weights, dtype=complex)))


@dataclass(frozen=True)
class BipartiteShape:
    dim_s: int
    dim_a: int

    def __post_init__(self):
        if self.dim_s < 1 or self.dim_a < 1:
            raise ValidationError("subsystem dimensions must be positive")

    @property
    def dim(self) -> int:
        return self.dim_s * self.dim_a

    def index(self, i_s: int, i_a: int) -> int:
        return i_s * self.dim_a + i_a


QUBIT_PAIR = BipartiteShape(2, 2)


def unitarity_residual(u: np.ndarray) -> float:
    """Max-entry norm of ``U^dag U - I``."""
    u = np.asarray(u)
    return float(np.max(np.abs(u.conj().T @ u - np.eye(u.shape[0]))))


def tensor(u: StateVector, v: StateVector, max_dim: int = MAX_DIM) -> StateVector:
    dim = u.dim * v.dim
    if dim > max_dim:
        raise ValidationError(f"tensor product dimension {dim} exceeds the cap of {max_dim}")
    return StateVector(np.kron(u.amps, v.amps))


def apply(U: Operator, psi: StateVector) -> StateVector:
    """Apply a unitary to a state.

    The unitarity check is repeated here even for operators built with
    ``unitary=True`` so that a plain :class:`Operator` is accepted only when
    it really is unitary.
    """
    if U.dim != psi.dim:
        raise ValidationError(f"dimension mismatch: operator {U.dim}, state {psi.dim}")
    res = unitarity_residual(U.matrix)
    if res > UNITARY_TOL:
        raise NotUnitaryError(res)
    return StateVector(U.matrix @ psi.amps, psi.label)


def density_of(psi: StateVector) -> DensityOperator:
    return DensityOperator(np.outer(psi.amps, psi.amps.conj()))


def partial_trace(
    rho: DensityOperator, shape: BipartiteShape, keep: Literal["S", "A"]
) -> DensityOperator:
    """Reduce a bipartite density operator to one subsystem.

    ``keep="S"`` traces out A and vice versa.
    """
    if rho.dim != shape.dim:
        raise ValidationError(
            f"shape mismatch: rho has dim {rho.dim}, shape implies {shape.dim_s}x{shape.dim_a}"
        )
    r = rho.matrix.reshape(shape.dim_s, shape.dim_a, shape.dim_s, shape.dim_a)
    if keep == "S":
        red = np.einsum("iaja->ij", r)
    elif keep == "A":
        red = np.einsum("sasb->ab", r)
    else:
        raise ValidationError(f"keep must be 'S' or 'A', got {keep!r}")
    # exact Hermitian symmetrization removes rounding asymmetry
    return DensityOperator((red + red.conj().T) / 2)


@dataclass(frozen=True)
class Eigensystem:
    """Eigenpairs of a Hermitian matrix, eigenvalues sorted descending.

    ``degenerate`` lists index pairs ``(i, j)`` whose eigenvalues differ by at
    most ``DEGENERACY_TOL``; within such a pair the eigenvectors are not
    unique.
    """

    values: np.ndarray
    vectors: tuple[StateVector, ...]
    degenerate: tuple[tuple[int, int], ...]

    def __iter__(self) -> Iterator[tuple[float, StateVector]]:
        return iter(zip((float(v) for v in self.values), self.vectors))

    def __len__(self) -> int:
        return len(self.vectors)

    def __getitem__(self, i):
        return float(self.values[i]), self.vectors[i]

    def reconstruct(self) -> np.ndarray:
        return sum(
            lam * np.outer(v.amps, v.amps.conj()) for lam, v in zip(self.values, self.vectors)
        )


def _eig2(h: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    a, d = h[0, 0].real, h[1, 1].real
    b = h[0, 1]
    mean = (a + d) / 2
    half_gap = np.hypot((a - d) / 2, abs(b))
    lam_hi, lam_lo = mean + half_gap, mean - half_gap
    scale = max(abs(a), abs(d), abs(b))
    if half_gap <= np.finfo(float).eps * scale or half_gap < np.finfo(float).tiny:
        return np.array([lam_hi, lam_lo]), np.eye(2, dtype=complex)
    # pick the row whose pivot is bounded away from zero
    if a >= d:
        v = np.array([lam_hi - d, np.conj(b)], dtype=complex)
    else:
        v = np.array([b, lam_hi - a], dtype=complex)
    v /= np.max(np.abs(v))
    v /= np.linalg.norm(v)
    w = np.array([-np.conj(v[1]), np.conj(v[0])])
    return np.array([lam_hi, lam_lo]), np.column_stack([v, w])


def eig_hermitian(h: DensityOperator | Operator | np.ndarray) -> Eigensystem:
    """Eigendecomposition of a small Hermitian matrix (dim <= 4).

    The 2x2 case is closed form. Dimensions 3 and 4 go through LAPACK
    ``zheevd`` via :func:`numpy.linalg.eigh`.
    """
    m = np.asarray(getattr(h, "matrix", h), dtype=complex)
    if m.ndim != 2 or m.shape[0] != m.shape[1]:
        raise ValidationError(f"expected a square matrix, got shape {m.shape}")
    n = m.shape[0]
    if n > 4:
        raise ValidationError(f"eig_hermitian supports dim <= 4, got {n}")
    herm = np.max(np.abs(m - m.conj().T))
    if herm > HERMITIAN_TOL:
        raise ValidationError(f"matrix is not Hermitian: max|H - H^dag| = {herm:.3e}")
    if n == 1:
        vals, vecs = np.array([m[0, 0].real]), np.ones((1, 1), dtype=complex)
    elif n == 2:
        vals, vecs = _eig2(m)
    else:
        vals, vecs = np.linalg.eigh(m)
        vals, vecs = vals[::-1], vecs[:, ::-1]

    recon = (vecs * vals) @ vecs.conj().T
    res = np.max(np.abs(recon - m))
    if res > EIG_RESIDUAL_TOL:
        raise ArithmeticError(f"eigendecomposition residual {res:.3e} exceeds {EIG_RESIDUAL_TOL:g}")

    degenerate = tuple(
        (i, j) for i in range(n) for j in range(i + 1, n) if abs(vals[i] - vals[j]) <= DEGENERACY_TOL
    )
    vectors = tuple(StateVector(vecs[:, k] / np.linalg.norm(vecs[:, k])) for k in range(n))
    return Eigensystem(np.asarray(vals, dtype=float), vectors, degenerate)


def _spectrum(rho: DensityOperator) -> np.ndarray:
    if rho.dim <= 4:
        return eig_hermitian(rho).values
    return np.linalg.eigvalsh(rho.matrix)[::-1]


def purity(rho: DensityOperator) -> float:
    # Tr(rho^2) = sum |rho_ij|^2 for Hermitian rho
    return float(np.sum(np.abs(rho.matrix) ** 2))


def entropy(rho: DensityOperator) -> float:
    """Von Neumann entropy in nats, with ``0 ln 0 = 0``."""
    lam = np.clip(_spectrum(rho), 0.0, None)
    lam = lam[lam > 0]
    return float(max(0.0, -np.sum(lam * np.log(lam))))
