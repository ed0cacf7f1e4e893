"""Two-station interferometer for photon pairs.

Each station is a phase shifter followed by a symmetric 50:50 beam splitter
and two detectors, ``u`` and ``d``. The splitter sends path 1 to
``(|u> + i|d>)/sqrt(2)`` and path 2 to ``(i|u> + |d>)/sqrt(2)``.

Station S shifts path 2 by ``phi_s``. Station A shifts path 1 by ``phi_a``
and its detectors are labelled the other way round (its ``u`` detector sits
on the splitter's second output port). With the pair prepared in
``(|s1 a1> + |s2 a2>)/sqrt(2)`` and ``s_i``/``a_i`` identified with path
``i`` this gives coincidence probabilities ``(1 +/- cos(phi_s - phi_a))/4``.
Without the relabelling at A the same geometry gives ``(1 -/+ cos)/4``.

States may be given as a 4-dim :class:`StateVector` or
:class:`DensityOperator` in the S-first composite convention.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Literal, Sequence, Union

import numpy as np

from .qlinalg import DensityOperator, Operator, StateVector, ValidationError
from .states import EQUAL, collapse_mixture, premeasure

PROB_TOL = 1e-12
# cosine fringes must be sampled at no fewer than this many phases
MIN_GRID = 8

State = Union[StateVector, DensityOperator]

BEAM_SPLITTER = np.array([[1, 1j], [1j, 1]], dtype=complex) / np.sqrt(2)
_SWAP = np.array([[0, 1], [1, 0]], dtype=complex)


@dataclass(frozen=True)
class PhaseSettings:
    phi_s: float
    phi_a: float

    def __post_init__(self):
        if not (np.isfinite(self.phi_s) and np.isfinite(self.phi_a)):
            raise ValidationError("phase angles must be finite")


@dataclass(frozen=True)
class CHSHSettings:
    """Two analyzer phases per station; ``a``'s at S, ``b``'s at A."""

    a: float
    a_prime: float
    b: float
    b_prime: float

    def __post_init__(self):
        if not np.all(np.isfinite([self.a, self.a_prime, self.b, self.b_prime])):
            raise ValidationError("CHSH angles must be finite")


STANDARD_CHSH = CHSHSettings(0.0, np.pi / 2, np.pi / 4, 3 * np.pi / 4)


@dataclass(frozen=True)
class JointDistribution:
    p_uu: float
    p_ud: float
    p_du: float
    p_dd: float

    def __post_init__(self):
        p = self.as_array()
        if not np.all(np.isfinite(p)):
            raise ValidationError("probabilities must be finite")
        if np.any(p < -PROB_TOL) or np.any(p > 1 + PROB_TOL):
            raise ValidationError(f"probabilities out of range: {p}")
        if abs(p.sum() - 1.0) > PROB_TOL:
            raise ValidationError(f"probabilities sum to {p.sum()!r}")

    def as_array(self) -> np.ndarray:
        """Probabilities in ``(uu, ud, du, dd)`` order."""
        return np.array([self.p_uu, self.p_ud, self.p_du, self.p_dd], dtype=float)

    @classmethod
    def from_array(cls, p) -> JointDistribution:
        p = np.asarray(p, dtype=float).ravel()
        return cls(*(float(x) for x in p))


def station_unitary(phi: float, station: Literal["S", "A"] = "S") -> Operator:
    """Phase shifter plus beam splitter for one station, paths -> (u, d)."""
    if not np.isfinite(phi):
        raise ValidationError("phase must be finite")
    if station == "S":
        return Operator(BEAM_SPLITTER @ np.diag([1.0, np.exp(1j * phi)]), unitary=True)
    if station == "A":
        return Operator(_SWAP @ BEAM_SPLITTER @ np.diag([np.exp(1j * phi), 1.0]), unitary=True)
    raise ValidationError(f"station must be 'S' or 'A', got {station!r}")


def _station_stack(phis, station: str) -> np.ndarray:
    phis = np.asarray(phis, dtype=float)
    e = np.exp(1j * phis)
    u = np.empty(phis.shape + (2, 2), dtype=complex)
    if station == "S":
        u[..., 0, 0], u[..., 0, 1] = 1, 1j * e
        u[..., 1, 0], u[..., 1, 1] = 1j, e
    else:
        u[..., 0, 0], u[..., 0, 1] = 1j * e, 1
        u[..., 1, 0], u[..., 1, 1] = e, 1j
    return u / np.sqrt(2)


def _as_pair(state: State):
    if isinstance(state, StateVector):
        if state.dim != 4:
            raise ValidationError(f"expected a two-qubit state (dim 4), got dim {state.dim}")
        return "pure", state.amps.reshape(2, 2)
    if isinstance(state, DensityOperator):
        if state.dim != 4:
            raise ValidationError(f"expected a two-qubit state (dim 4), got dim {state.dim}")
        return "mixed", state.matrix.reshape(2, 2, 2, 2)
    raise ValidationError(f"unsupported state type {type(state).__name__}")


def joint_grid(state: State, phis_s, phis_a) -> np.ndarray:
    """Joint outcome probabilities on the outer grid ``phis_s x phis_a``.

    Returns an array of shape ``(len(phis_s), len(phis_a), 2, 2)`` indexed
    ``[i, j, outcome_s, outcome_a]`` with outcome 0 = ``u``, 1 = ``d``.
    """
    kind, data = _as_pair(state)
    us = _station_stack(np.atleast_1d(phis_s), "S")
    ua = _station_stack(np.atleast_1d(phis_a), "A")
    if kind == "pure":
        # amp[i, j, x, y] = sum_{k,l} us[i,x,k] ua[j,y,l] psi[k,l]
        amp = np.einsum("ixk,jyl,kl->ijxy", us, ua, data, optimize=True)
        return np.abs(amp) ** 2
    p = np.einsum(
        "ixk,jyl,klmn,ixm,jyn->ijxy", us, ua, data, us.conj(), ua.conj(), optimize=True
    )
    return p.real


def joint_distribution(state: State, settings: PhaseSettings | Sequence[float]) -> JointDistribution:
    if not isinstance(settings, PhaseSettings):
        settings = PhaseSettings(*settings)
    p = joint_grid(state, [settings.phi_s], [settings.phi_a])[0, 0]
    return JointDistribution.from_array(p)


def marginal(j: JointDistribution, which: Literal["S", "A"]) -> tuple[float, float]:
    """``(p_u, p_d)`` at one station."""
    if which == "S":
        return j.p_uu + j.p_ud, j.p_du + j.p_dd
    if which == "A":
        return j.p_uu + j.p_du, j.p_ud + j.p_dd
    raise ValidationError(f"which must be 'S' or 'A', got {which!r}")


def correlation_E(j: JointDistribution) -> float:
    return j.p_uu + j.p_dd - j.p_ud - j.p_du


def phase_grid(grid_n: int) -> np.ndarray:
    if grid_n < MIN_GRID:
        raise ValidationError(f"grid_n must be at least {MIN_GRID}, got {grid_n}")
    return 2 * np.pi * np.arange(grid_n) / grid_n


def _visibility(rate: np.ndarray) -> tuple[float, bool]:
    hi, lo = float(rate.max()), float(rate.min())
    if hi + lo <= PROB_TOL:
        return 0.0, True
    return (hi - lo) / (hi + lo), False


@dataclass(frozen=True)
class FringeVisibility:
    coincidence: float
    local: float
    degenerate: bool = False


def fringe_visibility(state: State, phi_a_fixed: float = 0.0, grid_n: int = 64) -> FringeVisibility:
    """Visibility of the ``uu`` coincidence rate and of S's local ``u`` rate.

    Both rates are swept over ``grid_n`` equally spaced values of ``phi_s``
    with ``phi_a`` held fixed. ``degenerate`` is set when the coincidence
    rate vanishes everywhere on the grid.
    """
    p = joint_grid(state, phase_grid(grid_n), [phi_a_fixed])[:, 0]
    coinc, degenerate = _visibility(p[:, 0, 0])
    local, _ = _visibility(p[:, 0, :].sum(axis=-1))
    return FringeVisibility(coinc, local, degenerate)


def _correlations(state: State, phis_s, phis_a) -> np.ndarray:
    p = joint_grid(state, phis_s, phis_a)
    return p[..., 0, 0] + p[..., 1, 1] - p[..., 0, 1] - p[..., 1, 0]


def chsh(state: State, s: CHSHSettings = STANDARD_CHSH) -> float:
    """``E(a,b) - E(a,b') + E(a',b) + E(a',b')``."""
    E = _correlations(state, [s.a, s.a_prime], [s.b, s.b_prime])
    return float(E[0, 0] - E[0, 1] + E[1, 0] + E[1, 1])


@dataclass(frozen=True)
class NoSignalingAudit:
    """Remote-phase dependence of each station's local statistics.

    ``deviation_s[i]`` is the largest change in S's ``p_u`` at its own phase
    ``phases[i]`` as A's phase runs over the grid; ``deviation_a`` likewise
    for A.
    """

    max_marginal_deviation: float
    phases: np.ndarray
    deviation_s: np.ndarray
    deviation_a: np.ndarray

    def rows(self) -> list[dict]:
        return [
            {"phi": float(phi), "station_s": float(ds), "station_a": float(da)}
            for phi, ds, da in zip(self.phases, self.deviation_s, self.deviation_a)
        ]


def no_signaling_audit(state: State, grid_n: int = 32) -> NoSignalingAudit:
    phases = phase_grid(grid_n)
    p = joint_grid(state, phases, phases)
    pu_s = p[:, :, 0, :].sum(axis=-1)  # [phi_s, phi_a]
    pu_a = p[:, :, :, 0].sum(axis=-1)
    dev_s = pu_s.max(axis=1) - pu_s.min(axis=1)
    dev_a = pu_a.max(axis=0) - pu_a.min(axis=0)
    worst = float(max(dev_s.max(), dev_a.max()))
    return NoSignalingAudit(worst, phases, dev_s, dev_a)


@dataclass(frozen=True)
class PhaseFlipRow:
    settings: PhaseSettings
    joint: JointDistribution
    E: float
    marginal_s: tuple[float, float]
    marginal_a: tuple[float, float]


def phase_flip_report(
    state: State | None = None,
    settings: Sequence[tuple[float, float]] = ((0.0, 0.0), (np.pi / 2, 0.0), (np.pi, 0.0)),
) -> list[PhaseFlipRow]:
    """Joint statistics as S's phase is switched with A's held at zero.

    On the entangled pair E runs from +1 through 0 to -1 while A's marginal
    stays at (1/2, 1/2).
    """
    state = bell_pair() if state is None else state
    rows = []
    for phi_s, phi_a in settings:
        ps = PhaseSettings(phi_s, phi_a)
        j = joint_distribution(state, ps)
        rows.append(PhaseFlipRow(ps, j, correlation_E(j), marginal(j, "S"), marginal(j, "A")))
    return rows


def bell_pair() -> StateVector:
    """The equal-amplitude measurement state ``(|s1 a1> + |s2 a2>)/sqrt(2)``."""
    return premeasure(EQUAL).psi


def mixture(a=EQUAL) -> DensityOperator:
    return collapse_mixture(a)
