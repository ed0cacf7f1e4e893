"""Seeded Monte Carlo detection events and count-based estimators.

Generator: NumPy's ``PCG64`` bit generator (O'Neill's permuted congruential
generator, 128-bit state, 64-bit output) driving ``Generator.random`` for
uniform doubles in ``[0, 1)``. Each event outcome is the inverse CDF of the
four-outcome distribution in ``(uu, ud, du, dd)`` order, i.e.
``searchsorted(cdf, u, side="right")``, so zero-probability outcomes are
never drawn.

Shard ``k`` of a run seeded with ``seed`` uses the PCG64 seed
``mix64(seed, k)`` (SplitMix64 finalizer applied to
``seed + (k + 1) * 0x9E3779B97F4A7C15 mod 2**64``). Shard ``k`` draws
``n // shards`` events plus one if ``k < n % shards``. Counts are summed over
shards, so the result does not depend on the order shards finish in.
"""

from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np

from .interferometry import (
    CHSHSettings,
    JointDistribution,
    PhaseSettings,
    STANDARD_CHSH,
    State,
    joint_distribution,
)
from .qlinalg import ValidationError

_MASK64 = (1 << 64) - 1
_GOLDEN = 0x9E3779B97F4A7C15
# Born probabilities below this are rounding noise from amplitudes that cancel
ZERO_PROB = 1e-15


def splitmix64(x: int) -> int:
    x &= _MASK64
    x = ((x ^ (x >> 30)) * 0xBF58476D1CE4E5B9) & _MASK64
    x = ((x ^ (x >> 27)) * 0x94D049BB133111EB) & _MASK64
    return x ^ (x >> 31)


def mix64(seed: int, k: int) -> int:
    return splitmix64((seed + (k + 1) * _GOLDEN) & _MASK64)


@dataclass(frozen=True)
class SampleConfig:
    seed: int
    n_events: int
    shards: int = 1

    def __post_init__(self):
        if not 0 <= self.seed <= _MASK64:
            raise ValidationError(f"seed must be an unsigned 64-bit integer, got {self.seed}")
        if self.n_events < 1:
            raise ValidationError(f"n_events must be positive, got {self.n_events}")
        if self.shards < 1:
            raise ValidationError(f"shards must be positive, got {self.shards}")

    def shard_sizes(self) -> list[int]:
        q, rem = divmod(self.n_events, self.shards)
        return [q + (1 if k < rem else 0) for k in range(self.shards)]

    def derive(self, k: int) -> SampleConfig:
        """Independent config for the ``k``-th sub-experiment."""
        return SampleConfig(mix64(self.seed, k), self.n_events, self.shards)


@dataclass(frozen=True)
class CountsTable:
    n_uu: int
    n_ud: int
    n_du: int
    n_dd: int

    def __post_init__(self):
        if min(self.as_array()) < 0:
            raise ValidationError("counts must be non-negative")

    def as_array(self) -> np.ndarray:
        return np.array([self.n_uu, self.n_ud, self.n_du, self.n_dd], dtype=np.int64)

    @property
    def n_events(self) -> int:
        return int(self.as_array().sum())

    def marginal_counts(self, which: str) -> tuple[int, int]:
        if which == "S":
            return self.n_uu + self.n_ud, self.n_du + self.n_dd
        if which == "A":
            return self.n_uu + self.n_du, self.n_ud + self.n_dd
        raise ValidationError(f"which must be 'S' or 'A', got {which!r}")


def _cdf(j: JointDistribution) -> np.ndarray:
    p = j.as_array()
    p = np.where(p < ZERO_PROB, 0.0, p)
    cdf = np.cumsum(p / p.sum())
    cdf[-1] = 1.0
    return cdf


def _draw_shard(cdf: np.ndarray, seed: int, n: int) -> np.ndarray:
    rng = np.random.Generator(np.random.PCG64(seed))
    u = rng.random(n)
    outcomes = np.searchsorted(cdf, u, side="right")
    return np.bincount(outcomes, minlength=4)[:4]


def sample_joint(j: JointDistribution, cfg: SampleConfig, workers: int | None = None) -> CountsTable:
    """Draw ``cfg.n_events`` independent detection pairs from ``j``.

    ``workers`` > 1 evaluates shards on a thread pool; the counts are the
    same either way.
    """
    cdf = _cdf(j)
    jobs = [(cdf, mix64(cfg.seed, k), n) for k, n in enumerate(cfg.shard_sizes()) if n > 0]
    if workers and workers > 1 and len(jobs) > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            parts = list(pool.map(lambda job: _draw_shard(*job), jobs))
    else:
        parts = [_draw_shard(*job) for job in jobs]
    total = np.sum(parts, axis=0)
    return CountsTable(*(int(x) for x in total))


def estimate_E(c: CountsTable) -> tuple[float, float]:
    n = c.n_events
    if n < 1:
        raise ValidationError("cannot estimate from an empty table")
    e_hat = (c.n_uu + c.n_dd - c.n_ud - c.n_du) / n
    return e_hat, math.sqrt(max(0.0, 1.0 - e_hat**2) / n)


def chsh_from_counts(
    state: State, s: CHSHSettings = STANDARD_CHSH, cfg: SampleConfig = SampleConfig(42, 10**6)
) -> tuple[float, float]:
    """Empirical CHSH value and its standard error.

    The four settings pairs ``(a,b), (a,b'), (a',b), (a',b')`` use the
    derived configs ``cfg.derive(0..3)``.
    """
    pairs = [(s.a, s.b, +1), (s.a, s.b_prime, -1), (s.a_prime, s.b, +1), (s.a_prime, s.b_prime, +1)]
    s_hat, var = 0.0, 0.0
    for k, (phi_s, phi_a, sign) in enumerate(pairs):
        counts = sample_joint(joint_distribution(state, PhaseSettings(phi_s, phi_a)), cfg.derive(k))
        e, se = estimate_E(counts)
        s_hat += sign * e
        var += se**2
    return s_hat, math.sqrt(var)
