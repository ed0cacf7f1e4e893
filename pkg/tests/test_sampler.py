import numpy as np
import pytest
from scipy import stats

from entanglab.interferometry import (
    CHSHSettings,
    JointDistribution,
    PhaseSettings,
    bell_pair,
    joint_distribution,
    mixture,
    phase_grid,
)
from entanglab.qlinalg import ValidationError
from entanglab.sampler import (
    CountsTable,
    SampleConfig,
    chsh_from_counts,
    estimate_E,
    mix64,
    sample_joint,
    splitmix64,
)


def bell_joint(delta):
    return joint_distribution(bell_pair(), PhaseSettings(delta, 0.0))


class TestMixing:
    def test_splitmix64_reference_stream(self):
        # first two outputs of SplitMix64 seeded with 0
        assert mix64(0, 0) == 0xE220A8397B1DCDAF
        assert mix64(0, 1) == 0x6E789E6AA1B965F4

    def test_distinct_subseeds(self):
        assert len({mix64(42, k) for k in range(1000)}) == 1000

    def test_range(self):
        assert 0 <= splitmix64(2**64 - 1) < 2**64


class TestConfig:
    @pytest.mark.parametrize("kwargs", [dict(seed=-1, n_events=10), dict(seed=2**64, n_events=10),
                                        dict(seed=1, n_events=0), dict(seed=1, n_events=5, shards=0)])
    def test_rejects(self, kwargs):
        with pytest.raises(ValidationError):
            SampleConfig(**kwargs)

    def test_shard_sizes(self):
        assert SampleConfig(1, 10, 3).shard_sizes() == [4, 3, 3]
        assert sum(SampleConfig(1, 10**6, 7).shard_sizes()) == 10**6


class TestSampleJoint:
    def test_degenerate(self):
        for seed in (0, 7, 2**64 - 1):
            c = sample_joint(JointDistribution(1, 0, 0, 0), SampleConfig(seed, 1000))
            assert c == CountsTable(1000, 0, 0, 0)

    def test_zero_probability_never_drawn(self):
        c = sample_joint(bell_joint(0.0), SampleConfig(42, 10**6))
        assert c.n_ud == 0 and c.n_du == 0
        assert c.n_events == 10**6

    def test_frozen_counts(self):
        # PCG64 + SplitMix64 sub-seeding is part of the documented contract
        j = bell_joint(np.pi / 2)
        assert sample_joint(j, SampleConfig(42, 10**6)) == CountsTable(249952, 250429, 249720, 249899)
        assert sample_joint(j, SampleConfig(42, 10**6, shards=4)) == CountsTable(249682, 250088, 250498, 249732)

    def test_five_sigma(self):
        n = 10**6
        c = sample_joint(bell_joint(np.pi / 2), SampleConfig(42, n))
        sigma = np.sqrt(n * 0.25 * 0.75)
        assert np.all(np.abs(c.as_array() - 250_000) <= 5 * sigma)

    def test_deterministic(self):
        cfg = SampleConfig(123, 50_000, 5)
        j = bell_joint(1.0)
        assert sample_joint(j, cfg) == sample_joint(j, cfg)

    def test_threaded_shards_match_serial(self):
        cfg = SampleConfig(9, 200_003, 8)
        j = bell_joint(0.4)
        assert sample_joint(j, cfg, workers=4) == sample_joint(j, cfg)

    def test_sharding_changes_counts_not_statistics(self):
        j = bell_joint(np.pi / 3)
        n = 10**6
        for shards in (1, 2, 16):
            e, se = estimate_E(sample_joint(j, SampleConfig(5, n, shards)))
            assert abs(e - 0.5) <= 5 * se
        assert sample_joint(j, SampleConfig(5, n, 1)) != sample_joint(j, SampleConfig(5, n, 2))


class TestEstimateE:
    def test_deterministic_table(self):
        assert estimate_E(CountsTable(1000, 0, 0, 0)) == (1.0, 0.0)

    def test_symmetric(self):
        e, se = estimate_E(CountsTable(250, 250, 250, 250))
        assert e == 0
        assert se == pytest.approx(1 / np.sqrt(1000))
        assert se == pytest.approx(0.0316, abs=1e-4)

    def test_pi_over_three(self):
        e, se = estimate_E(sample_joint(bell_joint(np.pi / 3), SampleConfig(42, 10**6)))
        assert abs(e - 0.5) <= 5 * se

    def test_empty(self):
        with pytest.raises(ValidationError):
            estimate_E(CountsTable(0, 0, 0, 0))

    def test_error_shrinks_with_n(self):
        # averaged over seeds so the trend is not hostage to one draw
        j = bell_joint(np.pi / 3)
        errs = []
        for n in (10**3, 10**4, 10**5, 10**6):
            devs = [abs(estimate_E(sample_joint(j, SampleConfig(s, n)))[0] - 0.5) for s in range(8)]
            errs.append(np.mean(devs))
        assert errs[0] > errs[1] > errs[2] > errs[3]
        assert errs[-1] < 5 * np.sqrt(0.75 / 10**6)


class TestCHSHFromCounts:
    def test_violation(self):
        s_hat, se = chsh_from_counts(bell_pair(), cfg=SampleConfig(42, 10**6))
        assert abs(s_hat - 2 * np.sqrt(2)) <= 5 * se
        assert s_hat > 2

    def test_mixture_classical(self):
        s_hat, se = chsh_from_counts(mixture(), cfg=SampleConfig(42, 10**6))
        assert abs(s_hat) <= 2 + 5 * se

    def test_degenerate_angles(self):
        s_hat, se = chsh_from_counts(bell_pair(), CHSHSettings(0, 0, 0, 0), SampleConfig(3, 10**4))
        assert s_hat == pytest.approx(2)
        assert se == 0.0


def test_empirical_no_signaling():
    """S's local counts are homogeneous across A's phase (chi-square, alpha = 1e-6)."""
    phases = phase_grid(8)
    cfg = SampleConfig(2024, 100_000)
    for i, phi_s in enumerate(phases):
        table = []
        for k, phi_a in enumerate(phases):
            counts = sample_joint(joint_distribution(bell_pair(), (phi_s, phi_a)), cfg.derive(i * 100 + k))
            table.append(counts.marginal_counts("S"))
        _, p_value, _, _ = stats.chi2_contingency(np.array(table))
        assert p_value > 1e-6
