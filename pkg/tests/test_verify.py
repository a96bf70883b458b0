import math

import numpy as np
import pytest

from midsearch.errors import MaxRoundsExceeded
from midsearch.game import GameMatrix, NoiseModel, SamplingOracle, hardness_stats, psne_exact
from midsearch.instances import AHardParams, mab_to_game, make_a_hard, make_random_strict
from midsearch.verify import (
    BAI_METHODS,
    MetaSchedule,
    VerifyConfig,
    best_arm_identify,
    column_arms,
    mab_arms,
    meta_find_psne,
    row_arms_negated,
    verify,
)

PRICE = GameMatrix(np.array([[0.0, 0.25], [-0.25, 0.0]]), noise=NoiseModel(kind="zero"))


def gaussian_bandit(means):
    return SamplingOracle(
        GameMatrix(np.asarray(means, float).reshape(-1, 1), noise=NoiseModel(kind="gaussian")),
        seed=0,
    )


class TestBestArm:
    def test_single_arm_costs_nothing(self):
        o = gaussian_bandit([0.4])
        assert best_arm_identify(mab_arms(o), 100, 0.05) == 0
        assert o.total_count == 0

    def test_two_arms_zero_noise(self):
        o = SamplingOracle(
            GameMatrix(np.array([[1.0], [0.0]]), noise=NoiseModel(kind="zero")), seed=0
        )
        assert best_arm_identify(mab_arms(o), 10_000, 0.05) == 0

    def test_eight_gaussian_arms_within_cap(self):
        # all gaps 0.2; cap from the instance hardness
        means = [0.2] + [0.0] * 7
        h0 = 7 / 0.2**2
        cap = int(10 * h0 * math.log(math.log(h0) * 20))
        ok = 0
        for seed in range(100):
            o = SamplingOracle(
                GameMatrix(np.asarray(means).reshape(-1, 1), noise=NoiseModel(kind="gaussian")),
                seed=seed,
            )
            got = best_arm_identify(mab_arms(o), cap, 0.05, rng=np.random.default_rng(seed))
            assert o.total_count <= cap
            ok += got == 0
        assert ok >= 95

    @pytest.mark.parametrize("method", BAI_METHODS)
    def test_cap_respected_exactly(self, method):
        o = gaussian_bandit([0.5, 0.3, 0.1, 0.0])
        cap = 500
        best_arm_identify(mab_arms(o), cap, 0.1, rng=np.random.default_rng(1), method=method)
        assert o.total_count <= cap

    @pytest.mark.parametrize("method", BAI_METHODS)
    def test_zero_noise_never_wrong(self, method, rng):
        for _ in range(20):
            k = int(rng.integers(1, 9))
            means = np.round(rng.uniform(-0.9, 0.9, size=k), 3)
            o = SamplingOracle(
                GameMatrix(means.reshape(-1, 1), noise=NoiseModel(kind="zero")),
                seed=int(rng.integers(1 << 30)),
            )
            got = best_arm_identify(
                mab_arms(o), 200_000, 0.1, rng=np.random.default_rng(3), method=method
            )
            if got is not None:
                assert means[got] == means.max()

    def test_tied_best_never_terminates(self):
        o = SamplingOracle(
            GameMatrix(np.array([[0.5], [0.5], [0.1]]), noise=NoiseModel(kind="zero")), seed=0
        )
        assert best_arm_identify(mab_arms(o), 50_000, 0.1) is None


class TestVerify:
    def test_zero_noise_true_pair_accepted(self):
        o = SamplingOracle(PRICE, seed=0)
        assert verify(o, 0, 0, 0.1, 0.25) is True

    def test_duplicated_column_max_rejected(self):
        # column 0 maximum is shared, so the row instance has no unique best
        a = np.array([[0.5, 0.9], [0.5, 0.95]])
        o = SamplingOracle(GameMatrix(a, noise=NoiseModel(kind="zero")), seed=0)
        assert verify(o, 0, 0, 0.1, 0.5) is False

    def test_wrong_pair_rejected_statistically(self):
        m = make_a_hard(AHardParams(8, 0.05, 0.1))
        gap = hardness_stats(m).delta_g
        rejected = 0
        for seed in range(100):
            o = SamplingOracle(m, seed=seed)
            rejected += not verify(o, 1, 1, 0.1, gap, rng=np.random.default_rng(seed))
        assert rejected >= 90

    def test_sample_bound_two_caps(self):
        m = make_a_hard(AHardParams(8, 0.05, 0.1))
        gap = hardness_stats(m).delta_g
        cfg = VerifyConfig.for_guess(8, 8, gap, 0.1)
        for seed in range(5):
            o = SamplingOracle(m, seed=seed)
            verify(o, 0, 0, 0.1, gap, rng=np.random.default_rng(seed))
            assert o.total_count <= 2 * cfg.bandit_cap()

    def test_cap_formula_guard(self):
        # tiny instances keep a positive budget
        cfg = VerifyConfig.for_guess(1, 2, 2.0, 0.1)
        assert cfg.bandit_cap() >= 1
        cfg = VerifyConfig.for_guess(16, 16, 0.1, 0.05)
        h = 30 / 0.01
        assert cfg.bandit_cap() == math.ceil(8 * h * math.log(max(math.e, math.log(h)) / 0.05))

    def test_arm_views(self):
        o = SamplingOracle(PRICE, seed=0)
        col = column_arms(o, 1)
        assert col.k == 2
        # negated rows: the best arm of the view is the row minimizer
        neg = row_arms_negated(o, 0)
        vals = neg.pull_means(np.arange(2), 10)
        assert vals[0] == 0.0 and vals[1] == -0.25


class TestMetaSchedule:
    def test_formulas(self):
        for t in range(1, 12):
            s = MetaSchedule.at(t, 0.1)
            assert s.gap_t == 2.0 ** (1 - t)
            assert s.delta_t == 0.1 / (4 * t * t)

    def test_failure_mass_below_half(self):
        total = sum(MetaSchedule.at(t, 1.0).delta_t for t in range(1, 100000))
        assert total < 0.5


class TestMeta:
    def test_zero_noise_price_game_fast_accept(self):
        o = SamplingOracle(PRICE, seed=5)
        res = meta_find_psne(o, 0.1)
        assert res.pair == (0, 0)
        assert res.rounds <= 2

    def test_exact_finder_mode(self):
        o = SamplingOracle(PRICE, seed=5)
        res = meta_find_psne(o, 0.1, finder="exact")
        assert res.pair == (0, 0)
        assert res.rounds <= 3

    def test_trajectory_monotone_samples(self):
        m = make_random_strict(4, 4, seed=2)
        o = SamplingOracle(m, seed=3)
        res = meta_find_psne(o, 0.1)
        cps = res.run.checkpoints
        assert (np.diff(cps) > 0).all() if len(cps) > 1 else True
        assert res.run.samples_used == o.total_count

    def test_statistical_on_hard_instance(self):
        m = make_a_hard(AHardParams(16, 0.05, 0.1))
        ok = 0
        for seed in range(100):
            o = SamplingOracle(m, seed=np.random.SeedSequence(11, spawn_key=(seed,)))
            res = meta_find_psne(o, 0.1, rng=np.random.default_rng(seed))
            ok += res.pair == (0, 0)
        assert ok >= 90

    def test_no_saddle_raises(self):
        rps = GameMatrix(
            np.array([[0.0, 1.0, -1.0], [-1.0, 0.0, 1.0], [1.0, -1.0, 0.0]]),
            noise=NoiseModel(kind="zero"),
        )
        o = SamplingOracle(rps, seed=0)
        with pytest.raises(MaxRoundsExceeded):
            meta_find_psne(o, 0.1, max_rounds=6)

    def test_zero_noise_soundness_sample(self, rng):
        failures = 0
        for trial in range(40):
            n = int(rng.integers(2, 9))
            m = int(rng.integers(2, 9))
            from conftest import planted_strict

            mat, truth = planted_strict(n, m, rng)
            o = SamplingOracle(mat, seed=trial)
            res = meta_find_psne(o, 0.1, rng=np.random.default_rng(trial))
            failures += res.pair != truth
        assert failures == 0
