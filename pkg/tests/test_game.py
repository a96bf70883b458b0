import json
import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from midsearch.errors import InvalidParams, NoStrictPSNE
from midsearch.game import (
    GameMatrix,
    NoiseModel,
    SamplingOracle,
    empirical_saddle,
    hardness_stats,
    matrix_from_dict,
    matrix_to_dict,
    psne_exact,
    saddle_violation,
)

from conftest import brute_force_psne

PRICE_GAME = np.array([[0.0, 0.25], [-0.25, 0.0]])
RPS = np.array([[0.0, 1.0, -1.0], [-1.0, 0.0, 1.0], [1.0, -1.0, 0.0]])


class TestPsneExact:
    def test_price_game(self):
        p = psne_exact(PRICE_GAME)
        assert (p.row, p.col, p.strict) == (0, 0, True)

    def test_single_entry(self):
        p = psne_exact([[0.7]])
        assert (p.row, p.col, p.strict) == (0, 0, True)

    def test_rock_paper_scissors(self):
        assert psne_exact(RPS) is None

    def test_non_strict_flagged(self):
        # duplicated column maximum
        p = psne_exact([[0.5, 0.9], [0.5, 0.8]])
        assert p is not None and not p.strict

    def test_matches_brute_force_on_random(self, rng):
        for _ in range(300):
            n, m = rng.integers(1, 9, size=2)
            a = rng.uniform(-1, 1, size=(n, m))
            got = psne_exact(a)
            want = brute_force_psne(a)
            if want is None:
                assert got is None
            else:
                assert (got.row, got.col, got.strict) == want


class TestHardnessStats:
    def test_price_game_values(self):
        st_ = hardness_stats(GameMatrix(PRICE_GAME))
        assert st_.h1 == pytest.approx(32.0, rel=1e-12)
        assert st_.delta_g == pytest.approx(0.25, rel=1e-12)
        assert st_.delta_min == pytest.approx(0.25, rel=1e-12)

    def test_recompute_by_independent_summation(self, rng):
        for _ in range(50):
            from conftest import planted_strict

            m, (i, j) = planted_strict(6, 5, rng)
            st_ = hardness_stats(m)
            a = m.entries
            v = a[i, j]
            h1 = sum(1.0 / (v - a[k, j]) ** 2 for k in range(6) if k != i)
            h1 += sum(1.0 / (a[i, k] - v) ** 2 for k in range(5) if k != j)
            assert st_.h1 == pytest.approx(h1, rel=1e-12)
            assert st_.delta_g == pytest.approx(math.sqrt((6 + 5 - 2) / h1), rel=1e-12)

    def test_rejects_no_saddle(self):
        with pytest.raises(NoStrictPSNE):
            hardness_stats(GameMatrix(RPS))

    def test_rejects_non_strict(self):
        with pytest.raises(NoStrictPSNE):
            hardness_stats(GameMatrix(np.array([[0.5, 0.9], [0.5, 0.8]])))

    def test_dueling_condorcet_maps_to_diagonal(self):
        p = np.array([[0.5, 0.7, 0.6], [0.3, 0.5, 0.4], [0.4, 0.6, 0.5]])
        got = psne_exact(p)
        assert (got.row, got.col) == (0, 0) and got.strict


class TestSamplingOracle:
    def test_zero_noise_exact(self):
        m = GameMatrix(np.array([[0.3]]), noise=NoiseModel(kind="zero"))
        o = SamplingOracle(m, seed=0)
        assert o.sample(0, 0) == 0.3
        assert o.total_count == 1
        assert o.per_entry_counts[0, 0] == 1

    def test_degenerate_bernoulli(self):
        m = GameMatrix(np.array([[1.0]]), noise=NoiseModel(kind="bernoulli"))
        o = SamplingOracle(m, seed=0)
        assert all(o.sample(0, 0) == 1.0 for _ in range(20))

    def test_gaussian_large_sample_mean(self):
        m = GameMatrix(np.array([[0.0]]), noise=NoiseModel(kind="gaussian", sigma=1.0))
        o = SamplingOracle(m, seed=123)
        # the mean of 1e6 unit-gaussian draws leaves [-0.005, 0.005] with
        # probability below 1e-6 (5 sigma)
        assert abs(o.sample_mean(0, 0, 10**6)) < 0.005
        assert o.total_count == 10**6

    def test_determinism_bitwise(self):
        m = GameMatrix(np.array([[0.2, -0.4], [0.9, 0.1]]))
        seq = [(0, 1), (1, 0), (1, 1), (0, 0), (0, 1)]
        runs = []
        for _ in range(2):
            o = SamplingOracle(m, seed=77)
            runs.append([o.sample(i, j) for i, j in seq] + [o.sample_mean(1, 1, 50)])
        assert runs[0] == runs[1]

    def test_index_out_of_range(self):
        o = SamplingOracle(GameMatrix(PRICE_GAME), seed=0)
        with pytest.raises(IndexError):
            o.sample(2, 0)
        with pytest.raises(IndexError):
            o.sample_mean_many([0], [5], 3)

    @given(
        st.lists(
            st.tuples(st.integers(0, 2), st.integers(0, 1), st.integers(1, 40)),
            min_size=1,
            max_size=30,
        )
    )
    @settings(max_examples=50, deadline=None)
    def test_counter_conservation(self, queries):
        m = GameMatrix(np.zeros((3, 2)) + 0.1)
        o = SamplingOracle(m, seed=5)
        for i, j, c in queries:
            if c == 1:
                o.sample(i, j)
            else:
                o.sample_mean(i, j, c)
        assert o.total_count == int(o.per_entry_counts.sum())
        assert o.total_count == sum(c for _, _, c in queries)

    def test_batch_many_counts(self):
        m = GameMatrix(np.full((2, 2), 0.5), noise=NoiseModel(kind="bernoulli"))
        o = SamplingOracle(m, seed=3)
        rows = np.array([0, 0, 1, 0])
        cols = np.array([0, 0, 1, 1])
        o.sample_mean_many(rows, cols, 10)
        assert o.per_entry_counts[0, 0] == 20  # repeated pair gets two batches
        assert o.per_entry_counts[1, 1] == 10
        assert o.total_count == 40

    def test_bernoulli_requires_unit_interval(self):
        with pytest.raises(InvalidParams):
            GameMatrix(np.array([[-0.5]]), noise=NoiseModel(kind="bernoulli"))

    def test_sigma_bound(self):
        with pytest.raises(InvalidParams):
            NoiseModel(kind="gaussian", sigma=1.5)


class TestSaddleHelpers:
    def test_violation_zero_at_saddle(self):
        v = saddle_violation(PRICE_GAME)
        assert v[0, 0] == 0.0
        assert (v >= 0).all()

    def test_empirical_saddle_degraded_flag(self):
        i, j, degraded = empirical_saddle(PRICE_GAME)
        assert (i, j, degraded) == (0, 0, False)
        i, j, degraded = empirical_saddle(RPS)
        assert degraded


class TestInstanceJson:
    def test_round_trip_exact(self, tmp_path):
        m = GameMatrix(
            np.array([[0.1, -0.123456789012345], [1.0, 0.3]]),
            noise=NoiseModel(kind="gaussian", sigma=0.7),
            tags=("demo",),
        )
        d = matrix_to_dict(m)
        text = json.dumps(d)
        back = matrix_from_dict(json.loads(text))
        assert np.array_equal(back.entries, m.entries)
        assert back.noise == m.noise
        assert back.tags == m.tags
        # a second pass through text must be byte-stable
        assert json.dumps(matrix_to_dict(back)) == text

    def test_shape_mismatch_rejected(self):
        with pytest.raises(InvalidParams):
            matrix_from_dict({"n": 2, "m": 2, "entries": [[0.0, 0.0]], "noise": {"kind": "zero"}})
