import numpy as np
import pytest

from midsearch.errors import InvalidParams, SkewViolation
from midsearch.game import SamplingOracle, hardness_stats, psne_exact
from midsearch.instances import (
    AHardParams,
    DuelingInstance,
    dueling_to_game,
    mab_to_game,
    make_a_hard,
    make_random_strict,
)


class TestAHard:
    def test_d3_transcription(self):
        m = make_a_hard(AHardParams(3, 0.05, 0.1))
        want = np.array([[0.5, 0.55, 0.6], [0.45, 0.5, 1.0], [0.4, 0.0, 0.5]])
        assert np.array_equal(m.entries, want)
        assert m.noise.kind == "bernoulli"
        assert "dueling" in m.tags

    @pytest.mark.parametrize("d", [3, 8, 16, 32, 64])
    def test_saddle_at_origin(self, d):
        m = make_a_hard(AHardParams(d, 0.05, 0.1))
        p = psne_exact(m)
        assert (p.row, p.col, p.strict) == (0, 0, True)
        assert m.entries.min() >= 0.0 and m.entries.max() <= 1.0

    @pytest.mark.parametrize("d", [3, 8, 32])
    def test_skew_consistency(self, d):
        a = make_a_hard(AHardParams(d, 0.03, 0.2)).entries
        assert np.max(np.abs(a + a.T - 1.0)) == 0.0

    def test_reference_h1_closed_form(self):
        p = AHardParams(32, 0.05, 0.1)
        assert p.h1() == pytest.approx((32 - 2) / 0.1**2 + 1 / 0.05**2, rel=1e-12)
        assert p.h1() == pytest.approx(3400.0, rel=1e-12)
        # the two-sided statistic counts both the row and the column line
        st = hardness_stats(make_a_hard(p))
        assert st.h1 == pytest.approx(2 * p.h1(), rel=1e-12)
        assert st.delta_min == pytest.approx(0.05, rel=1e-12)

    def test_param_validation(self):
        with pytest.raises(InvalidParams):
            AHardParams(2, 0.05, 0.1)
        with pytest.raises(InvalidParams):
            AHardParams(32, 0.2, 0.1)  # delta_min > beta
        with pytest.raises(InvalidParams):
            AHardParams(32, 0.0, 0.1)
        AHardParams(32, 0.1, 0.1)  # equality allowed


class TestDueling:
    def test_condorcet_maps_to_diagonal(self):
        p = np.array([[0.5, 0.3, 0.3], [0.7, 0.5, 0.7], [0.7, 0.3, 0.5]])
        m = dueling_to_game(DuelingInstance(p))
        got = psne_exact(m)
        assert (got.row, got.col) == (1, 1)

    def test_single_arm(self):
        m = dueling_to_game(DuelingInstance(np.array([[0.5]])))
        assert psne_exact(m).row == 0

    def test_cyclic_has_no_winner(self):
        p = np.array([[0.5, 0.6, 0.4], [0.4, 0.5, 0.6], [0.6, 0.4, 0.5]])
        assert psne_exact(dueling_to_game(DuelingInstance(p))) is None

    def test_skew_violation(self):
        with pytest.raises(SkewViolation):
            DuelingInstance(np.array([[0.5, 0.7], [0.5, 0.5]]))

    def test_duel_win_frequency(self):
        p = np.array([[0.5, 0.7], [0.3, 0.5]])
        o = SamplingOracle(dueling_to_game(DuelingInstance(p)), seed=9)
        freq = o.sample_mean(0, 1, 10**5)
        assert abs(freq - 0.7) < 0.01
        assert o.total_count == 10**5  # one duel, one sample
        assert o.per_entry_counts[1, 0] == 0  # mirror entry not credited


class TestMabEmbedding:
    def test_best_arm_is_saddle(self):
        assert psne_exact(mab_to_game([0.9, 0.1])).row == 0
        assert psne_exact(mab_to_game([0.1, 0.9, 0.5])).row == 1

    def test_column_is_trivial(self):
        p = psne_exact(mab_to_game([0.1, 0.9, 0.5]))
        assert p.col == 0 and p.strict

    def test_duplicate_maximum_rejected_by_hardness(self):
        from midsearch.errors import NoStrictPSNE

        with pytest.raises(NoStrictPSNE):
            hardness_stats(mab_to_game([0.9, 0.9, 0.1]))


class TestRandomStrict:
    def test_one_by_one_immediate(self):
        m = make_random_strict(1, 1, seed=0)
        assert psne_exact(m).strict

    def test_reproducible(self):
        a = make_random_strict(4, 4, seed=42).entries
        b = make_random_strict(4, 4, seed=42).entries
        assert np.array_equal(a, b)
        c = make_random_strict(4, 4, seed=43).entries
        assert not np.array_equal(a, c)

    @pytest.mark.parametrize("n,m", [(2, 2), (4, 4), (8, 8), (3, 7)])
    def test_strict_within_limit(self, n, m):
        mat = make_random_strict(n, m, seed=1)
        assert psne_exact(mat).strict
