import numpy as np
import pytest

from minmeanmax.expr import (
    Diff,
    HomogeneityDegree,
    Input,
    Max,
    Mean,
    Min,
    Zero,
    children,
    depth,
    evaluate,
    homogeneity_degree,
    iter_nodes,
    size,
    support,
)
from minmeanmax.means import Alpha
from minmeanmax.search import random_expr


class TestConstruction:
    def test_arity_validation(self):
        with pytest.raises(ValueError):
            Min(Input(0))
        with pytest.raises(ValueError):
            Max(Input(0))
        with pytest.raises(ValueError):
            Mean(Alpha(0.0), Input(0))

    def test_input_index_validation(self):
        with pytest.raises(ValueError):
            Input(-1)
        with pytest.raises(TypeError):
            Input(1.5)
        assert Input(np.int64(3)).index == 3  # numpy integers are fine

    def test_mean_accepts_bare_floats(self):
        assert Mean(2.0, Input(0), Input(1)).alpha == Alpha(2.0)

    def test_structural_equality(self):
        a = Diff(Min(Input(0), Input(1)), Zero())
        b = Diff(Min(Input(0), Input(1)), Zero())
        assert a == b
        assert hash(a) == hash(b)
        assert a != Diff(Zero(), Min(Input(0), Input(1)))


class TestAnalyses:
    def test_support(self):
        assert support(Zero()) == set()
        assert support(Input(3)) == {3}
        assert support(Diff(Min(Input(0), Input(1)), Input(1))) == {0, 1}

    def test_size_and_depth(self):
        assert size(Zero()) == 1 and depth(Zero()) == 0
        e = Min(Input(0), Input(1))
        assert size(e) == 3 and depth(e) == 1
        nested = Diff(e, Max(Input(2), Zero()))
        assert size(nested) == 7 and depth(nested) == 2

    def test_iter_nodes_preorder(self):
        e = Diff(Input(0), Min(Input(1), Zero()))
        kinds = [type(n).__name__ for n in iter_nodes(e)]
        assert kinds == ["Diff", "Input", "Min", "Input", "Zero"]

    def test_children(self):
        e = Mean(Alpha(1.0), Input(0), Input(1), Input(2))
        assert children(e) == (Input(0), Input(1), Input(2))
        assert children(Zero()) == ()

    def test_support_is_union_of_children(self):
        rng = np.random.default_rng(7)
        palette = (Alpha(-1.0), Alpha(0.0), Alpha(1.0))
        for _ in range(200):
            e = random_expr(5, 4, palette, rng, max_size=30)
            for node in iter_nodes(e):
                kids = children(node)
                if kids:
                    assert support(node) == set().union(*(support(c) for c in kids))


class TestHomogeneityDegree:
    def test_leaves(self):
        assert homogeneity_degree(Zero()) is HomogeneityDegree.ZERO
        assert homogeneity_degree(Input(2)) is HomogeneityDegree.ONE

    def test_difference_cancels_shared_degree(self):
        shifts_by_one = Diff(
            Mean(Alpha.POS_INF, Input(0), Input(1)),
            Mean(Alpha.NEG_INF, Input(0), Input(1)),
        )
        assert homogeneity_degree(shifts_by_one) is HomogeneityDegree.ZERO

    def test_mixed_difference_is_unknown(self):
        assert homogeneity_degree(Diff(Input(0), Zero())) is HomogeneityDegree.UNKNOWN

    def test_connectives_propagate(self):
        ones = Min(Input(0), Input(1))
        assert homogeneity_degree(ones) is HomogeneityDegree.ONE
        zeros = Max(Zero(), Zero())
        assert homogeneity_degree(zeros) is HomogeneityDegree.ZERO
        mixed = Min(Input(0), Zero())
        assert homogeneity_degree(mixed) is HomogeneityDegree.UNKNOWN
        nested_unknown = Max(mixed, Input(1))
        assert homogeneity_degree(nested_unknown) is HomogeneityDegree.UNKNOWN

    def test_one_degree_is_sound(self):
        rng = np.random.default_rng(8)
        palette = (Alpha.NEG_INF, Alpha(0.0), Alpha(2.0), Alpha.POS_INF)
        seen = 0
        for _ in range(300):
            e = random_expr(4, 3, palette, rng, max_size=20,
                            include_zero=False, include_diff=False)
            assert homogeneity_degree(e) is HomogeneityDegree.ONE
            seen += 1
            frame = rng.normal(0.0, 2.0, size=4)
            for c in (-7.0, 0.5, 12.0):
                assert evaluate(e, frame + c) == pytest.approx(
                    evaluate(e, frame) + c, abs=1e-9
                )
        assert seen == 300

    def test_zero_degree_is_sound(self):
        rng = np.random.default_rng(9)
        palette = (Alpha.NEG_INF, Alpha(0.0), Alpha(2.0), Alpha.POS_INF)
        for _ in range(100):
            left = random_expr(4, 3, palette, rng, max_size=15,
                               include_zero=False, include_diff=False)
            right = random_expr(4, 3, palette, rng, max_size=15,
                                include_zero=False, include_diff=False)
            e = Diff(left, right)
            assert homogeneity_degree(e) is HomogeneityDegree.ZERO
            frame = rng.normal(0.0, 2.0, size=4)
            for c in (-50.0, 3.25):
                assert evaluate(e, frame + c) == pytest.approx(
                    evaluate(e, frame), abs=1e-9
                )


class TestEvaluate:
    def test_leaves(self):
        assert evaluate(Zero(), [5.0, 1.0]) == 0.0
        assert evaluate(Input(1), [5.0, 1.0]) == 1.0

    def test_connectives(self):
        frame = [3.0, 5.0, -2.0]
        assert evaluate(Min(Input(0), Input(1), Input(2)), frame) == -2.0
        assert evaluate(Max(Input(0), Input(2)), frame) == 3.0
        assert evaluate(Diff(Input(1), Input(0)), frame) == 2.0
        assert evaluate(Mean(Alpha(0.0), Input(0), Input(1)), frame) == 4.0

    def test_mean_with_infinite_exponents_is_exact(self):
        frame = [3.0, 5.0]
        assert evaluate(Mean(Alpha.NEG_INF, Input(0), Input(1)), frame) == 3.0
        assert evaluate(Mean(Alpha.POS_INF, Input(0), Input(1)), frame) == 5.0

    def test_spread_expression(self):
        e = Diff(
            Mean(Alpha.POS_INF, Input(0), Input(1)),
            Mean(Alpha.NEG_INF, Input(0), Input(1)),
        )
        assert evaluate(e, [3.0, 5.0]) == 2.0
        assert evaluate(e, [4.0, 4.0]) == 0.0

    def test_batch_matches_single(self):
        rng = np.random.default_rng(10)
        palette = (Alpha.NEG_INF, Alpha(-1.0), Alpha(0.0), Alpha(3.0), Alpha.POS_INF)
        frames = rng.normal(0.0, 4.0, size=(16, 6))
        for _ in range(50):
            e = random_expr(6, 4, palette, rng, max_size=40)
            batch = np.asarray(evaluate(e, frames))
            assert batch.shape == (16,)
            singles = [evaluate(e, frames[i]) for i in range(16)]
            np.testing.assert_allclose(batch, singles, rtol=0, atol=1e-12)

    def test_unread_channels_do_not_matter(self):
        e = Min(Input(0), Input(2))
        frame = np.array([1.0, 99.0, 4.0])
        tweaked = frame.copy()
        tweaked[1] = -1e6
        assert evaluate(e, frame) == evaluate(e, tweaked)

    def test_width_mismatch(self):
        with pytest.raises(ValueError):
            evaluate(Input(3), [1.0, 2.0])
        with pytest.raises(ValueError):
            evaluate(Min(Input(0), Input(5)), np.zeros((4, 5)))

    def test_bad_frame_shape(self):
        with pytest.raises(ValueError):
            evaluate(Input(0), np.zeros((2, 2, 2)))
