from itertools import permutations

import numpy as np
import pytest

from minmeanmax.circuits import (
    ComparatorNetwork,
    batcher_bitonic,
    format_network,
    optimal_network_8,
    parse_network,
    quantile_circuit,
    second_largest_depth2,
    verify_sorts,
)
from minmeanmax.expr import Input, Min, Max, depth, evaluate, size, support


class TestComparatorNetwork:
    def test_validation(self):
        with pytest.raises(ValueError):
            ComparatorNetwork(0, [])
        with pytest.raises(ValueError):
            ComparatorNetwork(4, [[(2, 1)]])  # must be ascending
        with pytest.raises(ValueError):
            ComparatorNetwork(4, [[(0, 4)]])  # out of range
        with pytest.raises(ValueError):
            ComparatorNetwork(4, [[(0, 1), (1, 2)]])  # channel reused in a layer

    def test_counts(self):
        net = ComparatorNetwork(4, [[(0, 1), (2, 3)], [(0, 2)]])
        assert net.depth == 2
        assert net.comparator_count == 3

    def test_apply(self):
        net = batcher_bitonic(6)
        rng = np.random.default_rng(12)
        for _ in range(200):
            values = rng.normal(0.0, 5.0, size=6)
            assert net.apply(values) == sorted(values.tolist())

    def test_apply_width_check(self):
        with pytest.raises(ValueError):
            batcher_bitonic(4).apply([1.0, 2.0])


class TestBitonic:
    def test_power_of_two_depths(self):
        # depth follows k(k+1)/2 for width 2**k
        assert batcher_bitonic(2).depth == 1
        assert batcher_bitonic(4).depth == 3
        assert batcher_bitonic(8).depth == 6
        assert batcher_bitonic(16).depth == 10

    def test_trivial_width(self):
        net = batcher_bitonic(1)
        assert net.depth == 0 and net.comparator_count == 0
        assert verify_sorts(net)

    def test_all_widths_sort(self):
        for n in range(1, 13):
            assert verify_sorts(batcher_bitonic(n)), n

    def test_comparator_counts_power_of_two(self):
        assert batcher_bitonic(8).comparator_count == 24
        assert batcher_bitonic(16).comparator_count == 80


class TestOptimal8:
    def test_sorts_with_depth_6(self):
        net = optimal_network_8()
        assert net.width == 8
        assert net.depth == 6
        assert net.comparator_count == 19
        assert verify_sorts(net)

    def test_sorted_input_is_fixed(self):
        net = optimal_network_8()
        assert net.apply(range(8)) == [float(i) for i in range(8)]


class TestVerifySorts:
    def test_rejects_wide_networks(self):
        with pytest.raises(ValueError):
            verify_sorts(ComparatorNetwork(25, []))

    def test_detects_non_sorting(self):
        assert not verify_sorts(ComparatorNetwork(3, [[(0, 1)]]))
        # dropping any layer from a minimal sorter must break it
        net = batcher_bitonic(4)
        for skip in range(net.depth):
            pruned = ComparatorNetwork(
                4, [l for i, l in enumerate(net.layers) if i != skip]
            )
            assert not verify_sorts(pruned), f"layer {skip} was redundant"


class TestQuantileCircuit:
    def test_extreme_ranks_structure(self):
        net = batcher_bitonic(2)
        assert quantile_circuit(2, 1, net) == Min(Input(0), Input(1))
        assert quantile_circuit(2, 2, net) == Max(Input(0), Input(1))

    def test_exhaustive_small_widths(self):
        for n in range(2, 7):
            net = batcher_bitonic(n)
            frames = np.array(list(permutations(range(1, n + 1))), dtype=float)
            expected = np.sort(frames, axis=1)
            for k in range(1, n + 1):
                circuit = quantile_circuit(n, k, net)
                got = np.asarray(evaluate(circuit, frames))
                np.testing.assert_array_equal(got, expected[:, k - 1])

    @pytest.mark.parametrize("source", ["bitonic", "opt8"])
    def test_width_8_random(self, source):
        net = batcher_bitonic(8) if source == "bitonic" else optimal_network_8()
        rng = np.random.default_rng(13)
        frames = rng.normal(0.0, 10.0, size=(2000, 8))
        expected = np.sort(frames, axis=1)
        for k in (1, 4, 5, 8):
            circuit = quantile_circuit(8, k, net)
            got = np.asarray(evaluate(circuit, frames))
            np.testing.assert_array_equal(got, expected[:, k - 1])
            # min/max only select, so outputs are frame members verbatim
            assert np.all((frames == got[:, None]).any(axis=1))

    def test_depth_bounded_by_network(self):
        for n in (3, 5, 8):
            net = batcher_bitonic(n)
            for k in range(1, n + 1):
                assert depth(quantile_circuit(n, k, net)) <= net.depth

    def test_median_uses_all_channels(self):
        circuit = quantile_circuit(8, 4, optimal_network_8())
        assert support(circuit) == set(range(8))

    def test_validation(self):
        net = batcher_bitonic(4)
        with pytest.raises(ValueError):
            quantile_circuit(4, 0, net)
        with pytest.raises(ValueError):
            quantile_circuit(4, 5, net)
        with pytest.raises(ValueError):
            quantile_circuit(5, 1, net)  # width mismatch
        with pytest.raises(ValueError):
            quantile_circuit(3, 1, ComparatorNetwork(3, [[(0, 1)]]))  # not a sorter


class TestSecondLargest:
    def test_degenerate_pair(self):
        for variant in ("min_of_maxes", "max_of_mins"):
            e = second_largest_depth2(2, variant)
            assert evaluate(e, [3.0, 7.0]) == 3.0

    @pytest.mark.parametrize("variant", ["min_of_maxes", "max_of_mins"])
    def test_exhaustive(self, variant):
        for n in range(2, 7):
            e = second_largest_depth2(n, variant)
            frames = np.array(list(permutations(range(1, n + 1))), dtype=float)
            got = np.asarray(evaluate(e, frames))
            np.testing.assert_array_equal(got, np.sort(frames, axis=1)[:, -2])

    def test_variants_agree_on_random_frames(self):
        rng = np.random.default_rng(14)
        for n in (3, 5, 9, 12):
            a = second_largest_depth2(n, "min_of_maxes")
            b = second_largest_depth2(n, "max_of_mins")
            frames = rng.normal(0.0, 5.0, size=(2000, n))
            va = np.asarray(evaluate(a, frames))
            vb = np.asarray(evaluate(b, frames))
            np.testing.assert_array_equal(va, vb)
            np.testing.assert_array_equal(va, np.sort(frames, axis=1)[:, -2])

    def test_depth_is_two(self):
        for n in (3, 4, 8, 12):
            for variant in ("min_of_maxes", "max_of_mins"):
                assert depth(second_largest_depth2(n, variant)) == 2

    def test_sizes(self):
        # one dropped-channel max per channel plus the outer min
        e = second_largest_depth2(5, "min_of_maxes")
        assert size(e) == 5 * 5 + 1
        # one min per unordered pair plus the outer max
        e = second_largest_depth2(5, "max_of_mins")
        assert size(e) == 10 * 3 + 1

    def test_validation(self):
        with pytest.raises(ValueError):
            second_largest_depth2(1)
        with pytest.raises(ValueError):
            second_largest_depth2(4, "nope")


class TestNetworkText:
    def test_format(self):
        net = ComparatorNetwork(3, [[(0, 1)], [(1, 2)], [(0, 1)]])
        assert format_network(net) == "width 3\n0:1\n1:2\n0:1\n"

    def test_round_trip(self):
        for n in (1, 2, 5, 8):
            net = batcher_bitonic(n)
            assert parse_network(format_network(net)) == net
        opt = optimal_network_8()
        assert parse_network(format_network(opt)) == opt

    def test_parse_errors(self):
        with pytest.raises(ValueError):
            parse_network("")
        with pytest.raises(ValueError):
            parse_network("3\n0:1\n")
        with pytest.raises(ValueError):
            parse_network("width 3\n0-1\n")
        with pytest.raises(ValueError):
            parse_network("width 3\n0:1 1:2\n")  # overlap within a layer
        with pytest.raises(ValueError):
            parse_network("width 3\n0:5\n")
