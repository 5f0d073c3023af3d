import itertools

import numpy as np
import pytest

from entropic.design import (
    IndexSet,
    enumerate_sparse_grid,
    entropic_select,
    kernel_constants,
    level_for_budget,
    nonzeros_per_point,
    select_features,
    sparse_grid_size,
    truncate_random,
)
from entropic.errors import InvalidLevel, InvalidM
from entropic.features import FeatureIndex
from entropic.kernels import KernelSpec


def brute_force_size(D, n):
    total = 0
    for l in itertools.product(range(1, n + 1), repeat=D):
        if sum(l) <= n + D - 1:
            total += 2 ** sum(v - 1 for v in l)
    return total


class TestSparseGrid:
    @pytest.mark.parametrize("D,n,size", [(1, 3, 7), (2, 3, 17), (2, 4, 49), (2, 5, 129), (3, 1, 1)])
    def test_known_sizes(self, D, n, size):
        assert sparse_grid_size(D, n) == size
        assert len(enumerate_sparse_grid(D, n)) == size

    @pytest.mark.parametrize("D", [1, 2, 3])
    @pytest.mark.parametrize("n", [1, 2, 3, 4, 5, 6])
    def test_size_matches_brute_force(self, D, n):
        assert len(enumerate_sparse_grid(D, n)) == brute_force_size(D, n) == sparse_grid_size(D, n)

    def test_canonical_order(self):
        S = enumerate_sparse_grid(2, 2)
        assert S.as_pairs() == [
            [[1, 1], [1, 1]],
            [[1, 2], [1, 1]],
            [[1, 2], [1, 3]],
            [[2, 1], [1, 1]],
            [[2, 1], [3, 1]],
        ]
        assert S.level_cap == 2

    def test_nested(self):
        small, big = enumerate_sparse_grid(2, 3), enumerate_sparse_grid(2, 4)
        assert all(idx in big for idx in small)

    def test_level_zero_rejected(self):
        with pytest.raises(InvalidLevel):
            enumerate_sparse_grid(2, 0)

    def test_nonzeros_per_point(self):
        assert nonzeros_per_point(2, 3) == 6
        assert nonzeros_per_point(1, 5) == 5

    @pytest.mark.parametrize("D", [1, 2, 3])
    def test_sparsity_ratio_falls_with_level(self, D):
        ratios = [nonzeros_per_point(D, n) / sparse_grid_size(D, n) for n in range(1, 8)]
        assert ratios[0] == 1.0
        assert all(a > b for a, b in zip(ratios, ratios[1:]))

    def test_pairs_round_trip(self):
        S = enumerate_sparse_grid(3, 2)
        assert IndexSet.from_pairs(S.as_pairs()).indices == S.indices

    def test_duplicates_rejected(self):
        idx = FeatureIndex((1,), (1,))
        with pytest.raises(ValueError):
            IndexSet(indices=(idx, idx))


class TestBudget:
    def test_level_for_budget(self):
        assert level_for_budget(2, 1) == 1
        assert level_for_budget(2, 17) == 3
        assert level_for_budget(2, 18) == 4

    def test_non_positive_budget(self):
        with pytest.raises(InvalidM):
            level_for_budget(2, 0)


class TestTruncateRandom:
    def test_subset_in_canonical_order(self):
        full = enumerate_sparse_grid(2, 4)
        S = truncate_random(full, 30, seed=5)
        assert len(S) == 30
        keys = [idx.key for idx in S]
        assert keys == sorted(keys)
        assert all(idx in full for idx in S)
        assert S.seed == 5

    def test_deterministic_under_seed(self):
        full = enumerate_sparse_grid(2, 4)
        assert truncate_random(full, 20, 1).indices == truncate_random(full, 20, 1).indices
        assert truncate_random(full, 20, 1).indices != truncate_random(full, 20, 2).indices

    def test_full_budget_returns_full_grid(self):
        full = enumerate_sparse_grid(1, 3)
        assert truncate_random(full, 7, seed=11) is full

    def test_different_seeds_usually_differ(self):
        full = enumerate_sparse_grid(1, 3)
        same = sum(truncate_random(full, 3, 2 * k).indices == truncate_random(full, 3, 2 * k + 1).indices
                   for k in range(100))
        # P(two draws coincide) = 1 / C(7, 3) = 1/35
        assert same <= 10

    def test_every_index_is_drawn_uniformly(self):
        full = enumerate_sparse_grid(1, 3)
        counts = dict.fromkeys(full, 0)
        for seed in range(100):
            for idx in truncate_random(full, 3, seed):
                counts[idx] += 1
        # each index is kept with probability 3/7
        assert all(abs(c - 300 / 7) < 20 for c in counts.values())

    def test_out_of_range(self):
        full = enumerate_sparse_grid(1, 3)
        with pytest.raises(InvalidM):
            truncate_random(full, 0, 1)
        with pytest.raises(InvalidM):
            truncate_random(full, 8, 1)


class TestEntropicSelect:
    def test_matches_exhaustive_search(self):
        rng = np.random.default_rng(12)
        pool = enumerate_sparse_grid(1, 4).indices
        for _ in range(200):
            k = int(rng.integers(1, 13))
            candidates = IndexSet(indices=pool[:k])
            C = {idx: float(v) for idx, v in zip(candidates, rng.uniform(0.01, 1.0, size=k))}
            M = int(rng.integers(1, k + 1))
            chosen = entropic_select(candidates, C, M)
            best = max(sum(C[idx] for idx in subset) for subset in itertools.combinations(candidates, M))
            assert len(chosen) == M
            assert sum(C[idx] for idx in chosen) == pytest.approx(best, rel=1e-12)

    @pytest.mark.parametrize("D", [1, 2])
    @pytest.mark.parametrize("n", [2, 3, 4])
    def test_recovers_sparse_grid_for_laplace(self, D, n):
        spec = KernelSpec(kind="laplace", omega=1.0, dim=D)
        candidates = enumerate_sparse_grid(D, n + 1)
        target = enumerate_sparse_grid(D, n)
        chosen = entropic_select(candidates, kernel_constants(spec, candidates), len(target))
        assert set(chosen) == set(target)
        assert chosen.indices == target.indices

    def test_ties_break_canonically(self):
        candidates = enumerate_sparse_grid(1, 2)
        C = {idx: 1.0 for idx in candidates}
        chosen = entropic_select(candidates, C, 2)
        assert chosen.indices == candidates.indices[:2]

    def test_short_budget_flagged(self):
        candidates = enumerate_sparse_grid(1, 2)
        C = {idx: 1.0 for idx in candidates}
        chosen = entropic_select(candidates, C, 10)
        assert len(chosen) == 3
        assert chosen.short_by == 7

    def test_non_positive_constant(self):
        candidates = enumerate_sparse_grid(1, 1)
        with pytest.raises(ValueError):
            entropic_select(candidates, {candidates.indices[0]: 0.0}, 1)


class TestSelectFeatures:
    def test_full_budget_ignores_seed(self):
        spec = KernelSpec(kind="laplace", omega=2.0, dim=2)
        assert select_features(spec, 17, seed=1).indices == select_features(spec, 17, seed=99).indices

    def test_random_rule_draws_from_next_grid(self):
        spec = KernelSpec(kind="laplace", omega=2.0, dim=2)
        S = select_features(spec, 30, seed=4)
        assert len(S) == 30
        full = enumerate_sparse_grid(2, 4)
        assert all(idx in full for idx in S)

    def test_entropic_rule_is_nested(self):
        spec = KernelSpec(kind="laplace", omega=2.0, dim=2)
        small = select_features(spec, 20, seed=0, rule="entropic")
        big = select_features(spec, 40, seed=0, rule="entropic")
        assert set(small) <= set(big)
        assert len(big) == 40
