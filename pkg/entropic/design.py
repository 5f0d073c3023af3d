"""Feature index sets: sparse grids, entropic selection and random truncation.

Maximizing the entropy of the projected unit ball over |S| <= M features
reduces to maximizing sum C_{l,i} over S. With unit item weights that
knapsack is solved exactly by taking the M largest constants; the NP-hard
case only arises for weighted variants, which are not needed here.
"""
from __future__ import annotations

import logging
import math
from dataclasses import dataclass
from functools import cached_property
from typing import Iterator, Literal, Mapping

import numpy as np

from entropic.errors import InvalidLevel, InvalidM
from entropic.features import FeatureIndex
from entropic.kernels import KernelSpec, norm_const

log = logging.getLogger(__name__)


@dataclass(frozen=True)
class IndexSet:
    indices: tuple[FeatureIndex, ...] = ()
    level_cap: int | None = None
    seed: int | None = None
    short_by: int = 0

    def __post_init__(self) -> None:
        if len(set(self.indices)) != len(self.indices):
            raise ValueError("duplicate (l, i) pairs in index set")
        dims = {idx.dim for idx in self.indices}
        if len(dims) > 1:
            raise ValueError(f"mixed dimensions in index set: {sorted(dims)}")

    def __len__(self) -> int:
        return len(self.indices)

    def __iter__(self) -> Iterator[FeatureIndex]:
        return iter(self.indices)

    def __contains__(self, idx: FeatureIndex) -> bool:
        return idx in self.columns

    @property
    def dim(self) -> int | None:
        return self.indices[0].dim if self.indices else None

    @cached_property
    def columns(self) -> dict[FeatureIndex, int]:
        return {idx: col for col, idx in enumerate(self.indices)}

    @cached_property
    def by_level(self) -> dict[tuple[int, ...], list[tuple[tuple[int, ...], int]]]:
        """Level vector -> [(position vector, column)] in column order."""
        groups: dict[tuple[int, ...], list[tuple[tuple[int, ...], int]]] = {}
        for col, idx in enumerate(self.indices):
            groups.setdefault(idx.l, []).append((idx.i, col))
        return groups

    def as_pairs(self) -> list[list[list[int]]]:
        return [[list(idx.l), list(idx.i)] for idx in self.indices]

    @classmethod
    def from_pairs(cls, pairs, level_cap: int | None = None, seed: int | None = None) -> "IndexSet":
        return cls(indices=tuple(FeatureIndex.of(l, i) for l, i in pairs), level_cap=level_cap, seed=seed)


def _level_vectors(D: int, budget: int) -> Iterator[tuple[int, ...]]:
    """All l in N^D with l_d >= 1 and |l| <= budget."""
    if D == 1:
        for ld in range(1, budget + 1):
            yield (ld,)
        return
    for ld in range(1, budget - (D - 1) + 1):
        for rest in _level_vectors(D - 1, budget - ld):
            yield (ld,) + rest


def _positions(l: tuple[int, ...]) -> Iterator[tuple[int, ...]]:
    if not l:
        yield ()
        return
    for head in range(1, 2 ** l[0], 2):
        for rest in _positions(l[1:]):
            yield (head,) + rest


def sparse_grid_size(D: int, n: int) -> int:
    if n < 1:
        raise InvalidLevel(f"sparse grid level must be >= 1, got {n}")
    return sum(math.comb(j - 1, D - 1) * 2 ** (j - D) for j in range(D, n + D))


def nonzeros_per_point(D: int, n: int) -> int:
    return math.comb(n + D - 1, D)


def enumerate_sparse_grid(D: int, n: int) -> IndexSet:
    if D < 1:
        raise ValueError(f"dimension must be >= 1, got {D}")
    if n < 1:
        raise InvalidLevel(f"sparse grid level must be >= 1, got {n}")
    indices = [
        FeatureIndex(l, i)
        for l in _level_vectors(D, n + D - 1)
        for i in _positions(l)
    ]
    indices.sort(key=lambda idx: idx.key)
    return IndexSet(indices=tuple(indices), level_cap=n)


def level_for_budget(D: int, M: int) -> int:
    """Smallest n with |S*_{n-1}| < M <= |S*_n|."""
    if M < 1:
        raise InvalidM(f"number of features must be >= 1, got {M}")
    n = 1
    while sparse_grid_size(D, n) < M:
        n += 1
    return n


def kernel_constants(spec: KernelSpec, candidates: IndexSet) -> dict[FeatureIndex, float]:
    return {idx: norm_const(spec, idx.l, idx.i) for idx in candidates}


def entropic_select(candidates: IndexSet, C: Mapping[FeatureIndex, float], M: int) -> IndexSet:
    if M < 1:
        raise InvalidM(f"number of features must be >= 1, got {M}")
    for idx in candidates:
        value = C[idx]
        if not (math.isfinite(value) and value > 0):
            raise ValueError(f"constant for {idx} must be finite and positive, got {value}")
    short_by = max(M - len(candidates), 0)
    if short_by:
        log.warning("asked for %d features out of %d candidates, returning all", M, len(candidates))
    ranked = sorted(candidates, key=lambda idx: (-C[idx], idx.key))[:M]
    ranked.sort(key=lambda idx: idx.key)
    exact = len(ranked) == len(candidates) and candidates.level_cap is not None
    return IndexSet(indices=tuple(ranked), level_cap=candidates.level_cap if exact else None, short_by=short_by)


def truncate_random(full: IndexSet, M: int, seed: int) -> IndexSet:
    """Uniform M-subset of ``full`` under ``seed``, kept in canonical order.

    The budget rule |S*_{n-1}| < M <= |S*_n| is applied by ``select_features``
    when it picks n; here any 1 <= M <= |full| is accepted.
    """
    if not 1 <= M <= len(full):
        raise InvalidM(f"M={M} outside [1, {len(full)}]")
    if M == len(full):
        return full
    rng = np.random.default_rng(seed)
    keep = np.sort(rng.choice(len(full), size=M, replace=False))
    return IndexSet(indices=tuple(full.indices[k] for k in keep), seed=seed)


def select_features(
    spec: KernelSpec, M: int, seed: int, rule: Literal["random", "entropic"] = "random"
) -> IndexSet:
    n = level_for_budget(spec.dim, M)
    full = enumerate_sparse_grid(spec.dim, n)
    if rule == "entropic":
        return entropic_select(full, kernel_constants(spec, full), M)
    return truncate_random(full, M, seed)
