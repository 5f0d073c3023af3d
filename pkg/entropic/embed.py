"""Sparse evaluation of the entropic optimal features.

For a fixed level vector l the supports of {phi_{l,i} : i in B_l} tile the cube,
so a point meets at most one of them: per dimension the odd candidate among
ceil(x_d 2^l_d) and floor(x_d 2^l_d). A point therefore produces at most one
nonzero per level vector, C(n+D-1, D) in total over a full sparse grid.
"""
from __future__ import annotations

import functools
import io
import logging
from dataclasses import dataclass

import numpy as np
from scipy import sparse

from entropic.design import IndexSet
from entropic.errors import DimError, ParseError
from entropic.features import phi_nd_batch
from entropic.kernels import KernelSpec, check_point, check_points, norm_const

log = logging.getLogger(__name__)

COO_HEADER = "# rows cols nnz"


@dataclass(frozen=True)
class SparseVec:
    dim: int
    columns: np.ndarray
    values: np.ndarray

    @property
    def nnz(self) -> int:
        return int(self.columns.size)

    def entries(self) -> list[tuple[int, float]]:
        return [(int(c), float(v)) for c, v in zip(self.columns, self.values)]

    def to_dense(self) -> np.ndarray:
        out = np.zeros(self.dim)
        out[self.columns] = self.values
        return out

    def dot(self, other: "SparseVec") -> float:
        _, mine, theirs = np.intersect1d(self.columns, other.columns, assume_unique=True, return_indices=True)
        return float(np.sum(self.values[mine] * other.values[theirs]))


class EntropicFeatureMap:
    """Kernel + index set + scale convention, evaluated with one lookup per level."""

    method = "eof"

    def __init__(self, spec: KernelSpec, S: IndexSet, raw_scale: bool = False):
        if S.dim is not None and S.dim != spec.dim:
            raise DimError(f"{S.dim}-D index set for a {spec.dim}-D kernel")
        self.spec = spec
        self.S = S
        self.raw_scale = raw_scale
        constants = np.array([norm_const(spec, idx.l, idx.i) for idx in S])
        self.scale = constants if raw_scale else np.sqrt(constants)
        self._levels = [self._level_table(l, members) for l, members in S.by_level.items()]

    @staticmethod
    def _level_table(l: tuple[int, ...], members):
        levels = np.array(l, dtype=np.int64)
        radix = 2 ** (levels - 1)
        strides = np.ones_like(radix)
        strides[:-1] = np.cumprod(radix[::-1])[::-1][1:]
        table = np.full(int(np.prod(radix)), -1, dtype=np.int64)
        for i, col in members:
            table[int((((np.array(i) - 1) // 2) * strides).sum())] = col
        return levels, strides, table

    @property
    def n_features(self) -> int:
        return len(self.S)

    def transform(self, X) -> sparse.csr_matrix:
        try:
            X = np.asarray(X, dtype=float)
        except ValueError as exc:
            raise DimError(f"ragged input: {exc}") from exc
        X = check_points(self.spec, X)
        family = self.spec.family
        rows, cols, vals = [], [], []
        for levels, strides, table in self._levels:
            t = X * 2.0 ** levels
            up, down = np.ceil(t), np.floor(t)
            i = np.where(up % 2 == 1, up, down).astype(np.int64)
            ok = np.all(i % 2 == 1, axis=1)
            code = np.where(ok, (((i - 1) // 2) * strides).sum(axis=1), 0)
            col = np.where(ok, table[code], -1)
            hit = np.nonzero(col >= 0)[0]
            if hit.size == 0:
                continue
            value = self.scale[col[hit]].copy()
            for d, ld in enumerate(levels):
                value *= family.phi(int(ld), i[hit, d], X[hit, d])
            keep = value != 0.0
            rows.append(hit[keep])
            cols.append(col[hit][keep])
            vals.append(value[keep])
        n = X.shape[0]
        if rows:
            coo = (np.concatenate(vals), (np.concatenate(rows), np.concatenate(cols)))
            F = sparse.csr_matrix(coo, shape=(n, self.n_features))
        else:
            F = sparse.csr_matrix((n, self.n_features))
        F.sort_indices()
        return F

    def embed(self, x) -> SparseVec:
        x = check_point(self.spec, x)
        row = self.transform(x[None, :])
        return SparseVec(dim=self.n_features, columns=row.indices.astype(np.int64), values=row.data.copy())

    def describe(self) -> dict:
        return {"method": self.method, "kernel": self.spec.describe(), "raw_scale": self.raw_scale,
                "level_cap": self.S.level_cap, "seed": self.S.seed, "indices": self.S.as_pairs()}


@functools.lru_cache(maxsize=64)
def feature_map(spec: KernelSpec, S: IndexSet, raw_scale: bool = False) -> EntropicFeatureMap:
    return EntropicFeatureMap(spec, S, raw_scale)


def embed(spec: KernelSpec, S: IndexSet, x, raw_scale: bool = False) -> SparseVec:
    return feature_map(spec, S, raw_scale).embed(x)


def embed_batch(spec: KernelSpec, S: IndexSet, X, raw_scale: bool = False) -> sparse.csr_matrix:
    return feature_map(spec, S, raw_scale).transform(X)


def embed_dense(spec: KernelSpec, S: IndexSet, X, raw_scale: bool = False) -> np.ndarray:
    """Every feature evaluated at every point; the reference the sparse path must match."""
    X = check_points(spec, X)
    if not len(S):
        return np.zeros((X.shape[0], 0))
    scale = feature_map(spec, S, raw_scale).scale
    return np.column_stack([phi_nd_batch(spec, idx, X) for idx in S]) * scale


def kernel_approx(spec: KernelSpec, S: IndexSet, x, xp) -> float:
    """z(x)^T z(x') = sum_{(l,i) in S} C_{l,i} phi_{l,i}(x) phi_{l,i}(x')."""
    if not len(S):
        return 0.0
    return embed(spec, S, x).dot(embed(spec, S, xp))


def format_coo(F: sparse.spmatrix) -> str:
    coo = sparse.coo_matrix(F)
    order = np.lexsort((coo.col, coo.row))
    out = io.StringIO()
    out.write(f"{COO_HEADER}\n{coo.shape[0]} {coo.shape[1]} {coo.nnz}\n")
    for r, c, v in zip(coo.row[order], coo.col[order], coo.data[order]):
        out.write(f"{r} {c} {v:.17g}\n")
    return out.getvalue()


def parse_coo(text: str) -> sparse.csr_matrix:
    lines = [line for line in text.splitlines() if line.strip()]
    if not lines or lines[0].strip() != COO_HEADER:
        raise ParseError("missing coordinate header", row=1)
    try:
        n_rows, n_cols, nnz = (int(v) for v in lines[1].split())
        body = np.loadtxt(io.StringIO("\n".join(lines[2:])), ndmin=2) if nnz else np.zeros((0, 3))
    except (IndexError, ValueError) as exc:
        raise ParseError(f"malformed coordinate file: {exc}") from exc
    if body.shape[0] != nnz:
        raise ParseError(f"header announces {nnz} entries, found {body.shape[0]}")
    rows, cols = body[:, 0].astype(np.int64), body[:, 1].astype(np.int64)
    return sparse.csr_matrix((body[:, 2], (rows, cols)), shape=(n_rows, n_cols))
