"""Hierarchical features of a Sturm-Liouville kernel and their tensor products.

The 1-D feature (l, i) lives on [(i-1) 2^-l, (i+1) 2^-l], peaks at 1 on the
node i 2^-l and is built from p and q on each half of its support. Features of
one level have disjoint supports, features of consecutive levels nest, and all
of them are mutually orthogonal in the kernel's RKHS.
"""
from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from typing import Callable, Sequence

import numpy as np

from entropic.errors import DimError, InvalidIndex, InvalidLevel
from entropic.kernels import KernelSpec, check_point, check_points, norm_const


@dataclass(frozen=True)
class FeatureIndex:
    l: tuple[int, ...]
    i: tuple[int, ...]

    def __post_init__(self) -> None:
        if len(self.l) != len(self.i) or not self.l:
            raise DimError(f"level and position vectors differ in length: {self.l} / {self.i}")
        for ld, id_ in zip(self.l, self.i):
            if ld < 1:
                raise InvalidLevel(f"levels start at 1, got {self.l}")
            if id_ % 2 == 0 or not 1 <= id_ <= 2 ** ld - 1:
                raise InvalidIndex(f"position {id_} is not an odd index of level {ld}")

    @property
    def dim(self) -> int:
        return len(self.l)

    @property
    def key(self) -> tuple:
        """Canonical sort key (|l|, l, i)."""
        return (sum(self.l), self.l, self.i)

    @classmethod
    def of(cls, l: Sequence[int], i: Sequence[int]) -> "FeatureIndex":
        return cls(tuple(int(v) for v in l), tuple(int(v) for v in i))


def _check_1d(l: int, i: int) -> None:
    if l < 1:
        raise InvalidLevel(f"levels start at 1, got {l}")
    if i % 2 == 0 or not 1 <= i <= 2 ** l - 1:
        raise InvalidIndex(f"position {i} is not an odd index of level {l}")


def phi_1d(spec: KernelSpec, l: int, i: int, x: float) -> float:
    _check_1d(l, i)
    x = min(max(float(x), 0.0), 1.0)
    return float(spec.family.phi(l, i, np.array([x]))[0])


def phi_1d_batch(spec: KernelSpec, l: int, i, x) -> np.ndarray:
    """Vectorized 1-D features; ``i`` may be a scalar or an array matching ``x``."""
    return spec.family.phi(l, i, np.asarray(x, dtype=float))


def phi_nd(spec: KernelSpec, idx: FeatureIndex, x) -> float:
    if idx.dim != spec.dim:
        raise DimError(f"{idx.dim}-D feature for a {spec.dim}-D kernel")
    x = check_point(spec, x)
    family = spec.family
    value = 1.0
    for d, (ld, id_) in enumerate(zip(idx.l, idx.i)):
        value *= float(family.phi(ld, id_, x[d:d + 1])[0])
        if value == 0.0:
            break
    return value


def phi_nd_batch(spec: KernelSpec, idx: FeatureIndex, X) -> np.ndarray:
    if idx.dim != spec.dim:
        raise DimError(f"{idx.dim}-D feature for a {spec.dim}-D kernel")
    X = check_points(spec, X)
    family = spec.family
    out = np.ones(X.shape[0])
    for d, (ld, id_) in enumerate(zip(idx.l, idx.i)):
        out *= family.phi(ld, id_, X[:, d])
    return out


def support_box(idx: FeatureIndex) -> list[tuple[float, float]]:
    return [((id_ - 1) * 2.0 ** -ld, (id_ + 1) * 2.0 ** -ld) for ld, id_ in zip(idx.l, idx.i)]


def stencil(spec: KernelSpec, l: int, i: int) -> tuple[np.ndarray, np.ndarray]:
    """Nodes and weights of the three-point operator Delta_{l,i}.

    Delta f = alpha f(z_i) - beta_minus f(z_{i-1}) - beta_plus f(z_{i+1}); the
    weights are returned with their signs so that Delta f = weights @ f(nodes).
    """
    _check_1d(l, i)
    family = spec.family
    h = 2.0 ** -l
    nodes = np.array([(i - 1) * h, i * h, (i + 1) * h])
    pm, pc, pp = (float(v) for v in family.p(nodes))
    qm, qc, qp = (float(v) for v in family.q(nodes))
    d_right = pp * qc - pc * qp
    d_left = pc * qm - pm * qc
    alpha = (pp * qm - pm * qp) / (d_right * d_left)
    return nodes, np.array([-1.0 / d_left, alpha, -1.0 / d_right])


def hierarchical_surplus(spec: KernelSpec, f: Callable[[np.ndarray], float], idx: FeatureIndex) -> float:
    """<f, phi_{l,i}>_k from the 3^D stencil evaluations of f."""
    if idx.dim != spec.dim:
        raise DimError(f"{idx.dim}-D feature for a {spec.dim}-D kernel")
    stencils = [stencil(spec, ld, id_) for ld, id_ in zip(idx.l, idx.i)]
    total = 0.0
    for choice in itertools.product(range(3), repeat=idx.dim):
        point = np.array([stencils[d][0][c] for d, c in enumerate(choice)])
        weight = math.prod(stencils[d][1][c] for d, c in enumerate(choice))
        total += weight * float(f(point))
    return total


def surplus_coefficients(spec: KernelSpec, f: Callable[[np.ndarray], float], S) -> np.ndarray:
    """Coefficients a_{l,i} = C_{l,i} <f, phi_{l,i}>_k, so that P_S f = sum a_{l,i} phi_{l,i}."""
    return np.array([norm_const(spec, idx.l, idx.i) * hierarchical_surplus(spec, f, idx) for idx in S])
