"""Sturm-Liouville product kernels.

Every kernel here factorizes as k(x, x') = prod_d p(min(x_d, x'_d)) q(max(x_d, x'_d))
on the unit cube, with p and q two solutions of the same Sturm-Liouville equation.
Three closed-form families ship (Laplace, weighted Sobolev, Brownian bridge);
anything else plugs in through ``CustomFamily``.
"""
from __future__ import annotations

import functools
import logging
import math
from abc import ABC, abstractmethod
from enum import Enum
from typing import Callable, Literal, Sequence

import numpy as np
from pydantic import BaseModel, ConfigDict, Field, model_validator

from entropic.errors import DimError, InvalidLevel, InvalidPoint

log = logging.getLogger(__name__)

# above this, sinh ratios are rewritten as exp(a - b) * (1 - e^{-2a}) / (1 - e^{-2b})
SINH_SWITCH = 20.0


class KernelKind(str, Enum):
    LAPLACE = "laplace"
    SOBOLEV = "sobolev"
    BROWNIAN_BRIDGE = "bb"
    CUSTOM = "custom"


def wronskian_alpha(p: Callable, q: Callable, l: int, i: int) -> float:
    """Squared RKHS norm of the 1-D feature (l, i) from the node values of p and q."""
    h = 2.0 ** -l
    pm, pc, pp = float(p((i - 1) * h)), float(p(i * h)), float(p((i + 1) * h))
    qm, qc, qp = float(q((i - 1) * h)), float(q(i * h)), float(q((i + 1) * h))
    d_right = pp * qc - pc * qp
    d_left = pc * qm - pm * qc
    return (pp * qm - pm * qp) / (d_right * d_left)


class SturmLiouvilleFamily(ABC):
    """One-dimensional factor of a product kernel.

    Subclasses supply the two Sturm-Liouville solutions. The feature shape and
    the level constant default to the general formulas; the built-in families
    override them with closed forms.
    """

    @abstractmethod
    def p(self, x): ...

    @abstractmethod
    def q(self, x): ...

    def kernel_1d(self, x, xp):
        x, xp = np.asarray(x, dtype=float), np.asarray(xp, dtype=float)
        return self.p(np.minimum(x, xp)) * self.q(np.maximum(x, xp))

    def level_const(self, l: int, i: int = 1) -> float:
        return 1.0 / wronskian_alpha(self.p, self.q, l, i)

    def phi(self, l: int, i, x) -> np.ndarray:
        """Feature (l, i) at x; i may be an array broadcasting against x."""
        x = np.asarray(x, dtype=float)
        h = 2.0 ** -l
        zc = np.broadcast_to(np.asarray(i, dtype=float) * h, x.shape)
        zl, zr = zc - h, zc + h
        pl, pc, pr = self.p(zl), self.p(zc), self.p(zr)
        ql, qc, qr = self.q(zl), self.q(zc), self.q(zr)
        px, qx = self.p(x), self.q(x)
        with np.errstate(divide="ignore", invalid="ignore"):
            left_val = (px * ql - qx * pl) / (pc * ql - qc * pl)
            right_val = (qx * pr - px * qr) / (qc * pr - pc * qr)
        left = (x >= zl) & (x <= zc)
        right = (x > zc) & (x <= zr)
        return np.where(left, left_val, np.where(right, right_val, 0.0))


def _hat(l: int, i, x) -> np.ndarray:
    x = np.asarray(x, dtype=float)
    h = 2.0 ** -l
    dist = np.abs(x - i * h)
    return np.where(dist < h, 1.0 - dist / h, 0.0)


def sinh_ratio(a, b: float) -> np.ndarray:
    """sinh(a) / sinh(b) for 0 <= a <= b without overflow at large b."""
    a = np.asarray(a, dtype=float)
    if b <= SINH_SWITCH:
        return np.sinh(a) / math.sinh(b)
    return np.exp(a - b) * (-np.expm1(-2.0 * a)) / (-math.expm1(-2.0 * b))


class LaplaceFamily(SturmLiouvilleFamily):
    def __init__(self, omega: float, constant: str = "exact"):
        self.omega = omega
        self.constant = constant

    def p(self, x):
        return np.exp(self.omega * np.asarray(x, dtype=float))

    def q(self, x):
        return np.exp(-self.omega * np.asarray(x, dtype=float))

    def kernel_1d(self, x, xp):
        return np.exp(-self.omega * np.abs(np.asarray(x, dtype=float) - np.asarray(xp, dtype=float)))

    def level_const(self, l: int, i: int = 1) -> float:
        width = self.omega * 2.0 ** -l
        if self.constant == "sinh":
            return math.sinh(width)
        return math.tanh(width)

    def phi(self, l: int, i, x) -> np.ndarray:
        x = np.asarray(x, dtype=float)
        h = 2.0 ** -l
        zc = np.asarray(i, dtype=float) * h
        # x == zc takes the left branch; both give 1 there
        dist = np.where(x <= zc, x - (zc - h), (zc + h) - x)
        inside = (dist >= 0.0) & (dist <= h)
        return np.where(inside, sinh_ratio(self.omega * np.clip(dist, 0.0, h), self.omega * h), 0.0)


@functools.cache
def _sobolev_level_const(omega: float, l: int) -> float:
    family = WeightedSobolevFamily(omega)
    return 1.0 / wronskian_alpha(family.p, family.q, l, 1)


class WeightedSobolevFamily(SturmLiouvilleFamily):
    def __init__(self, omega: float):
        self.omega = omega

    def p(self, x):
        return self.omega * np.asarray(x, dtype=float) + 1.0

    def q(self, x):
        return np.ones_like(np.asarray(x, dtype=float))

    def level_const(self, l: int, i: int = 1) -> float:
        return _sobolev_level_const(self.omega, l)

    def phi(self, l: int, i, x) -> np.ndarray:
        return _hat(l, i, x)


class BrownianBridgeFamily(SturmLiouvilleFamily):
    def p(self, x):
        return np.asarray(x, dtype=float)

    def q(self, x):
        return 1.0 - np.asarray(x, dtype=float)

    def level_const(self, l: int, i: int = 1) -> float:
        return 2.0 ** -(l + 1)

    def phi(self, l: int, i, x) -> np.ndarray:
        return _hat(l, i, x)


class CustomFamily(SturmLiouvilleFamily):
    """User-supplied p, q and (optionally) per-level constants C(l, i)."""

    def __init__(self, p: Callable, q: Callable, level_const: Callable[[int, int], float] | None = None):
        self._p, self._q, self._level_const = p, q, level_const

    def p(self, x):
        return self._p(np.asarray(x, dtype=float))

    def q(self, x):
        return self._q(np.asarray(x, dtype=float))

    def level_const(self, l: int, i: int = 1) -> float:
        if self._level_const is not None:
            return float(self._level_const(l, i))
        return super().level_const(l, i)


@functools.cache
def _builtin_family(kind: KernelKind, omega: float, constant: str) -> SturmLiouvilleFamily:
    if kind is KernelKind.LAPLACE:
        return LaplaceFamily(omega, constant)
    if kind is KernelKind.SOBOLEV:
        return WeightedSobolevFamily(omega)
    return BrownianBridgeFamily()


class KernelSpec(BaseModel):
    model_config = ConfigDict(frozen=True, arbitrary_types_allowed=True)

    kind: KernelKind
    omega: float = 1.0
    dim: int = Field(default=1, ge=1)
    strict: bool = False
    laplace_constant: Literal["exact", "sinh"] = "exact"
    custom: SturmLiouvilleFamily | None = Field(default=None, exclude=True)

    @model_validator(mode="after")
    def _check(self) -> "KernelSpec":
        if self.kind in (KernelKind.LAPLACE, KernelKind.SOBOLEV):
            if not (math.isfinite(self.omega) and self.omega > 0):
                raise ValueError(f"omega must be positive for {self.kind.value}, got {self.omega}")
        if (self.kind is KernelKind.CUSTOM) != (self.custom is not None):
            raise ValueError("a custom family goes with kind='custom' and only with it")
        return self

    @property
    def family(self) -> SturmLiouvilleFamily:
        if self.custom is not None:
            return self.custom
        return _builtin_family(self.kind, float(self.omega), self.laplace_constant)

    def describe(self) -> dict:
        return {"kind": self.kind.value, "omega": self.omega, "dim": self.dim,
                "laplace_constant": self.laplace_constant}


def check_points(spec: KernelSpec, X, strict: bool | None = None) -> np.ndarray:
    """Validate an (N, D) array of points and bring it into the unit cube."""
    X = np.asarray(X, dtype=float)
    if X.ndim != 2 or X.shape[1] != spec.dim:
        raise DimError(f"expected points of dimension {spec.dim}, got shape {X.shape}")
    if not np.all(np.isfinite(X)):
        raise InvalidPoint("points must be finite")
    strict = spec.strict if strict is None else strict
    if strict and (np.any(X < 0.0) or np.any(X > 1.0)):
        raise InvalidPoint("point outside [0,1]^D in strict mode")
    clipped = np.clip(X, 0.0, 1.0)
    if log.isEnabledFor(logging.DEBUG) and not np.array_equal(clipped, X):
        log.debug("clamped %d coordinate(s) into [0,1]", int(np.count_nonzero(clipped != X)))
    return clipped


def check_point(spec: KernelSpec, x, strict: bool | None = None) -> np.ndarray:
    x = np.atleast_1d(np.asarray(x, dtype=float))
    if x.ndim != 1:
        raise DimError(f"expected a single point, got shape {x.shape}")
    return check_points(spec, x[None, :], strict)[0]


def check_level(spec: KernelSpec, l: Sequence[int]) -> tuple[int, ...]:
    l = tuple(int(v) for v in l)
    if len(l) != spec.dim:
        raise DimError(f"level vector of length {len(l)} for a {spec.dim}-D kernel")
    if any(v < 1 for v in l):
        raise InvalidLevel(f"levels start at 1, got {l}")
    return l


def kernel_eval(spec: KernelSpec, x, xp) -> float:
    x, xp = check_point(spec, x), check_point(spec, xp)
    if spec.kind is KernelKind.LAPLACE:
        return float(np.exp(-spec.omega * np.sum(np.abs(x - xp))))
    return float(np.prod(spec.family.kernel_1d(x, xp)))


def kernel_matrix(spec: KernelSpec, X, Xp) -> np.ndarray:
    X, Xp = check_points(spec, X), check_points(spec, Xp)
    if spec.kind is KernelKind.LAPLACE:
        dist = np.abs(X[:, None, :] - Xp[None, :, :]).sum(axis=2)
        return np.exp(-spec.omega * dist)
    return np.prod(spec.family.kernel_1d(X[:, None, :], Xp[None, :, :]), axis=2)


def level_const_1d(spec: KernelSpec, l: int, i: int = 1) -> float:
    if l < 1:
        raise InvalidLevel(f"levels start at 1, got {l}")
    return spec.family.level_const(int(l), int(i))


def norm_const(spec: KernelSpec, l: Sequence[int], i: Sequence[int] | None = None) -> float:
    """C_{l,i} = 1 / ||phi_{l,i}||_k^2 as a product of per-dimension factors."""
    l = check_level(spec, l)
    i = tuple(int(v) for v in i) if i is not None else (1,) * len(l)
    family = spec.family
    return math.prod(family.level_const(ld, id_) for ld, id_ in zip(l, i))
