"""Random-feature baselines: RKS, ORF, LKRF and EERF.

All of them share z(x) = M^{-1/2} [cos(x^T gamma_m + b_m)]_m and differ in how the
frequencies gamma_m are drawn or picked. With a uniform phase,
E[z(x)^T z(x')] is half the kernel; ``kernel_estimate`` doubles it back.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum

import numpy as np
from scipy import linalg, stats

from entropic.errors import DimError, InvalidM


class RFMethod(str, Enum):
    RKS = "rks"
    ORF = "orf"
    LKRF = "lkrf"
    EERF = "eerf"
    RFF = "rff"


# kernel each method approximates
TARGET_KERNEL = {
    RFMethod.RKS: "laplace",
    RFMethod.LKRF: "laplace",
    RFMethod.EERF: "laplace",
    RFMethod.ORF: "gaussian",
    RFMethod.RFF: "gaussian",
}


@dataclass(frozen=True, eq=False)
class RandomFeatureMap:
    method: RFMethod
    frequencies: np.ndarray
    phases: np.ndarray
    sigma: float
    seed: int
    M0: int = 0

    @property
    def n_features(self) -> int:
        return int(self.frequencies.shape[0])

    @property
    def dim(self) -> int:
        return int(self.frequencies.shape[1])

    @property
    def kernel(self) -> str:
        return TARGET_KERNEL[self.method]

    def transform(self, X) -> np.ndarray:
        X = np.atleast_2d(np.asarray(X, dtype=float))
        if X.shape[1] != self.dim:
            raise DimError(f"expected points of dimension {self.dim}, got shape {X.shape}")
        return np.cos(X @ self.frequencies.T + self.phases) / math.sqrt(self.n_features)

    def embed(self, x) -> np.ndarray:
        x = np.asarray(x, dtype=float)
        if x.ndim != 1:
            raise DimError(f"expected a single point, got shape {x.shape}")
        return self.transform(x[None, :])[0]

    def kernel_estimate(self, x, xp) -> float:
        return 2.0 * float(self.embed(x) @ self.embed(xp))

    def subset(self, keep: np.ndarray, method: RFMethod) -> "RandomFeatureMap":
        keep = np.sort(np.asarray(keep, dtype=np.int64))
        return RandomFeatureMap(method, self.frequencies[keep], self.phases[keep], self.sigma, self.seed,
                                M0=self.n_features)

    def describe(self) -> dict:
        return {"method": self.method.value, "sigma": self.sigma, "seed": self.seed, "M0": self.M0,
                "frequencies": self.frequencies.tolist(), "phases": self.phases.tolist()}

    @classmethod
    def from_description(cls, payload: dict) -> "RandomFeatureMap":
        return cls(RFMethod(payload["method"]), np.asarray(payload["frequencies"], dtype=float),
                   np.asarray(payload["phases"], dtype=float), float(payload["sigma"]), int(payload["seed"]),
                   M0=int(payload.get("M0", 0)))


def _check_budget(M: int) -> None:
    if M < 1:
        raise InvalidM(f"number of features must be >= 1, got {M}")


def _phases(rng: np.random.Generator, M: int) -> np.ndarray:
    return rng.uniform(0.0, 2.0 * np.pi, size=M)


def rks_map(D: int, M: int, sigma: float, seed: int) -> RandomFeatureMap:
    """Cauchy frequencies: the spectral density of exp(-sigma ||x - x'||_1)."""
    _check_budget(M)
    rng = np.random.default_rng(seed)
    gamma = rng.standard_cauchy((M, D)) * sigma
    return RandomFeatureMap(RFMethod.RKS, gamma, _phases(rng, M), sigma, seed)


def rff_gaussian_map(D: int, M: int, sigma: float, seed: int) -> RandomFeatureMap:
    _check_budget(M)
    rng = np.random.default_rng(seed)
    gamma = rng.standard_normal((M, D)) * sigma
    return RandomFeatureMap(RFMethod.RFF, gamma, _phases(rng, M), sigma, seed)


def orf_map(D: int, M: int, sigma: float, seed: int) -> RandomFeatureMap:
    """Orthogonal random features: sigma * S * Q per D x D block.

    Q comes from the QR decomposition of a Gaussian matrix (signs fixed so that R
    has a positive diagonal, which makes Q Haar distributed) and S is diagonal with
    chi(D) entries, so each row keeps the norm distribution of a Gaussian vector.
    """
    _check_budget(M)
    rng = np.random.default_rng(seed)
    blocks = []
    for _ in range(math.ceil(M / D)):
        Q, R = linalg.qr(rng.standard_normal((D, D)))
        Q = Q * np.sign(np.diag(R))
        norms = stats.chi.rvs(df=D, size=D, random_state=rng)
        blocks.append(sigma * norms[:, None] * Q)
    gamma = np.vstack(blocks)[:M]
    return RandomFeatureMap(RFMethod.ORF, gamma, _phases(rng, M), sigma, seed)


def pool_map(D: int, M: int, sigma: float, seed: int, pool_factor: int = 10) -> RandomFeatureMap:
    pool = rks_map(D, pool_factor * M, sigma, seed)
    return RandomFeatureMap(pool.method, pool.frequencies, pool.phases, sigma, seed, M0=pool.n_features)


def _select(pool: RandomFeatureMap, scores: np.ndarray, M: int, method: RFMethod) -> RandomFeatureMap:
    if not 1 <= M <= pool.n_features:
        raise InvalidM(f"cannot keep {M} of {pool.n_features} candidate features")
    order = np.argsort(-scores, kind="stable")
    return pool.subset(order[:M], method)


def lkrf_select(pool: RandomFeatureMap, y, X, M: int) -> RandomFeatureMap:
    """Keep the M candidates with the largest kernel alignment (sum_i y_i zeta_m(x_i))^2."""
    Z = pool.transform(X)
    scores = (np.asarray(y, dtype=float) @ Z) ** 2
    return _select(pool, scores, M, RFMethod.LKRF)


def eerf_select(pool: RandomFeatureMap, y, X, M: int) -> RandomFeatureMap:
    """Keep the M candidates with the largest score |mean_i y_i zeta_m(x_i)|."""
    Z = pool.transform(X)
    scores = np.abs(np.asarray(y, dtype=float) @ Z) / Z.shape[0]
    return _select(pool, scores, M, RFMethod.EERF)


def rf_embed(rf_map: RandomFeatureMap, x) -> np.ndarray:
    return rf_map.embed(x)


def laplace_kernel(X, Xp, sigma: float) -> np.ndarray:
    X, Xp = np.atleast_2d(X), np.atleast_2d(Xp)
    return np.exp(-sigma * np.abs(X[:, None, :] - Xp[None, :, :]).sum(axis=2))


def gaussian_kernel(X, Xp, sigma: float) -> np.ndarray:
    X, Xp = np.atleast_2d(X), np.atleast_2d(Xp)
    return np.exp(-0.5 * sigma ** 2 * ((X[:, None, :] - Xp[None, :, :]) ** 2).sum(axis=2))
