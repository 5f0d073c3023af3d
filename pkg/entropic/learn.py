"""Regularized linear learners on top of a feature matrix.

Both solvers accept a scipy sparse matrix (entropic features) or a dense array
(random features). Ridge solves the normal equations directly; logistic
regression runs damped Newton on the mean log-loss plus lam ||w||^2.
"""
from __future__ import annotations

import logging
import math
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from enum import Enum
from pathlib import Path

import numpy as np
from scipy import linalg, sparse
from scipy.special import expit

from entropic.config import load_settings
from entropic.errors import ConvergenceError, DimError, InvalidData, ParseError
from entropic.models.schema import ModelHeader, Scaler

log = logging.getLogger(__name__)

MODEL_MAGIC = "# entropic-model v1"
GRAM_BLOCK_ROWS = 8192


class Task(str, Enum):
    REGRESSION = "reg"
    CLASSIFICATION = "clf"


@dataclass
class Model:
    weights: np.ndarray
    lam: float
    task: Task
    feature_map: object = None
    scaler: Scaler | None = None
    train_seconds: float = 0.0
    feature_seconds: float = 0.0
    nnz_F: int = 0
    history: list[float] = field(default_factory=list)

    def __post_init__(self) -> None:
        self.weights = np.asarray(self.weights, dtype=float)
        if not np.all(np.isfinite(self.weights)):
            raise InvalidData("model weights must be finite")
        if not self.lam > 0:
            raise InvalidData(f"lambda must be positive, got {self.lam}")

    @property
    def n_features(self) -> int:
        return int(self.weights.size)


def default_lambda(N: int) -> float:
    return 1.0 / math.sqrt(N)


def _check_problem(F, y, lam: float | None) -> tuple[np.ndarray, float]:
    if F.ndim != 2:
        raise DimError(f"feature matrix must be 2-D, got shape {F.shape}")
    y = np.asarray(y, dtype=float).ravel()
    if y.size != F.shape[0]:
        raise DimError(f"{F.shape[0]} rows of features but {y.size} targets")
    if y.size == 0:
        raise InvalidData("empty training set")
    if not np.all(np.isfinite(y)):
        raise InvalidData("targets must be finite")
    lam = default_lambda(y.size) if lam is None else float(lam)
    if not (math.isfinite(lam) and lam > 0):
        raise InvalidData(f"lambda must be positive, got {lam}")
    return y, lam


def _block_gram(F, weights: np.ndarray | None) -> np.ndarray:
    if sparse.issparse(F):
        G = F.T @ (F if weights is None else sparse.diags(weights) @ F)
        return np.asarray(G.toarray())
    if weights is None:
        return F.T @ F
    return F.T @ (F * weights[:, None])


def _gram(F, weights: np.ndarray | None = None, block_rows: int = GRAM_BLOCK_ROWS,
          threads: int | None = None) -> np.ndarray:
    """F^T diag(weights) F as a dense array, summed over row blocks in a fixed order.

    At most ``threads`` blocks run at once; the default is the EOF_THREADS cap.
    """
    N = F.shape[0]
    if N <= block_rows:
        return _block_gram(F, weights)
    starts = range(0, N, block_rows)
    workers = min(len(starts), threads or load_settings().threads)
    with ThreadPoolExecutor(max_workers=workers) as pool:
        parts = pool.map(
            lambda s: _block_gram(F[s:s + block_rows], None if weights is None else weights[s:s + block_rows]),
            starts,
        )
        G = np.zeros((F.shape[1], F.shape[1]))
        for part in parts:
            G += part
    return G


def _rmatvec(F, v: np.ndarray) -> np.ndarray:
    return np.asarray(F.T @ v).ravel()


def _matvec(F, w: np.ndarray) -> np.ndarray:
    return np.asarray(F @ w).ravel()


def ridge_fit(F, y, lam: float | None = None, threads: int | None = None) -> Model:
    """argmin (1/N) ||F w - y||^2 + lam ||w||^2, i.e. (F^T F + lam N I) w = F^T y."""
    y, lam = _check_problem(F, y, lam)
    N, M = F.shape
    start = time.perf_counter()
    G = _gram(F, threads=threads)
    G[np.diag_indices(M)] += lam * N
    w = linalg.solve(G, _rmatvec(F, y), assume_a="pos")
    elapsed = time.perf_counter() - start
    log.debug("ridge: N=%d M=%d lam=%.3g in %.3fs", N, M, lam, elapsed)
    nnz = F.nnz if sparse.issparse(F) else int(np.count_nonzero(F))
    return Model(w, lam, Task.REGRESSION, train_seconds=elapsed, nnz_F=nnz)


def objective(F, y, w: np.ndarray, lam: float, task: Task | str = Task.CLASSIFICATION) -> float:
    y, w = np.asarray(y, dtype=float).ravel(), np.asarray(w, dtype=float)
    if Task(task) is Task.REGRESSION:
        return float(np.mean((_matvec(F, w) - y) ** 2) + lam * w @ w)
    margin = y * _matvec(F, w)
    return float(np.mean(np.logaddexp(0.0, -margin)) + lam * w @ w)


def _logistic_grad(F, y, w: np.ndarray, lam: float) -> tuple[np.ndarray, np.ndarray]:
    s = expit(-y * _matvec(F, w))
    return -_rmatvec(F, y * s) / F.shape[0] + 2.0 * lam * w, s


def logistic_fit(F, y, lam: float | None = None, tol: float = 1e-8, max_iter: int = 100,
                 threads: int | None = None) -> Model:
    """Newton's method with Armijo backtracking on the mean log-loss."""
    y, lam = _check_problem(F, y, lam)
    if not np.all(np.isin(y, (-1.0, 1.0))):
        raise InvalidData("classification labels must be -1 or +1")
    N, M = F.shape
    start = time.perf_counter()
    w = np.zeros(M)
    obj = objective(F, y, w, lam)
    history = [obj]
    for it in range(max_iter + 1):
        grad, s = _logistic_grad(F, y, w, lam)
        grad_norm = float(np.linalg.norm(grad))
        if grad_norm < tol:
            break
        if it == max_iter:
            raise ConvergenceError(f"Newton stopped after {max_iter} iterations",
                                   grad_norm=grad_norm, iterations=max_iter)
        H = _gram(F, s * (1.0 - s), threads=threads) / N
        H[np.diag_indices(M)] += 2.0 * lam
        step_dir = linalg.solve(H, -grad, assume_a="pos")
        slope = float(grad @ step_dir)
        # roundoff slack near the optimum
        slack = 1e-14 * abs(obj)
        t = 1.0
        for _ in range(60):
            cand_obj = objective(F, y, w + t * step_dir, lam)
            if cand_obj <= obj + 1e-4 * t * slope + slack:
                break
            t *= 0.5
        else:
            raise ConvergenceError("line search stalled", grad_norm=grad_norm, iterations=it)
        w = w + t * step_dir
        obj = cand_obj
        history.append(obj)
    elapsed = time.perf_counter() - start
    log.debug("logistic: N=%d M=%d lam=%.3g grad=%.2e in %.3fs", N, M, lam, grad_norm, elapsed)
    nnz = F.nnz if sparse.issparse(F) else int(np.count_nonzero(F))
    return Model(w, lam, Task.CLASSIFICATION, train_seconds=elapsed, nnz_F=nnz, history=history)


def fit(F, y, task: Task | str, lam: float | None = None, threads: int | None = None) -> Model:
    if Task(task) is Task.CLASSIFICATION:
        return logistic_fit(F, y, lam, threads=threads)
    return ridge_fit(F, y, lam, threads=threads)


def predict(model: Model, Z) -> np.ndarray:
    if Z.ndim != 2 or Z.shape[1] != model.n_features:
        raise DimError(f"model has {model.n_features} weights, features have shape {Z.shape}")
    return _matvec(Z, model.weights)


def predict_labels(model: Model, Z) -> np.ndarray:
    """Signs of the scores, with sign(0) = +1."""
    return np.where(predict(model, Z) >= 0.0, 1.0, -1.0)


def test_error(model: Model, Z, y) -> float:
    """Mean squared error for regression, misclassification rate for classification."""
    y = np.asarray(y, dtype=float).ravel()
    if y.size != Z.shape[0]:
        raise DimError(f"{Z.shape[0]} rows of features but {y.size} targets")
    if model.task is Task.CLASSIFICATION:
        return float(np.mean(predict_labels(model, Z) != y))
    return float(np.mean((predict(model, Z) - y) ** 2))


test_error.__test__ = False


def save_model(model: Model, path: str | Path) -> Path:
    if model.feature_map is None or not hasattr(model.feature_map, "describe"):
        raise InvalidData("model has no serializable feature map")
    description = model.feature_map.describe()
    if description.get("kernel", {}).get("kind") == "custom":
        raise InvalidData("models with a custom kernel family cannot be saved")
    header = ModelHeader(task=model.task.value, lam=model.lam, n_weights=model.n_features,
                         feature_map=description, scaler=model.scaler,
                         train_seconds=model.train_seconds, feature_seconds=model.feature_seconds,
                         nnz_F=model.nnz_F)
    path = Path(path)
    body = "\n".join(f"{v:.17g}" for v in model.weights)
    path.write_text(f"{MODEL_MAGIC}\n{header.model_dump_json()}\n{body}\n")
    return path


def feature_map_from_description(payload: dict):
    from entropic.baselines import RandomFeatureMap
    from entropic.design import IndexSet
    from entropic.embed import feature_map
    from entropic.kernels import KernelSpec

    if payload.get("method") == "eof":
        spec = KernelSpec(**payload["kernel"])
        S = IndexSet.from_pairs(payload["indices"], level_cap=payload.get("level_cap"), seed=payload.get("seed"))
        return feature_map(spec, S, bool(payload.get("raw_scale", False)))
    return RandomFeatureMap.from_description(payload)


def load_model(path: str | Path) -> Model:
    lines = Path(path).read_text().splitlines()
    if not lines or lines[0].strip() != MODEL_MAGIC:
        raise ParseError("not a model file", row=1)
    try:
        header = ModelHeader.model_validate_json(lines[1])
    except (IndexError, ValueError) as exc:
        raise ParseError(f"bad model header: {exc}", row=2) from exc
    weights = []
    for row, line in enumerate(lines[2:], start=3):
        if not line.strip():
            continue
        try:
            weights.append(float(line))
        except ValueError as exc:
            raise ParseError(f"bad weight {line!r}", row=row) from exc
    if len(weights) != header.n_weights:
        raise ParseError(f"header announces {header.n_weights} weights, found {len(weights)}")
    return Model(np.array(weights), header.lam, Task(header.task),
                 feature_map=feature_map_from_description(header.feature_map), scaler=header.scaler,
                 train_seconds=header.train_seconds, feature_seconds=header.feature_seconds,
                 nnz_F=header.nnz_F)
