"""CSV ingestion and preprocessing for the benchmark.

Inputs are min-max scaled into [0, 1]^D with parameters fit on the training
split only; regression targets go to [-1, 1] and class labels to -1/+1.
"""
from __future__ import annotations

import logging
import re
from dataclasses import dataclass
from pathlib import Path

import numpy as np
import pandas as pd
from scipy.spatial import cKDTree

from entropic.errors import DegenerateData, InvalidData, ParseError
from entropic.kernels import KernelKind, KernelSpec, kernel_matrix
from entropic.models.schema import Scaler

log = logging.getLogger(__name__)

NEIGHBOR_RANK = 50


@dataclass
class RawData:
    X: np.ndarray
    y: np.ndarray
    columns: list[str]
    target: str
    task: str = "reg"
    name: str = "data"
    classes: list[str] | None = None


@dataclass
class Dataset:
    X_train: np.ndarray
    X_test: np.ndarray
    y_train: np.ndarray
    y_test: np.ndarray
    name: str
    task: str
    scaler: Scaler

    @property
    def D(self) -> int:
        return int(self.X_train.shape[1])

    @property
    def N_train(self) -> int:
        return int(self.X_train.shape[0])

    @property
    def N_test(self) -> int:
        return int(self.X_test.shape[0])


def _label_order(labels) -> list[str]:
    try:
        return sorted(labels, key=float)
    except ValueError:
        return sorted(labels)


def _numeric(frame: pd.DataFrame, column: str) -> np.ndarray:
    values = pd.to_numeric(frame[column].str.strip(), errors="coerce")
    bad = np.flatnonzero(values.isna().to_numpy())
    if bad.size:
        # +2: header is line 1
        raise ParseError(f"non-numeric cell {frame[column].iloc[bad[0]]!r}", row=int(bad[0]) + 2, column=column)
    return values.to_numpy(dtype=float)


def _read_frame(path) -> pd.DataFrame:
    try:
        frame = pd.read_csv(path, dtype=str, keep_default_na=False, skipinitialspace=True)
    except pd.errors.EmptyDataError as exc:
        raise ParseError("empty CSV file") from exc
    except pd.errors.ParserError as exc:
        found = re.search(r"line (\d+)", str(exc))
        raise ParseError(f"ragged CSV: {exc}", row=int(found.group(1)) if found else None) from exc
    frame.columns = [str(c).strip() for c in frame.columns]
    return frame


def load_csv(path: str | Path, target_column: str, task: str = "reg") -> RawData:
    path = Path(path)
    frame = _read_frame(path)
    if target_column not in frame.columns:
        raise ParseError("target column not found", column=target_column)
    features = [c for c in frame.columns if c != target_column]
    if not features:
        raise ParseError("no feature columns besides the target", column=target_column)
    if frame.empty:
        raise ParseError("CSV has a header but no rows", row=2)
    X = np.column_stack([_numeric(frame, c) for c in features])
    classes = None
    if task == "clf":
        labels = frame[target_column].str.strip()
        classes = _label_order(labels.unique().tolist())
        if len(classes) != 2:
            raise InvalidData(f"binary classification needs exactly 2 labels, found {len(classes)}")
        y = np.where(labels.to_numpy() == classes[1], 1.0, -1.0)
    else:
        y = _numeric(frame, target_column)
    log.debug("loaded %s: %d rows, %d features", path.name, X.shape[0], X.shape[1])
    return RawData(X, y, features, target_column, task, path.stem, classes)


def load_points(path: str | Path, drop: str | None = None) -> tuple[np.ndarray, list[str]]:
    """Numeric matrix of every column of a headed CSV, optionally without ``drop``."""
    frame = _read_frame(path)
    columns = [c for c in frame.columns if c != drop]
    if frame.empty:
        return np.zeros((0, len(columns))), columns
    return np.column_stack([_numeric(frame, c) for c in columns]), columns


def write_csv(raw: RawData, path: str | Path) -> Path:
    frame = pd.DataFrame(raw.X, columns=raw.columns)
    frame[raw.target] = raw.y
    frame.to_csv(path, index=False, float_format="%.17g")
    return Path(path)


def fit_scaler(raw: RawData, rows: np.ndarray | None = None) -> Scaler:
    X = raw.X if rows is None else raw.X[rows]
    y = raw.y if rows is None else raw.y[rows]
    scaler = Scaler(x_min=X.min(axis=0).tolist(), x_max=X.max(axis=0).tolist(), classes=raw.classes)
    if raw.task != "clf":
        scaler.y_min, scaler.y_max = float(y.min()), float(y.max())
    return scaler


def scale_inputs(scaler: Scaler, X, clip: bool = True) -> np.ndarray:
    """Min-max map into [0, 1]; constant columns go to 0.5, values outside the fit range are clamped
    unless ``clip`` is off."""
    X = np.asarray(X, dtype=float)
    lo, hi = np.asarray(scaler.x_min), np.asarray(scaler.x_max)
    span = hi - lo
    flat = span == 0
    with np.errstate(divide="ignore", invalid="ignore"):
        out = (X - lo) / np.where(flat, 1.0, span)
    out[:, flat] = 0.5
    return np.clip(out, 0.0, 1.0) if clip else out


def scale_targets(scaler: Scaler, y) -> np.ndarray:
    y = np.asarray(y, dtype=float)
    if scaler.y_min is None:
        return y
    span = scaler.y_max - scaler.y_min
    if span == 0:
        return np.zeros_like(y)
    return 2.0 * (y - scaler.y_min) / span - 1.0


def unscale_targets(scaler: Scaler, y) -> np.ndarray:
    y = np.asarray(y, dtype=float)
    if scaler.y_min is None:
        return y
    return (y + 1.0) / 2.0 * (scaler.y_max - scaler.y_min) + scaler.y_min


def standardize(raw: RawData, split_ratio: float = 0.8, seed: int = 0) -> Dataset:
    N = raw.X.shape[0]
    if N < 2:
        raise InvalidData(f"need at least 2 rows to split, got {N}")
    if not 0.0 < split_ratio < 1.0:
        raise InvalidData(f"split ratio must lie in (0, 1), got {split_ratio}")
    n_train = min(max(int(round(split_ratio * N)), 1), N - 1)
    perm = np.random.default_rng(seed).permutation(N)
    train, test = np.sort(perm[:n_train]), np.sort(perm[n_train:])
    scaler = fit_scaler(raw, train)
    flat = [c for c, lo, hi in zip(raw.columns, scaler.x_min, scaler.x_max) if lo == hi]
    if flat:
        log.warning("constant feature(s) %s scaled to 0.5", ", ".join(flat))
    return Dataset(
        X_train=scale_inputs(scaler, raw.X[train]),
        X_test=scale_inputs(scaler, raw.X[test]),
        y_train=scale_targets(scaler, raw.y[train]),
        y_test=scale_targets(scaler, raw.y[test]),
        name=raw.name,
        task=raw.task,
        scaler=scaler,
    )


def estimate_sigma(X_train, rank: int = NEIGHBOR_RANK) -> float:
    """Inverse of the mean distance to the rank-th nearest neighbour (self excluded).

    With fewer than rank + 1 points the (N-1)-th neighbour is used.
    """
    X = np.asarray(X_train, dtype=float)
    N = X.shape[0]
    if N < 2:
        raise DegenerateData("need at least two points to estimate a bandwidth")
    k = min(rank, N - 1)
    if k < rank:
        log.info("only %d points, using the %d-th neighbour for the bandwidth", N, k)
    dist, _ = cKDTree(X).query(X, k=k + 1)
    mean = float(dist[:, k].mean())
    if mean <= 0.0:
        raise DegenerateData("all neighbour distances are zero (duplicate points)")
    return 1.0 / mean


def synthetic_task(
    N: int,
    D: int = 2,
    n_centers: int = 5,
    noise: float = 0.05,
    omega: float = 6.0,
    seed: int = 0,
    kind: KernelKind = KernelKind.LAPLACE,
) -> RawData:
    """y = sum_j c_j k(x, x_j) + noise with centers in the middle of the cube."""
    rng = np.random.default_rng(seed)
    spec = KernelSpec(kind=kind, omega=omega, dim=D)
    X = rng.uniform(0.0, 1.0, size=(N, D))
    centers = rng.uniform(0.3, 0.7, size=(n_centers, D))
    coef = rng.uniform(-1.0, 1.0, size=n_centers)
    y = kernel_matrix(spec, X, centers) @ coef + noise * rng.standard_normal(N)
    return RawData(X, y, [f"x{d}" for d in range(D)], "y", "reg", "synthetic")
