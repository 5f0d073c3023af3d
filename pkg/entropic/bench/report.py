"""Tables of benchmark results: CSV, aligned text and plot data."""
from __future__ import annotations

from typing import Iterable, Literal

import pandas as pd

from entropic.models.schema import BenchResult

COLUMNS = ["Method", "M", "M0", "T_train", "nnz(F)", "mean_error", "std_error"]
CURVE_COLUMNS = ["Method", "M", "mean_error", "std_error"]


def _frame(results: list[BenchResult], include_timing: bool) -> pd.DataFrame:
    rows = [
        {"Method": r.method.upper(), "M": r.M, "M0": r.M0, "T_train": r.T_train, "nnz(F)": r.nnz_F,
         "mean_error": r.mean_error, "std_error": r.std_error}
        for r in results
    ]
    columns = COLUMNS if include_timing else [c for c in COLUMNS if c != "T_train"]
    return pd.DataFrame(rows, columns=columns)


def _text_table(results: list[BenchResult], include_timing: bool) -> str:
    frame = _frame(results, include_timing)
    header = [c for c in frame.columns if c not in ("mean_error", "std_error")] + ["error"]
    if frame.empty:
        return "  ".join(header) + "\n"
    frame["error"] = [f"{m:.4g} ± {s:.4g}" for m, s in zip(frame["mean_error"], frame["std_error"])]
    if include_timing:
        frame["T_train"] = [f"{t:.3f}" for t in frame["T_train"]]
    text = frame[header].to_string(index=False) + "\n"
    failed = [r for r in results if r.failed]
    for r in failed:
        text += f"# {r.method} M={r.M}: {r.failed} of {r.runs + r.failed} runs failed\n"
    return text


def report(
    results: Iterable[BenchResult],
    fmt: Literal["csv", "text", "curves"] = "text",
    include_timing: bool = True,
) -> str:
    results = list(results)
    if fmt == "text":
        return _text_table(results, include_timing)
    if fmt == "curves":
        frame = _frame(results, include_timing=False)[CURVE_COLUMNS]
        return frame.to_csv(index=False, float_format="%.10g", lineterminator="\n")
    if fmt == "csv":
        return _frame(results, include_timing).to_csv(index=False, float_format="%.10g", lineterminator="\n")
    raise ValueError(f"unknown report format {fmt!r}")
