"""Fan benchmark jobs out to a bounded worker pool and aggregate the outcomes."""
from __future__ import annotations

import asyncio
import logging
import math
from typing import Sequence

import numpy as np

from entropic.bench.data import Dataset, estimate_sigma
from entropic.bench.worker import load_method, submit_job
from entropic.infra import ledger
from entropic.models.schema import BenchJob, BenchResult, RunRecord

log = logging.getLogger(__name__)


def job_seed(master: int, method_idx: int, M: int, run: int) -> int:
    """Per-run seed from a fixed counter scheme, independent of scheduling."""
    return int(np.random.SeedSequence([master, method_idx, M, run]).generate_state(1)[0])


class Orchestrator:
    def __init__(
        self,
        dataset: Dataset,
        methods: Sequence[str],
        M_grid: Sequence[int],
        runs: int = 1,
        seed: int = 0,
        concurrency: int = 4,
        pool_factor: int = 10,
        design: str = "random",
        sigma: float | None = None,
        ledger_path: str | None = None,
        laplace_constant: str = "exact",
        strict: bool = False,
    ):
        if runs < 1:
            raise ValueError(f"runs must be >= 1, got {runs}")
        self.dataset = dataset
        self.methods = [m.strip().lower() for m in methods]
        self.M_grid = [int(M) for M in M_grid]
        self.runs = runs
        self.seed = seed
        self.concurrency = max(1, concurrency)
        self.pool_factor = pool_factor
        self.design = design
        self.sigma = sigma
        self.ledger_path = ledger_path
        self.laplace_constant = laplace_constant
        self.strict = strict
        self.jobs: list[BenchJob] = []
        self.records: dict[int, RunRecord] = {}
        self.running = 0

    def load(self):
        for name in self.methods:
            load_method(name)
        if self.sigma is None:
            self.sigma = estimate_sigma(self.dataset.X_train)
            log.info("bandwidth sigma=%.4g from nearest-neighbour distances", self.sigma)
        self.jobs = [
            BenchJob(method=name, M=M, run=r, seed=job_seed(self.seed, k, M, r),
                     pool_factor=self.pool_factor, design=self.design)
            for k, name in enumerate(self.methods)
            for M in self.M_grid
            for r in range(self.runs)
        ]
        self.records = {}
        if self.ledger_path:
            ledger.init_db(self.ledger_path)

    def _ctx(self) -> dict:
        return {"dataset": self.dataset, "sigma": self.sigma, "laplace_constant": self.laplace_constant,
                "strict": self.strict}

    async def _run_one(self, key: int, job: BenchJob, sem: asyncio.Semaphore, ctx: dict):
        async with sem:
            self.running += 1
            rid = ledger.start_run(self.ledger_path, job) if self.ledger_path else None
            try:
                ok, metrics = await submit_job(job, ctx)
            except asyncio.CancelledError:
                if rid is not None:
                    ledger.finish_run(self.ledger_path, rid, False, {"error": "cancelled"})
                raise
            finally:
                self.running -= 1
        if ok:
            record = RunRecord(**metrics)
        else:
            record = RunRecord(method=job.method, M=job.M, run=job.run, seed=job.seed, ok=False,
                               error=metrics.get("error"))
        self.records[key] = record
        if rid is not None:
            ledger.finish_run(self.ledger_path, rid, ok, {"error": record.error} if not ok else {})
            if ok:
                for k in ("test_error", "feature_seconds", "solve_seconds", "nnz_F"):
                    ledger.add_metric(self.ledger_path, rid, k, getattr(record, k))

    async def run(self):
        if not self.jobs:
            self.load()
        sem = asyncio.Semaphore(self.concurrency)
        ctx = self._ctx()
        await asyncio.gather(*(self._run_one(k, job, sem, ctx) for k, job in enumerate(self.jobs)))
        return self.results()

    def status_counts(self) -> dict:
        done = sum(1 for r in self.records.values() if r.ok)
        failed = len(self.records) - done
        return {"total": len(self.jobs), "done": done, "failed": failed,
                "running": self.running, "open": len(self.jobs) - len(self.records)}

    def results(self) -> list[BenchResult]:
        grouped: dict[tuple[str, int], list[RunRecord]] = {}
        for key in sorted(self.records):
            record = self.records[key]
            grouped.setdefault((record.method, record.M), []).append(record)
        out = []
        for name in self.methods:
            for M in self.M_grid:
                records = grouped.get((name, M), [])
                if records:
                    out.append(aggregate(name, M, records))
        return out


def aggregate(method: str, M: int, records: list[RunRecord]) -> BenchResult:
    good = [r for r in records if r.ok]
    failed = len(records) - len(good)
    if failed:
        log.warning("%s M=%d: %d of %d runs failed", method, M, failed, len(records))
    if not good:
        nan = math.nan
        return BenchResult(method=method, M=M, mean_error=nan, std_error=nan, T_train=nan, T_features=nan,
                           T_solve=nan, nnz_F=0, runs=0, failed=failed, seeds=[r.seed for r in records])
    errors = np.array([r.test_error for r in good])
    features = np.array([r.feature_seconds for r in good])
    solves = np.array([r.solve_seconds for r in good])
    return BenchResult(
        method=method,
        M=M,
        M0=good[0].M0,
        mean_error=float(errors.mean()),
        std_error=float(errors.std()),
        T_train=float((features + solves).mean()),
        T_features=float(features.mean()),
        T_solve=float(solves.mean()),
        nnz_F=int(round(np.mean([r.nnz_F for r in good]))),
        runs=len(good),
        failed=failed,
        seeds=[r.seed for r in good],
    )


def run_benchmark(
    dataset: Dataset,
    methods: Sequence[str],
    M_grid: Sequence[int],
    runs: int = 1,
    seed: int = 0,
    concurrency: int = 4,
    **options,
) -> list[BenchResult]:
    orch = Orchestrator(dataset, methods, M_grid, runs=runs, seed=seed, concurrency=concurrency, **options)
    orch.load()
    return asyncio.run(orch.run())
