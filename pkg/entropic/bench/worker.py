import asyncio, importlib, logging, time

from entropic.errors import EntropicError
from entropic.learn import fit, test_error
from entropic.models.schema import BenchJob, RunRecord

log = logging.getLogger(__name__)

METHODS = ("eof", "rks", "orf", "lkrf", "eerf")


def load_method(name: str):
    name = name.strip().lower()
    if name not in METHODS:
        raise EntropicError(f"unknown method {name!r}; choose from {', '.join(METHODS)}")
    return importlib.import_module(f"entropic.methods.{name}")


def run_job(job: BenchJob, ctx: dict) -> RunRecord:
    dataset = ctx["dataset"]
    mod = load_method(job.method)
    start = time.perf_counter()
    fmap = mod.build(job, ctx)
    F = fmap.transform(dataset.X_train)
    feature_seconds = time.perf_counter() - start
    model = fit(F, dataset.y_train, dataset.task, threads=ctx.get("threads"))
    error = test_error(model, fmap.transform(dataset.X_test), dataset.y_test)
    return RunRecord(
        method=job.method, M=job.M, run=job.run, seed=job.seed, ok=True,
        test_error=error, M0=getattr(fmap, "M0", 0),
        feature_seconds=feature_seconds, solve_seconds=model.train_seconds, nnz_F=model.nnz_F,
    )


async def submit_job(job: BenchJob, ctx: dict) -> tuple[bool, dict]:
    try:
        record = await asyncio.to_thread(run_job, job, ctx)
        return True, record.model_dump()
    except Exception as e:
        log.warning("run %s M=%d #%d failed: %s", job.method, job.M, job.run, e)
        return False, {"error": f"{type(e).__name__}: {e}"}
