import asyncio
import math
from typing import List, Optional

from fastapi import FastAPI, HTTPException
from pydantic import BaseModel, Field

from entropic.bench.data import load_csv, standardize
from entropic.bench.orchestrator import Orchestrator
from entropic.config import load_settings
from entropic.errors import EntropicError

settings = load_settings()

app = FastAPI(title="EOF benchmark service")

orch: Orchestrator | None = None
task = None


class StartRequest(BaseModel):
    data: Optional[str] = None
    target: str
    task: str = "reg"
    methods: List[str] = ["eof", "rks", "orf", "lkrf", "eerf"]
    m: List[int] = Field(default_factory=lambda: [20, 40, 80])
    runs: int = Field(default=1, ge=1)
    seed: int = 0
    split: float = 0.8
    design: str = "random"
    concurrency: Optional[int] = Field(default=None, ge=1)


@app.get("/health")
async def health():
    return {"ok": True, "service": "eof", "running": bool(task and not task.done())}


@app.post("/start")
async def start(req: StartRequest):
    global orch, task
    if task and not task.done():
        raise HTTPException(status_code=409, detail="a benchmark is already running")
    path = req.data or settings.data
    if not path:
        raise HTTPException(status_code=400, detail="no dataset given and EOF_DATA is unset")
    concurrency = req.concurrency or settings.threads
    try:
        dataset = standardize(load_csv(path, req.target, req.task), req.split, req.seed)
        orch = Orchestrator(dataset, req.methods, req.m, runs=req.runs, seed=req.seed,
                            concurrency=concurrency, design=req.design, ledger_path=settings.ledger,
                            strict=settings.strict)
        orch.load()
    except (EntropicError, ValueError, OSError) as e:
        raise HTTPException(status_code=400, detail=str(e))
    task = asyncio.create_task(orch.run())
    return {"status": "started", "jobs": len(orch.jobs), "concurrency": concurrency}


@app.get("/status")
async def status():
    if orch:
        return orch.status_counts()
    return {"total": 0, "done": 0, "failed": 0, "running": 0, "open": 0}


@app.get("/results")
async def results():
    if orch is None:
        return []
    # NaN (all runs failed) is not valid JSON
    return [{k: (None if isinstance(v, float) and math.isnan(v) else v) for k, v in r.model_dump().items()}
            for r in orch.results()]


@app.post("/stop")
async def stop():
    if task and not task.done():
        task.cancel()
        return {"status": "stopping"}
    return {"status": "idle"}


if __name__ == "__main__":
    import uvicorn
    uvicorn.run("entropic.main:app", host="0.0.0.0", port=8080)
