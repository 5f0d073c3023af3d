from pydantic import BaseModel, Field
from typing import Optional, List, Dict, Any


class Scaler(BaseModel):
    x_min: List[float]
    x_max: List[float]
    y_min: Optional[float] = None
    y_max: Optional[float] = None
    classes: Optional[List[str]] = None


class ModelHeader(BaseModel):
    version: int = 1
    task: str
    lam: float = Field(gt=0)
    n_weights: int
    feature_map: Dict[str, Any]
    scaler: Optional[Scaler] = None
    train_seconds: float = 0.0
    feature_seconds: float = 0.0
    nnz_F: int = 0


class BenchJob(BaseModel):
    method: str
    M: int = Field(ge=1)
    run: int = Field(ge=0)
    seed: int
    pool_factor: int = 10
    design: str = "random"


class RunRecord(BaseModel):
    method: str
    M: int
    run: int
    seed: int
    ok: bool
    error: Optional[str] = None
    test_error: Optional[float] = None
    M0: int = 0
    feature_seconds: float = 0.0
    solve_seconds: float = 0.0
    nnz_F: int = 0


class BenchResult(BaseModel):
    method: str
    M: int
    M0: int = 0
    mean_error: float
    std_error: float
    T_train: float
    T_features: float
    T_solve: float
    nnz_F: int
    runs: int
    failed: int = 0
    seeds: List[int] = []
