"""``eof`` command line: embed, train, predict, bench, serve."""
from __future__ import annotations

import argparse
import asyncio
import logging
import sys

import numpy as np
import pandas as pd
from pydantic import ValidationError

from entropic.bench.data import estimate_sigma, load_csv, load_points, scale_inputs, standardize, unscale_targets
from entropic.bench.orchestrator import run_benchmark
from entropic.bench.report import report
from entropic.bench.worker import METHODS, load_method
from entropic.config import configure_logging, load_settings
from entropic.design import select_features, sparse_grid_size
from entropic.embed import feature_map, format_coo
from entropic.errors import EntropicError, InvalidPoint
from entropic.infra.artifacts import write_reports, write_text
from entropic.kernels import KernelKind, KernelSpec
from entropic.learn import Task, fit, load_model, predict, save_model, test_error
from entropic.models.schema import BenchJob

log = logging.getLogger(__name__)


def _int_list(text: str) -> list[int]:
    return [int(v) for v in text.split(",") if v.strip()]


def _budget(args, D: int) -> int:
    if args.level is not None:
        return sparse_grid_size(D, args.level)
    if args.num_features is None:
        raise EntropicError("give --level or --num-features")
    return args.num_features


def cmd_embed(args, settings) -> int:
    X, _ = load_points(args.input)
    spec = KernelSpec(kind=KernelKind(args.kernel), omega=args.omega, dim=X.shape[1],
                      strict=settings.strict, laplace_constant=args.laplace_constant)
    S = select_features(spec, _budget(args, spec.dim), args.seed, rule=args.design)
    F = feature_map(spec, S, args.raw_scale).transform(X)
    asyncio.run(write_text(args.output, format_coo(F)))
    print(f"[ok] {F.shape[0]} x {F.shape[1]} features, nnz={F.nnz} -> {args.output}")
    return 0


def cmd_train(args, settings) -> int:
    dataset = standardize(load_csv(args.data, args.target, args.task), args.split, args.seed)
    sigma = estimate_sigma(dataset.X_train) if args.omega == "auto" else float(args.omega)
    job = BenchJob(method=args.method, M=_budget(args, dataset.D), run=0, seed=args.seed,
                   pool_factor=args.pool_factor, design=args.design)
    ctx = {"dataset": dataset, "sigma": sigma, "kernel": args.kernel, "laplace_constant": args.laplace_constant,
           "strict": settings.strict}
    fmap = load_method(args.method).build(job, ctx)
    lam = None if args.lam == "auto" else float(args.lam)
    model = fit(fmap.transform(dataset.X_train), dataset.y_train, args.task, lam, threads=settings.threads)
    model.feature_map, model.scaler = fmap, dataset.scaler
    error = test_error(model, fmap.transform(dataset.X_test), dataset.y_test)
    save_model(model, args.model)
    print(f"[ok] {args.method} M={model.n_features} sigma={sigma:.4g} lambda={model.lam:.4g} "
          f"test_error={error:.6g} -> {args.model}")
    return 0


def cmd_predict(args, settings) -> int:
    model = load_model(args.model)
    X, _ = load_points(args.input, drop=args.drop)
    if model.scaler is not None:
        X = scale_inputs(model.scaler, X, clip=not settings.strict)
    if settings.strict and (np.any(X < 0.0) or np.any(X > 1.0)):
        raise InvalidPoint("input outside the training range in strict mode")
    scores = predict(model, model.feature_map.transform(X))
    if model.task is Task.CLASSIFICATION:
        labels = np.where(scores >= 0.0, 1, 0)
        classes = model.scaler.classes if model.scaler and model.scaler.classes else ["-1", "1"]
        column = [classes[k] for k in labels]
    else:
        column = unscale_targets(model.scaler, scores) if model.scaler else scores
    pd.DataFrame({"prediction": column}).to_csv(args.output, index=False)
    print(f"[ok] {len(column)} predictions -> {args.output}")
    return 0


def cmd_bench(args, settings) -> int:
    dataset = standardize(load_csv(args.data, args.target, args.task), args.split, args.seed)
    results = run_benchmark(
        dataset, args.methods.split(","), _int_list(args.m), runs=args.runs, seed=args.seed,
        concurrency=args.threads or settings.threads, pool_factor=args.pool_factor, design=args.design,
        sigma=args.sigma, ledger_path=settings.ledger, laplace_constant=args.laplace_constant,
        strict=settings.strict,
    )
    out_dir = args.out or settings.art_dir
    written = asyncio.run(write_reports(results, out_dir))
    print(report(results, "text"), end="")
    print(f"[ok] {len(results)} rows -> {', '.join(str(p) for p in written.values())}")
    return 0


def cmd_serve(args, settings) -> int:
    import uvicorn
    uvicorn.run("entropic.main:app", host=args.host, port=args.port)
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="eof", description="Entropic optimal features")
    parser.add_argument("-v", "--verbose", action="store_true")
    parser.add_argument("--strict", action="store_true", help="reject points outside [0,1]^D")
    parser.add_argument("--laplace-constant", choices=["exact", "sinh"], default="exact")
    sub = parser.add_subparsers(dest="command", required=True)

    def design_args(p):
        p.add_argument("--kernel", choices=[k.value for k in KernelKind if k is not KernelKind.CUSTOM],
                       default="laplace")
        budget = p.add_mutually_exclusive_group()
        budget.add_argument("--level", type=int)
        budget.add_argument("--num-features", type=int)
        p.add_argument("--design", choices=["random", "entropic"], default="random")
        p.add_argument("--seed", type=int, default=0)

    p = sub.add_parser("embed", help="write the sparse feature matrix of a point CSV")
    design_args(p)
    p.add_argument("--omega", type=float, default=1.0)
    p.add_argument("--input", required=True)
    p.add_argument("--output", required=True)
    p.add_argument("--raw-scale", action="store_true")
    p.set_defaults(func=cmd_embed)

    p = sub.add_parser("train", help="fit a model on a CSV and save it")
    design_args(p)
    p.add_argument("--data", required=True)
    p.add_argument("--target", required=True)
    p.add_argument("--task", choices=[t.value for t in Task], default="reg")
    p.add_argument("--method", choices=METHODS, default="eof")
    p.add_argument("--omega", default="auto")
    p.add_argument("--lambda", dest="lam", default="auto")
    p.add_argument("--split", type=float, default=0.8)
    p.add_argument("--pool-factor", type=int, default=10)
    p.add_argument("--model", required=True)
    p.set_defaults(func=cmd_train)

    p = sub.add_parser("predict", help="apply a saved model to a point CSV")
    p.add_argument("--model", required=True)
    p.add_argument("--input", required=True)
    p.add_argument("--output", required=True)
    p.add_argument("--drop", help="column to ignore, e.g. the target")
    p.set_defaults(func=cmd_predict)

    p = sub.add_parser("bench", help="compare methods over a grid of feature counts")
    p.add_argument("--data", required=True)
    p.add_argument("--target", required=True)
    p.add_argument("--task", choices=[t.value for t in Task], default="reg")
    p.add_argument("--methods", default=",".join(METHODS))
    p.add_argument("--m", default="20,40,80,160")
    p.add_argument("--runs", type=int, default=50)
    p.add_argument("--seed", type=int, default=7)
    p.add_argument("--out")
    p.add_argument("--pool-factor", type=int, default=10)
    p.add_argument("--design", choices=["random", "entropic"], default="random")
    p.add_argument("--split", type=float, default=0.8)
    p.add_argument("--sigma", type=float, help="bandwidth; estimated from the data when omitted")
    p.add_argument("--threads", type=int, help="overrides EOF_THREADS")
    p.set_defaults(func=cmd_bench)

    p = sub.add_parser("serve", help="run the HTTP benchmark service")
    p.add_argument("--host", default="127.0.0.1")
    p.add_argument("--port", type=int, default=8080)
    p.set_defaults(func=cmd_serve)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    configure_logging(logging.DEBUG if args.verbose else logging.INFO)
    settings = load_settings()
    if args.strict:
        settings.strict = True
    try:
        return args.func(args, settings)
    except (EntropicError, ValidationError, OSError) as e:
        print(f"[error] {e}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    raise SystemExit(main())
