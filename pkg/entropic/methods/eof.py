from entropic.design import select_features
from entropic.embed import feature_map
from entropic.kernels import KernelKind, KernelSpec


def build(job, ctx):
    dataset = ctx["dataset"]
    spec = KernelSpec(
        kind=KernelKind(ctx.get("kernel", "laplace")),
        omega=ctx["sigma"],
        dim=dataset.D,
        strict=ctx.get("strict", False),
        laplace_constant=ctx.get("laplace_constant", "exact"),
    )
    S = select_features(spec, job.M, job.seed, rule=job.design)
    return feature_map(spec, S)
