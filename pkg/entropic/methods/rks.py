from entropic.baselines import rks_map


def build(job, ctx):
    return rks_map(ctx["dataset"].D, job.M, ctx["sigma"], job.seed)
