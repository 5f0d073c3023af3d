from entropic.baselines import orf_map


def build(job, ctx):
    return orf_map(ctx["dataset"].D, job.M, ctx["sigma"], job.seed)
