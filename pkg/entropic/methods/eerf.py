from entropic.baselines import eerf_select, pool_map


def build(job, ctx):
    dataset = ctx["dataset"]
    pool = pool_map(dataset.D, job.M, ctx["sigma"], job.seed, job.pool_factor)
    return eerf_select(pool, dataset.y_train, dataset.X_train, job.M)
