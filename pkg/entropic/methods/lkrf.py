from entropic.baselines import lkrf_select, pool_map


def build(job, ctx):
    dataset = ctx["dataset"]
    pool = pool_map(dataset.D, job.M, ctx["sigma"], job.seed, job.pool_factor)
    return lkrf_select(pool, dataset.y_train, dataset.X_train, job.M)
