"""Benchmark method plugins.

Each module exposes ``build(job, ctx)`` returning a feature map with
``transform(X)`` and ``n_features``; ``ctx`` carries the dataset and bandwidth.
"""
