"""Entropic optimal features: sparse, orthogonal RKHS features for Sturm-Liouville kernels."""
from entropic.design import IndexSet, enumerate_sparse_grid, entropic_select, select_features, truncate_random
from entropic.embed import EntropicFeatureMap, embed, embed_batch, kernel_approx
from entropic.errors import EntropicError
from entropic.features import FeatureIndex, phi_1d, phi_nd
from entropic.kernels import KernelKind, KernelSpec, kernel_eval

__version__ = "0.1.0"
