"""
Combining two syntax memories with dual cross-attention
=======================================================

A decoder state can attend to a constituency-graph memory and a
dependency-graph memory at once.  Two independent cross-attention
branches, summed, behave differently from a single shared branch over
the concatenated memories; both variants are provided.
"""

import numpy as np

from gecsyntax import cross_attention, dual_combine
from gecsyntax.attention import init_attention

d = 8
rng = np.random.default_rng(1)
queries = rng.standard_normal((3, d))          # three decoder positions
mem_constituency = rng.standard_normal((5, d))
mem_dependency = rng.standard_normal((4, d))

params_c = init_attention(d, seed=1)
params_d = init_attention(d, seed=2)
params_shared = init_attention(d, seed=3)

out, weights = cross_attention(queries, mem_constituency, params_c,
                               return_weights=True)
print("attention rows sum to:", weights.sum(axis=1))

independent = dual_combine(queries, mem_constituency, mem_dependency,
                           "independent",
                           params_const=params_c, params_dep=params_d)
sharing = dual_combine(queries, mem_constituency, mem_dependency,
                       "sharing", params_shared=params_shared)
print("independent branches:", independent.shape)
print("sharing one branch:  ", sharing.shape)
print("largest output gap between the two modes:",
      float(np.max(np.abs(independent - sharing))))
