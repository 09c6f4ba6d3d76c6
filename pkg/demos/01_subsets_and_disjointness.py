"""
Ranking k-subsets and the disjointness matrix
=============================================

Every k-subset of {0..n-1} gets an integer rank in colex order; the
disjointness matrix is indexed by those ranks.
"""

import numpy as np

from qsampler import ProblemInstance
from qsampler.combinatorics import colex_subsets, rank_subset, unrank_subset
from qsampler.spectral import build_chi_matrix

inst = ProblemInstance(6, 2)
print(inst)

###############################################################################
# Colex order sorts subsets by their largest element first.  Rank and unrank
# are inverse to each other.

for r, S in enumerate(colex_subsets(6, 2)):
    assert rank_subset(S, 6) == r and unrank_subset(r, 6, 2) == S
    print(r, S)

###############################################################################
# The 0/1 matrix has a one wherever the row subset and column subset are
# disjoint.  Each row has C(n-k, k) = 6 ones, for D = 90 in total.

M = build_chi_matrix(inst).entries.astype(int)
print(M)
print("row sums:", M.sum(axis=1))
print("disjoint ordered pairs D =", inst.D, "=", M.sum())

###############################################################################
# Normalizing by sqrt(D) turns it into a unit-norm bipartite state.

chi = build_chi_matrix(inst, normalized=True)
print("Frobenius mass:", chi.mass(), " entry value 1/sqrt(90) =", np.unique(chi.entries)[1])
