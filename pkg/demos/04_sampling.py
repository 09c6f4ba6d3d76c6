"""
Simulating the measurement
==========================

Both parties measure their half of the shared state in the computational
basis.  The outcome (S, T) has probability |m_ST|^2.
"""

import numpy as np
from scipy.stats import ortho_group

from qsampler import ProblemInstance
from qsampler.protocol import (
    apply_local_ops,
    chi_square_test,
    disjointness_violation_mass,
    empirical_distribution,
    exact_chi_distribution,
    exact_truncated_distribution,
    kron_action,
    sample,
    to_subset_pairs,
    tvd,
)
from qsampler.spectral import build_chi_matrix

inst = ProblemInstance(6, 2)
exact = exact_chi_distribution(inst)

###############################################################################
# Local unitaries act on the matrix as U_A M U_B^T.  That agrees with the
# Kronecker product acting on the row-major flattened state.

rng = np.random.default_rng(0)
U, V = ortho_group.rvs(15, random_state=rng), ortho_group.rvs(15, random_state=rng)
chi = build_chi_matrix(inst, normalized=True)
print("max |matrix form - kron form|:",
      np.max(np.abs(apply_local_ops(U, V, chi).entries - kron_action(U, V, chi.entries))))

###############################################################################
# One million seeded draws from the exact state.

draws = sample(exact, seed=1, count=10 ** 6)
print("first draws:", [(S.elements, T.elements) for S, T in to_subset_pairs(inst, draws[:3])])
print("empirical TVD:", tvd(exact, empirical_distribution(inst, draws)))
print("chi-square (statistic, p):", chi_square_test(exact, draws))

###############################################################################
# Truncated states leak probability onto intersecting pairs.  The exact
# rational TVD shrinks to zero as more eigenspaces are kept.

for g in range(inst.k + 1):
    trunc = exact_truncated_distribution(inst, g)
    print(f"g={g}  TVD={tvd(exact, trunc)}  violation mass={disjointness_violation_mass(trunc)}")
