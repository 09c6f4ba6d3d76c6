"""
Eigenspaces of the disjointness matrix
======================================

The matrix has k+1 eigenspaces with closed-form eigenvalues.  We compare the
closed form with two numeric eigensolvers and with integer eigenvectors.
"""

import numpy as np

from qsampler import ProblemInstance
from qsampler.spectral import (
    build_b_matrix,
    build_chi_matrix,
    closed_form_spectrum,
    lovasz_eigenvector,
    numeric_eigendecomposition,
    orthonormal_eigenbasis,
)

inst = ProblemInstance(6, 2)
system = closed_form_spectrum(inst)

###############################################################################
# Closed form: eigenvalue (-1)^i C(n-k-i, k-i) on E_i (C(n-k, k) on E_0), with
# dimension C(n,i) - C(n,i-1).  The +-1 matrix B = 2M - J shares the spaces.

for s in system.spaces:
    print(f"E_{s.i}: dim {s.dim:2d}  lambda_chi {int(s.lambda_chi):3d}  lambda_B/N {s.lambda_b}")

###############################################################################
# A cyclic Jacobi solver and LAPACK both reproduce the multiset.

M = build_chi_matrix(inst)
expected = np.sort(system.chi_multiset())
for method in ("jacobi", "lapack"):
    numeric = np.sort([lam for lam, _ in numeric_eigendecomposition(M, method=method)])
    print(method, "max difference:", np.max(np.abs(numeric - expected)))

###############################################################################
# Integer eigenvectors of B: for a pairing x = (x1, x2, ..., x_{2i}) the entry
# for subset S is the signed count of ways S picks one element of every pair.

B = build_b_matrix(inst).entries.astype(np.int64)
v = lovasz_eigenvector(inst, 2, (0, 1, 2, 3))
print("v =", v)
print("B v == 2 v:", np.array_equal(B @ v, 2 * v))

###############################################################################
# Orthonormalizing those vectors within each eigenspace gives a basis that
# diagonalizes the matrix.

V = orthonormal_eigenbasis(inst).basis
D = V.T @ M.entries @ V
print("off-diagonal size:", np.max(np.abs(D - np.diag(np.diag(D)))))
print("diagonal:", np.round(np.diag(D), 12))
