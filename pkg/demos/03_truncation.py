"""
Low-rank truncation and fidelity
================================

Most of the state's mass sits in the first few eigenspaces.  Keeping
E_0..E_g gives a state of Schmidt rank t = C(n, g) that is close in fidelity.
"""

from qsampler import ProblemInstance
from qsampler.spectral import build_chi_matrix, orthonormal_eigenbasis
from qsampler.truncation import (
    decay_ratios,
    plan_for_cutoff,
    plan_truncation,
    projection_masses,
    projection_residual_exact,
    truncate_state,
    verify_fidelity_identity,
)

inst = ProblemInstance(6, 2)

###############################################################################
# Exact mass per eigenspace.  q_i is the mass of one normalized row of B;
# chi_mass_i is the mass of the normalized state itself.

for m in projection_masses(inst):
    print(f"i={m.i}  q={m.q}  chi_mass={m.chi_mass}")

###############################################################################
# Pick the smallest cutoff with tail mass below 2*eps.

plan = plan_truncation(inst, 0.08)
print(plan.as_dict())

###############################################################################
# Truncate and compare.  The squared distance between unit states always
# equals 2 - 2F.

system = orthonormal_eigenbasis(inst)
chi = build_chi_matrix(inst, normalized=True)
for g in range(inst.k + 1):
    psi = truncate_state(chi, plan_for_cutoff(inst, g), system)
    rep = verify_fidelity_identity(psi, chi)
    print(f"g={g}  F={rep.fidelity:.6f}  d^2={rep.dist_sq:.6f}  residual={rep.identity_residual:.1e}")

###############################################################################
# Without renormalization the squared projection error is exactly the tail
# mass.  This is checked here in rational arithmetic.

for g in range(inst.k + 1):
    print(f"g={g}  exact error = {projection_residual_exact(inst, g)}")

###############################################################################
# Successive masses shrink quickly on larger instances.

for r in decay_ratios(ProblemInstance(16, 4)):
    print(f"q_{r.i + 1}/q_{r.i} = {float(r.ratio):.4f}  (bound {float(r.bound):.4f})")
