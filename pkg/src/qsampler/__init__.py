"""Sampling disjoint subset pairs from a low-rank entangled state.

Modules:

* :mod:`qsampler.combinatorics` -- colex ranking of k-subsets, exact counts
* :mod:`qsampler.spectral` -- disjointness matrices and their eigensystems
* :mod:`qsampler.truncation` -- eigenspace cutoffs, fidelity and distance
* :mod:`qsampler.protocol` -- local operations, outcome distributions, sampling
* :mod:`qsampler.baseline` -- classical sampler and resource comparison
"""
from .combinatorics import ProblemInstance, SubsetIndex, binomial, rank_subset, unrank_subset
from .spectral import (
    EigenSystem,
    StateMatrix,
    build_b_matrix,
    build_chi_matrix,
    closed_form_spectrum,
    numeric_eigendecomposition,
    orthonormal_eigenbasis,
)
from .truncation import TruncationPlan, plan_for_cutoff, plan_truncation, projection_masses, truncate_state
from .protocol import OutcomeDistribution, induced_distribution, sample, tvd

__version__ = "0.1.0"
