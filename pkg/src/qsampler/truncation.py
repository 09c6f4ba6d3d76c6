"""Low-rank truncation of the disjointness state.

The normalized state ``M_chi / sqrt(D)`` has spectral mass
``chi_mass_i = dim E_i * lambda_chi_i**2 / D`` in eigenspace ``E_i``.
Keeping ``E_0, ..., E_g`` leaves a Frobenius error equal to the tail
``sum_{i>g} chi_mass_i``; the retained rank is ``t = C(n, g)``.
"""
from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from math import lcm, log, sqrt

import numpy as np

from .combinatorics import ProblemInstance, disjointness_mask
from .spectral import EigenSystem, StateMatrix, closed_form_spectrum, idempotent_numerators

__all__ = [
    "ProjectionMass",
    "DecayRatio",
    "TruncationPlan",
    "FidelityReport",
    "projection_masses",
    "decay_ratios",
    "plan_truncation",
    "plan_for_cutoff",
    "truncate_state",
    "projected_chi_exact",
    "projection_residual_exact",
    "trace_norm_distance_sq",
    "verify_fidelity_identity",
    "ceil_log2",
    "as_fraction",
]


def ceil_log2(t: int) -> int:
    """Exact ``ceil(log2 t)`` for a positive integer."""
    if t < 1:
        raise ValueError(f"need t >= 1, got {t}")
    return (t - 1).bit_length()


def as_fraction(x) -> Fraction:
    """Exact rational for ``x``; floats are read through their shortest repr, so 0.08 is 2/25."""
    if isinstance(x, Fraction):
        return x
    if isinstance(x, float):
        return Fraction(repr(x))
    return Fraction(x)


@dataclass(frozen=True)
class ProjectionMass:
    i: int
    q: Fraction
    chi_mass: Fraction


def projection_masses(inst: ProblemInstance) -> list[ProjectionMass]:
    """Exact per-eigenspace masses of a normalized row of ``B`` and of the normalized state.

    ``q_i = dim E_i * (lambda_b_i)**2`` equals the squared length of the
    projection of a unit-normalized row of ``B`` onto ``E_i``;
    ``chi_mass_i = dim E_i * lambda_chi_i**2 / D``.  Both series sum to 1.
    """
    if inst.degenerate:
        raise ValueError(f"no disjoint pairs for n={inst.n}, k={inst.k}")
    system = closed_form_spectrum(inst)
    return [
        ProjectionMass(s.i, s.dim * s.lambda_b ** 2, s.dim * s.lambda_chi ** 2 / inst.D)
        for s in system.spaces
    ]


@dataclass(frozen=True)
class DecayRatio:
    i: int
    ratio: Fraction | None
    bound: Fraction

    @property
    def holds(self) -> bool | None:
        return None if self.ratio is None else self.ratio <= self.bound

    @property
    def asserted(self) -> bool:
        """Whether the bound is claimed for this step (``i >= 1``)."""
        return self.i >= 1


def decay_ratios(inst: ProblemInstance) -> list[DecayRatio]:
    """``q_{i+1} / q_i`` against ``(2n / (i+1)) * (2k / n)**2`` for ``0 <= i < k``.

    The bound is only claimed for ``i >= 1`` (see :attr:`DecayRatio.asserted`):
    ``q_0`` uses the signed ``lambda_b_0``, which carries the all-ones
    correction and does not follow the ``C(n-k-i, k-i)`` pattern the bound
    is derived from, and the ``i = 0`` step does exceed it on e.g. (6, 2).
    A ratio with ``q_i = 0`` is reported as ``None``.
    """
    qs = [m.q for m in projection_masses(inst)]
    n, k = inst.n, inst.k
    out = []
    for i in range(k):
        bound = Fraction(2 * n, i + 1) * Fraction(2 * k, n) ** 2
        ratio = None if qs[i] == 0 else qs[i + 1] / qs[i]
        out.append(DecayRatio(i, ratio, bound))
    return out


@dataclass(frozen=True)
class TruncationPlan:
    """Keep eigenspaces ``E_0..E_g`` (rank ``t``) for target error ``epsilon``."""

    inst: ProblemInstance
    epsilon: Fraction | None
    g: int
    t: int
    tail_q: Fraction
    tail_chi: Fraction
    predicted_fidelity: float
    paper_g_bound: int
    qubits_per_party: int
    asymptotic_g: float | None

    def as_dict(self) -> dict:
        return {
            "n": self.inst.n,
            "k": self.inst.k,
            "epsilon": self.epsilon,
            "g": self.g,
            "t": self.t,
            "tail_q": self.tail_q,
            "tail_chi": self.tail_chi,
            "fidelity": self.predicted_fidelity,
            "qubits_per_party": self.qubits_per_party,
            "paper_g_bound": self.paper_g_bound,
            "asymptotic_g": self.asymptotic_g,
        }


def _asymptotic_g(eps: Fraction) -> float | None:
    # log(1/eps) / log log(1/eps); undefined unless log(1/eps) > 1
    L = log(1 / float(eps))
    return L / log(L) if L > 1 else None


def plan_for_cutoff(inst: ProblemInstance, g: int, epsilon=None) -> TruncationPlan:
    """Plan that keeps ``E_0..E_g`` regardless of any error target."""
    if not 0 <= g <= inst.k:
        raise ValueError(f"g must lie in [0, {inst.k}], got {g}")
    eps = None if epsilon is None else as_fraction(epsilon)
    masses = projection_masses(inst)
    tail_chi = sum((m.chi_mass for m in masses[g + 1:]), Fraction(0))
    tail_q = sum((m.q for m in masses[g + 1:]), Fraction(0))
    t = sum(closed_form_spectrum(inst).dims[: g + 1])
    return TruncationPlan(
        inst=inst,
        epsilon=eps,
        g=g,
        t=t,
        tail_q=tail_q,
        tail_chi=tail_chi,
        predicted_fidelity=sqrt(1 - tail_chi),
        paper_g_bound=inst.n ** (g + 1),
        qubits_per_party=ceil_log2(t),
        asymptotic_g=None if eps is None else _asymptotic_g(eps),
    )


def plan_truncation(inst: ProblemInstance, epsilon) -> TruncationPlan:
    """Smallest ``g`` whose state tail ``sum_{i>g} chi_mass_i`` is below ``2 * epsilon``.

    Uses the exact closed-form masses, so no matrices are built and large
    instances are cheap.
    """
    eps = as_fraction(epsilon)
    if not 0 < eps < 1:
        raise ValueError(f"epsilon must lie in (0, 1), got {epsilon}")
    masses = projection_masses(inst)
    g = inst.k
    for cand in range(inst.k + 1):
        if sum((m.chi_mass for m in masses[cand + 1:]), Fraction(0)) < 2 * eps:
            g = cand
            break
    return plan_for_cutoff(inst, g, eps)


def truncate_state(
    m_chi: StateMatrix,
    plan: TruncationPlan,
    system: EigenSystem,
    renormalize: bool = True,
) -> StateMatrix:
    """Project the state onto ``span(E_0..E_g)`` on both sides and rotate back.

    Returns ``V diag(keep) V^T M V diag(keep) V^T`` in the computational
    basis, rescaled to unit mass when ``renormalize`` is set.
    """
    if system.basis is None:
        raise ValueError("eigensystem has no basis")
    if system.inst != plan.inst or m_chi.inst != plan.inst:
        raise ValueError("state, plan and basis refer to different instances")
    if sum(system.dims[: plan.g + 1]) != plan.t:
        raise ValueError("basis grouping does not match the plan's retained rank")
    V = system.basis
    lam = V.T @ m_chi.entries @ V
    keep = np.zeros(m_chi.inst.N, dtype=bool)
    keep[: plan.t] = True
    lam[~keep, :] = 0.0
    lam[:, ~keep] = 0.0
    out = StateMatrix(m_chi.inst, V @ lam @ V.T)
    return out.normalize() if renormalize else out


def _projected_chi_integer(inst: ProblemInstance, g: int) -> tuple[np.ndarray, int]:
    # M_chi P_g = MQ / L with Q = sum_{i<=g} (L / den_i) num_i, L = lcm of the den_i
    if not 0 <= g <= inst.k:
        raise ValueError(f"g must lie in [0, {inst.k}], got {g}")
    parts = idempotent_numerators(inst)[: g + 1]
    L = lcm(*(abs(d) for _, d in parts))
    Q = sum(num.astype(object) * (L // d) for num, d in parts)
    M = disjointness_mask(inst).astype(np.int64).astype(object)
    return M.dot(Q), L


def projected_chi_exact(inst: ProblemInstance, g: int) -> np.ndarray:
    """Exact rational ``M_chi P_g`` for the unnormalized 0/1 matrix.

    ``P_g`` is the sum of the rational idempotents of ``E_0..E_g``; since
    ``M_chi`` commutes with every idempotent, ``P_g M P_g = M P_g``.
    """
    num, L = _projected_chi_integer(inst, g)
    flat = [Fraction(int(v), L) for v in num.ravel()]
    return np.array(flat, dtype=object).reshape(num.shape)


def projection_residual_exact(inst: ProblemInstance, g: int) -> Fraction:
    """``|| P_g chi P_g - chi ||^2`` for the normalized state, in exact arithmetic."""
    num, L = _projected_chi_integer(inst, g)
    M = disjointness_mask(inst).astype(np.int64).astype(object)
    diff = num - L * M
    return Fraction(int((diff * diff).sum()), L * L * inst.D)


def _entries(A) -> np.ndarray:
    return A.entries if isinstance(A, StateMatrix) else np.asarray(A)


def trace_norm_distance_sq(A, B):
    """``trace((A-B)^H (A-B))``, the squared Frobenius distance."""
    a, b = _entries(A), _entries(B)
    if a.shape != b.shape:
        raise ValueError(f"shape mismatch: {a.shape} vs {b.shape}")
    d = a - b
    if d.dtype == object:
        return sum((v * v for v in d.ravel()), Fraction(0))
    return float(np.sum(np.abs(d) ** 2))


@dataclass(frozen=True)
class FidelityReport:
    dist_sq: float
    fidelity: float
    identity_residual: float

    def implication_holds(self, epsilon) -> bool:
        """``dist_sq < 2 eps  =>  fidelity > 1 - eps``."""
        eps = float(epsilon)
        return self.dist_sq >= 2 * eps or self.fidelity > 1 - eps


def verify_fidelity_identity(psi: StateMatrix, chi: StateMatrix, tol: float = 1e-12) -> FidelityReport:
    """Check ``||psi - chi||^2 = 2 - 2 <chi|psi>`` for two unit states.

    The overlap is the real part of the entrywise inner product. Raises
    ``ArithmeticError`` when the residual exceeds ``tol``.
    """
    for name, s in (("psi", psi), ("chi", chi)):
        if not s.normalized:
            raise ValueError(f"{name} must be a normalized state")
    fidelity = float(np.real(np.vdot(chi.entries, psi.entries)))
    dist_sq = trace_norm_distance_sq(psi, chi)
    residual = abs(dist_sq - (2.0 - 2.0 * fidelity))
    if residual > tol:
        raise ArithmeticError(f"fidelity identity residual {residual:.3e} exceeds {tol:.0e}")
    return FidelityReport(dist_sq, fidelity, residual)
