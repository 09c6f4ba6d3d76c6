"""Desk-scale self-checks over all modules.

Every check returns a :class:`CheckResult`; :func:`run_all` collects them.
Exact checks report a residual of 0 on success.
"""
from __future__ import annotations

from dataclasses import dataclass, replace
from fractions import Fraction
from math import comb

import numpy as np
from scipy.stats import ortho_group, unitary_group

from .baseline import naive_protocol_costs, naive_protocol_distribution
from .combinatorics import ProblemInstance, disjointness_mask
from .protocol import (
    apply_local_ops,
    chi_square_test,
    empirical_distribution,
    exact_chi_distribution,
    induced_distribution,
    kron_action,
    sample,
    tvd,
)
from .spectral import (
    EigenSystem,
    StateMatrix,
    build_chi_matrix,
    closed_form_spectrum,
    lovasz_eigenvector,
    lovasz_index_tuples,
    numeric_eigendecomposition,
    orthonormal_eigenbasis,
)
from .truncation import (
    decay_ratios,
    plan_for_cutoff,
    projection_masses,
    projection_residual_exact,
    truncate_state,
    verify_fidelity_identity,
)

__all__ = [
    "CheckResult",
    "flip_sign",
    "check_spectrum_oracle",
    "check_rational_identities",
    "check_projection_chain",
    "check_lovasz_relation",
    "check_local_ops",
    "check_fidelity_identity",
    "check_decay_bound",
    "check_sampling",
    "check_baseline",
    "default_instances",
    "run_all",
]


@dataclass(frozen=True)
class CheckResult:
    name: str
    passed: bool
    residual: float | Fraction
    detail: str = ""

    def as_dict(self) -> dict:
        return {"name": self.name, "passed": self.passed, "residual": self.residual, "detail": self.detail}


def flip_sign(system: EigenSystem, i: int) -> EigenSystem:
    """Copy of ``system`` with eigenspace ``i``'s eigenvalues negated (mutation testing)."""
    spaces = list(system.spaces)
    s = spaces[i]
    spaces[i] = replace(s, lambda_chi=-s.lambda_chi, lambda_b=None if s.lambda_b is None else -s.lambda_b)
    return replace(system, spaces=tuple(spaces))


def _label(inst: ProblemInstance) -> str:
    return f"n={inst.n},k={inst.k}"


def check_spectrum_oracle(inst: ProblemInstance, system: EigenSystem | None = None,
                          tol: float = 1e-9, method: str = "jacobi") -> CheckResult:
    """Closed-form eigenvalue multiset of ``M_chi`` versus a numeric eigensolver."""
    system = closed_form_spectrum(inst) if system is None else system
    M = build_chi_matrix(inst)
    pairs = numeric_eigendecomposition(M, method=method)
    numeric = np.array([lam for lam, _ in pairs])
    expected = np.array(system.chi_multiset())
    dims_ok = all(
        s.dim == (1 if s.i == 0 else comb(inst.n, s.i) - comb(inst.n, s.i - 1)) for s in system.spaces
    ) and sum(system.dims) == inst.N
    residual = float(np.max(np.abs(numeric - expected))) if len(numeric) == len(expected) else float("inf")
    pair_res = max(float(np.linalg.norm(M.entries @ v - lam * v)) for lam, v in pairs)
    scale = max(float(np.linalg.norm(M.entries, 2)), 1.0)
    passed = dims_ok and residual <= tol and pair_res <= 1e-9 * scale
    return CheckResult(f"spectrum_oracle[{_label(inst)}]", passed, residual,
                       f"max eigenpair residual {pair_res:.3e}")


def check_rational_identities(inst: ProblemInstance) -> CheckResult:
    """Dimension count, unit mass of B/N, zero trace and Frobenius mass of M_chi."""
    system = closed_form_spectrum(inst)
    failures = []
    if sum(system.dims) != inst.N:
        failures.append("sum of dimensions")
    if sum(s.dim * s.lambda_b ** 2 for s in system.spaces) != 1:
        failures.append("B mass")
    if sum(s.dim * s.lambda_chi for s in system.spaces) != 0:
        failures.append("trace")
    if sum(s.dim * s.lambda_chi ** 2 for s in system.spaces) != inst.D:
        failures.append("Frobenius mass")
    masses = projection_masses(inst)
    if sum(m.q for m in masses) != 1 or sum(m.chi_mass for m in masses) != 1:
        failures.append("mass series")
    return CheckResult(f"rational_identities[{_label(inst)}]", not failures, Fraction(len(failures)),
                       ", ".join(failures))


def check_projection_chain(inst: ProblemInstance) -> CheckResult:
    """Exact: projection error at cutoff g equals the tail of the state's masses, all g."""
    masses = projection_masses(inst)
    worst = Fraction(0)
    for g in range(inst.k + 1):
        tail = sum((m.chi_mass for m in masses[g + 1:]), Fraction(0))
        worst = max(worst, abs(projection_residual_exact(inst, g) - tail))
    return CheckResult(f"projection_chain[{_label(inst)}]", worst == 0, worst)


def check_lovasz_relation(inst: ProblemInstance) -> CheckResult:
    """Every generated Lovasz vector satisfies ``B v = lambda v`` in integer arithmetic."""
    system = closed_form_spectrum(inst)
    B = np.where(disjointness_mask(inst), 1, -1).astype(np.int64)
    count, bad = 0, 0
    for s in system.spaces:
        lam = system.b_unnormalized(s.i)
        assert lam.denominator == 1
        for x in lovasz_index_tuples(inst.n, s.i):
            v = lovasz_eigenvector(inst, s.i, x)
            count += 1
            if not np.array_equal(B @ v, int(lam) * v):
                bad += 1
    return CheckResult(f"lovasz_relation[{_label(inst)}]", bad == 0, Fraction(bad), f"{count} vectors")


def check_local_ops(dims=range(2, 21), trials: int = 100, seed: int = 0, tol: float = 1e-12) -> CheckResult:
    """``U_A M U_B^T`` against the Kronecker action on random orthogonal and unitary pairs."""
    rng = np.random.default_rng(seed)
    worst = 0.0
    for d in dims:
        inst = _instance_with_n_subsets(d)
        for _ in range(trials):
            U = ortho_group.rvs(d, random_state=rng)
            V = ortho_group.rvs(d, random_state=rng)
            M = rng.normal(size=(d, d))
            out = apply_local_ops(U, V, StateMatrix(inst, M)).entries
            worst = max(worst, float(np.max(np.abs(out - kron_action(U, V, M)))))
        for _ in range(max(trials // 10, 1)):
            U = unitary_group.rvs(d, random_state=rng)
            V = unitary_group.rvs(d, random_state=rng)
            M = rng.normal(size=(d, d)) + 1j * rng.normal(size=(d, d))
            out = apply_local_ops(U, V, StateMatrix(inst, M)).entries
            worst = max(worst, float(np.max(np.abs(out - kron_action(U, V, M)))))
    return CheckResult("local_ops_vectorization", worst <= tol, worst)


def _instance_with_n_subsets(d: int) -> ProblemInstance:
    # C(d, 1) = d, so a k=1 instance supplies a d x d index space for generic states
    return ProblemInstance(d, 1)


def check_fidelity_identity(inst: ProblemInstance, tol: float = 1e-12) -> CheckResult:
    """``d^2 = 2 - 2F`` for the renormalized truncation at every cutoff."""
    system = orthonormal_eigenbasis(inst)
    chi = build_chi_matrix(inst, normalized=True)
    worst = 0.0
    ok = True
    for g in range(inst.k + 1):
        plan = plan_for_cutoff(inst, g)
        psi = truncate_state(chi, plan, system, renormalize=True)
        try:
            rep = verify_fidelity_identity(psi, chi, tol=tol)
        except ArithmeticError:
            return CheckResult(f"fidelity_identity[{_label(inst)}]", False, float("inf"), f"g={g}")
        worst = max(worst, rep.identity_residual)
        ok &= abs(rep.fidelity - plan.predicted_fidelity) <= 1e-12
    return CheckResult(f"fidelity_identity[{_label(inst)}]", ok and worst <= tol, worst)


def check_decay_bound(inst: ProblemInstance) -> CheckResult:
    """Exact decay bound on every defined step ``i >= 1``; the ``i = 0`` outcome is only reported."""
    ratios = [r for r in decay_ratios(inst) if r.ratio is not None]
    failing = [r.i for r in ratios if r.asserted and not r.holds]
    zeroth = next((r.holds for r in ratios if r.i == 0), None)
    return CheckResult(f"decay_bound[{_label(inst)}]", not failing, Fraction(len(failing)),
                       f"checked i={[r.i for r in ratios if r.asserted]}; i=0 within bound: {zeroth}")


def check_sampling(inst: ProblemInstance, seed: int, samples: int, tvd_tol: float = 0.02,
                   alpha: float = 1e-3) -> CheckResult:
    dist = induced_distribution(build_chi_matrix(inst, normalized=True))
    draws = sample(dist, seed, samples)
    again = sample(dist, seed, samples)
    emp = tvd(dist, empirical_distribution(inst, draws))
    _, pvalue = chi_square_test(dist, draws)
    passed = emp < tvd_tol and pvalue > alpha and np.array_equal(draws, again)
    return CheckResult(f"sampling[{_label(inst)}]", passed, emp, f"chi-square p={pvalue:.4g}")


def check_baseline(inst: ProblemInstance) -> CheckResult:
    gap = tvd(naive_protocol_distribution(inst), exact_chi_distribution(inst))
    comm, shared = naive_protocol_costs(inst)
    bits_ok = comm == inst.k * (inst.n - 1).bit_length() and shared == (
        (inst.N - 1).bit_length() + (comb(inst.n - inst.k, inst.k) - 1).bit_length()
    )
    return CheckResult(f"baseline[{_label(inst)}]", gap == 0 and bits_ok, gap)


def default_instances(max_n: int = 10, max_k: int = 3, min_k: int = 2) -> list[ProblemInstance]:
    return [ProblemInstance(n, k) for k in range(min_k, max_k + 1) for n in range(2 * k, max_n + 1)]


def run_all(max_n: int = 10, max_k: int = 3, seed: int = 0, samples: int = 100_000,
            inject_sign_flip: bool = False) -> list[CheckResult]:
    """All checks on every instance with ``2 <= k <= max_k`` and ``2k <= n <= max_n``."""
    results = []
    instances = default_instances(max_n, max_k)
    for inst in instances:
        system = closed_form_spectrum(inst)
        if inject_sign_flip:
            system = flip_sign(system, 1)
        results.append(check_spectrum_oracle(inst, system))
        results.append(check_rational_identities(inst))
        results.append(check_decay_bound(inst))
        results.append(check_baseline(inst))
        results.append(check_projection_chain(inst))
        if inst.N <= 56:
            results.append(check_fidelity_identity(inst))
        if inst.n <= 8:
            results.append(check_lovasz_relation(inst))
    results.append(check_local_ops(seed=seed))
    results.append(check_sampling(ProblemInstance(6, 2), seed, samples))
    return results
