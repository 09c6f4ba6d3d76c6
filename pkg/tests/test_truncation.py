from fractions import Fraction
from math import sqrt

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from qsampler.combinatorics import ProblemInstance
from qsampler.spectral import build_chi_matrix, orthonormal_eigenbasis
from qsampler.truncation import (
    as_fraction,
    ceil_log2,
    decay_ratios,
    plan_for_cutoff,
    plan_truncation,
    projected_chi_exact,
    projection_masses,
    projection_residual_exact,
    trace_norm_distance_sq,
    truncate_state,
    verify_fidelity_identity,
)

instances = st.integers(1, 5).flatmap(lambda k: st.tuples(st.integers(2 * k, 2 * k + 12), st.just(k)))


def test_ceil_log2():
    assert [ceil_log2(t) for t in (1, 2, 3, 4, 5, 6, 8, 9)] == [0, 1, 2, 2, 3, 3, 3, 4]


def test_as_fraction_reads_decimals():
    assert as_fraction(0.08) == Fraction(2, 25)
    assert as_fraction("1/3") == Fraction(1, 3)
    assert as_fraction(Fraction(1, 7)) == Fraction(1, 7)


def test_masses_n6_k2():
    masses = projection_masses(ProblemInstance(6, 2))
    assert [m.q for m in masses] == [Fraction(1, 25), Fraction(4, 5), Fraction(4, 25)]
    assert [m.chi_mass for m in masses] == [Fraction(2, 5), Fraction(1, 2), Fraction(1, 10)]


def test_q_is_squared_row_projection(basis62):
    # q_i = squared mass of a unit-normalized row of B inside E_i
    inst = basis62.inst
    B = 2 * build_chi_matrix(inst).entries - 1
    row = B[0] / np.linalg.norm(B[0])
    for m in projection_masses(inst):
        V = basis62.columns(m.i)
        assert abs(np.sum((V.T @ row) ** 2) - float(m.q)) <= 1e-12


@given(instances)
@settings(max_examples=40, deadline=None)
def test_masses_sum_to_one(nk):
    masses = projection_masses(ProblemInstance(*nk))
    assert sum(m.q for m in masses) == 1
    assert sum(m.chi_mass for m in masses) == 1


@given(instances)
@settings(max_examples=40, deadline=None)
def test_tails_monotone_and_rank_bounded(nk):
    inst = ProblemInstance(*nk)
    plans = [plan_for_cutoff(inst, g) for g in range(inst.k + 1)]
    tails = [p.tail_chi for p in plans]
    assert all(a >= b for a, b in zip(tails, tails[1:]))
    assert tails[-1] == 0
    assert plans[-1].t == inst.N
    for p in plans:
        assert p.t <= inst.n ** (p.g + 1)
        assert 2 ** p.qubits_per_party >= p.t


def test_plan_worked_instance():
    inst = ProblemInstance(6, 2)
    plan = plan_truncation(inst, 0.08)
    assert (plan.g, plan.t, plan.qubits_per_party) == (1, 6, 3)
    assert abs(plan.predicted_fidelity - sqrt(0.9)) <= 1e-12
    assert plan.tail_chi == Fraction(1, 10)
    assert plan_truncation(inst, 0.6).g == 0
    # the tail must be strictly below 2*eps: 1/10 < 2/20 fails at the boundary
    assert plan_truncation(inst, "1/20").g == 2
    assert plan_truncation(inst, Fraction(1, 19)).g == 1
    assert plan_truncation(inst, "1/20").epsilon == Fraction(1, 20)


@pytest.mark.parametrize("eps", [0, 1, -0.1, 1.5])
def test_plan_rejects_epsilon(eps):
    with pytest.raises(ValueError):
        plan_truncation(ProblemInstance(6, 2), eps)


def test_plan_rejects_cutoff():
    with pytest.raises(ValueError):
        plan_for_cutoff(ProblemInstance(6, 2), 3)


def test_asymptotic_g_reported():
    assert plan_truncation(ProblemInstance(6, 2), 0.5).asymptotic_g is None
    val = plan_truncation(ProblemInstance(6, 2), 0.01).asymptotic_g
    L = np.log(100)
    assert val == pytest.approx(L / np.log(L))


def test_decay_bound_n6_k2():
    r0, r1 = decay_ratios(ProblemInstance(6, 2))
    assert r1.i == 1 and r1.ratio == Fraction(1, 5) and r1.bound == Fraction(8, 3) and r1.holds
    assert r1.asserted and not r0.asserted


def test_decay_bound_n9_k3():
    r = decay_ratios(ProblemInstance(9, 3))[1]
    assert r.bound == 4 and r.holds


def test_decay_bound_zeroth_step():
    # q_0 carries the all-ones correction; the bound is not claimed there and fails on some instances
    outcomes = {nk: decay_ratios(ProblemInstance(*nk))[0] for nk in [(6, 2), (9, 3), (12, 3), (16, 4)]}
    assert outcomes[(6, 2)].ratio == 20 and outcomes[(6, 2)].bound == Fraction(16, 3)
    assert [nk for nk, r in outcomes.items() if not r.holds] == [(6, 2), (12, 3)]


@pytest.mark.parametrize("n", [4, 9, 16, 25, 36, 49])
def test_decay_bound_sqrt_instances(n):
    # with k = ceil(sqrt n) every step, including the one out of E_0, is within the bound
    k = int(np.ceil(np.sqrt(n)))
    ratios = decay_ratios(ProblemInstance(n, k))
    assert len(ratios) == k and all(r.holds for r in ratios)


class TestTruncateState:
    def test_g0_is_uniform(self, inst62, basis62, chi62):
        psi = truncate_state(chi62, plan_for_cutoff(inst62, 0), basis62)
        np.testing.assert_allclose(psi.entries, 1 / 15, atol=1e-14)

    def test_gk_reproduces(self, inst62, basis62, chi62):
        psi = truncate_state(chi62, plan_for_cutoff(inst62, 2), basis62)
        np.testing.assert_allclose(psi.entries, chi62.entries, atol=1e-13)

    def test_unrenormalized_mass(self, inst62, basis62, chi62):
        psi = truncate_state(chi62, plan_for_cutoff(inst62, 1), basis62, renormalize=False)
        assert abs(psi.mass() - 0.9) <= 1e-12
        assert abs(trace_norm_distance_sq(psi, chi62) - 0.1) <= 1e-12

    def test_renormalized_distance(self, inst62, basis62, chi62):
        psi = truncate_state(chi62, plan_for_cutoff(inst62, 1), basis62)
        rep = verify_fidelity_identity(psi, chi62)
        assert abs(rep.fidelity - sqrt(0.9)) <= 1e-12
        assert abs(rep.dist_sq - (2 - 2 * sqrt(0.9))) <= 1e-12

    def test_mismatched_instance(self, basis62, chi62):
        with pytest.raises(ValueError):
            truncate_state(chi62, plan_for_cutoff(ProblemInstance(7, 2), 1), basis62)


class TestExactProjection:
    @pytest.mark.parametrize("n,k", [(4, 2), (6, 2), (7, 2), (6, 3)])
    def test_residual_chain(self, n, k):
        inst = ProblemInstance(n, k)
        masses = projection_masses(inst)
        for g in range(k + 1):
            tail = sum((m.chi_mass for m in masses[g + 1:]), Fraction(0))
            assert projection_residual_exact(inst, g) == tail

    def test_matches_float_projection(self, inst62, basis62):
        exact = projected_chi_exact(inst62, 1).astype(float)
        M = build_chi_matrix(inst62)
        approx = truncate_state(M, plan_for_cutoff(inst62, 1), basis62, renormalize=False).entries
        np.testing.assert_allclose(exact, approx, atol=1e-12)

    def test_g0_is_constant(self, inst62):
        assert (projected_chi_exact(inst62, 0) == Fraction(6, 15)).all()

    def test_exact_distance(self):
        a = np.array([Fraction(1, 2), Fraction(1, 3)], dtype=object)
        b = np.array([Fraction(0), Fraction(1, 3)], dtype=object)
        assert trace_norm_distance_sq(a, b) == Fraction(1, 4)


class TestFidelityIdentity:
    def test_requires_normalized(self, inst62):
        M = build_chi_matrix(inst62)
        with pytest.raises(ValueError):
            verify_fidelity_identity(M, M)

    @pytest.mark.parametrize("n,k", [(6, 2), (8, 3)])
    def test_every_cutoff(self, n, k):
        inst = ProblemInstance(n, k)
        sys = orthonormal_eigenbasis(inst)
        chi = build_chi_matrix(inst, normalized=True)
        for g in range(k + 1):
            plan = plan_for_cutoff(inst, g)
            rep = verify_fidelity_identity(truncate_state(chi, plan, sys), chi)
            assert rep.identity_residual <= 1e-12
            for eps in (0.01, 0.05, 0.1, 0.3, 0.6):
                assert rep.implication_holds(eps)

    def test_g0_fidelity(self, inst62, basis62, chi62):
        rep = verify_fidelity_identity(truncate_state(chi62, plan_for_cutoff(inst62, 0), basis62), chi62)
        assert abs(rep.fidelity - sqrt(0.4)) <= 1e-12
