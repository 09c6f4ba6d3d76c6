from collections import Counter
from fractions import Fraction
from itertools import permutations

import numpy as np
import pytest
from hypothesis import given, strategies as st

from qsampler.baseline import (
    ClassicalProtocolTrace,
    decode_subset,
    encode_subset,
    exact_disjoint_sampler,
    gap_report,
    naive_protocol,
    naive_protocol_costs,
    naive_protocol_distribution,
    sample_disjoint_pairs,
)
from qsampler.combinatorics import ProblemInstance, SubsetIndex, subset_table
from qsampler.protocol import exact_chi_distribution, tvd


def _apart(S, T):
    return not set(map(int, S)) & set(map(int, T))


def test_single_draws_cover_n4():
    inst = ProblemInstance(4, 2)
    counts = Counter()
    for seed in range(3000):
        S, T = exact_disjoint_sampler(inst, seed)
        assert _apart(S.elements, T.elements)
        counts[(S.rank, T.rank)] += 1
    assert len(counts) == 6
    assert all(400 < c < 600 for c in counts.values())


def test_vectorized_matches_scalar_route():
    inst = ProblemInstance(7, 2)
    rng_draws = sample_disjoint_pairs(inst, 11, 2000)
    table = subset_table(inst)
    for i, j in rng_draws:
        assert _apart(table[i], table[j])
    r = np.random.Generator(np.random.PCG64(11)).integers(inst.D, size=1)[0]
    S, T = exact_disjoint_sampler(inst, 11)
    assert (S.rank, T.rank) == tuple(rng_draws[0])
    assert r // 10 == S.rank


def test_vectorized_all_disjoint_and_uniform():
    inst = ProblemInstance(6, 2)
    draws = sample_disjoint_pairs(inst, 0, 100_000)
    table = subset_table(inst)
    uniq, counts = np.unique(draws, axis=0, return_counts=True)
    assert len(uniq) == 90
    assert all(_apart(table[i], table[j]) for i, j in uniq)
    assert counts.min() > 900 and counts.max() < 1350


def test_degenerate_rejected():
    with pytest.raises(ValueError):
        exact_disjoint_sampler(ProblemInstance(3, 2), 0)
    with pytest.raises(ValueError):
        naive_protocol(ProblemInstance(3, 2), 0)


@pytest.mark.parametrize("n,k,comm,shared", [(6, 2, 6, 7), (16, 4, 16, 20), (9, 3, 12, 12), (4, 2, 4, 3)])
def test_costs(n, k, comm, shared):
    assert naive_protocol_costs(ProblemInstance(n, k)) == (comm, shared)


@given(st.integers(1, 40).flatmap(lambda n: st.tuples(st.just(n), st.integers(1, min(n, 5)))), st.data())
def test_encode_roundtrip(nk, data):
    n, k = nk
    S = tuple(sorted(data.draw(st.sets(st.integers(0, n - 1), min_size=k, max_size=k))))
    bits = encode_subset(S, n)
    assert len(bits) == k * (n - 1).bit_length()
    assert decode_subset(bits, n, k) == S


def test_decode_length():
    with pytest.raises(ValueError):
        decode_subset("101", 6, 2)


@pytest.mark.parametrize("n,k", [(4, 2), (6, 2), (7, 3), (8, 2)])
def test_protocol_distribution_exact(n, k):
    inst = ProblemInstance(n, k)
    assert tvd(naive_protocol_distribution(inst), exact_chi_distribution(inst)) == 0


def test_protocol_trace():
    inst = ProblemInstance(6, 2)
    trace = naive_protocol(inst, 3)
    assert trace.comm_bits == 6 and trace.shared_bits_consumed == 7
    assert decode_subset(trace.message, 6, 2) == trace.output[0].elements
    assert naive_protocol(inst, 3) == trace


def test_trace_rejects_intersection():
    S = SubsetIndex.from_elements((0, 1), 4)
    with pytest.raises(ValueError):
        ClassicalProtocolTrace(1, 1, (S, S))


def test_gap_rows():
    rows = [gap_report(ProblemInstance(n, k), 0.1) for n, k in [(9, 3), (16, 4), (25, 5)]]
    assert [(r["quantum_qubits"], r["classical_comm_bits"], r["classical_shared_bits"]) for r in rows] == [
        (12, 12, 12), (14, 16, 20), (18, 25, 30)]
    assert rows[0]["epsilon"] == Fraction(1, 10)
