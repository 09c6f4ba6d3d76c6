"""Classical side: an exact uniform disjoint-pair sampler and a naive protocol.

The naive protocol is a concrete *upper bound*: Alice draws ``S`` from shared
randomness and sends it to Bob, who picks ``T`` uniformly among the k-subsets
of the complement.  It is not a lower-bound argument.
"""
from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from math import comb

import numpy as np

from .combinatorics import ProblemInstance, SubsetIndex, rank_subset, subset_table, unrank_subset
from .protocol import OutcomeDistribution, make_generator, resource_report
from .truncation import ceil_log2, plan_truncation

__all__ = [
    "ClassicalProtocolTrace",
    "exact_disjoint_sampler",
    "sample_disjoint_pairs",
    "naive_protocol",
    "naive_protocol_costs",
    "naive_protocol_distribution",
    "encode_subset",
    "decode_subset",
    "gap_report",
    "GAP_COLUMNS",
]

GAP_COLUMNS = ("n", "k", "epsilon", "quantum_qubits", "classical_comm_bits", "classical_shared_bits")


def _require_pairs(inst: ProblemInstance) -> None:
    if inst.D == 0:
        raise ValueError(f"no disjoint pairs exist for n={inst.n}, k={inst.k}")


def _completion(S: tuple[int, ...], j: int, n: int, k: int) -> tuple[int, ...]:
    # j-th k-subset of the complement, relabelled back into {0..n-1}
    rest = [x for x in range(n) if x not in S]
    return tuple(rest[c] for c in unrank_subset(j, n - len(S), k))


def exact_disjoint_sampler(inst: ProblemInstance, seed) -> tuple[SubsetIndex, SubsetIndex]:
    """One uniformly random ordered disjoint pair.

    Draws ``r`` uniform in ``[0, D)`` and splits it into the rank of ``S``
    and the rank of ``T`` among the ``C(n-k, k)`` subsets of the
    complement of ``S``.
    """
    _require_pairs(inst)
    rng = make_generator(seed) if not isinstance(seed, np.random.Generator) else seed
    r = int(rng.integers(inst.D))
    m = comb(inst.n - inst.k, inst.k)
    rank_s, j = divmod(r, m)
    S = unrank_subset(rank_s, inst.n, inst.k)
    T = _completion(S, j, inst.n, inst.k)
    return SubsetIndex(rank_s, inst.n, inst.k), SubsetIndex.from_elements(T, inst.n)


def sample_disjoint_pairs(inst: ProblemInstance, seed: int, count: int) -> np.ndarray:
    """Vectorized form of :func:`exact_disjoint_sampler`; ``(count, 2)`` rank pairs."""
    _require_pairs(inst)
    n, k = inst.n, inst.k
    m = comb(n - k, k)
    rng = make_generator(seed)
    r = rng.integers(inst.D, size=count)
    rank_s, j = np.divmod(r, m)
    table = subset_table(inst)
    complements = np.array([[x for x in range(n) if x not in row] for row in table.tolist()])
    local = subset_table(ProblemInstance(n - k, k))
    T = np.take_along_axis(complements[rank_s], local[j], axis=1)
    # colex rank: sum_m C(t_m, m)
    binom = np.array([[comb(a, b) for b in range(k + 1)] for a in range(n)], dtype=np.int64)
    rank_t = sum(binom[T[:, c], c + 1] for c in range(k))
    return np.stack([rank_s, rank_t], axis=1)


def encode_subset(S: tuple[int, ...], n: int) -> str:
    """Fixed-width binary message: ``ceil(log2 n)`` bits per element."""
    width = ceil_log2(n)
    return "".join(format(x, f"0{width}b") for x in S) if width else ""


def decode_subset(bits: str, n: int, k: int) -> tuple[int, ...]:
    width = ceil_log2(n)
    if len(bits) != k * width:
        raise ValueError(f"expected {k * width} bits, got {len(bits)}")
    if width == 0:
        return tuple(range(k))
    return tuple(int(bits[c * width:(c + 1) * width], 2) for c in range(k))


@dataclass(frozen=True)
class ClassicalProtocolTrace:
    shared_bits_consumed: int
    comm_bits: int
    output: tuple[SubsetIndex, SubsetIndex]
    message: str = ""

    def __post_init__(self):
        S, T = self.output
        if set(S.elements) & set(T.elements):
            raise ValueError("classical protocol produced an intersecting pair")
        if self.shared_bits_consumed < 0 or self.comm_bits < 0:
            raise ValueError("bit counts must be nonnegative")


def naive_protocol_costs(inst: ProblemInstance) -> tuple[int, int]:
    """``(comm_bits, shared_bits)`` at the information-theoretic minimum.

    Rejection-sampling overhead for drawing uniformly from a
    non-power-of-two range is not counted.
    """
    comm = inst.k * ceil_log2(inst.n)
    shared = ceil_log2(inst.N) + ceil_log2(comb(inst.n - inst.k, inst.k))
    return comm, shared


def naive_protocol(inst: ProblemInstance, seed) -> ClassicalProtocolTrace:
    """Run the one-message protocol once.

    Alice reads the rank of ``S`` from shared randomness and sends ``S``
    element by element; Bob decodes it and reads the rank of ``T`` among
    the complement's k-subsets from a second block of shared randomness.
    """
    _require_pairs(inst)
    n, k = inst.n, inst.k
    rng = make_generator(seed)
    rank_s = int(rng.integers(inst.N))
    message = encode_subset(unrank_subset(rank_s, n, k), n)
    S = decode_subset(message, n, k)
    j = int(rng.integers(comb(n - k, k)))
    T = _completion(S, j, n, k)
    comm, shared = naive_protocol_costs(inst)
    assert len(message) == comm
    return ClassicalProtocolTrace(
        shared_bits_consumed=shared,
        comm_bits=comm,
        output=(SubsetIndex(rank_s, n, k), SubsetIndex.from_elements(T, n)),
        message=message,
    )


def naive_protocol_distribution(inst: ProblemInstance) -> OutcomeDistribution:
    """Exact output law of :func:`naive_protocol`, by enumerating its branches."""
    _require_pairs(inst)
    n, k, N = inst.n, inst.k, inst.N
    m = comb(n - k, k)
    probs = np.full((N, N), Fraction(0), dtype=object)
    for rank_s in range(N):
        S = decode_subset(encode_subset(unrank_subset(rank_s, n, k), n), n, k)
        for j in range(m):
            rank_t = rank_subset(_completion(S, j, n, k), n)
            probs[rank_s, rank_t] += Fraction(1, N * m)
    return OutcomeDistribution(inst, probs)


def gap_report(inst: ProblemInstance, epsilon) -> dict:
    """Quantum entanglement count next to the naive classical protocol's bits.

    The classical columns are an upper-bound protocol, not a lower bound.
    """
    plan = plan_truncation(inst, epsilon)
    comm, shared = naive_protocol_costs(inst)
    return {
        "n": inst.n,
        "k": inst.k,
        "epsilon": plan.epsilon,
        "quantum_qubits": resource_report(plan).entangled_qubits,
        "classical_comm_bits": comm,
        "classical_shared_bits": shared,
    }
