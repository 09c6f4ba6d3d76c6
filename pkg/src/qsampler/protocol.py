"""Measurement simulation for a shared bipartite state.

Each party applies a local unitary and measures in the computational basis.
In the matrix picture a state ``sum_ij m_ij |i>|j>`` maps under
``U_A (x) U_B`` to ``U_A M U_B^T``, and the pair ``(i, j)`` is observed with
probability ``|m_ij|^2``.
"""
from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

import numpy as np
from scipy import stats

from .combinatorics import ProblemInstance, SubsetIndex, disjointness_mask
from .spectral import StateMatrix
from .truncation import TruncationPlan, projected_chi_exact

__all__ = [
    "MAX_PAIRS",
    "LocalOperation",
    "OutcomeDistribution",
    "ResourceLedger",
    "apply_local_ops",
    "kron_action",
    "vectorize",
    "state_overlap",
    "induced_distribution",
    "exact_chi_distribution",
    "exact_truncated_distribution",
    "make_generator",
    "spawn_seeds",
    "sample",
    "to_subset_pairs",
    "empirical_distribution",
    "chi_square_test",
    "tvd",
    "disjointness_violation_mass",
    "resource_report",
]

# dense distributions are stored over all N^2 ordered pairs
MAX_PAIRS = 2 ** 22


@dataclass(frozen=True, eq=False)
class LocalOperation:
    """A unitary applied by one party (``"A"`` or ``"B"``) to its register."""

    matrix: np.ndarray
    party: str = "A"

    def __post_init__(self):
        U = np.asarray(self.matrix)
        if U.ndim != 2 or U.shape[0] != U.shape[1]:
            raise ValueError(f"local operation must be square, got shape {U.shape}")
        if self.party not in ("A", "B"):
            raise ValueError(f"party must be 'A' or 'B', got {self.party!r}")
        err = np.max(np.abs(U @ U.conj().T - np.eye(U.shape[0])))
        if err > 1e-10:
            raise ValueError(f"operation is not unitary (max |UU^H - I| = {err:.2e})")
        object.__setattr__(self, "matrix", U)

    @property
    def dim(self) -> int:
        return self.matrix.shape[0]


def _as_op(U, party: str) -> LocalOperation:
    return U if isinstance(U, LocalOperation) else LocalOperation(np.asarray(U), party)


def vectorize(M: np.ndarray) -> np.ndarray:
    """Row-major flattening: amplitude of ``|i>|j>`` sits at ``i * dim_B + j``."""
    return np.asarray(M).reshape(-1)


def kron_action(U_A: np.ndarray, U_B: np.ndarray, M: np.ndarray) -> np.ndarray:
    """``(U_A (x) U_B) vec(M)`` reshaped back to a matrix; the reference route."""
    M = np.asarray(M)
    return (np.kron(U_A, U_B) @ vectorize(M)).reshape(M.shape)


def apply_local_ops(U_A, U_B, M: StateMatrix) -> StateMatrix:
    """Matrix form of ``(U_A (x) U_B)|psi>``: ``U_A M U_B^T``.

    The transpose is deliberately not conjugated.  For real orthogonal
    operators it equals ``U_A M U_B^H``; for complex ``U_B`` only the plain
    transpose agrees with the Kronecker action on the vectorized state.
    """
    a, b = _as_op(U_A, "A"), _as_op(U_B, "B")
    N = M.entries.shape[0]
    if a.dim != N or b.dim != M.entries.shape[1]:
        raise ValueError(f"operator dimensions ({a.dim}, {b.dim}) do not match state {M.entries.shape}")
    out = a.matrix @ M.entries @ b.matrix.T
    if not np.iscomplexobj(out):
        out = out.astype(float)
    return StateMatrix(M.inst, out, normalized=M.normalized)


def state_overlap(target: StateMatrix, state: StateMatrix) -> complex:
    """``<target|state>`` as the conjugated entrywise inner product."""
    return complex(np.vdot(target.entries, state.entries))


@dataclass(frozen=True, eq=False)
class OutcomeDistribution:
    """Probabilities over ordered pairs ``(rank_S, rank_T)``.

    ``probs`` is an ``(N, N)`` array of floats, or of :class:`Fraction`
    objects for exact distributions.
    """

    inst: ProblemInstance
    probs: np.ndarray

    def __post_init__(self):
        N = self.inst.N
        if self.probs.shape != (N, N):
            raise ValueError(f"probability table must be {N}x{N}, got {self.probs.shape}")
        if self.exact:
            if any(p < 0 for p in self.probs.ravel()) or sum(self.probs.ravel()) != 1:
                raise ValueError("exact probabilities must be nonnegative and sum to 1")
        else:
            if np.any(self.probs < 0) or abs(float(self.probs.sum()) - 1.0) > 1e-12:
                raise ValueError("probabilities must be nonnegative and sum to 1 within 1e-12")

    @property
    def exact(self) -> bool:
        return self.probs.dtype == object

    @property
    def support_size(self) -> int:
        return int(sum(1 for p in self.probs.ravel() if p != 0))

    def as_float(self) -> np.ndarray:
        return self.probs.astype(float) if self.exact else self.probs

    def pairs(self) -> list[tuple[int, int, object]]:
        """Nonzero entries as ``(rank_i, rank_j, prob)`` in index order."""
        nonzero = np.array([p != 0 for p in self.probs.ravel()]).reshape(self.probs.shape)
        rows, cols = np.nonzero(nonzero)
        return [(int(i), int(j), self.probs[i, j]) for i, j in zip(rows, cols)]


def _check_pairs(inst: ProblemInstance) -> None:
    if inst.N * inst.N > MAX_PAIRS:
        raise MemoryError(f"N^2 = {inst.N ** 2} exceeds the dense distribution guard {MAX_PAIRS}")


def induced_distribution(M: StateMatrix) -> OutcomeDistribution:
    """``p(i, j) = |m_ij|^2 / sum |m|^2`` (renormalized to absorb drift)."""
    _check_pairs(M.inst)
    weights = np.abs(M.entries) ** 2
    total = weights.sum()
    if total == 0:
        raise ValueError("zero state induces no distribution")
    return OutcomeDistribution(M.inst, weights / total)


def exact_chi_distribution(inst: ProblemInstance) -> OutcomeDistribution:
    """Uniform ``1/D`` on disjoint pairs, as exact rationals."""
    _check_pairs(inst)
    if inst.D == 0:
        raise ValueError("zero state induces no distribution")
    mask = disjointness_mask(inst)
    probs = np.where(mask, Fraction(1, inst.D), Fraction(0)).astype(object)
    return OutcomeDistribution(inst, probs)


def exact_truncated_distribution(inst: ProblemInstance, g: int) -> OutcomeDistribution:
    """Exact outcome distribution of the state truncated to ``E_0..E_g``.

    The projected matrix has rational entries, so the induced
    probabilities do as well.
    """
    _check_pairs(inst)
    proj = projected_chi_exact(inst, g)
    weights = proj * proj
    total = sum(weights.ravel(), Fraction(0))
    return OutcomeDistribution(inst, weights / total)


def make_generator(seed: int) -> np.random.Generator:
    """PCG64 generator for a 64-bit seed; every sampler owns its own."""
    if not 0 <= int(seed) < 2 ** 64:
        raise ValueError(f"seed must be a 64-bit unsigned integer, got {seed}")
    return np.random.Generator(np.random.PCG64(int(seed)))


def spawn_seeds(seed: int, count: int) -> list[np.random.SeedSequence]:
    """Independent child seed sequences for concurrent samplers."""
    return np.random.SeedSequence(int(seed)).spawn(count)


def sample(dist: OutcomeDistribution, seed, count: int) -> np.ndarray:
    """Draw ``count`` pairs by inverse-CDF over the table in row-major index order.

    Returns an ``(count, 2)`` int array of ``(rank_S, rank_T)``; see
    :func:`to_subset_pairs` for :class:`SubsetIndex` objects.  ``seed`` is a
    64-bit integer or a spawned :class:`numpy.random.SeedSequence`.
    """
    if count < 0:
        raise ValueError("count must be nonnegative")
    if isinstance(seed, np.random.SeedSequence):
        rng = np.random.Generator(np.random.PCG64(seed))
    else:
        rng = make_generator(seed)
    cdf = np.cumsum(dist.as_float().ravel())
    cdf /= cdf[-1]
    u = rng.random(count)
    flat = np.minimum(np.searchsorted(cdf, u, side="right"), cdf.size - 1)
    N = dist.inst.N
    return np.stack([flat // N, flat % N], axis=1)


def to_subset_pairs(inst: ProblemInstance, draws: np.ndarray) -> list[tuple[SubsetIndex, SubsetIndex]]:
    return [(SubsetIndex(int(i), inst.n, inst.k), SubsetIndex(int(j), inst.n, inst.k)) for i, j in draws]


def empirical_distribution(inst: ProblemInstance, draws: np.ndarray) -> OutcomeDistribution:
    N = inst.N
    counts = np.bincount(draws[:, 0] * N + draws[:, 1], minlength=N * N).reshape(N, N)
    return OutcomeDistribution(inst, counts / counts.sum())


def chi_square_test(dist: OutcomeDistribution, draws: np.ndarray) -> tuple[float, float]:
    """Pearson goodness of fit of ``draws`` against ``dist`` over its support.

    Any draw outside the support yields ``(inf, 0.0)``.
    """
    N = dist.inst.N
    counts = np.bincount(draws[:, 0] * N + draws[:, 1], minlength=N * N)
    p = dist.as_float().ravel()
    support = p > 0
    if counts[~support].any():
        return float("inf"), 0.0
    expected = p[support] * len(draws)
    res = stats.chisquare(counts[support], expected)
    return float(res.statistic), float(res.pvalue)


def tvd(p: OutcomeDistribution, q: OutcomeDistribution):
    """Total variation distance ``(1/2) sum |p - q|``.

    Exact when both tables hold rationals, float otherwise.
    """
    if p.inst != q.inst:
        raise ValueError("distributions live on different instances")
    if p.exact and q.exact:
        return sum((abs(a - b) for a, b in zip(p.probs.ravel(), q.probs.ravel())), Fraction(0)) / 2
    return 0.5 * float(np.abs(p.as_float() - q.as_float()).sum())


def disjointness_violation_mass(dist: OutcomeDistribution):
    """Probability assigned to intersecting pairs."""
    leak = dist.probs[~disjointness_mask(dist.inst)]
    if dist.exact:
        return sum(leak, Fraction(0))
    return float(leak.sum())


@dataclass(frozen=True)
class ResourceLedger:
    entangled_qubits: int
    classical_comm_bits: int = 0
    shared_random_bits: int = 0

    def __post_init__(self):
        if min(self.entangled_qubits, self.classical_comm_bits, self.shared_random_bits) < 0:
            raise ValueError("resource counts must be nonnegative")

    @property
    def total_classical(self) -> int:
        return self.classical_comm_bits + self.shared_random_bits


def resource_report(plan: TruncationPlan) -> ResourceLedger:
    """Entanglement used by the truncated protocol: ``ceil(log2 t)`` qubits per party."""
    return ResourceLedger(entangled_qubits=2 * plan.qubits_per_party)
