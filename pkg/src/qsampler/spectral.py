"""Disjointness matrices over k-subsets and their eigensystems.

``M_chi`` has a 1 wherever the row and column subsets are disjoint, ``B`` is
its +/-1 variant ``2 M_chi - J``.  Both live in the Bose-Mesner algebra of the
Johnson scheme, so they share the k+1 eigenspaces ``E_0, ..., E_k`` with
``dim E_i = C(n, i) - C(n, i-1)``.

Three independent routes to the spectrum are provided:

* :func:`closed_form_spectrum` -- exact rational eigenvalues per eigenspace;
* :func:`numeric_eigendecomposition` -- cyclic Jacobi rotations on the
  dense matrix (or LAPACK, on request);
* :func:`exact_idempotents` -- the rational projectors onto each ``E_i``,
  built as Lagrange polynomials in the Johnson graph adjacency matrix.
"""
from __future__ import annotations

import os
from dataclasses import dataclass, replace
from fractions import Fraction
from math import comb, sqrt
from typing import Iterator, Sequence

import numpy as np

from .combinatorics import ProblemInstance, disjointness_mask, subset_table

__all__ = [
    "DEFAULT_GUARD_N",
    "StateMatrix",
    "Eigenspace",
    "EigenSystem",
    "guard_n",
    "build_chi_matrix",
    "build_b_matrix",
    "closed_form_spectrum",
    "lovasz_eigenvector",
    "lovasz_index_tuples",
    "orthonormal_eigenbasis",
    "numeric_eigendecomposition",
    "jacobi_eigh",
    "exact_idempotents",
    "idempotent_numerators",
    "eigenspace_dimension",
    "eigensystem_report",
]

DEFAULT_GUARD_N = 4096


def guard_n() -> int:
    """Largest N for which dense N x N matrices are materialized.

    Raised explicitly through the ``QSAMPLER_GUARD_N`` environment variable.
    """
    raw = os.environ.get("QSAMPLER_GUARD_N")
    if raw is None:
        return DEFAULT_GUARD_N
    value = int(raw)
    if value < 1:
        raise ValueError(f"QSAMPLER_GUARD_N must be positive, got {raw!r}")
    return value


def _check_guard(inst: ProblemInstance, limit: int | None = None) -> None:
    limit = guard_n() if limit is None else limit
    if inst.N > limit:
        raise MemoryError(
            f"C({inst.n},{inst.k}) = {inst.N} exceeds the dense-matrix guard N <= {limit}"
        )


@dataclass(frozen=True, eq=False)
class StateMatrix:
    """Matrix representation ``[m_ij]`` of a bipartite state over k-subset pairs."""

    inst: ProblemInstance
    entries: np.ndarray
    normalized: bool = False

    def __post_init__(self):
        N = self.inst.N
        if self.entries.shape != (N, N):
            raise ValueError(f"entries must be {N}x{N}, got {self.entries.shape}")
        if self.normalized and abs(self.mass() - 1.0) > 1e-12:
            raise ValueError(f"normalized flag set but squared mass is {self.mass()!r}")

    def mass(self) -> float:
        """Sum of squared entry magnitudes, i.e. the squared state norm."""
        return float(np.sum(np.abs(self.entries) ** 2))

    def normalize(self) -> "StateMatrix":
        mass = self.mass()
        if mass == 0.0:
            raise ValueError("cannot normalize the zero state")
        return StateMatrix(self.inst, self.entries / sqrt(mass), normalized=True)

    def is_symmetric(self, atol: float = 0.0) -> bool:
        return bool(np.allclose(self.entries, self.entries.T, rtol=0.0, atol=atol))


def build_chi_matrix(inst: ProblemInstance, normalized: bool = False) -> StateMatrix:
    """0/1 disjointness matrix, optionally scaled by ``1/sqrt(D)``."""
    _check_guard(inst)
    entries = disjointness_mask(inst).astype(float)
    if normalized:
        if inst.D == 0:
            raise ValueError(f"no disjoint pairs for n={inst.n}, k={inst.k}: zero state")
        entries /= sqrt(inst.D)
    return StateMatrix(inst, entries, normalized=normalized)


def build_b_matrix(inst: ProblemInstance) -> StateMatrix:
    """+1 on disjoint pairs, -1 elsewhere."""
    _check_guard(inst)
    entries = np.where(disjointness_mask(inst), 1.0, -1.0)
    return StateMatrix(inst, entries)


def eigenspace_dimension(n: int, i: int) -> int:
    return 1 if i == 0 else comb(n, i) - comb(n, i - 1)


@dataclass(frozen=True)
class Eigenspace:
    """One common eigenspace ``E_i`` of ``B`` and ``M_chi``.

    ``lambda_b`` is the eigenvalue of ``B / C(n, k)`` (signed) and
    ``lambda_chi`` the eigenvalue of the unnormalized 0/1 matrix.
    """

    i: int
    dim: int
    lambda_b: Fraction | None
    lambda_chi: Fraction


@dataclass(frozen=True, eq=False)
class EigenSystem:
    inst: ProblemInstance
    spaces: tuple[Eigenspace, ...]
    basis: np.ndarray | None = None
    degenerate: bool = False

    @property
    def dims(self) -> tuple[int, ...]:
        return tuple(s.dim for s in self.spaces)

    @property
    def offsets(self) -> tuple[int, ...]:
        """Column offsets of each eigenspace group inside ``basis``."""
        out, acc = [], 0
        for s in self.spaces:
            out.append(acc)
            acc += s.dim
        return tuple(out)

    def columns(self, i: int) -> np.ndarray:
        """Basis columns spanning ``E_i``."""
        if self.basis is None:
            raise ValueError("eigensystem carries no basis; use orthonormal_eigenbasis()")
        start = self.offsets[i]
        return self.basis[:, start:start + self.spaces[i].dim]

    def chi_multiset(self) -> list[float]:
        """Eigenvalues of the 0/1 matrix repeated by multiplicity, ascending."""
        vals = []
        for s in self.spaces:
            vals.extend([float(s.lambda_chi)] * s.dim)
        return sorted(vals)

    def b_unnormalized(self, i: int) -> Fraction:
        """Eigenvalue of the integer matrix ``B`` on ``E_i``."""
        lam = self.spaces[i].lambda_b
        if lam is None:
            raise ValueError("degenerate instance has no closed-form B spectrum")
        return lam * self.inst.N


def closed_form_spectrum(inst: ProblemInstance) -> EigenSystem:
    """Exact eigenvalues of ``B / C(n, k)`` and ``M_chi`` per eigenspace.

    For ``i >= 1`` the eigenvalues alternate in sign:
    ``lambda_chi_i = (-1)^i C(n-k-i, k-i)`` and
    ``lambda_b_i = 2 (-1)^i C(n-k-i, k-i) / C(n, k)``, while
    ``lambda_chi_0 = C(n-k, k)`` and
    ``lambda_b_0 = (2 C(n-k, k) - C(n, k)) / C(n, k)``.

    When ``2k > n`` the 0/1 matrix vanishes; a single zero eigenspace of
    dimension ``N`` is returned with ``degenerate=True``.
    """
    n, k, N = inst.n, inst.k, inst.N
    if inst.degenerate:
        return EigenSystem(inst, (Eigenspace(0, N, None, Fraction(0)),), degenerate=True)
    spaces = []
    for i in range(k + 1):
        if i == 0:
            chi = Fraction(comb(n - k, k))
            lam_b = Fraction(2 * comb(n - k, k) - N, N)
        else:
            chi = Fraction((-1) ** i * comb(n - k - i, k - i))
            lam_b = Fraction(2 * (-1) ** i * comb(n - k - i, k - i), N)
        spaces.append(Eigenspace(i, eigenspace_dimension(n, i), lam_b, chi))
    return EigenSystem(inst, tuple(spaces))


def lovasz_eigenvector(inst: ProblemInstance, i: int, x: Sequence[int]) -> np.ndarray:
    """Integer eigenvector of ``B`` in ``E_i`` indexed by ``x_1, ..., x_2i``.

    The entry for subset ``S`` is 0 unless ``S`` meets every pair
    ``{x_{2j-1}, x_{2j}}`` in exactly one element; otherwise it is
    ``prod_j (-1)^{[x_{2j} in S]}``.  ``i = 0`` gives the all-ones vector.
    """
    x = tuple(int(v) for v in x)
    if not 0 <= i <= inst.k:
        raise ValueError(f"eigenspace index must lie in [0, {inst.k}], got {i}")
    if len(x) != 2 * i:
        raise ValueError(f"E_{i} needs an index tuple of length {2 * i}, got {len(x)}")
    if len(set(x)) != len(x) or any(not 0 <= v < inst.n for v in x):
        raise ValueError(f"index tuple must hold distinct elements of [0, {inst.n}): {x}")
    table = subset_table(inst)
    vec = np.ones(inst.N, dtype=np.int64)
    for j in range(i):
        a, b = x[2 * j], x[2 * j + 1]
        has_a = (table == a).any(axis=1)
        has_b = (table == b).any(axis=1)
        vec *= np.where(has_a ^ has_b, np.where(has_b, -1, 1), 0)
    return vec


def lovasz_index_tuples(n: int, i: int) -> Iterator[tuple[int, ...]]:
    """Index tuples for ``E_i`` in lexicographic order, one per +/- class.

    Swapping the two entries of a pair only negates the vector and
    permuting pairs leaves it unchanged, so only tuples with
    ``x_{2j-1} < x_{2j}`` and increasing pair leaders are produced.
    """

    def extend(prefix: tuple[int, ...], used: frozenset[int], last_lead: int):
        if len(prefix) == 2 * i:
            yield prefix
            return
        for a in range(last_lead + 1, n):
            if a in used:
                continue
            for b in range(a + 1, n):
                if b in used:
                    continue
                yield from extend(prefix + (a, b), used | {a, b}, a)

    yield from extend((), frozenset(), -1)


def orthonormal_eigenbasis(inst: ProblemInstance, tol: float = 1e-8) -> EigenSystem:
    """Closed-form eigensystem plus an orthonormal basis built from Lovasz vectors.

    Columns are grouped ``E_0, E_1, ..., E_k``.  Within each group the
    generated vectors are Gram-Schmidt orthonormalized (with one
    re-orthogonalization pass) until the group reaches ``dim E_i``.
    """
    _check_guard(inst)
    system = closed_form_spectrum(inst)
    if system.degenerate:
        raise ValueError(f"no eigenspace structure for 2k > n (n={inst.n}, k={inst.k})")
    N = inst.N
    V = np.zeros((N, N))
    col = 0
    for space in system.spaces:
        start = col
        for x in lovasz_index_tuples(inst.n, space.i):
            if col - start == space.dim:
                break
            v = lovasz_eigenvector(inst, space.i, x).astype(float)
            norm0 = np.linalg.norm(v)
            if norm0 == 0.0:
                continue
            Q = V[:, start:col]
            for _ in range(2):
                v = v - Q @ (Q.T @ v)
            norm = np.linalg.norm(v)
            if norm > tol * norm0:
                V[:, col] = v / norm
                col += 1
        if col - start != space.dim:
            raise ArithmeticError(
                f"E_{space.i}: generated rank {col - start} < dimension {space.dim}"
            )
    return replace(system, basis=V)


def jacobi_eigh(A: np.ndarray, tol: float = 1e-14, max_sweeps: int = 60) -> tuple[np.ndarray, np.ndarray]:
    """Cyclic Jacobi eigensolver for a dense real symmetric matrix.

    Returns ``(w, V)`` with ``w`` ascending and ``A @ V = V @ diag(w)``.
    Stops once the off-diagonal Frobenius norm falls below
    ``tol * ||A||_F``.
    """
    A = np.array(A, dtype=float)
    if A.ndim != 2 or A.shape[0] != A.shape[1]:
        raise ValueError(f"expected a square matrix, got shape {A.shape}")
    if not np.array_equal(A, A.T):
        raise ValueError("Jacobi iteration needs a symmetric matrix")
    N = A.shape[0]
    V = np.eye(N)
    scale = np.linalg.norm(A)
    if scale == 0.0 or N == 1:
        return np.diag(A).copy(), V
    target = tol * scale
    for _ in range(max_sweeps):
        off = np.linalg.norm(A - np.diag(np.diag(A)))
        if off <= target:
            break
        for p in range(N - 1):
            for q in range(p + 1, N):
                apq = A[p, q]
                if abs(apq) <= 1e-300 or abs(apq) < 1e-3 * target / N:
                    continue
                tau = (A[q, q] - A[p, p]) / (2.0 * apq)
                t = (1.0 if tau >= 0 else -1.0) / (abs(tau) + sqrt(1.0 + tau * tau))
                c = 1.0 / sqrt(1.0 + t * t)
                s = t * c
                ap, aq = A[:, p].copy(), A[:, q].copy()
                A[:, p], A[:, q] = c * ap - s * aq, s * ap + c * aq
                ap, aq = A[p, :].copy(), A[q, :].copy()
                A[p, :], A[q, :] = c * ap - s * aq, s * ap + c * aq
                A[p, q] = A[q, p] = 0.0
                vp, vq = V[:, p].copy(), V[:, q].copy()
                V[:, p], V[:, q] = c * vp - s * vq, s * vp + c * vq
    else:
        raise ArithmeticError(f"Jacobi iteration did not converge in {max_sweeps} sweeps")
    w = np.diag(A).copy()
    order = np.argsort(w, kind="stable")
    return w[order], V[:, order]


def numeric_eigendecomposition(
    M: StateMatrix | np.ndarray, method: str = "jacobi"
) -> list[tuple[float, np.ndarray]]:
    """Eigenpairs of a symmetric matrix, ascending by eigenvalue.

    ``method`` is ``"jacobi"`` (in-house cyclic rotations, N <= 1024) or
    ``"lapack"`` (``numpy.linalg.eigh``).
    """
    A = M.entries if isinstance(M, StateMatrix) else np.asarray(M, dtype=float)
    if A.ndim != 2 or A.shape[0] != A.shape[1]:
        raise ValueError(f"expected a square matrix, got shape {A.shape}")
    if not np.allclose(A, A.T, rtol=0.0, atol=0.0):
        raise ValueError("matrix is not symmetric")
    if method == "jacobi":
        if A.shape[0] > 1024:
            raise MemoryError(f"Jacobi oracle limited to N <= 1024, got {A.shape[0]}")
        w, V = jacobi_eigh(A)
    elif method == "lapack":
        w, V = np.linalg.eigh(A)
    else:
        raise ValueError(f"unknown method {method!r}")
    return [(float(w[j]), V[:, j]) for j in range(len(w))]


def _johnson_adjacency(inst: ProblemInstance) -> np.ndarray:
    table = subset_table(inst)
    bits = np.zeros((inst.N, inst.n), dtype=np.int64)
    np.put_along_axis(bits, table, 1, axis=1)
    overlap = bits @ bits.T
    return (overlap == inst.k - 1).astype(np.int64)


def idempotent_numerators(inst: ProblemInstance, max_n: int = 256) -> list[tuple[np.ndarray, int]]:
    """Integer form ``(num_i, den_i)`` of the projectors onto ``E_0, ..., E_k``.

    The projector onto ``E_i`` is ``num_i / den_i`` with
    ``num_i = prod_{j != i} (A - theta_j I)`` and
    ``den_i = prod_{j != i} (theta_i - theta_j)``, where ``A`` is the Johnson
    graph adjacency (pairs meeting in k-1 elements) and
    ``theta_i = (k-i)(n-k-i) - i`` its pairwise distinct eigenvalues.
    Numerators are int64 when an entry bound fits, Python ints otherwise.
    """
    if inst.degenerate:
        raise ValueError("eigenspaces are undefined for 2k > n")
    if inst.N > max_n:
        raise MemoryError(f"exact projectors limited to N <= {max_n}, got {inst.N}")
    n, k, N = inst.n, inst.k, inst.N
    theta = [(k - i) * (n - k - i) - i for i in range(k + 1)]
    A = _johnson_adjacency(inst)
    degree = theta[0]
    # each factor has absolute row sums <= degree + |theta_j|
    bound = 1
    for t in theta:
        bound *= degree + abs(t)
    dtype = np.int64 if bound < 2 ** 62 else object
    A = A.astype(dtype)
    I = np.eye(N, dtype=np.int64).astype(dtype)
    out = []
    for i in range(k + 1):
        num = I.copy()
        den = 1
        for j in range(k + 1):
            if j != i:
                num = num.dot(A - theta[j] * I)
                den *= theta[i] - theta[j]
        out.append((num, den))
    return out


def exact_idempotents(inst: ProblemInstance, max_n: int = 256) -> list[np.ndarray]:
    """Rational orthogonal projectors onto ``E_0, ..., E_k``.

    Entries are :class:`Fraction` objects in ``object`` arrays; see
    :func:`idempotent_numerators` for the construction.
    """
    return [_fraction_array(num, den) for num, den in idempotent_numerators(inst, max_n)]


def _fraction_array(num: np.ndarray, den: int) -> np.ndarray:
    flat = [Fraction(int(v), den) for v in num.ravel()]
    return np.array(flat, dtype=object).reshape(num.shape)


def eigensystem_report(system: EigenSystem) -> list[dict]:
    """Rows ``{i, dim, lambda_B_num, lambda_B_den, lambda_chi}`` per eigenspace."""
    rows = []
    for s in system.spaces:
        rows.append({
            "i": s.i,
            "dim": s.dim,
            "lambda_B_num": None if s.lambda_b is None else s.lambda_b.numerator,
            "lambda_B_den": None if s.lambda_b is None else s.lambda_b.denominator,
            "lambda_chi": int(s.lambda_chi),
        })
    return rows
