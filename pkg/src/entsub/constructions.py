"""Explicit entangled-subspace constructions and totally non-singular matrices.

A d×d matrix ``M`` is identified with the tensor ``Σ_{ij} M[i, j] e_i ⊗ e_j``,
so transposition is the swap of the two tensor factors.
"""
from __future__ import annotations

import itertools
import math
from collections.abc import Sequence
from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np

from .grassmann import Subspace, span_of
from .tensor_core import Symmetry, basis_tensor, basis_vector, increasing_indices, multiset_indices, vee, wedge


@dataclass(frozen=True, eq=False)
class TNSMatrix:
    """Square matrix with every minor nonzero; ``nodes`` set when it is Vandermonde."""

    entries: np.ndarray = field(repr=False)
    nodes: tuple | None = None

    @property
    def size(self) -> int:
        return self.entries.shape[0]

    def column(self, j: int) -> np.ndarray:
        return self.entries[:, j]


def vandermonde(nodes: Sequence) -> TNSMatrix:
    """Rows ``(1, α_i, α_i², ...)``; totally non-singular for distinct nonzero nodes."""
    nodes = tuple(nodes)
    if len(set(nodes)) != len(nodes):
        raise ValueError("Vandermonde nodes must be pairwise distinct")
    if any(a == 0 for a in nodes):
        raise ValueError("Vandermonde nodes must be nonzero")
    n = len(nodes)
    if all(isinstance(a, (int, np.integer)) for a in nodes):
        entries = np.array([[int(a) ** k for k in range(n)] for a in nodes], dtype=object).astype(float)
    else:
        entries = np.array([[complex(a) ** k for k in range(n)] for a in nodes], dtype=complex)
    return TNSMatrix(entries, nodes)


def _exact_det(rows: list[list[Fraction]]) -> Fraction:
    a = [row[:] for row in rows]
    n = len(a)
    det = Fraction(1)
    for c in range(n):
        pivot = next((r for r in range(c, n) if a[r][c] != 0), None)
        if pivot is None:
            return Fraction(0)
        if pivot != c:
            a[c], a[pivot] = a[pivot], a[c]
            det = -det
        det *= a[c][c]
        for r in range(c + 1, n):
            f = a[r][c] / a[c][c]
            if f:
                for k in range(c, n):
                    a[r][k] -= f * a[c][k]
    return det


def _is_integral(m: np.ndarray) -> bool:
    if np.iscomplexobj(m) and np.any(np.imag(m) != 0):
        return False
    re = np.real(m)
    return bool(np.all(np.isfinite(re)) and np.all(re == np.round(re)))


def is_totally_nonsingular(matrix, tol: float = 1e-10) -> bool:
    """Enumerate every minor of a square matrix and check that none vanishes.

    Integer matrices are checked in exact rational arithmetic; otherwise a
    minor counts as zero when ``|det| <= tol ×`` its Hadamard bound.
    """
    m = np.asarray(matrix.entries if isinstance(matrix, TNSMatrix) else matrix)
    if m.ndim != 2 or m.shape[0] != m.shape[1]:
        raise ValueError("expected a square matrix")
    n = m.shape[0]
    exact = _is_integral(m)
    if exact:
        q = [[Fraction(int(round(float(np.real(x))))) for x in row] for row in m]
    else:
        m = m.astype(complex)
    for k in range(1, n + 1):
        for rows in itertools.combinations(range(n), k):
            for cols in itertools.combinations(range(n), k):
                if exact:
                    if _exact_det([[q[i][j] for j in cols] for i in rows]) == 0:
                        return False
                else:
                    sub = m[np.ix_(rows, cols)]
                    bound = np.prod(np.linalg.norm(sub, axis=1))
                    if bound == 0 or abs(np.linalg.det(sub)) <= tol * bound:
                        return False
    return True


def superdiag_matrix(d: int, i: int, column) -> np.ndarray:
    """d×d matrix carrying ``column`` (length d-i) on its i-th superdiagonal."""
    column = np.asarray(column)
    if not 0 <= i <= d - 1:
        raise ValueError("superdiagonal index out of range")
    if column.shape != (d - i,):
        raise ValueError(f"column must have length {d - i}")
    out = np.zeros((d, d), dtype=complex)
    out[np.arange(d - i), np.arange(i, d)] = column
    return out


def _tns_for(size: int, supplied) -> TNSMatrix:
    if supplied is None:
        return vandermonde(range(1, size + 1))
    tns = supplied if isinstance(supplied, TNSMatrix) else TNSMatrix(np.asarray(supplied))
    if tns.entries.shape != (size, size):
        raise ValueError(f"expected a {size}x{size} totally non-singular matrix")
    if not is_totally_nonsingular(tns):
        raise ValueError("supplied matrix is not totally non-singular")
    return tns


def leading_column_basis(tns: TNSMatrix, k: int) -> np.ndarray:
    """Orthonormal basis (as columns) of the span of the first ``k`` columns of ``tns``.

    Generators built from different superdiagonals are orthogonal, so only this
    span matters. For Vandermonde input the span is the polynomials of degree
    below ``k`` sampled at the nodes; Arnoldi on ``diag(nodes)`` gives it stably,
    whereas QR of the raw columns loses accuracy once the matrix is large.
    """
    if k == 0:
        return np.zeros((tns.size, 0), dtype=complex)
    if tns.nodes is None:
        q, _ = np.linalg.qr(np.asarray(tns.entries[:, :k], dtype=complex))
        return q
    x = np.asarray(tns.nodes, dtype=complex)
    Q = np.zeros((len(x), k), dtype=complex)
    Q[:, 0] = 1 / np.sqrt(len(x))
    for j in range(1, k):
        v = x * Q[:, j - 1]
        for _ in range(2):  # reorthogonalize once
            v -= Q[:, :j] @ (Q[:, :j].conj().T @ v)
        Q[:, j] = v / np.linalg.norm(v)
    return Q


def _empty(shape, symmetry) -> Subspace:
    return Subspace(shape, symmetry, np.zeros((0,) + tuple(shape), dtype=complex))


def symmetric_bipartite_generators(d: int, r: int, tns_per_i: dict | None = None) -> list[np.ndarray]:
    if not 1 <= r < d:
        raise ValueError("need 1 <= r < d")
    tns_per_i = tns_per_i or {}
    out = []
    for i in range(d - r):
        tns = _tns_for(d - i, tns_per_i.get(i))
        for j in range(d - r - i):
            M = superdiag_matrix(d, i, tns.column(j))
            out.append(M + M.T)
    return out


def symmetric_bipartite_basis(d: int, r: int, tns_per_i: dict | None = None) -> Subspace:
    """Symmetric subspace of C^d ⊗ C^d of affine dim C(d-r+1, 2) whose elements have rank > r.

    ``tns_per_i`` optionally maps a diagonal index ``i`` to a (d-i)×(d-i)
    totally non-singular matrix; the default is Vandermonde with nodes 1..d-i.
    """
    if not 1 <= r < d:
        raise ValueError("need 1 <= r < d")
    tns_per_i = tns_per_i or {}
    basis = []
    for i in range(d - r):
        cols = leading_column_basis(_tns_for(d - i, tns_per_i.get(i)), d - r - i)
        for q in cols.T:
            M = superdiag_matrix(d, i, q)
            basis.append((M + M.T) / np.linalg.norm(M + M.T))
    assert len(basis) == math.comb(d - r + 1, 2)
    return Subspace((d, d), Symmetry.SYMMETRIC, np.array(basis, dtype=complex))


def antisymmetric_bipartite_generators(d: int, r: int, tns_per_i: dict | None = None) -> list[np.ndarray]:
    if r < 1 or 2 * r >= d:
        raise ValueError("need 1 <= r and 2r < d")
    tns_per_i = tns_per_i or {}
    out = []
    for i in range(1, d - 2 * r):
        tns = _tns_for(d - i, tns_per_i.get(i))
        for j in range(d - 2 * r - i):
            M = superdiag_matrix(d, i, tns.column(j))
            out.append(M - M.T)
    return out


def antisymmetric_bipartite_basis(d: int, r: int, tns_per_i: dict | None = None) -> Subspace:
    """Antisymmetric subspace of affine dim C(d-2r, 2) whose elements have rank > 2r."""
    if r < 1 or 2 * r >= d:
        raise ValueError("need 1 <= r and 2r < d")
    tns_per_i = tns_per_i or {}
    basis = []
    for i in range(1, d - 2 * r):
        cols = leading_column_basis(_tns_for(d - i, tns_per_i.get(i)), d - 2 * r - i)
        for q in cols.T:
            M = superdiag_matrix(d, i, q)
            basis.append((M - M.T) / np.linalg.norm(M - M.T))
    assert len(basis) == math.comb(d - 2 * r, 2)
    if not basis:
        return _empty((d, d), Symmetry.ANTISYMMETRIC)  # d = 2r + 1
    return Subspace((d, d), Symmetry.ANTISYMMETRIC, np.array(basis, dtype=complex))


def symmetric_multipartite_r1_generators(d: int, m: int) -> list[np.ndarray]:
    if d < 1 or m < 2:
        raise ValueError("need d >= 1 and m >= 2")
    return [vee([basis_vector(d, a) for a in idx])
            for idx in multiset_indices(d, m) if len(set(idx)) > 1]


def symmetric_multipartite_r1_basis(d: int, m: int) -> Subspace:
    """Span of the non-constant ``e_{a_1}∨...∨e_{a_m}``: contains no ``x^{⊗m}``."""
    gens = symmetric_multipartite_r1_generators(d, m)
    if not gens:
        return _empty((d,) * m, Symmetry.SYMMETRIC)
    return span_of(gens, symmetry=Symmetry.SYMMETRIC)


@dataclass(frozen=True)
class SumConstraints:
    """Linear system ``Σ_{a ∈ I_s} v_a = 0`` over the strictly increasing index basis."""

    sums: tuple[int, ...]                         # every s in the printed index range J (1-based sums)
    groups: dict[int, tuple[tuple[int, ...], ...]]  # nonempty I_s, zero-based index tuples
    empty: tuple[int, ...]                        # values of s with no index tuple

    def matrix(self, d: int, m: int) -> np.ndarray:
        idx = {a: k for k, a in enumerate(increasing_indices(d, m))}
        A = np.zeros((len(self.groups), len(idx)))
        for row, s in enumerate(sorted(self.groups)):
            for a in self.groups[s]:
                A[row, idx[a]] = 1.0
        return A


def antisymmetric_sum_constraints(d: int, m: int) -> SumConstraints:
    if d < m or m < 2:
        raise ValueError("need d >= m >= 2")
    c2 = math.comb(m, 2)
    J = tuple(range(c2 + m - 1, d * m - c2 + 1))
    groups: dict[int, list] = {s: [] for s in J}
    for a in increasing_indices(d, m):
        groups[sum(a) + m].append(a)  # 1-based index sum
    nonempty = {s: tuple(g) for s, g in groups.items() if g}
    empty = tuple(s for s in J if not groups[s])
    if len(nonempty) != m * (d - m) + 1:
        raise AssertionError("nonempty constraint count differs from m(d-m)+1")
    return SumConstraints(J, nonempty, empty)


def antisymmetric_multipartite_r1_generators(d: int, m: int) -> list[np.ndarray]:
    """Integer basis ``e_{a^1} - e_{a^q}`` of the constraint kernel inside each I_s, as ∧-tensors."""
    cons = antisymmetric_sum_constraints(d, m)
    out = []
    for s in sorted(cons.groups):
        group = cons.groups[s]
        first = wedge([basis_vector(d, i) for i in group[0]])
        for other in group[1:]:
            out.append(first - wedge([basis_vector(d, i) for i in other]))
    return out


def antisymmetric_multipartite_r1_subspace(d: int, m: int) -> Subspace:
    """Antisymmetric 1-entangled subspace of projective dim C(d,m) - m(d-m) - 2."""
    gens = antisymmetric_multipartite_r1_generators(d, m)
    if not gens:
        return _empty((d,) * m, Symmetry.ANTISYMMETRIC)
    sub = span_of(gens, symmetry=Symmetry.ANTISYMMETRIC)
    assert sub.dim == len(gens)
    return sub


# Three-party and four-party 2-entangled constructions.

DEFAULT_DELTA = (0, 1, 1, 1)
DEFAULT_EPSILON = (1, 1, 2, 0)
DEFAULT_THETA = (1, 1, 1, 0)
DEFAULT_KAPPA = (0, 2, 1, 1)
DEFAULT_PHI = (0, 1, 1, 1)
DEFAULT_PSI = (1, 2, 1, 0)


@dataclass(frozen=True)
class ConstructionParams:
    delta: tuple = DEFAULT_DELTA
    epsilon: tuple = DEFAULT_EPSILON
    theta: tuple = DEFAULT_THETA
    kappa: tuple = DEFAULT_KAPPA
    phi: tuple = DEFAULT_PHI
    psi: tuple = DEFAULT_PSI

    def __post_init__(self):
        for name in ("delta", "epsilon", "theta", "kappa", "phi", "psi"):
            v = tuple(getattr(self, name))
            if len(v) != 4:
                raise ValueError(f"{name} must have 4 entries")
            object.__setattr__(self, name, v)

    def check_qqq(self):
        mat = np.array([self.delta, self.epsilon, self.theta, self.kappa], dtype=complex)
        if np.linalg.matrix_rank(mat) < 4:
            raise ValueError("delta, epsilon, theta, kappa must be linearly independent")

    def check_four_qubit(self):
        mat = np.array([self.phi, self.psi], dtype=complex)
        if np.linalg.matrix_rank(mat) < 2:
            raise ValueError("phi, psi must be linearly independent")


# Counterexample parameters for which the qutrit-qutrit-qubit span is not 2-entangled.
BAD_QQQ_PARAMS = ConstructionParams(delta=(1, 1, 1, 2), epsilon=(0, -1, 1, 1),
                                    theta=(2, 1, 1, 0), kappa=(1, 1, 0, 1))

QQQ_SHAPE = (3, 3, 2)
FOUR_QUBIT_SHAPE = (2, 2, 2, 2)

# zero-based (i, j, k) positions carrying the alpha (delta/epsilon) and beta (theta/kappa) entries
_ALPHA_POS = ((0, 1, 0), (1, 0, 0), (2, 0, 1), (0, 2, 1))
_BETA_POS = ((0, 2, 0), (2, 0, 0), (2, 1, 1), (1, 2, 1))


def _weighted(shape, positions, weights) -> np.ndarray:
    t = np.zeros(shape, dtype=complex)
    for pos, w in zip(positions, weights):
        t[pos] += w
    return t


def qutrit_qutrit_qubit_generators(params: ConstructionParams = ConstructionParams()) -> list[np.ndarray]:
    """The six spanning states of C^3 ⊗ C^3 ⊗ C^2, in the order I⊗e1, I⊗e2, δ, ε, θ, κ."""
    params.check_qqq()
    ident = [np.multiply.outer(np.eye(3), basis_vector(2, k)) for k in range(2)]
    return ident + [
        _weighted(QQQ_SHAPE, _ALPHA_POS, params.delta),
        _weighted(QQQ_SHAPE, _ALPHA_POS, params.epsilon),
        _weighted(QQQ_SHAPE, _BETA_POS, params.theta),
        _weighted(QQQ_SHAPE, _BETA_POS, params.kappa),
    ]


def qutrit_qutrit_qubit_element(lam, gamma, c_de, c_tk, params: ConstructionParams = ConstructionParams()) -> np.ndarray:
    """``λ·(I⊗e1) + γ·(I⊗e2) + c_de[0]·δ + c_de[1]·ε + c_tk[0]·θ + c_tk[1]·κ``."""
    coeffs = np.array([lam, gamma, *c_de, *c_tk], dtype=complex)
    return np.tensordot(coeffs, np.array(qutrit_qutrit_qubit_generators(params)), axes=1)


def qutrit_qutrit_qubit_basis(params: ConstructionParams = ConstructionParams()) -> Subspace:
    return span_of(qutrit_qutrit_qubit_generators(params))


def four_qubit_generators(params: ConstructionParams = ConstructionParams()) -> list[np.ndarray]:
    params.check_four_qubit()

    def e(*bits):
        return basis_tensor(FOUR_QUBIT_SHAPE, [b - 1 for b in bits])

    corners = [e(1, 1, 1, 1), e(1, 1, 2, 2), e(2, 2, 1, 1), e(2, 2, 2, 2)]
    return [
        e(1, 1, 1, 2) + e(1, 2, 2, 1) + e(2, 2, 1, 2),
        e(1, 1, 2, 1) + e(2, 1, 1, 2) + e(2, 2, 2, 1),
        e(1, 2, 1, 1) + e(2, 1, 1, 1) + e(2, 1, 2, 2) + e(2, 2, 1, 2),
        e(1, 1, 2, 1) + e(1, 2, 1, 1) + e(1, 2, 2, 2) + e(2, 1, 2, 2),
        sum(w * c for w, c in zip(params.phi, corners)),
        sum(w * c for w, c in zip(params.psi, corners)),
    ]


def four_qubit_basis(params: ConstructionParams = ConstructionParams()) -> Subspace:
    return span_of(four_qubit_generators(params))
