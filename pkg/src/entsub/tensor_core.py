"""Dense complex tensor algebra.

Tensors are plain complex ``numpy`` arrays whose shape is the tuple of local
dimensions ``(d_1, ..., d_m)``; the row-major ravel is the coefficient vector in
the standard product basis.  Symmetric and antisymmetric tensors are always kept
in these ambient coordinates.
"""
from __future__ import annotations

import enum
import functools
import itertools
import math
import warnings
from collections import Counter
from collections.abc import Iterable, Sequence

import numpy as np

RANK_TOL = 1e-9


class Symmetry(str, enum.Enum):
    NONE = "none"
    SYMMETRIC = "sym"
    ANTISYMMETRIC = "antisym"


class DependentFactorsWarning(UserWarning):
    """A wedge product of linearly dependent factors was requested (result is zero)."""


def as_tensor(data, shape=None) -> np.ndarray:
    t = np.asarray(data, dtype=complex)
    if shape is not None:
        t = t.reshape(tuple(shape))
    if not np.all(np.isfinite(t)):
        raise ValueError("tensor has non-finite entries")
    return t


def basis_vector(d: int, a: int) -> np.ndarray:
    """Standard basis vector ``e_a`` of C^d, zero-based ``a``."""
    e = np.zeros(d, dtype=complex)
    e[a] = 1.0
    return e


def basis_tensor(shape: Sequence[int], index: Sequence[int]) -> np.ndarray:
    t = np.zeros(tuple(shape), dtype=complex)
    t[tuple(index)] = 1.0
    return t


def outer_product(factors: Sequence) -> np.ndarray:
    """Tensor product ``x_1 ⊗ ... ⊗ x_m`` of nonzero vectors."""
    if len(factors) == 0:
        raise ValueError("outer_product needs at least one factor")
    vecs = [np.asarray(f, dtype=complex).ravel() for f in factors]
    for v in vecs:
        if v.size == 0 or not np.any(v):
            raise ValueError("outer_product factors must be nonzero")
    return functools.reduce(np.multiply.outer, vecs)


def _permutation_sum(factors: Sequence, signed: bool) -> np.ndarray:
    vecs = [np.asarray(f, dtype=complex).ravel() for f in factors]
    if len(vecs) == 0:
        raise ValueError("need at least one factor")
    d = vecs[0].size
    if any(v.size != d for v in vecs):
        raise ValueError("all factors must live in the same C^d")
    m = len(vecs)
    out = np.zeros((d,) * m, dtype=complex)
    for perm in itertools.permutations(range(m)):
        term = functools.reduce(np.multiply.outer, [vecs[p] for p in perm])
        out += permutation_sign(perm) * term if signed else term
    return out


def vee(factors: Sequence) -> np.ndarray:
    """Unnormalized symmetric product: sum over all orderings of the factors."""
    return _permutation_sum(factors, signed=False)


def wedge(factors: Sequence) -> np.ndarray:
    """Unnormalized antisymmetric product: signed sum over all orderings.

    Linearly dependent factors give the zero tensor; a
    :class:`DependentFactorsWarning` is emitted in that case.
    """
    out = _permutation_sum(factors, signed=True)
    mat = np.array([np.asarray(f, dtype=complex).ravel() for f in factors])
    if mat.shape[0] > mat.shape[1] or numerical_rank(mat) < mat.shape[0]:
        warnings.warn("wedge of linearly dependent factors is zero", DependentFactorsWarning, stacklevel=2)
        out[...] = 0.0
    return out


def permutation_sign(perm: Sequence[int]) -> int:
    perm = list(perm)
    sign = 1
    seen = [False] * len(perm)
    for i in range(len(perm)):
        if seen[i]:
            continue
        j, length = i, 0
        while not seen[j]:
            seen[j] = True
            j = perm[j]
            length += 1
        if length % 2 == 0:
            sign = -sign
    return sign


def permute(t: np.ndarray, sigma: Sequence[int]) -> np.ndarray:
    """Apply the mode permutation P_σ, ``e_{a_1}⊗...⊗e_{a_m} -> e_{a_σ⁻¹(1)}⊗...⊗e_{a_σ⁻¹(m)}``.

    ``sigma`` is zero-based: ``sigma[i]`` is the image of ``i``.  With this
    convention ``permute(permute(t, s), s2) == permute(t, compose(s2, s))``.
    """
    sigma = list(sigma)
    if sorted(sigma) != list(range(t.ndim)):
        raise ValueError(f"{sigma} is not a permutation of {t.ndim} modes")
    inverse = np.argsort(sigma)
    return np.transpose(t, inverse)


def compose(outer: Sequence[int], inner: Sequence[int]) -> tuple[int, ...]:
    """``outer ∘ inner`` as a zero-based permutation tuple."""
    return tuple(outer[i] for i in inner)


def symmetrize(t: np.ndarray) -> np.ndarray:
    """Orthogonal projection onto the symmetric subspace (average over S_m)."""
    perms = list(itertools.permutations(range(t.ndim)))
    return sum(np.transpose(t, p) for p in perms) / len(perms)


def antisymmetrize(t: np.ndarray) -> np.ndarray:
    perms = list(itertools.permutations(range(t.ndim)))
    return sum(permutation_sign(p) * np.transpose(t, p) for p in perms) / len(perms)


def project_sector(t: np.ndarray, symmetry: Symmetry) -> np.ndarray:
    symmetry = Symmetry(symmetry)
    if symmetry is Symmetry.NONE:
        return t
    if len(set(t.shape)) != 1:
        raise ValueError("symmetric sectors need equal local dimensions")
    return symmetrize(t) if symmetry is Symmetry.SYMMETRIC else antisymmetrize(t)


def satisfies_symmetry(t: np.ndarray, symmetry: Symmetry, rtol: float = 1e-12) -> bool:
    symmetry = Symmetry(symmetry)
    if symmetry is Symmetry.NONE:
        return True
    if len(set(t.shape)) != 1:
        return False
    scale = max(np.linalg.norm(t), 1e-300)
    for perm in itertools.permutations(range(t.ndim)):
        sign = 1 if symmetry is Symmetry.SYMMETRIC else permutation_sign(perm)
        # P_σ and P_σ⁻¹ range over the same group, so transposing by perm is enough
        if np.linalg.norm(np.transpose(t, perm) - sign * t) > rtol * scale:
            return False
    return True


def sector_dimension(shape: Sequence[int], symmetry: Symmetry) -> int:
    symmetry = Symmetry(symmetry)
    if symmetry is Symmetry.NONE:
        return math.prod(shape)
    d, m = shape[0], len(shape)
    if symmetry is Symmetry.SYMMETRIC:
        return math.comb(d + m - 1, m)
    return math.comb(d, m)


def multiset_indices(d: int, m: int) -> list[tuple[int, ...]]:
    """Nondecreasing zero-based index tuples labelling the basis ``e_{a_1}∨...∨e_{a_m}``."""
    return list(itertools.combinations_with_replacement(range(d), m))


def increasing_indices(d: int, m: int) -> list[tuple[int, ...]]:
    """Strictly increasing zero-based index tuples labelling ``e_{a_1}∧...∧e_{a_m}``."""
    return list(itertools.combinations(range(d), m))


def compact_coordinates(t: np.ndarray, symmetry: Symmetry) -> dict[tuple[int, ...], complex]:
    """Coefficients of ``t`` in the unnormalized ∨ / ∧ basis, keyed by sorted index tuple.

    ``t = Σ_a c_a e_{a_1}∨...∨e_{a_m}`` (or ∧); the ambient entry at a sorted
    index equals ``c_a`` times the multiplicity product for ∨ and ``c_a`` for ∧.
    """
    symmetry = Symmetry(symmetry)
    d, m = t.shape[0], t.ndim
    if symmetry is Symmetry.SYMMETRIC:
        out = {}
        for a in multiset_indices(d, m):
            stab = math.prod(math.factorial(c) for c in Counter(a).values())
            out[a] = complex(t[a]) / stab
        return out
    if symmetry is Symmetry.ANTISYMMETRIC:
        return {a: complex(t[a]) for a in increasing_indices(d, m)}
    raise ValueError("compact coordinates only exist for symmetric sectors")


def from_compact(coords: dict[tuple[int, ...], complex], d: int, m: int, symmetry: Symmetry) -> np.ndarray:
    symmetry = Symmetry(symmetry)
    out = np.zeros((d,) * m, dtype=complex)
    for a, c in coords.items():
        if c == 0:
            continue
        factors = [basis_vector(d, i) for i in a]
        prod = vee(factors) if symmetry is Symmetry.SYMMETRIC else _permutation_sum(factors, signed=True)
        out += c * prod
    return out


def _split(m: int, rows: Iterable[int]) -> tuple[tuple[int, ...], tuple[int, ...]]:
    rows = tuple(sorted(set(rows)))
    if len(rows) == 0 or len(rows) >= m or rows[0] < 0 or rows[-1] >= m:
        raise ValueError(f"row modes {rows} must be a proper nonempty subset of {m} modes")
    cols = tuple(i for i in range(m) if i not in rows)
    return rows, cols


def flatten(t: np.ndarray, rows: Iterable[int]) -> np.ndarray:
    """Matrix with rows indexed by the modes in ``rows`` and columns by the rest.

    Both groups are ordered lexicographically (increasing mode number, last
    mode fastest).  Modes are zero-based.
    """
    rows, cols = _split(t.ndim, rows)
    nrows = math.prod(t.shape[i] for i in rows)
    return np.transpose(t, rows + cols).reshape(nrows, -1)


def bipartitions(m: int) -> list[tuple[int, ...]]:
    """One representative ``S`` per unordered pair ``{S, complement}``, 1 ≤ |S| ≤ m-1."""
    out = []
    for size in range(1, m // 2 + 1):
        for S in itertools.combinations(range(m), size):
            if 2 * size == m and 0 not in S:
                continue
            out.append(S)
    return out


def numerical_rank(matrix, tol: float = RANK_TOL) -> int:
    """Number of singular values above ``tol`` times the largest one."""
    a = np.asarray(matrix, dtype=complex)
    if a.size == 0:
        return 0
    s = np.linalg.svd(a, compute_uv=False)
    if s[0] == 0:
        return 0
    return int(np.sum(s > tol * s[0]))


def flattening_rank(t: np.ndarray, tol: float = RANK_TOL) -> int:
    if not np.any(t):
        raise ValueError("flattening rank of the zero tensor is undefined")
    if t.ndim == 1:
        return 1
    return max(numerical_rank(flatten(t, S), tol) for S in bipartitions(t.ndim))


def _rng(seed) -> np.random.Generator:
    if isinstance(seed, np.random.Generator):
        return seed
    return np.random.default_rng(seed)


def complex_normal(rng, size) -> np.ndarray:
    rng = _rng(rng)
    return rng.standard_normal(size) + 1j * rng.standard_normal(size)


def random_tensor(shape: Sequence[int], seed=None) -> np.ndarray:
    return complex_normal(seed, tuple(shape))


def random_product(shape: Sequence[int], seed=None) -> np.ndarray:
    rng = _rng(seed)
    return outer_product([complex_normal(rng, d) for d in shape])


def random_rank_r(shape: Sequence[int], r: int, seed=None) -> np.ndarray:
    """Sum of ``r`` independent random product tensors."""
    if r < 1:
        raise ValueError("r must be positive")
    rng = _rng(seed)
    return sum(random_product(shape, rng) for _ in range(r))
