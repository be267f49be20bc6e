"""Linear subspaces of tensor spaces, Plücker coordinates and orthogonal complements."""
from __future__ import annotations

import itertools
import math
from collections.abc import Sequence
from dataclasses import dataclass, field

import numpy as np

from .tensor_core import (
    RANK_TOL,
    Symmetry,
    complex_normal,
    numerical_rank,
    project_sector,
    satisfies_symmetry,
    sector_dimension,
)


@dataclass(frozen=True, eq=False)
class Subspace:
    """Linear subspace (affine cone of a projective plane) of ⊗_j C^{d_j}.

    ``basis`` has shape ``(k, *ambient_shape)`` and is orthonormal for the
    Hermitian inner product.  ``dim`` is the affine dimension ``k``; the
    projective dimension is ``k - 1``.
    """

    ambient_shape: tuple[int, ...]
    symmetry: Symmetry
    basis: np.ndarray = field(repr=False)

    def __post_init__(self):
        shape = tuple(int(d) for d in self.ambient_shape)
        object.__setattr__(self, "ambient_shape", shape)
        object.__setattr__(self, "symmetry", Symmetry(self.symmetry))
        basis = np.asarray(self.basis, dtype=complex).reshape((-1,) + shape)
        basis.setflags(write=False)
        object.__setattr__(self, "basis", basis)
        k = basis.shape[0]
        if k:
            gram = self.matrix.conj().T @ self.matrix
            if np.max(np.abs(gram - np.eye(k))) > 1e-10:
                raise ValueError("Subspace basis is not orthonormal")
            for b in basis:
                if not satisfies_symmetry(b, self.symmetry, rtol=1e-10):
                    raise ValueError(f"basis tensor violates symmetry tag {self.symmetry.value}")

    @property
    def dim(self) -> int:
        return self.basis.shape[0]

    @property
    def projective_dim(self) -> int:
        return self.dim - 1

    @property
    def ambient_dim(self) -> int:
        return math.prod(self.ambient_shape)

    @property
    def matrix(self) -> np.ndarray:
        """Basis vectors as columns of an ``ambient_dim × dim`` matrix."""
        return self.basis.reshape(self.dim, -1).T

    def element(self, coeffs) -> np.ndarray:
        coeffs = np.asarray(coeffs, dtype=complex)
        return np.tensordot(coeffs, self.basis, axes=1)

    def projector(self) -> np.ndarray:
        B = self.matrix
        return B @ B.conj().T


def span_of(tensors, tol: float = RANK_TOL, symmetry: Symmetry = Symmetry.NONE) -> Subspace:
    """Orthonormal basis of the span of ``tensors`` (all of one shape), via SVD."""
    tensors = [np.asarray(t, dtype=complex) for t in tensors]
    if not tensors:
        raise ValueError("span_of needs at least one tensor")
    shape = tensors[0].shape
    if any(t.shape != shape for t in tensors):
        raise ValueError("tensors have mismatched shapes")
    A = np.array([t.ravel() for t in tensors]).T
    rank = numerical_rank(A, tol)
    if rank == 0:
        raise ValueError("all tensors are zero")
    U = np.linalg.svd(A, full_matrices=False)[0][:, :rank]
    return Subspace(shape, symmetry, U.T.reshape((rank,) + shape))


@dataclass(frozen=True)
class PlueckerCoords:
    """Maximal minors of a basis matrix, keyed by zero-based increasing row tuples."""

    n: int
    coords: dict[tuple[int, ...], complex]

    def vector(self) -> np.ndarray:
        return np.array([self.coords[k] for k in sorted(self.coords)])


def pluecker_from_vectors(vectors) -> PlueckerCoords:
    """Plücker coordinates of the span of the given (independent) vectors."""
    cols = np.array([np.asarray(v, dtype=complex).ravel() for v in vectors]).T
    D, n = cols.shape
    coords = {S: complex(np.linalg.det(cols[list(S)])) for S in itertools.combinations(range(D), n)}
    if max(abs(c) for c in coords.values()) == 0:
        raise ValueError("vectors are linearly dependent")
    return PlueckerCoords(n, coords)


def pluecker(sub: Subspace) -> PlueckerCoords:
    if sub.dim == 0:
        raise ValueError("the zero subspace has no Plücker coordinates")
    return pluecker_from_vectors(sub.matrix.T)


def orth_complement(sub: Subspace, form: str = "bilinear") -> Subspace:
    """Complement in the full ambient space under ``u^T v`` or ``u^* v``.

    The result carries no symmetry tag: it is the complement inside
    ⊗_j C^{d_j}, not inside a symmetric sector.
    """
    B = sub.matrix
    if form == "bilinear":
        G = B.T
    elif form == "hermitian":
        G = B.conj().T
    else:
        raise ValueError(f"unknown form {form!r}")
    D = sub.ambient_dim
    if sub.dim == 0:
        return Subspace(sub.ambient_shape, Symmetry.NONE, np.eye(D, dtype=complex))
    _, s, Vh = np.linalg.svd(G, full_matrices=True)
    rank = int(np.sum(s > RANK_TOL * s[0]))
    # G x = 0 for rows of Vh beyond the rank; conj makes them columns of the null space
    null = Vh[rank:].conj()
    return Subspace(sub.ambient_shape, Symmetry.NONE, null.reshape((D - rank,) + sub.ambient_shape))


def complementary_minor_check(sub: Subspace, tol: float = 1e-9) -> tuple[bool, float]:
    """Compare Plücker coordinates of ``sub`` with those of its bilinear complement.

    Coordinate ``S`` of the plane should equal ``c · (-1)^{ΣS} ·`` coordinate
    ``S^c`` of the complement for one global constant ``c``.  Returns whether
    the max residual (relative to the largest coordinate) is below ``tol``,
    and that residual.
    """
    if not 0 < sub.dim < sub.ambient_dim:
        raise ValueError("need a proper nonzero subspace")
    D = sub.ambient_dim
    p = pluecker(sub).coords
    q = pluecker(orth_complement(sub, "bilinear")).coords
    keys = sorted(p)
    a = np.array([p[S] for S in keys])
    b = np.array([(-1) ** sum(S) * q[tuple(i for i in range(D) if i not in S)] for S in keys])
    c = np.vdot(b, a) / np.vdot(b, b)
    deviation = float(np.max(np.abs(a - c * b)) / np.max(np.abs(a)))
    return deviation < tol, deviation


def random_subspace(ambient_shape: Sequence[int], affine_dim: int,
                    symmetry: Symmetry = Symmetry.NONE, seed=None) -> Subspace:
    """Unitarily invariant random subspace of the given sector."""
    shape = tuple(ambient_shape)
    symmetry = Symmetry(symmetry)
    if affine_dim > sector_dimension(shape, symmetry) or affine_dim < 1:
        raise ValueError("affine dimension out of range for this sector")
    rng = np.random.default_rng(seed) if not isinstance(seed, np.random.Generator) else seed
    gens = [project_sector(complex_normal(rng, shape), symmetry) for _ in range(affine_dim)]
    A = np.array([g.ravel() for g in gens]).T
    Q, _ = np.linalg.qr(A)
    return Subspace(shape, symmetry, Q.T.reshape((affine_dim,) + shape))
