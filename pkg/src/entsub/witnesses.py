"""Entanglement witnesses ``W = I - αP`` built from entangled subspaces.

If every unit vector ``v`` of tensor rank at most ``r`` satisfies
``‖Pv‖² ≤ ε``, then ``W = I - P/ε`` is nonnegative on all such states while
``Tr(WP) < 0``.  :func:`estimate_epsilon` searches for the worst-case ``v``.
Because that search can miss the true maximum, ``ε̂`` is a lower bound on
``ε`` and ``α̂ = 1/ε̂`` an upper bound on the largest valid ``α``.
"""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .grassmann import Subspace
from .tensor_core import complex_normal, outer_product
from .verification import start_rng

NEG_EIG_TOL = 1e-10


@dataclass(frozen=True, eq=False)
class HermitianOperator:
    ambient_shape: tuple[int, ...]
    entries: np.ndarray = field(repr=False)

    def __post_init__(self):
        A = np.asarray(self.entries, dtype=complex)
        D = int(np.prod(self.ambient_shape))
        if A.shape != (D, D):
            raise ValueError(f"expected a {D}x{D} matrix")
        if np.max(np.abs(A - A.conj().T), initial=0.0) > 1e-12 * max(1.0, np.max(np.abs(A))):
            raise ValueError("operator is not Hermitian")
        object.__setattr__(self, "ambient_shape", tuple(self.ambient_shape))
        object.__setattr__(self, "entries", A)

    def eigenvalues(self) -> np.ndarray:
        return np.linalg.eigvalsh(self.entries)


@dataclass(frozen=True, eq=False)
class DensityOperator:
    ambient_shape: tuple[int, ...]
    entries: np.ndarray = field(repr=False)

    def __post_init__(self):
        HermitianOperator(self.ambient_shape, self.entries)
        A = np.asarray(self.entries, dtype=complex)
        if abs(np.trace(A) - 1) > 1e-10:
            raise ValueError("density operator must have trace 1")
        if np.linalg.eigvalsh(A)[0] < -1e-10:
            raise ValueError("density operator must be positive semidefinite")
        object.__setattr__(self, "ambient_shape", tuple(self.ambient_shape))
        object.__setattr__(self, "entries", A)

    @classmethod
    def pure(cls, t: np.ndarray) -> "DensityOperator":
        v = np.asarray(t, dtype=complex).ravel()
        v = v / np.linalg.norm(v)
        return cls(np.shape(t), np.outer(v, v.conj()))

    @classmethod
    def maximally_mixed(cls, shape) -> "DensityOperator":
        D = int(np.prod(shape))
        return cls(tuple(shape), np.eye(D) / D)

    @classmethod
    def from_subspace(cls, sub: Subspace) -> "DensityOperator":
        """Normalized projector onto the subspace."""
        return cls(sub.ambient_shape, sub.projector() / sub.dim)


def build_witness(sub: Subspace, alpha: float) -> HermitianOperator:
    if alpha <= 0:
        raise ValueError("alpha must be positive")
    P = sub.projector()
    W = np.eye(P.shape[0]) - alpha * P
    return HermitianOperator(sub.ambient_shape, (W + W.conj().T) / 2)


def negative_eig_count(W, tol: float = NEG_EIG_TOL) -> int:
    if not isinstance(W, HermitianOperator):
        W = HermitianOperator((np.shape(W)[0],), W)
    return int(np.sum(W.eigenvalues() < -tol))


def detect(W: HermitianOperator, rho) -> float:
    """``Tr(W ρ)``; negative certifies Schmidt number above the witness's rank."""
    if not isinstance(rho, DensityOperator):
        rho = DensityOperator(W.ambient_shape, rho)
    return float(np.real(np.trace(W.entries @ rho.entries)))


@dataclass
class EpsilonReport:
    epsilon: float
    alpha: float
    r: int
    starts: int
    per_start: list[float]
    best_factors: list[np.ndarray] = field(repr=False)
    note: str = ("one-sided: epsilon is the best value found, a lower bound on the true maximum, "
                 "so alpha = 1/epsilon may exceed the largest valid alpha")

    def best_state(self) -> np.ndarray:
        r = self.best_factors[0].shape[1]
        return sum(outer_product([A[:, s] for A in self.best_factors]) for s in range(r))

    def to_dict(self) -> dict:
        return {"epsilon": self.epsilon, "alpha": self.alpha, "r": self.r, "starts": self.starts,
                "per_start": self.per_start, "note": self.note}


def _block_step(basis_conj_j: np.ndarray, Z: np.ndarray, d: int, r: int):
    """Best factor for one mode: maximize ‖Kx‖² / x^H (I⊗Z^H Z) x by an eigenproblem."""
    K = (basis_conj_j @ Z).reshape(basis_conj_j.shape[0], d * r)
    lam, U = np.linalg.eigh(Z.conj().T @ Z)
    keep = lam > 1e-12 * lam[-1]
    T1 = U[:, keep] / np.sqrt(lam[keep])
    T = np.kron(np.eye(d), T1)
    KT = K @ T
    w, Y = np.linalg.eigh(KT.conj().T @ KT)
    return (T @ Y[:, -1]).reshape(d, r), float(w[-1])


def _ascend(sub: Subspace, r: int, rng, max_iter: int, tol: float):
    shape = sub.ambient_shape
    m = len(shape)
    factors = [complex_normal(rng, (d, r)) for d in shape]
    moved = [np.moveaxis(sub.basis, j + 1, 1).reshape(sub.dim, shape[j], -1).conj() for j in range(m)]
    value = -np.inf
    for _ in range(max_iter):
        before = value
        for j in range(m):
            Z = None
            for l, A in enumerate(factors):
                if l != j:
                    Z = A if Z is None else (Z[:, None, :] * A[None, :, :]).reshape(-1, r)
            factors[j], value = _block_step(moved[j], Z, shape[j], r)
        if value - before <= tol:
            break
    # the ascent keeps ‖v‖ = 1 on the last updated block; renormalize explicitly
    v = sum(outer_product([A[:, s] for A in factors]) for s in range(r))
    scale = np.linalg.norm(v) ** (1.0 / m)
    factors = [A / scale for A in factors]
    return factors, value


def estimate_epsilon(sub: Subspace, r: int = 1, kind: str = "rank_r", starts: int = 256, seed: int = 0,
                     max_iter: int = 2000, tol: float = 1e-14) -> EpsilonReport:
    """Multistart block ascent for ``max ‖Pv‖²`` over unit ``v`` of tensor rank ≤ r.

    ``kind="product"`` forces ``r = 1``.  Each block step fixes all but one
    mode and solves the resulting Rayleigh quotient exactly.
    """
    if kind not in ("product", "rank_r"):
        raise ValueError("kind must be 'product' or 'rank_r'")
    if kind == "product":
        r = 1
    if starts < 1 or r < 1:
        raise ValueError("starts and r must be positive")
    if sub.dim == 0:
        raise ValueError("empty subspace")
    best, values = None, []
    for i in range(starts):
        factors, value = _ascend(sub, r, start_rng(seed, i), max_iter, tol)
        value = min(value, 1.0)
        values.append(value)
        if best is None or value > best[1]:
            best = (factors, value)
    eps = best[1]
    return EpsilonReport(eps, 1.0 / eps, r, starts, values, best[0])


@dataclass
class WitnessReport:
    alpha: float
    epsilon_estimate: float
    negative_eigs: int
    detection_examples: list[tuple[str, float]]
    note: str = ""

    def to_dict(self) -> dict:
        return {"alpha": self.alpha, "epsilon_estimate": self.epsilon_estimate,
                "negative_eigs": self.negative_eigs,
                "detection_examples": [[name, val] for name, val in self.detection_examples],
                "note": self.note}


def witness_report(sub: Subspace, r: int, starts: int = 256, seed: int = 0) -> WitnessReport:
    """Estimate ε, build ``W = I - P/ε̂`` and evaluate it on reference states."""
    est = estimate_epsilon(sub, r, "rank_r", starts, seed)
    W = build_witness(sub, est.alpha)
    examples = [
        ("normalized-projector", detect(W, DensityOperator.from_subspace(sub))),
        ("maximally-mixed", detect(W, DensityOperator.maximally_mixed(sub.ambient_shape))),
        ("best-rank-r-state", detect(W, DensityOperator.pure(est.best_state()))),
    ]
    return WitnessReport(est.alpha, est.epsilon, negative_eig_count(W), examples, est.note)
