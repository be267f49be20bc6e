"""Local unambiguous state discrimination (LUSD) certificates.

States ``v_1..v_n`` can be discriminated locally with a resource whose SLOCC
image is ``X`` exactly when there are duals ``u_1..u_n ∈ X`` with
``u_a^T v_b ≠ 0 ⟺ a = b``.  Supported images: product states (no resource),
tensor rank ≤ r (GHZ resource of rank r) and Schmidt rank ≤ r (bipartite
entangled resource).
"""
from __future__ import annotations

import math
from collections.abc import Sequence
from dataclasses import dataclass, field

import numpy as np

from .secant_dims import Resource, lusd_generic_count
from .tensor_core import complex_normal, flatten, outer_product, random_tensor
from .verification import AlsOptions, als_rank_r_approx

TAU_DIAG = 1e-6
TAU_OFF = 1e-8
TAU_RANK = 1e-8


@dataclass(frozen=True)
class LusdTolerances:
    diag: float = TAU_DIAG
    off: float = TAU_OFF
    rank: float = TAU_RANK


@dataclass(frozen=True, eq=False)
class LusdInstance:
    local_dims: tuple[int, ...]
    states: tuple[np.ndarray, ...] = field(repr=False)
    resource: Resource = Resource()

    def __post_init__(self):
        dims = tuple(int(d) for d in self.local_dims)
        states = tuple(np.asarray(s, dtype=complex) for s in self.states)
        for s in states:
            if s.shape != dims:
                raise ValueError(f"state shape {s.shape} does not match local dims {dims}")
            if not np.any(s):
                raise ValueError("states must be nonzero")
        resource = self.resource if isinstance(self.resource, Resource) else Resource.parse(str(self.resource))
        if resource.kind == "schmidt" and len(dims) != 2:
            raise ValueError("a Schmidt-rank resource needs a bipartite space")
        object.__setattr__(self, "local_dims", dims)
        object.__setattr__(self, "states", states)
        object.__setattr__(self, "resource", resource)

    @property
    def n(self) -> int:
        return len(self.states)

    @property
    def rank_bound(self) -> int:
        return self.resource.r

    @classmethod
    def random(cls, local_dims: Sequence[int], n: int, resource: Resource = Resource(), seed=None) -> "LusdInstance":
        rng = np.random.default_rng(seed)
        return cls(tuple(local_dims), tuple(random_tensor(local_dims, rng) for _ in range(n)), resource)


@dataclass
class DualCertificate:
    duals: list[np.ndarray] = field(repr=False)
    pairing: np.ndarray
    rank_residuals: list[float]
    passed: bool
    failures: list[str]

    def to_dict(self) -> dict:
        return {
            "passed": self.passed,
            "failures": self.failures,
            "pairing": [[[float(z.real), float(z.imag)] for z in row] for row in self.pairing],
            "rank_residuals": self.rank_residuals,
            "duals": [{"shape": list(u.shape), "data": [[float(z.real), float(z.imag)] for z in u.ravel()]}
                      for u in self.duals],
        }


def _unit(t: np.ndarray) -> np.ndarray:
    return t / np.linalg.norm(t)


def rank_residual(u: np.ndarray, resource: Resource, als_opts: AlsOptions = AlsOptions()) -> float:
    """Relative distance from ``u`` to the resource's SLOCC image."""
    if resource.kind == "schmidt":
        s = np.linalg.svd(flatten(u, [0]), compute_uv=False)
        return float(np.sqrt(np.sum(s[resource.r:] ** 2)) / np.linalg.norm(s))
    return als_rank_r_approx(u, resource.r, als_opts).residual


def check_certificate(inst: LusdInstance, duals: Sequence, tols: LusdTolerances = LusdTolerances(),
                      hermitian: bool = False, als_opts: AlsOptions = AlsOptions()) -> tuple[bool, DualCertificate]:
    """Verify the sign pattern of the pairing and each dual's membership in the image.

    The pairing is bilinear ``u^T v`` by default and ``u^* v`` with
    ``hermitian=True``; both images used here are closed under conjugation, so
    the membership test is the same.  Everything is unit-normalized first.
    """
    if len(duals) != inst.n:
        raise ValueError("need exactly one dual per state")
    us = [np.asarray(u, dtype=complex) for u in duals]
    for u in us:
        if u.shape != inst.local_dims:
            raise ValueError("dual shape does not match the instance")
        if not np.any(u):
            raise ValueError("duals must be nonzero")
    U = np.array([_unit(u).ravel() for u in us])
    V = np.array([_unit(v).ravel() for v in inst.states])
    pairing = (U.conj() if hermitian else U) @ V.T
    failures = []
    n = inst.n
    for a in range(n):
        if abs(pairing[a, a]) <= tols.diag:
            failures.append(f"diagonal pairing {a} is {abs(pairing[a, a]):.3g} <= {tols.diag:g}")
        for b in range(n):
            if a != b and abs(pairing[a, b]) >= tols.off:
                failures.append(f"off-diagonal pairing ({a},{b}) is {abs(pairing[a, b]):.3g} >= {tols.off:g}")
    residuals = [rank_residual(_unit(u), inst.resource, als_opts) for u in us]
    for a, res in enumerate(residuals):
        if res >= tols.rank:
            failures.append(f"dual {a} is outside the resource image (residual {res:.3g})")
    cert = DualCertificate(us, pairing, residuals, not failures, failures)
    return cert.passed, cert


def _contract_except(V: np.ndarray, vecs: list[np.ndarray], keep: int) -> np.ndarray:
    """Contract modes ``j != keep`` of each state in the stack ``V`` with ``vecs[j]``: shape ``(n, d_keep)``."""
    out = V
    for j in range(len(vecs) - 1, -1, -1):
        if j != keep:
            out = np.tensordot(out, vecs[j], axes=([j + 1], [0]))
    return out


def _residual_and_jacobian(V, factors, target):
    n, m, r = V.shape[0], len(factors), factors[0].shape[1]
    f = -target.astype(complex)
    blocks = []
    for s in range(r):
        vecs = [A[:, s] for A in factors]
        f = f + _contract_except(V, vecs, 0) @ vecs[0]
        blocks.append([_contract_except(V, vecs, j) for j in range(m)])
    # columns ordered mode by mode, each mode's (d_j, r) factor in row-major order
    J = np.concatenate([np.stack([blocks[s][j] for s in range(r)], axis=2).reshape(n, -1) for j in range(m)], axis=1)
    return f, J


def _solve_dual(V, a, shape, r, rng, max_iter=300):
    n = V.shape[0]
    target = np.zeros(n)
    target[a] = 1.0
    factors = [complex_normal(rng, (d, r)) / math.sqrt(d) for d in shape]
    f, J = _residual_and_jacobian(V, factors, target)
    cost = float(np.vdot(f, f).real)
    mu = 1e-3
    for _ in range(max_iter):
        if cost < 1e-28:
            break
        JH = J.conj().T
        A = JH @ J
        g = JH @ f
        improved = False
        for _ in range(30):
            step = np.linalg.solve(A + mu * np.eye(A.shape[0]), -g)
            trial, o = [], 0
            for F in factors:
                trial.append(F + step[o:o + F.size].reshape(F.shape))
                o += F.size
            ft, Jt = _residual_and_jacobian(V, trial, target)
            ct = float(np.vdot(ft, ft).real)
            if ct < cost:
                factors, f, J, cost = trial, ft, Jt, ct
                mu = max(mu / 3, 1e-12)
                improved = True
                break
            mu *= 4
        if not improved:
            break
    u = sum(outer_product([F[:, s] for F in factors]) for s in range(r)) if np.any(factors[0]) else None
    return u, cost


@dataclass
class DualSearchReport:
    success: bool
    certificate: DualCertificate | None
    best_residuals: list[float]
    failed: list[int]
    note: str = ""

    def to_dict(self) -> dict:
        return {"success": self.success, "failed": self.failed, "best_residuals": self.best_residuals,
                "certificate": None if self.certificate is None else self.certificate.to_dict(),
                "note": self.note}


def find_duals(inst: LusdInstance, starts: int = 8, seed: int = 0, tols: LusdTolerances = LusdTolerances(),
               als_opts: AlsOptions = AlsOptions()) -> DualSearchReport:
    """Search each dual as a rank-r tensor solving ``u^T v_b = δ_ab``, then verify.

    Each dual is fitted by damped Gauss-Newton on the holomorphic residual
    over its rank-r factors, from ``starts`` random points.  The affine
    normalization ``u^T v_a = 1`` excludes ``u = 0``.  A failed search is
    evidence, not proof, that no dual exists.
    """
    if inst.n < 1:
        raise ValueError("need at least one state")
    V = np.array([_unit(v) for v in inst.states])
    n = inst.n
    duals, best_res, failed = [], [], []
    for a in range(n):
        best = (None, np.inf)
        for i in range(starts):
            u, cost = _solve_dual(V, a, inst.local_dims, inst.rank_bound, np.random.default_rng([seed, a, i]))
            if u is None or not np.any(u):
                continue
            un = _unit(u)
            pair = V.reshape(n, -1) @ un.ravel()
            off = float(np.sqrt(np.sum(np.abs(np.delete(pair, a)) ** 2)))
            if off < best[1] and abs(pair[a]) > tols.diag:
                best = (un, off)
            if off < tols.off:
                break
        if best[0] is None or best[1] >= tols.rank * n:
            failed.append(a)
        duals.append(best[0])
        best_res.append(float(best[1]))
    if failed:
        return DualSearchReport(False, None, best_res, failed,
                                "no dual found for some states; heuristic evidence that none exists")
    ok, cert = check_certificate(inst, duals, tols, als_opts=als_opts)
    return DualSearchReport(ok, cert, best_res, [], "" if ok else "; ".join(cert.failures))


def complement_direction_rank(states: Sequence[np.ndarray], resource: Resource, tol: float = 1e-8):
    """Rank of the bilinear complement direction when ``span(states)^⊥`` is one-dimensional.

    Returns ``(rank, conclusive)``.  ``conclusive`` is True when the rank
    certifies that no dual orthogonal to all ``states`` lies in the image:
    Schmidt rank for bipartite resources, flattening rank > 1 for none.
    Returns ``(None, False)`` if the complement is not a single line.
    """
    A = np.array([np.asarray(s, dtype=complex).ravel() for s in states])
    shape = np.shape(states[0])
    _, sv, Vh = np.linalg.svd(A, full_matrices=True)
    rank = int(np.sum(sv > tol * sv[0]))
    if A.shape[1] - rank != 1:
        return None, False
    w = Vh[-1].conj().reshape(shape)  # A @ w = 0 in the bilinear sense
    if len(shape) == 2:
        k = int(np.sum(np.linalg.svd(w, compute_uv=False) > tol))
        return k, k > resource.r
    from .tensor_core import flattening_rank

    k = flattening_rank(w, tol)
    return k, resource.kind == "none" and k > 1


@dataclass
class ThresholdStats:
    local_dims: tuple[int, ...]
    resource: str
    n_star: int
    trials: int
    success_at_n_star: int
    success_above: int
    conclusive_failures_above: int
    note: str = ""

    def to_dict(self) -> dict:
        return {"local_dims": list(self.local_dims), "resource": self.resource, "n_star": self.n_star,
                "trials": self.trials, "success_at_n_star": self.success_at_n_star,
                "success_above": self.success_above,
                "conclusive_failures_above": self.conclusive_failures_above, "note": self.note}


def threshold_demo(local_dims: Sequence[int], resource: Resource = Resource(), trials: int = 50, seed: int = 0,
                   starts: int = 8) -> ThresholdStats:
    """Run :func:`find_duals` on random states at ``n*`` and ``n* + 1``.

    ``n* = dim(image closure) + 1`` is the largest count for which generic
    states admit duals.  Failures at ``n* + 1`` are heuristic unless the
    complement of ``n*`` of the states is a single direction whose rank
    excludes it from the image, which is checked for every trial.
    """
    if trials < 1:
        raise ValueError("trials must be >= 1")
    dims = tuple(local_dims)
    n_star = lusd_generic_count(dims, resource).value
    ok_star = ok_above = conclusive = 0
    for t in range(trials):
        for n in (n_star, n_star + 1):
            inst = LusdInstance.random(dims, n, resource, seed=[seed, t, n])
            rep = find_duals(inst, starts=starts, seed=int(np.random.default_rng([seed, t, n]).integers(2 ** 31)))
            if n == n_star:
                ok_star += rep.success
            else:
                ok_above += rep.success
                _, sure = complement_direction_rank(inst.states[1:], resource)
                conclusive += sure
    if conclusive == trials:
        note = "every failure at n*+1 is conclusive: the complement direction lies outside the resource image"
    else:
        note = "failures at n*+1 are heuristic evidence (nonconvex search)"
    return ThresholdStats(dims, str(resource), n_star, trials, ok_star, ok_above, conclusive, note)
