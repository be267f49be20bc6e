"""Numerical evidence and exact certificates for r-entangledness.

The central quantity is the minor objective: for a unit element ``v`` of a
subspace, the sum over every flattening of ``v`` of all squared moduli of
``(r+1) × (r+1)`` minors.  It vanishes exactly when every flattening of ``v``
has rank at most ``r``, so a strictly positive minimum over the subspace
proves that no element has border rank at most ``r``.  A vanishing minimum is
only evidence of a low-flattening-rank element, which outside
``C^3 ⊗ C^3 ⊗ C^2`` with ``r = 2`` need not have border rank ``r``.
"""
from __future__ import annotations

import itertools
from collections.abc import Sequence
from dataclasses import asdict, dataclass, field

import numpy as np

from .constructions import BAD_QQQ_PARAMS, ConstructionParams, QQQ_SHAPE, qutrit_qutrit_qubit_element  # noqa: F401
from .grassmann import Subspace, random_subspace
from .secant_dims import VarietySpec
from .tensor_core import Symmetry, bipartitions, complex_normal, flatten, flattening_rank

TAU_ZERO = 1e-10
TAU_POS = 1e-6
VERDICT_RANK_TOL = 1e-6

NO_LOW_RANK = "no-low-rank-found"
LOW_RANK = "low-rank-element-found"
INCONCLUSIVE = "inconclusive"


def _elementary_symmetric(values: np.ndarray, k: int) -> float:
    e = np.zeros(k + 1)
    e[0] = 1.0
    for x in values:
        e[1:] = e[1:] + x * e[:-1]
    return float(e[k])


def minor_size(sub: Subspace, r: int) -> int:
    """Size of the minors whose vanishing characterizes rank ≤ r for this subspace's sector."""
    if r < 1:
        raise ValueError("r must be positive")
    if sub.symmetry is Symmetry.ANTISYMMETRIC:
        if len(sub.ambient_shape) != 2:
            raise NotImplementedError("flattening minors do not characterize antisymmetric rank for m >= 3")
        # an antisymmetric matrix of rank <= 2r is a sum of r decomposable wedges
        return 2 * r + 1
    return r + 1


def minor_sum(t: np.ndarray, k: int, gradient: bool = False):
    """``Σ_S Σ |k×k minors of flatten(t, S)|²``, and its conjugate Wirtinger gradient.

    Each flattening contributes ``e_k(σ_1², σ_2², ...)`` (Cauchy-Binet), whose
    derivative with respect to the conjugate matrix is ``U diag(g_i σ_i) V^H``
    with ``g_i = e_{k-1}`` of the squared singular values other than ``σ_i``.
    """
    shape = t.shape
    m = t.ndim
    value = 0.0
    grad = np.zeros(shape, dtype=complex) if gradient else None
    for S in bipartitions(m):
        A = flatten(t, S)
        if min(A.shape) < k:
            continue
        if not gradient:
            s = np.linalg.svd(A, compute_uv=False)
            value += _elementary_symmetric(s ** 2, k)
            continue
        U, s, Vh = np.linalg.svd(A, full_matrices=False)
        s2 = s ** 2
        value += _elementary_symmetric(s2, k)
        g = np.array([_elementary_symmetric(np.delete(s2, i), k - 1) for i in range(len(s2))])
        dA = (U * (g * s)) @ Vh
        comp = tuple(i for i in range(m) if i not in S)
        perm = tuple(S) + comp
        grad += dA.reshape([shape[i] for i in perm]).transpose(np.argsort(perm))
    return (value, grad) if gradient else value


def minor_objective(sub: Subspace, r: int, coeffs, gradient: bool = False):
    """Minor objective at the unit-normalized element with coefficients ``coeffs``.

    With ``gradient=True`` also returns the complex gradient
    ``∂f/∂Re(c) + i ∂f/∂Im(c)`` with respect to the coefficient vector.
    """
    c = np.asarray(coeffs, dtype=complex)
    if c.shape != (sub.dim,):
        raise ValueError(f"expected {sub.dim} coefficients")
    u = sub.matrix @ c
    norm2 = float(np.vdot(u, u).real)
    if norm2 == 0:
        raise ValueError("coefficients must be nonzero")
    k = minor_size(sub, r)
    t = u.reshape(sub.ambient_shape)
    if not gradient:
        return minor_sum(t, k) / norm2 ** k
    F, G = minor_sum(t, k, gradient=True)
    f = F / norm2 ** k
    grad_u = G.ravel() / norm2 ** k - k * F / norm2 ** (k + 1) * u
    return f, 2.0 * (sub.matrix.conj().T @ grad_u)


@dataclass(frozen=True)
class SearchOptions:
    max_iter: int = 2000
    rel_decrease_tol: float = 1e-14
    value_floor: float = 1e-30
    tau_zero: float = TAU_ZERO
    tau_pos: float = TAU_POS
    rank_tol: float = VERDICT_RANK_TOL
    stop_on_hit: bool = False


@dataclass(frozen=True)
class StartRecord:
    seed: tuple[int, int]
    value: float
    iterations: int
    converged: bool


@dataclass
class OptimizationReport:
    best_value: float
    best_point: np.ndarray
    starts: int
    per_start: list[StartRecord]
    verdict: str
    note: str = ""

    def best_element(self, sub: Subspace) -> np.ndarray:
        return sub.element(self.best_point)

    def to_dict(self) -> dict:
        return {
            "best_value": self.best_value,
            "best_point": [[float(z.real), float(z.imag)] for z in self.best_point],
            "starts": self.starts,
            "per_start": [asdict(s) for s in self.per_start],
            "verdict": self.verdict,
            "note": self.note,
        }


def descend_on_sphere(fun, c0: np.ndarray, max_iter: int = 2000, rel_decrease_tol: float = 1e-14,
                      value_floor: float = 0.0):
    """Gradient descent with Armijo backtracking on the unit sphere of C^k.

    ``fun(c)`` returns ``(value, complex_gradient)``.  The step doubles after
    each accepted move.  Returns ``(c, value, iterations, converged)``.
    """
    c = c0 / np.linalg.norm(c0)
    f, g = fun(c)
    step = 1.0
    for it in range(1, max_iter + 1):
        gn = float(np.vdot(g, g).real)
        if gn == 0.0 or f <= value_floor:
            return c, f, it - 1, True
        while True:
            trial = c - step * g
            trial = trial / np.linalg.norm(trial)
            ft, gt = fun(trial)
            if ft <= f - 1e-4 * step * gn or step < 1e-20:
                break
            step *= 0.5
        decrease = f - ft
        if ft <= f:
            c, f, g = trial, ft, gt
        step *= 2.0
        if decrease <= rel_decrease_tol * f:
            return c, f, it, True
    return c, f, max_iter, False


def start_rng(seed: int, index: int) -> np.random.Generator:
    """Independent stream for one start, so results do not depend on execution order."""
    return np.random.default_rng([int(seed), int(index)])


def search_low_rank_element(sub: Subspace, r: int, starts: int = 64, seed: int = 0,
                            opts: SearchOptions = SearchOptions()) -> OptimizationReport:
    """Multistart minimization of :func:`minor_objective` over the coefficient sphere.

    The verdict ``no-low-rank-found`` is heuristic evidence for
    r-entangledness, not a proof.
    """
    if starts < 1:
        raise ValueError("starts must be >= 1")
    k = minor_size(sub, r)
    fun = lambda c: minor_objective(sub, r, c, gradient=True)  # noqa: E731
    records, best_value, best_point = [], np.inf, None
    for i in range(starts):
        c0 = complex_normal(start_rng(seed, i), sub.dim)
        c, f, iters, conv = descend_on_sphere(fun, c0, opts.max_iter, opts.rel_decrease_tol, opts.value_floor)
        records.append(StartRecord((int(seed), i), float(f), iters, conv))
        if f < best_value:  # strict: ties keep the lowest start index
            best_value, best_point = float(f), c
        if opts.stop_on_hit and best_value < opts.tau_zero:
            break
    if best_value > opts.tau_pos:
        verdict = NO_LOW_RANK
    elif best_value < opts.tau_zero and flattening_rank(sub.element(best_point), opts.rank_tol) <= k - 1:
        verdict = LOW_RANK
    else:
        verdict = INCONCLUSIVE
    if verdict == NO_LOW_RANK:
        note = "heuristic evidence only: a nonconvex search found no element with every flattening of rank <= r"
    elif verdict == LOW_RANK:
        note = "found an element whose flattenings all have rank <= r"
    else:
        note = "best objective value lies between the zero and positive thresholds"
    return OptimizationReport(best_value, best_point, len(records), records, verdict, note)


@dataclass(frozen=True)
class AlsOptions:
    max_iter: int = 2000
    tol: float = 1e-14
    # Component norms relative to norm(t).  Near a border-rank limit the
    # residual falls like norm**-2 while cancellation costs norm * eps, so
    # caps much beyond 1e3 are out of reach in double precision.
    cap: float = 1e2
    restarts: int = 3
    seed: int = 0
    refine_nfev: int = 1000


@dataclass
class AlsResult:
    approx: np.ndarray
    residual: float
    diverged: bool
    factors: list[np.ndarray]
    iterations: int
    max_component_norm: float


def _others_khatri_rao(factors: list[np.ndarray], skip: int) -> np.ndarray:
    """Rows indexed by the other modes in increasing order (last fastest), one column per component."""
    out = None
    for j, A in enumerate(factors):
        if j == skip:
            continue
        out = A if out is None else (out[:, None, :] * A[None, :, :]).reshape(-1, A.shape[1])
    return out


def _reconstruct(factors: list[np.ndarray]) -> np.ndarray:
    r = factors[0].shape[1]
    shape = tuple(A.shape[0] for A in factors)
    flat = factors[0]
    for A in factors[1:]:
        flat = (flat[:, None, :] * A[None, :, :]).reshape(-1, r)
    return flat.sum(axis=1).reshape(shape)


def _component_norms(factors: list[np.ndarray]) -> np.ndarray:
    return np.prod([np.linalg.norm(A, axis=0) for A in factors], axis=0)


def _rebalance(factors: list[np.ndarray]) -> list[np.ndarray]:
    """Give every factor the same share of each component's norm."""
    norms = np.array([np.linalg.norm(A, axis=0) for A in factors])
    target = np.prod(norms, axis=0) ** (1.0 / len(factors))
    scale = np.where(norms > 0, target / np.where(norms > 0, norms, 1.0), 1.0)
    return [A * s for A, s in zip(factors, scale)]


def _relres(t, factors) -> float:
    return float(np.linalg.norm(t - _reconstruct(factors)) / np.linalg.norm(t))


def _levenberg_marquardt(t, factors, max_nfev):
    from scipy.optimize import least_squares

    shape, r = t.shape, factors[0].shape[1]
    n = sum(shape) * r

    def unpack(x):
        z = x[:n] + 1j * x[n:]
        out, o = [], 0
        for d in shape:
            out.append(z[o:o + d * r].reshape(d, r))
            o += d * r
        return out

    def fun(x):
        e = (_reconstruct(unpack(x)) - t).ravel()
        return np.concatenate([e.real, e.imag])

    z0 = np.concatenate([A.ravel() for A in factors])
    sol = least_squares(fun, np.concatenate([z0.real, z0.imag]), method="trf",
                        xtol=1e-15, ftol=1e-15, gtol=1e-15, max_nfev=max_nfev)
    return _rebalance(unpack(sol.x))


def _als_once(t, r, rng, opts):
    factors = [complex_normal(rng, (d, r)) for d in t.shape]
    unfoldings = [np.moveaxis(t, j, 0).reshape(t.shape[j], -1) for j in range(t.ndim)]
    prev = np.inf
    it = 0
    for it in range(1, opts.max_iter + 1):
        for j in range(t.ndim):
            Z = _others_khatri_rao(factors, j)
            factors[j] = np.linalg.lstsq(Z, unfoldings[j].T, rcond=None)[0].T
        factors = _rebalance(factors)
        res = _relres(t, factors)
        if res < 1e-15 or abs(prev - res) <= opts.tol * max(res, 1e-300):
            break
        prev = res
    if _relres(t, factors) > 1e-12 and opts.refine_nfev > 0:
        # ALS crawls through swamps; a joint Levenberg-Marquardt polish moves much faster
        factors = _levenberg_marquardt(t, factors, opts.refine_nfev)
    return factors, _relres(t, factors), it


def als_rank_r_approx(t: np.ndarray, r: int, opts: AlsOptions = AlsOptions()) -> AlsResult:
    """Best rank-r CP approximation found by complex alternating least squares.

    ALS sweeps are followed by a Levenberg-Marquardt polish when the residual
    stalls above 1e-12.  ``residual`` is relative to ``norm(t)``.  ``diverged``
    is set when some component's norm exceeds ``cap · norm(t)``: the fit is
    chasing a limit of rank-r tensors (border rank below tensor rank).
    """
    t = np.asarray(t, dtype=complex)
    if r < 1:
        raise ValueError("r must be positive")
    if not np.any(t):
        raise ValueError("zero tensor")
    best = None
    for attempt in range(max(1, opts.restarts)):
        factors, res, its = _als_once(t, r, np.random.default_rng([opts.seed, attempt]), opts)
        if best is None or res < best[1]:
            best = (factors, res, its)
        if res < 1e-12:
            break
    factors, res, its = best
    norm = float(np.max(_component_norms(factors)) / np.linalg.norm(t))
    return AlsResult(_reconstruct(factors), res, norm > opts.cap, factors, its, norm)


# Exact certificate for the qutrit-qutrit-qubit construction.

FLATTENING = "M"
PARTIAL_TRANSPOSE = "M_partial_transpose"


class NoCertificateError(ValueError):
    """No nonvanishing 3×3 minor among the designated candidates."""


@dataclass(frozen=True)
class CertificateResult:
    matrix_choice: str
    columns: tuple[int, int, int]  # 1-based
    case_label: str
    determinant: complex

    def submatrix(self, t: np.ndarray) -> np.ndarray:
        M = qqq_flattenings(t)[0 if self.matrix_choice == FLATTENING else 1]
        return M[:, [c - 1 for c in self.columns]]

    def to_dict(self) -> dict:
        return {"matrix_choice": self.matrix_choice, "columns": list(self.columns),
                "case_label": self.case_label,
                "determinant": [float(self.determinant.real), float(self.determinant.imag)]}


def qqq_flattenings(t: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """The 3×6 flattening ``M[i, 3k+j] = t[i,j,k]`` and its partial transpose ``M^Γ[j, 3k+i] = t[i,j,k]``."""
    t = np.asarray(t, dtype=complex)
    if t.shape != QQQ_SHAPE:
        raise ValueError("expected a tensor of shape (3, 3, 2)")
    return t.transpose(0, 2, 1).reshape(3, 6), t.transpose(1, 2, 0).reshape(3, 6)


def _det(mat: np.ndarray, cols) -> complex:
    return complex(np.linalg.det(mat[:, [c - 1 for c in cols]]))


def check_genericity(params: ConstructionParams, tol: float = 1e-12) -> None:
    """Every nonzero combination of δ, ε (and of θ, κ) must have at most one zero entry."""
    for name, pair in (("delta/epsilon", (params.delta, params.epsilon)), ("theta/kappa", (params.theta, params.kappa))):
        P = np.array(pair, dtype=complex).T
        scale = np.max(np.abs(P))
        for i, j in itertools.combinations(range(4), 2):
            if abs(np.linalg.det(P[[i, j]])) <= tol * scale ** 2:
                raise ValueError(f"{name} combinations can vanish in two entries (rows {i + 1}, {j + 1})")


def appendix_certificate(lam, gamma, c_de: Sequence, c_tk: Sequence,
                         params: ConstructionParams = ConstructionParams(), zero_tol: float = 1e-10) -> CertificateResult:
    """Walk the case tree on the zero pattern of (λ, γ, α, β) and return a rank-3 witness minor.

    ``α = c_de[0]·δ + c_de[1]·ε`` and ``β = c_tk[0]·θ + c_tk[1]·κ``.  Entries
    below ``zero_tol`` times the largest entry count as zero.  Raises
    :class:`NoCertificateError` when the designated minors all vanish.
    """
    check_genericity(params)
    lam, gamma = complex(lam), complex(gamma)
    alpha = np.asarray(c_de, dtype=complex) @ np.array([params.delta, params.epsilon], dtype=complex)
    beta = np.asarray(c_tk, dtype=complex) @ np.array([params.theta, params.kappa], dtype=complex)
    scale = max(abs(lam), abs(gamma), np.max(np.abs(alpha)), np.max(np.abs(beta)))
    if scale == 0:
        raise ValueError("all-zero input")
    t = qutrit_qutrit_qubit_element(lam, gamma, c_de, c_tk, params)
    M, MG = qqq_flattenings(t)

    def nz(x):
        return abs(x) > zero_tol * scale

    # a[1..4], b[1..4] with 1-based access matching the case tables
    a = {i + 1: alpha[i] for i in range(4)}
    b = {i + 1: beta[i] for i in range(4)}
    label, candidates = _walk(nz, lam, gamma, a, b)
    mats = {FLATTENING: M, PARTIAL_TRANSPOSE: MG}
    scored = [(abs(_det(mats[ch], cols)), ch, cols) for ch, cols in candidates]
    best = max(scored, key=lambda s: s[0])
    if best[0] <= zero_tol * scale ** 3:
        raise NoCertificateError(f"case {label}: every designated 3x3 minor vanishes")
    _, ch, cols = best
    return CertificateResult(ch, tuple(cols), label, _det(mats[ch], cols))


def _swap(choice: str) -> str:
    return PARTIAL_TRANSPOSE if choice == FLATTENING else FLATTENING


def _case3b(nz, gamma, a, b, prefix, flat):
    """Case 3(b) on the matrix ``flat`` (its mirror 3(c) passes the partial transpose and relabeled entries)."""
    pt = _swap(flat)
    if not nz(a[4]):
        return (f"{prefix}(i)", [(flat, (1, 3, 4))]) if not nz(gamma) else (f"{prefix}(ii)", [(pt, (4, 5, 6))])
    if not nz(gamma):
        return f"{prefix}(iii)", [(flat, (2, 3, 6))]
    if nz(a[2]):
        return f"{prefix}(iv)", [(pt, (2, 3, 5))]
    return f"{prefix}(v)", [(pt, (1, 2, 3)), (pt, (4, 5, 6)), (pt, (3, 4, 6))]


def _walk(nz, lam, gamma, a, b):
    F, G = FLATTENING, PARTIAL_TRANSPOSE
    alpha_zero = not any(nz(a[i]) for i in range(1, 5))
    if not nz(lam):
        if nz(a[1]) and nz(a[2]) and nz(a[3]):
            return "1(a)", [(F, (1, 2, 4))]
        if nz(a[1]) and nz(a[2]) and nz(a[4]):
            return "1(b)", [(G, (1, 2, 4))]
        if nz(a[1]) and nz(a[3]) and nz(a[4]):
            return ("1(c)(i)", [(G, (1, 4, 6))]) if not nz(gamma) else ("1(c)(ii)", [(F, (2, 4, 5))])
        if nz(a[2]) and nz(a[3]) and nz(a[4]):
            return ("1(d)(i)", [(F, (1, 4, 6))]) if not nz(gamma) else ("1(d)(ii)", [(G, (2, 4, 5))])
        if not alpha_zero:
            raise ValueError("genericity violated: alpha has exactly one or two nonzero entries")
        if not nz(gamma):
            # 180-degree rotation of Cases 1(a)-(d) with beta in place of alpha
            if nz(b[1]) and nz(b[4]) and nz(b[2]):
                return "1(e)(i)", [(F, (1, 3, 6))]
            if nz(b[1]) and nz(b[4]) and nz(b[3]):
                return "1(e)(i)", [(F, (3, 5, 6))]
            if nz(b[1]) and nz(b[2]) and nz(b[3]):
                return "1(e)(i)", [(G, (1, 3, 6))]
            if nz(b[2]) and nz(b[3]) and nz(b[4]):
                return "1(e)(i)", [(G, (3, 5, 6))]
            raise ValueError("all-zero input")
        if nz(b[1]):
            return "1(e)(ii)", [(G, (1, 4, 5))]
        if nz(b[2]) and nz(b[3]) and nz(b[4]):
            return "1(e)(iii)", [(F, (1, 4, 6))]
        # beta = 0 leaves gamma times the identity on the second block
        return "1(e)(iv)", [(F, (4, 5, 6))]
    if alpha_zero:
        if not nz(b[3]) and not nz(b[4]):
            return "2(a)", [(F, (1, 2, 3))]
        if nz(b[3]):
            return ("2(b)(i)", [(F, (1, 2, 5))]) if not nz(gamma) else ("2(b)(ii)", [(F, (2, 4, 6))])
        return ("2(c)(i)", [(G, (1, 2, 5))]) if not nz(gamma) else ("2(c)(ii)", [(F, (2, 4, 6))])
    if not nz(b[3]) and not nz(b[4]):
        if nz(a[3]):
            return "3(a)(i)", [(G, (2, 3, 6))]
        return "3(a)(ii)", [(F, (2, 3, 6))]
    if nz(b[3]) and not nz(b[4]):
        return _case3b(nz, gamma, a, b, "3(b)", F)
    if not nz(b[3]) and nz(b[4]):
        # partial transpose exchanges alpha_1<->alpha_2, alpha_3<->alpha_4 and likewise for beta
        ma = {1: a[2], 2: a[1], 3: a[4], 4: a[3]}
        mb = {1: b[2], 2: b[1], 3: b[4], 4: b[3]}
        return _case3b(nz, gamma, ma, mb, "3(c)", G)
    if not nz(a[4]):
        return ("3(d)(i)", [(F, (1, 4, 6))]) if not nz(gamma) else ("3(d)(ii)", [(G, (3, 4, 5))])
    if not nz(b[2]):
        if nz(gamma):
            return "3(d)(iii)", [(G, (3, 4, 5))]
        if not nz(a[3]):
            return "3(d)(iv)", [(G, (1, 3, 6))]
        return "3(d)(v)", [(F, (2, 3, 4))]
    if not nz(gamma):
        return "3(d)(vi)", [(G, (2, 3, 4))]
    # 3(d)(vii): beta_3 != 0 throughout Case 3(d), so only two subcases are reachable
    if not nz(a[1]):
        return "3(d)(vii)", [(F, (2, 4, 5))]
    return "3(d)(vii)", [(F, (2, 3, 6)), (G, (1, 4, 5))]


def brute_force_rank3_certificate(t: np.ndarray, tol: float = 1e-8) -> CertificateResult | None:
    """Largest 3×3 minor over all column triples of M and M^Γ, or ``None`` if all are ≤ tol."""
    M, MG = qqq_flattenings(t)
    best = None
    for choice, mat in ((FLATTENING, M), (PARTIAL_TRANSPOSE, MG)):
        for cols in itertools.combinations(range(1, 7), 3):
            det = _det(mat, cols)
            if best is None or abs(det) > abs(best[2]):
                best = (choice, cols, det)
    if abs(best[2]) <= tol:
        return None
    return CertificateResult(best[0], best[1], "brute-force", best[2])


@dataclass
class DisjointnessStats:
    codim: int
    affine_dim: int
    trials: int
    hits: int
    best_values: list[float] = field(default_factory=list)

    @property
    def misses(self) -> int:
        return self.trials - self.hits

    def to_dict(self) -> dict:
        return {"codim": self.codim, "affine_dim": self.affine_dim, "trials": self.trials,
                "hits": self.hits, "misses": self.misses, "best_values": self.best_values}


_SECTOR = {"segre": Symmetry.NONE, "veronese": Symmetry.SYMMETRIC, "grassmannian": Symmetry.ANTISYMMETRIC}


def generic_disjointness_trial(spec: VarietySpec, codim: int, trials: int = 20, seed: int = 0,
                               starts: int = 16, opts: SearchOptions = SearchOptions(stop_on_hit=True)) -> DisjointnessStats:
    """Count how often a random projective plane of codimension ``codim`` meets σ_r.

    Meeting is detected by :func:`search_low_rank_element`; a miss is
    heuristic (the search may fail to find an intersection point).
    """
    if trials < 1:
        raise ValueError("trials must be >= 1")
    if spec.kind == "segre":
        shape = spec.dims
    else:
        d, m = spec.dims
        shape = (d,) * m
    affine_dim = spec.ambient_affine_dim - codim
    if not 1 <= affine_dim <= spec.ambient_affine_dim:
        raise ValueError("codimension out of range")
    hits, values = 0, []
    for i in range(trials):
        rng = start_rng(seed, i)
        sub = random_subspace(shape, affine_dim, _SECTOR[spec.kind], seed=rng)
        rep = search_low_rank_element(sub, spec.r, starts=starts, seed=int(rng.integers(2 ** 31)), opts=opts)
        hits += rep.verdict == LOW_RANK
        values.append(rep.best_value)
    return DisjointnessStats(codim, affine_dim, trials, hits, values)
