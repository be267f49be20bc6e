"""Closed-form dimension counts for secant varieties and what follows from them.

All dimensions are projective unless stated otherwise.  Values that rest on a
printed closed formula are tagged ``exact``; everything else falls back to
the expected dimension ``min{D, r·dim X + r - 1}`` and is tagged
``expected-conjectural``.
"""
from __future__ import annotations

import math
from collections.abc import Sequence
from dataclasses import asdict, dataclass

EXACT = "exact"
EXPECTED = "expected-conjectural"

KINDS = ("segre", "veronese", "grassmannian")


@dataclass(frozen=True)
class DimReport:
    value: int
    status: str
    formula: str

    def __post_init__(self):
        if self.value < -1:
            raise ValueError("dimension below -1")
        if self.status not in (EXACT, EXPECTED):
            raise ValueError(f"unknown status {self.status!r}")

    def to_dict(self) -> dict:
        return asdict(self)


@dataclass(frozen=True)
class VarietySpec:
    """Which secant variety: ``segre`` takes ``dims=(d_1..d_m)``; ``veronese`` and
    ``grassmannian`` take ``dims=(d, m)``."""

    kind: str
    dims: tuple[int, ...]
    r: int = 1

    def __post_init__(self):
        object.__setattr__(self, "dims", tuple(int(x) for x in self.dims))
        if self.kind not in KINDS:
            raise ValueError(f"unknown variety kind {self.kind!r}")
        if self.r < 1:
            raise ValueError("r must be a positive integer")
        if any(x < 1 for x in self.dims) or not self.dims:
            raise ValueError("all dimensions must be positive")
        if self.kind != "segre":
            if len(self.dims) != 2:
                raise ValueError(f"{self.kind} takes dims=(d, m)")
            d, m = self.dims
            if self.kind == "grassmannian" and m > d:
                raise ValueError("grassmannian needs m <= d")

    @classmethod
    def segre(cls, dims: Sequence[int], r: int = 1) -> "VarietySpec":
        return cls("segre", tuple(dims), r)

    @classmethod
    def veronese(cls, d: int, m: int, r: int = 1) -> "VarietySpec":
        return cls("veronese", (d, m), r)

    @classmethod
    def grassmannian(cls, d: int, m: int, r: int = 1) -> "VarietySpec":
        return cls("grassmannian", (d, m), r)

    @property
    def ambient_affine_dim(self) -> int:
        if self.kind == "segre":
            return math.prod(self.dims)
        d, m = self.dims
        if self.kind == "veronese":
            return math.comb(d + m - 1, m)
        return math.comb(d, m)

    @property
    def variety_dim(self) -> int:
        if self.kind == "segre":
            return sum(d - 1 for d in self.dims)
        d, m = self.dims
        return d - 1 if self.kind == "veronese" else m * (d - m)


def _comb2(n: int) -> int:
    return n * (n - 1) // 2 if n >= 2 else 0


def secant_dim(spec: VarietySpec) -> DimReport:
    D = spec.ambient_affine_dim - 1
    dim_x, r = spec.variety_dim, spec.r
    expected = min(D, r * dim_x + r - 1)

    if r == 1:
        formula = {"segre": "sum(d_j - 1)", "veronese": "d - 1", "grassmannian": "m(d - m)"}[spec.kind]
        return DimReport(dim_x, EXACT, f"dim of the {spec.kind} variety: {formula}")

    if spec.kind == "segre":
        # factors C^1 do not change the variety
        dims = tuple(d for d in spec.dims if d > 1)
        if len(dims) <= 1:
            return DimReport(D, EXACT, "at most one nontrivial factor: the Segre variety is the whole space")
        if len(dims) == 2:
            d1, d2 = dims
            value = d1 * d2 - (d1 - min(d1, r)) * (d2 - min(d2, r)) - 1
            return DimReport(value, EXACT, "d1*d2 - (d1 - min(d1,r))(d2 - min(d2,r)) - 1 (matrices of rank <= r)")
        if r == 2 and len(dims) >= 3:
            return DimReport(expected, EXACT, "sigma_2 of a Segre product with m >= 3 factors is nondefective: "
                                              "min(D, 2*sum(d_j - 1) + 1)")
    elif spec.kind == "veronese":
        d, m = spec.dims
        if m == 2:
            if r <= d - 1:
                value = min(D, r * d - _comb2(r) - 1)
                return DimReport(value, EXACT, "min(C(d+1,2) - 1, r*d - C(r,2) - 1) (symmetric matrices of rank <= r)")
            return DimReport(D, EXACT, "r >= d: every symmetric d x d matrix has rank <= r")
    else:
        d, m = spec.dims
        if m == 2:
            value = math.comb(d, 2) - _comb2(d - 2 * r) - 1
            return DimReport(value, EXACT, "C(d,2) - C(d-2r,2) - 1 = 2r(d-r) - r - 1 for 2r <= d "
                                           "(antisymmetric matrices of rank <= 2r)")

    return DimReport(expected, EXPECTED, "expected dimension min(D, r*dim(X) + r - 1)")


STANDARD, SYMMETRIC, ANTISYMMETRIC = "standard", "symmetric", "antisymmetric"


def spec_for(kind: str, params: Sequence[int], r: int) -> VarietySpec:
    """Map a subspace kind (standard / symmetric / antisymmetric) to its product-state variety."""
    if kind == STANDARD:
        return VarietySpec.segre(params, r)
    if kind == SYMMETRIC:
        return VarietySpec.veronese(*params, r=r)
    if kind == ANTISYMMETRIC:
        return VarietySpec.grassmannian(*params, r=r)
    raise ValueError(f"unknown subspace kind {kind!r}")


def max_entangled_dim(kind: str, params: Sequence[int], r: int) -> DimReport:
    """Largest projective dimension of an r-entangled subspace; -1 when none exists."""
    spec = spec_for(kind, params, r)
    sec = secant_dim(spec)
    value = spec.ambient_affine_dim - sec.value - 2
    return DimReport(value, sec.status, f"ambient affine dim - dim(sigma_r) - 2; sigma_r: {sec.formula}")


def max_witness_neg_eigs(kind: str, params: Sequence[int], r: int) -> DimReport:
    spec = spec_for(kind, params, r)
    sec = secant_dim(spec)
    value = spec.ambient_affine_dim - sec.value - 1
    return DimReport(value, sec.status, f"ambient affine dim - dim(sigma_r) - 1; sigma_r: {sec.formula}")


@dataclass(frozen=True)
class Resource:
    """Pre-shared resource: ``none``, ``ghz`` (tensor rank r) or ``schmidt`` (bipartite Schmidt rank r)."""

    kind: str = "none"
    r: int = 1

    def __post_init__(self):
        if self.kind not in ("none", "ghz", "schmidt"):
            raise ValueError(f"unsupported resource {self.kind!r}; only none, ghz:r, schmidt:r are implemented")
        if self.kind == "none":
            object.__setattr__(self, "r", 1)
        if self.r < 1:
            raise ValueError("resource rank must be positive")

    @classmethod
    def parse(cls, text: str) -> "Resource":
        text = text.strip().lower()
        if text == "none":
            return cls("none", 1)
        kind, _, r = text.partition(":")
        kind = {"bipartite_schmidt": "schmidt"}.get(kind, kind)
        if not r:
            raise ValueError(f"resource {text!r} needs a rank, e.g. ghz:2")
        return cls(kind, int(r))

    def __str__(self) -> str:
        return "none" if self.kind == "none" else f"{self.kind}:{self.r}"


def lusd_generic_count(local_dims: Sequence[int], resource: Resource) -> DimReport:
    """Largest n such that n generic states are locally discriminable with the resource."""
    dims = tuple(local_dims)
    if resource.kind == "schmidt" and len(dims) != 2:
        raise ValueError("a Schmidt-rank resource needs a bipartite space")
    sec = secant_dim(VarietySpec.segre(dims, resource.r))
    return DimReport(sec.value + 1, sec.status, f"dim(closure of SLOCC image) + 1; image closure: {sec.formula}")


def terracini_dim(spec: VarietySpec, seed=0, tol: float = 1e-8) -> int:
    """Numerical dim σ_r: rank of the span of tangent spaces at r random points, minus one.

    Independent of the closed forms above; exact with probability one up to
    floating-point rank decisions.
    """
    import numpy as np

    from .tensor_core import complex_normal, numerical_rank, outer_product, wedge

    rng = np.random.default_rng(seed)
    rows = []
    if spec.kind == "segre":
        for _ in range(spec.r):
            xs = [complex_normal(rng, d) for d in spec.dims]
            for j, d in enumerate(spec.dims):
                for a in range(d):
                    e = np.zeros(d, dtype=complex)
                    e[a] = 1.0
                    rows.append(outer_product(xs[:j] + [e] + xs[j + 1:]).ravel())
    else:
        d, m = spec.dims
        for _ in range(spec.r):
            xs = [complex_normal(rng, d) for _ in range(m)]
            for j in range(m):
                for a in range(d):
                    e = np.zeros(d, dtype=complex)
                    e[a] = 1.0
                    if spec.kind == "veronese":
                        # derivative of x^{⊗m} along e
                        rows.append(sum(outer_product([e if i == k else xs[0] for i in range(m)])
                                        for k in range(m)).ravel())
                    else:
                        rows.append(wedge(xs[:j] + [e] + xs[j + 1:]).ravel())
                if spec.kind == "veronese":
                    break
    return numerical_rank(np.array(rows), tol) - 1
