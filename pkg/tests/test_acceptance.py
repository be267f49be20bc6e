"""Acceptance criteria, one test each.

Each test carries ``@criterion(number, title, bound_s)``; conftest fails a test
that exceeds its runtime bound and prints one PASS/FAIL line per criterion.
"""
import itertools
import math
import subprocess
import sys
from pathlib import Path

import numpy as np
import pytest

from entsub.constructions import (
    BAD_QQQ_PARAMS,
    antisymmetric_bipartite_basis,
    antisymmetric_multipartite_r1_subspace,
    four_qubit_basis,
    qutrit_qutrit_qubit_basis,
    qutrit_qutrit_qubit_element,
    symmetric_bipartite_basis,
    symmetric_multipartite_r1_basis,
)
from entsub.grassmann import complementary_minor_check, random_subspace
from entsub.lusd import threshold_demo
from entsub.secant_dims import EXACT, Resource, VarietySpec, max_entangled_dim, secant_dim
from entsub.tensor_core import complex_normal, numerical_rank
from entsub.verification import (
    LOW_RANK,
    NO_LOW_RANK,
    appendix_certificate,
    brute_force_rank3_certificate,
    minor_objective,
    qqq_flattenings,
    search_low_rank_element,
)
from entsub.witnesses import build_witness, estimate_epsilon, negative_eig_count

criterion = pytest.mark.criterion
ROOT = Path(__file__).resolve().parents[1]


def comb(n, k):
    return math.comb(n, k) if n >= 0 else 0


@criterion(1, "dimension tables reproduce every stated number", 1)
def test_dimension_tables():
    qqq = secant_dim(VarietySpec.segre((3, 3, 2), 2))
    assert (qqq.value, qqq.status) == (11, EXACT)
    assert max_entangled_dim("standard", (3, 3, 2), 2).value == 5
    assert max_entangled_dim("standard", (2, 2, 2, 2), 2).value == 5
    for d in range(1, 9):
        for r in range(1, 4):
            for d2 in range(1, 9):
                k = min(r, d, d2)
                rep = max_entangled_dim("standard", (d, d2), r)
                assert (rep.value, rep.status) == ((d - k) * (d2 - k) - 1, EXACT)
            if d >= 2:
                sym = max_entangled_dim("symmetric", (d, 2), r)
                anti = max_entangled_dim("antisymmetric", (d, 2), r)
                assert (sym.value, sym.status) == (comb(d - r + 1, 2) - 1, EXACT)
                assert (anti.value, anti.status) == (comb(d - 2 * r, 2) - 1, EXACT)
    # multipartite sweep: r = 1 is the variety itself, r = 2 Segre with m >= 3 is nondefective
    for m in (2, 3, 4):
        for dims in itertools.combinations_with_replacement(range(2, 9), m):
            D = math.prod(dims) - 1
            n = sum(d - 1 for d in dims)
            assert secant_dim(VarietySpec.segre(dims, 1)).value == n
            if m >= 3:
                assert secant_dim(VarietySpec.segre(dims, 2)).value == min(D, 2 * n + 1)
        for d in range(2, 9):
            assert secant_dim(VarietySpec.veronese(d, m, 1)).value == d - 1
            if m <= d:
                assert secant_dim(VarietySpec.grassmannian(d, m, 1)).value == m * (d - m)


@criterion(2, "constructed subspaces have their formula dimensions", 10)
def test_construction_dimensions():
    for d in range(2, 11):
        for r in range(1, d):
            assert symmetric_bipartite_basis(d, r).dim == comb(d - r + 1, 2)
            if 2 * r < d:
                assert antisymmetric_bipartite_basis(d, r).dim == comb(d - 2 * r, 2)
    for d in range(2, 7):
        for m in range(2, 5):
            assert symmetric_multipartite_r1_basis(d, m).dim == comb(d + m - 1, m) - d
            if m < d:
                want = comb(d, m) - m * (d - m) - 1
                assert antisymmetric_multipartite_r1_subspace(d, m).dim == want


@criterion(3, "case-tree certificate agrees with the brute-force oracle", 60)
def test_case_tree_certificate_matches_oracle():
    rng = np.random.default_rng(2024)
    for _ in range(10_000):
        c = complex_normal(rng, 6)
        cert = appendix_certificate(c[0], c[1], c[2:4], c[4:6])
        t = qutrit_qutrit_qubit_element(c[0], c[1], c[2:4], c[4:6])
        assert abs(cert.determinant) > 1e-8
        assert abs(np.linalg.det(cert.submatrix(t)) - cert.determinant) <= 1e-9 * abs(cert.determinant)
        oracle = brute_force_rank3_certificate(t)
        assert oracle is not None and abs(oracle.determinant) > 1e-8


@criterion(4, "bad-parameter counterexample has rank 2 and is found", 60)
def test_counterexample_pin():
    t = qutrit_qutrit_qubit_element(1, 1, (0, 1), (0, 1), BAD_QQQ_PARAMS)
    M, MG = qqq_flattenings(t)
    assert numerical_rank(M) == 2 and numerical_rank(MG) == 2
    rep = search_low_rank_element(qutrit_qutrit_qubit_basis(BAD_QQQ_PARAMS), 2, starts=64, seed=7)
    assert rep.verdict == LOW_RANK and rep.best_value < 1e-10


@criterion(5, "both default subspaces show no low-rank element", 300)
def test_two_entangledness_evidence():
    for sub in (qutrit_qutrit_qubit_basis(), four_qubit_basis()):
        rep = search_low_rank_element(sub, 2, starts=64, seed=7)
        assert rep.verdict == NO_LOW_RANK and rep.best_value > 1e-6


@criterion(6, "witness alpha near 1.0113 with 6 negative eigenvalues", 600)
def test_witness_alpha():
    sub = qutrit_qutrit_qubit_basis()
    rep = estimate_epsilon(sub, 2, starts=256, seed=7)
    assert 1.0013 <= rep.alpha <= 1.0213
    assert negative_eig_count(build_witness(sub, rep.alpha)) == 6


@criterion(7, "LUSD thresholds at (2,2) and (3,3,2) with ghz:2", 900)
def test_lusd_thresholds():
    small = threshold_demo((2, 2), Resource(), trials=50, seed=0)
    assert small.n_star == 3
    assert small.success_at_n_star >= 48
    assert small.success_above == 0 and small.conclusive_failures_above == 50
    big = threshold_demo((3, 3, 2), Resource("ghz", 2), trials=10, seed=0)
    assert big.n_star == 12
    assert big.success_at_n_star >= 9
    print(f"(3,3,2) ghz:2 successes at n=13: {big.success_above}/10 (evidence only)")


@criterion(8, "complementary minor duality on 100 random planes", 30)
def test_duality():
    rng = np.random.default_rng(8)
    worst = 0.0
    for i in range(100):
        d = int(rng.integers(2, 9))
        n = int(rng.integers(1, min(4, d - 1) + 1))
        ok, dev = complementary_minor_check(random_subspace((d,), n, seed=[8, i]))
        assert ok
        worst = max(worst, dev)
    assert worst < 1e-9


@criterion(9, "minor objective gradient matches central differences", 30)
def test_gradient_check():
    h = 1e-6
    for sub in (qutrit_qutrit_qubit_basis(), four_qubit_basis()):
        rng = np.random.default_rng(9)
        for _ in range(100):
            c = complex_normal(rng, sub.dim)
            _, g = minor_objective(sub, 2, c, gradient=True)
            fd = np.zeros(sub.dim, dtype=complex)
            for i, unit in itertools.product(range(sub.dim), (1.0, 1j)):
                step = np.zeros(sub.dim, dtype=complex)
                step[i] = unit * h
                fd[i] += unit * (minor_objective(sub, 2, c + step) - minor_objective(sub, 2, c - step)) / (2 * h)
            assert np.linalg.norm(g - fd) / np.linalg.norm(fd) < 1e-5


@criterion(10, "invariance suite passes with fixed seeds", 600)
def test_invariance_suite():
    proc = subprocess.run(
        [sys.executable, "-m", "pytest", "-m", "invariant", "-q", "-p", "no:cacheprovider", "tests"],
        cwd=ROOT, capture_output=True, text=True,
    )
    tail = "\n".join(proc.stdout.splitlines()[-15:])
    assert proc.returncode == 0, tail
    assert " passed" in tail
