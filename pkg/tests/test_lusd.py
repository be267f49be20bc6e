import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from entsub.lusd import (
    LusdInstance,
    LusdTolerances,
    check_certificate,
    complement_direction_rank,
    find_duals,
    rank_residual,
    threshold_demo,
)
from entsub.secant_dims import Resource, lusd_generic_count
from entsub.tensor_core import basis_vector, complex_normal, outer_product

e = basis_vector
NONE = Resource()


def prod(*vs):
    return outer_product(list(vs))


def test_instance_validation():
    with pytest.raises(ValueError):
        LusdInstance((2, 2), (np.zeros((2, 2)),))
    with pytest.raises(ValueError):
        LusdInstance((2, 2), (np.ones((2, 3)),))
    with pytest.raises(ValueError):
        LusdInstance((2, 2, 2), (np.ones((2, 2, 2)),), Resource("schmidt", 1))
    inst = LusdInstance((2, 2), (np.ones((2, 2)),), "ghz:2")
    assert inst.resource == Resource("ghz", 2) and inst.rank_bound == 2 and inst.n == 1


def test_orthogonal_products_pass_with_themselves():
    states = (prod(e(2, 0), e(2, 0)), prod(e(2, 1), e(2, 1)))
    ok, cert = check_certificate(LusdInstance((2, 2), states), states)
    assert ok
    np.testing.assert_allclose(cert.pairing, np.eye(2), atol=1e-15)


def test_bilinear_pairing_of_overlapping_products():
    # e1⊗e1 and e1⊗e2 pair to zero both ways, so the states are their own duals
    states = (prod(e(2, 0), e(2, 0)), prod(e(2, 0), e(2, 1)))
    ok, cert = check_certificate(LusdInstance((2, 2), states), states)
    assert ok and cert.pairing[0, 1] == 0 and cert.pairing[1, 0] == 0


def test_pairing_is_bilinear_not_hermitian():
    v = prod(np.array([1, 1j]), e(2, 0))
    w = prod(e(2, 1), e(2, 1))
    inst = LusdInstance((2, 2), (v, w))
    # with u = v the bilinear pairing is 1 + i^2 = 0 while the Hermitian one is 2
    ok, cert = check_certificate(inst, (v, w))
    assert not ok and abs(cert.pairing[0, 0]) < 1e-15
    ok, cert = check_certificate(inst, (v, w), hermitian=True)
    assert ok and abs(cert.pairing[0, 0]) == pytest.approx(1.0)
    ok, cert = check_certificate(inst, (v.conj(), w))
    assert ok and abs(cert.pairing[0, 0]) == pytest.approx(1.0)


def test_schmidt_rank_violation_is_reported():
    states = (prod(e(3, 0), e(3, 0)), prod(e(3, 1), e(3, 1)))
    rank3 = np.eye(3, dtype=complex)
    inst = LusdInstance((3, 3), states, Resource("schmidt", 2))
    ok, cert = check_certificate(inst, (rank3, rank3))
    assert not ok
    assert any("outside the resource image" in f for f in cert.failures)
    assert cert.rank_residuals[0] == pytest.approx(np.sqrt(1 / 3))


def test_check_certificate_rejects_mismatched_duals():
    inst = LusdInstance((2, 2), (np.eye(2),))
    with pytest.raises(ValueError):
        check_certificate(inst, ())
    with pytest.raises(ValueError):
        check_certificate(inst, (np.ones((2, 3)),))


def test_rank_residual_modes():
    assert rank_residual(prod(e(2, 0), e(2, 1), e(2, 1)), NONE) < 1e-12
    ghz = prod(e(2, 0), e(2, 0), e(2, 0)) + prod(e(2, 1), e(2, 1), e(2, 1))
    assert rank_residual(ghz / np.sqrt(2), NONE) > 0.1
    assert rank_residual(ghz / np.sqrt(2), Resource("ghz", 2)) < 1e-10
    assert rank_residual(np.eye(3) / np.sqrt(3), Resource("schmidt", 3)) == 0.0


def _random_invertible(rng, d):
    while True:
        A = complex_normal(rng, (d, d))
        if np.linalg.cond(A) < 1e3:
            return A


@pytest.mark.invariant
@given(st.integers(0, 2 ** 32 - 1))
@settings(max_examples=20)
def test_pairing_invariant_under_rescaling_and_local_basis_change(seed):
    rng = np.random.default_rng(seed)
    dims = (2, 3)
    inst = LusdInstance.random(dims, 4, seed=rng)
    duals = [complex_normal(rng, dims) for _ in range(4)]
    _, base = check_certificate(inst, duals)
    # rescaling changes nothing after unit normalization, up to phases
    scaled = LusdInstance(dims, tuple(complex_normal(rng, ()) * s for s in inst.states))
    _, cert = check_certificate(scaled, [complex_normal(rng, ()) * u for u in duals])
    np.testing.assert_allclose(np.abs(cert.pairing), np.abs(base.pairing), atol=1e-12)
    # A1⊗A2 on states with A^{-T} on duals leaves the unnormalized pairing fixed
    A = [_random_invertible(rng, d) for d in dims]
    B = [np.linalg.inv(a).T for a in A]
    V = np.array([s.ravel() for s in inst.states])
    U = np.array([u.ravel() for u in duals])
    V2 = np.array([(A[0] @ s @ A[1].T).ravel() for s in inst.states])
    U2 = np.array([(B[0] @ u @ B[1].T).ravel() for u in duals])
    np.testing.assert_allclose(U2 @ V2.T, U @ V.T, rtol=1e-10, atol=1e-10)


def test_find_duals_two_qubits_three_states():
    inst = LusdInstance.random((2, 2), 3, seed=0)
    rep = find_duals(inst, seed=0)
    assert rep.success and rep.certificate.passed
    assert max(rep.certificate.rank_residuals) < 1e-8


def test_find_duals_two_qubits_four_states_fails_conclusively():
    inst = LusdInstance.random((2, 2), 4, seed=0)
    rep = find_duals(inst, seed=0)
    assert not rep.success and rep.failed
    for drop in range(4):
        others = [s for i, s in enumerate(inst.states) if i != drop]
        rank, conclusive = complement_direction_rank(others, NONE)
        assert rank == 2 and conclusive


def test_complement_direction_needs_a_single_line():
    assert complement_direction_rank([np.eye(2)], NONE) == (None, False)


@pytest.mark.invariant
def test_schmidt_duals_respect_rank_bound():
    res = Resource("schmidt", 2)
    n = lusd_generic_count((3, 3), res).value
    assert n == 8
    rep = find_duals(LusdInstance.random((3, 3), n, res, seed=1), seed=1)
    assert rep.success
    for u in rep.certificate.duals:
        assert np.sum(np.linalg.svd(u, compute_uv=False) > 1e-8) <= 2


def test_generic_counts():
    assert lusd_generic_count((2, 2), NONE).value == 3
    assert lusd_generic_count((2, 3), NONE).value == 4
    assert lusd_generic_count((3, 3, 2), Resource("ghz", 2)).value == 12


def test_ghz_duals_in_qutrit_qutrit_qubit():
    rep = find_duals(LusdInstance.random((3, 3, 2), 12, Resource("ghz", 2), seed=0), seed=0)
    assert rep.success


@pytest.mark.invariant
def test_threshold_demo_small():
    stats = threshold_demo((2, 2), trials=20, seed=3)
    assert stats.n_star == 3
    assert stats.success_at_n_star >= 19
    assert stats.success_above == 0 and stats.conclusive_failures_above == 20
    assert "conclusive" in stats.note
    with pytest.raises(ValueError):
        threshold_demo((2, 2), trials=0)


def test_threshold_demo_two_by_three():
    stats = threshold_demo((2, 3), trials=5, seed=0)
    assert stats.n_star == 4 and stats.success_at_n_star == 5 and stats.success_above == 0


def test_default_tolerances():
    t = LusdTolerances()
    assert (t.diag, t.off, t.rank) == (1e-6, 1e-8, 1e-8)
