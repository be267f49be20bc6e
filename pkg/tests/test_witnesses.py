import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from entsub.constructions import (
    antisymmetric_bipartite_basis,
    antisymmetric_multipartite_r1_subspace,
    four_qubit_basis,
    qutrit_qutrit_qubit_basis,
    symmetric_bipartite_basis,
    symmetric_multipartite_r1_basis,
)
from entsub.grassmann import random_subspace, span_of
from entsub.secant_dims import ANTISYMMETRIC, EXACT, STANDARD, SYMMETRIC, max_witness_neg_eigs
from entsub.tensor_core import Symmetry, basis_vector, complex_normal, outer_product
from entsub.witnesses import (
    DensityOperator,
    HermitianOperator,
    build_witness,
    detect,
    estimate_epsilon,
    negative_eig_count,
    witness_report,
)

e = basis_vector


def test_hermitian_operator_validation():
    with pytest.raises(ValueError):
        HermitianOperator((2,), np.array([[0, 1], [0, 0]]))
    with pytest.raises(ValueError):
        HermitianOperator((2, 2), np.eye(3))


def test_density_operator_validation():
    with pytest.raises(ValueError):
        DensityOperator((2,), np.eye(2))
    with pytest.raises(ValueError):
        DensityOperator((2,), np.diag([1.5, -0.5]))
    rho = DensityOperator.pure(outer_product([e(2, 0), e(2, 1)]))
    assert np.trace(rho.entries) == pytest.approx(1.0)


def test_negative_eig_count_examples():
    assert negative_eig_count(np.eye(3)) == 0
    assert negative_eig_count(HermitianOperator((2, 2), -np.eye(4))) == 4
    sub = random_subspace((6,), 3, seed=0)
    assert negative_eig_count(build_witness(sub, 2.0)) == 3
    with pytest.raises(ValueError):
        negative_eig_count(np.array([[0, 1], [0, 0]]))


def test_witness_spectrum_on_qutrit_subspace():
    sub = qutrit_qutrit_qubit_basis()
    assert negative_eig_count(build_witness(sub, 2.0)) == 6
    assert negative_eig_count(build_witness(sub, 1.0)) == 0
    assert negative_eig_count(build_witness(sub, 0.5)) == 0
    eig = build_witness(sub, 2.0).eigenvalues()
    np.testing.assert_allclose(np.sort(eig), [-1.0] * 6 + [1.0] * 12, atol=1e-12)
    with pytest.raises(ValueError):
        build_witness(sub, 0.0)


@pytest.mark.invariant
@given(st.integers(0, 2 ** 32 - 1), st.integers(1, 7), st.floats(1.000002, 50.0))
def test_negative_eigs_equal_affine_dimension(seed, k, alpha):
    sub = random_subspace((2, 2, 2), k, seed=seed)
    assert negative_eig_count(build_witness(sub, alpha)) == k


def test_detection_examples():
    sub = qutrit_qutrit_qubit_basis()
    W = build_witness(sub, 1.0113)
    assert detect(W, DensityOperator.from_subspace(sub)) == pytest.approx(1 - 1.0113, abs=1e-12)
    mixed = detect(W, DensityOperator.maximally_mixed((3, 3, 2)))
    assert mixed == pytest.approx((18 - 1.0113 * 6) / 18, abs=1e-12)
    with pytest.raises(ValueError):
        detect(W, np.eye(18))


def test_epsilon_whole_space_and_product_span():
    whole = span_of(list(np.eye(8).reshape(8, 2, 2, 2)))
    assert estimate_epsilon(whole, 2, starts=4).epsilon == pytest.approx(1.0, abs=1e-12)
    prod = span_of([outer_product([e(2, 0), e(3, 2)])])
    rep = estimate_epsilon(prod, 1, kind="product", starts=4)
    assert rep.epsilon == pytest.approx(1.0, abs=1e-10)
    assert "one-sided" in rep.note


def test_epsilon_argument_errors():
    sub = qutrit_qutrit_qubit_basis()
    with pytest.raises(ValueError):
        estimate_epsilon(sub, 2, kind="border")
    with pytest.raises(ValueError):
        estimate_epsilon(sub, 2, starts=0)


def test_epsilon_best_state_is_consistent():
    sub = qutrit_qutrit_qubit_basis()
    rep = estimate_epsilon(sub, 2, starts=8, seed=1)
    v = rep.best_state().ravel()
    assert np.linalg.norm(v) == pytest.approx(1.0, abs=1e-10)
    assert np.vdot(v, sub.projector() @ v).real == pytest.approx(rep.epsilon, rel=1e-8)
    assert rep.epsilon == max(rep.per_start)


def test_estimate_is_deterministic():
    sub = qutrit_qutrit_qubit_basis()
    assert estimate_epsilon(sub, 2, starts=3, seed=4).to_dict() == estimate_epsilon(sub, 2, starts=3, seed=4).to_dict()


def test_witness_report_fields():
    rep = witness_report(qutrit_qutrit_qubit_basis(), 2, starts=8, seed=0)
    assert rep.negative_eigs == 6 and rep.alpha > 1
    names = [name for name, _ in rep.detection_examples]
    assert names == ["normalized-projector", "maximally-mixed", "best-rank-r-state"]
    vals = dict(rep.detection_examples)
    assert vals["normalized-projector"] < 0 < vals["maximally-mixed"]
    assert abs(vals["best-rank-r-state"]) < 1e-8


def _one_entangled_subspaces():
    return {
        "random-4-plane-in-3x3": random_subspace((3, 3), 4, seed=2),
        "symmetric-qubits-m3": symmetric_multipartite_r1_basis(2, 3),
        "symmetric-bipartite-d4": symmetric_bipartite_basis(4, 1),
    }


@pytest.mark.invariant
@pytest.mark.parametrize("name", sorted(_one_entangled_subspaces()))
def test_product_epsilon_below_one_and_witness_nonnegative_on_products(name):
    sub = _one_entangled_subspaces()[name]
    rep = estimate_epsilon(sub, kind="product", starts=32, seed=0)
    assert rep.epsilon < 1 - 1e-6
    W = build_witness(sub, rep.alpha)
    rng = np.random.default_rng(5)
    worst = np.inf
    for _ in range(10_000):
        v = outer_product([complex_normal(rng, d) for d in sub.ambient_shape])
        worst = min(worst, detect(W, DensityOperator.pure(v)))
    assert worst >= -1e-10


CONSTRUCTIONS = [
    ("sym-bipartite", lambda: symmetric_bipartite_basis(6, 2), SYMMETRIC, (6, 2), 2),
    ("antisym-bipartite", lambda: antisymmetric_bipartite_basis(7, 2), ANTISYMMETRIC, (7, 2), 2),
    ("sym-multipartite", lambda: symmetric_multipartite_r1_basis(3, 3), SYMMETRIC, (3, 3), 1),
    ("antisym-multipartite", lambda: antisymmetric_multipartite_r1_subspace(5, 2), ANTISYMMETRIC, (5, 2), 1),
    ("qutrit-qutrit-qubit", qutrit_qutrit_qubit_basis, STANDARD, (3, 3, 2), 2),
    ("four-qubit", four_qubit_basis, STANDARD, (2, 2, 2, 2), 2),
]


@pytest.mark.invariant
@pytest.mark.parametrize("name,make,kind,params,r", CONSTRUCTIONS, ids=[c[0] for c in CONSTRUCTIONS])
def test_constructed_witness_reaches_the_negative_eigenvalue_bound(name, make, kind, params, r):
    bound = max_witness_neg_eigs(kind, params, r)
    assert bound.status == EXACT
    sub = make()
    assert negative_eig_count(build_witness(sub, 1.5)) == bound.value


def test_symmetric_sector_witness_lives_in_sector():
    sub = symmetric_multipartite_r1_basis(2, 3)
    assert sub.symmetry is Symmetry.SYMMETRIC
    W = build_witness(sub, 3.0)
    assert negative_eig_count(W) == sub.dim == 2
