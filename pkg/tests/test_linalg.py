import numpy as np
import pytest
from hypothesis import given, strategies as st
from hypothesis.extra import numpy as hnp

from canodual.errors import AsymmetricInput, PreconditionViolated, SchurPrecondition
from canodual.linalg import (DefClass, definiteness, inverse_order_check, lemma4_check, matrix_rank,
                             pseudo_inverse, schur_psd_check, sqrt_psd, svd_decompose)
from helpers import order_instance, schur_instance, bordered_instance, sym_with_signs

finite = st.floats(-10, 10, allow_nan=False, allow_infinity=False)


@pytest.mark.parametrize("M,cls", [
    (np.eye(3), DefClass.POS_DEF),
    (np.diag([0.41421356, 0.35991198]), DefClass.POS_DEF),
    (np.diag([1.0, -1.0]), DefClass.INDEFINITE),
    (np.diag([1.0, 0.0]), DefClass.POS_SEMIDEF),
    (-np.eye(2), DefClass.NEG_DEF),
    (np.diag([-1.0, 0.0]), DefClass.NEG_SEMIDEF),
    (np.zeros((2, 2)), DefClass.ZERO),
])
def test_definiteness_labels(M, cls):
    d = definiteness(M)
    assert d.cls is cls
    assert np.all(np.diff(d.eigenvalues) >= 0)


def test_zero_counts_as_both_semidefinite():
    d = definiteness(np.zeros((3, 3)))
    assert d.psd and d.nsd


def test_definiteness_rejects_asymmetric():
    with pytest.raises(AsymmetricInput):
        definiteness(np.array([[1.0, 2.0], [0.0, 1.0]]))


@given(st.integers(0, 2**32 - 1), st.floats(1e-3, 1e3))
def test_definiteness_scale_consistent(seed, alpha):
    rng = np.random.default_rng(seed)
    n = int(rng.integers(1, 6))
    M = sym_with_signs(rng, n, positive=bool(rng.integers(2)), margin=0.5)
    M = M * rng.choice([-1.0, 1.0])
    assert definiteness(alpha * M).cls is definiteness(M).cls


@given(st.integers(0, 2**32 - 1))
def test_eigen_residuals(seed):
    rng = np.random.default_rng(seed)
    n = int(rng.integers(1, 7))
    M = rng.normal(size=(n, n))
    M = M + M.T
    w, V = np.linalg.eigh(M)
    assert np.max(np.abs(M @ V - V * w)) <= 1e-10 * np.max(np.sum(np.abs(M), axis=1))


def test_pseudo_inverse_examples():
    np.testing.assert_allclose(pseudo_inverse(np.diag([2.0, 4.0])), np.diag([0.5, 0.25]))
    np.testing.assert_allclose(pseudo_inverse(np.diag([1.0, 0.0])), np.diag([1.0, 0.0]))
    np.testing.assert_array_equal(pseudo_inverse(np.zeros((2, 3))), np.zeros((3, 2)))


# entries are zero or well away from the underflow range so that the scale of X stays finite
entries = st.one_of(st.just(0.0), st.floats(1e-3, 10), st.floats(-10, -1e-3))


@given(hnp.arrays(float, st.tuples(st.integers(1, 5), st.integers(1, 5)), elements=entries),
       st.integers(0, 4))
def test_penrose_identities(M, drop):
    # lower the rank by zeroing trailing singular values
    U, s, Vt = np.linalg.svd(M, full_matrices=False)
    s[max(0, s.size - drop):] = 0.0
    M = (U * s) @ Vt
    X = pseudo_inverse(M)
    scale = 1.0 + np.max(np.abs(M)) ** 2
    assert np.max(np.abs(M @ X @ M - M)) <= 1e-10 * scale
    assert np.max(np.abs(X @ M @ X - X)) <= 1e-10 * (1 + np.max(np.abs(X))) ** 2 * scale
    assert np.max(np.abs((M @ X).T - M @ X)) <= 1e-10 * scale
    assert np.max(np.abs((X @ M).T - X @ M)) <= 1e-10 * scale


def test_svd_examples():
    z = svd_decompose(np.zeros((2, 2)))
    assert z.rank == 0 and not np.any(z.D)
    f = svd_decompose(np.diag([3.0, 2.0]))
    np.testing.assert_allclose(f.singular_values, [3.0, 2.0])
    assert f.rank == 2


@given(st.integers(0, 2**32 - 1), st.integers(1, 5), st.integers(1, 5))
def test_svd_factors(seed, n, m):
    M = np.random.default_rng(seed).normal(size=(n, m))
    f = svd_decompose(M)
    assert np.max(np.abs(f.U.T @ f.U - np.eye(n))) <= 1e-12
    assert np.max(np.abs(f.R.T @ f.R - np.eye(m))) <= 1e-12
    assert np.max(np.abs(f.U @ f.D @ f.R - M)) <= 1e-12 * (1 + np.max(np.abs(M)))
    assert np.all(np.diff(f.singular_values) <= 0)
    assert f.rank == matrix_rank(M)


def test_schur_examples():
    assert schur_psd_check(np.eye(4), 2) == (True, True)
    assert schur_psd_check(np.diag([-1.0, 1.0]), 1) == (False, False)
    with pytest.raises(SchurPrecondition):
        schur_psd_check(np.diag([1.0, -1.0]), 1)
    with pytest.raises(SchurPrecondition):
        schur_psd_check(np.eye(2), 0)


def test_bordered_check_examples():
    P, U = -np.eye(2), np.eye(2)
    assert lemma4_check(P, U, np.zeros((2, 2)), r=0) == (True, True)
    assert lemma4_check(P, U, np.eye(2), r=2) == (True, True)
    with pytest.raises(PreconditionViolated):
        lemma4_check(np.eye(2), U, np.eye(2))
    with pytest.raises(PreconditionViolated):
        lemma4_check(P, np.array([[1.0, 0.5], [0.5, 1.0]]), np.diag([1.0, 0.0]), r=1)


def test_inverse_order_precondition():
    with pytest.raises(PreconditionViolated):
        inverse_order_check(np.diag([1.0, -1.0]), np.eye(2))


@given(st.integers(0, 2**32 - 1))
def test_inverse_order_equivalence(seed):
    lhs, rhs = inverse_order_check(*order_instance(np.random.default_rng(seed)))
    assert lhs == rhs


@given(st.integers(0, 2**32 - 1))
def test_schur_equivalence(seed):
    direct, via = schur_psd_check(*schur_instance(np.random.default_rng(seed)))
    assert direct == via


@given(st.integers(0, 2**32 - 1))
def test_bordered_equivalence(seed):
    lhs, rhs = lemma4_check(*bordered_instance(np.random.default_rng(seed)))
    assert lhs == rhs


def test_sqrt_psd(rng):
    M = rng.normal(size=(4, 4))
    M = M @ M.T
    S = sqrt_psd(M)
    np.testing.assert_allclose(S @ S, M, atol=1e-10)
    np.testing.assert_allclose(S, S.T)
