import numpy as np
import pytest
from hypothesis import given, settings, strategies as st
from hypothesis.extra.numpy import arrays

from polariton_ttm.numerics import (NumericsError, hermitian_eig, matrix_exponential, null_space,
                                    pseudoinverse, unvec, vec)
from polariton_ttm.models import single_mode_decay_generator
from polariton_ttm.maps import markovian_maps
from polariton_ttm.ttm import tensor_sum, transfer_tensors

from oracles import taylor_expm

finite = st.floats(-2, 2, allow_nan=False, allow_infinity=False)


def complex_matrices(n, m=None):
    m = m or n
    return st.tuples(arrays(float, (n, m), elements=finite),
                     arrays(float, (n, m), elements=finite)).map(lambda p: p[0] + 1j * p[1])


def random_matrix(rng, n, m=None):
    m = m or n
    return rng.standard_normal((n, m)) + 1j * rng.standard_normal((n, m))


# -- vectorization --------------------------------------------------------------------

@given(complex_matrices(3))
def test_vec_unvec_round_trip(X):
    assert np.array_equal(unvec(vec(X)), X)


@given(complex_matrices(3), complex_matrices(3), complex_matrices(3))
def test_vec_is_column_stacking(A, X, B):
    assert np.allclose(vec(A @ X @ B), np.kron(B.T, A) @ vec(X), atol=1e-10)


def test_unvec_rejects_non_square_length():
    with pytest.raises(NumericsError):
        unvec(np.ones(5))


# -- matrix exponential --------------------------------------------------------------------

def test_expm_of_zero_is_identity():
    assert np.array_equal(matrix_exponential(np.zeros((4, 4)), 1.0), np.eye(4))


def test_expm_scalar():
    assert matrix_exponential(np.array([[-1.0]]), 1.0)[0, 0] == pytest.approx(0.36787944117144233, abs=1e-15)


def test_expm_matches_taylor_oracle():
    rng = np.random.default_rng(3)
    A = random_matrix(rng, 6)
    assert np.max(np.abs(matrix_exponential(A, 0.3) - taylor_expm(A, 0.3))) < 1e-10


@settings(max_examples=30, deadline=None)
@given(st.integers(1, 12), st.integers(0, 2 ** 32 - 1), st.floats(0, 0.5), st.floats(0, 0.5))
def test_expm_group_property(n, seed, t1, t2):
    A = random_matrix(np.random.default_rng(seed), n) / np.sqrt(n)
    lhs = matrix_exponential(A, t1 + t2)
    rhs = matrix_exponential(A, t1) @ matrix_exponential(A, t2)
    assert np.max(np.abs(lhs - rhs)) <= 1e-10 * max(1.0, np.max(np.abs(lhs)))


@pytest.mark.parametrize("bad", [np.ones((2, 3)), np.array([[np.inf]]), np.array([[np.nan, 0], [0, 1]])])
def test_expm_rejects_bad_input(bad):
    with pytest.raises(NumericsError):
        matrix_exponential(bad, 1.0)


def test_expm_rejects_non_finite_time():
    with pytest.raises(NumericsError):
        matrix_exponential(np.eye(2), np.nan)


# -- pseudoinverse ---------------------------------------------------------------------

def test_pinv_identity_and_rank_deficient_diagonal():
    assert np.allclose(pseudoinverse(np.eye(3)), np.eye(3))
    assert np.allclose(pseudoinverse(np.diag([2.0, 0.0])), np.diag([0.5, 0.0]))


def _penrose(A, P, tol=1e-10):
    scale = max(1.0, np.max(np.abs(A)), np.max(np.abs(P)))
    assert np.max(np.abs(A @ P @ A - A)) <= tol * scale
    assert np.max(np.abs(P @ A @ P - P)) <= tol * scale * max(1.0, np.max(np.abs(P)))
    assert np.max(np.abs((A @ P).conj().T - A @ P)) <= tol * scale
    assert np.max(np.abs((P @ A).conj().T - P @ A)) <= tol * scale


def test_pinv_rank_two_5x3():
    rng = np.random.default_rng(5)
    A = random_matrix(rng, 5, 2) @ random_matrix(rng, 2, 3)
    _penrose(A, pseudoinverse(A))


@settings(max_examples=40, deadline=None)
@given(st.integers(1, 6), st.integers(1, 6), st.integers(1, 6), st.integers(0, 2 ** 32 - 1))
def test_pinv_penrose_conditions(m, n, r, seed):
    rng = np.random.default_rng(seed)
    r = min(r, m, n)
    A = random_matrix(rng, m, r) @ random_matrix(rng, r, n)
    _penrose(A, pseudoinverse(A), tol=1e-9)


@settings(max_examples=30, deadline=None)
@given(st.integers(1, 6), st.integers(0, 2 ** 32 - 1))
def test_pinv_involution_for_full_rank(n, seed):
    A = random_matrix(np.random.default_rng(seed), n) + 3 * np.eye(n)
    back = pseudoinverse(pseudoinverse(A))
    assert np.max(np.abs(back - A)) <= 1e-9 * np.max(np.abs(A))


def test_pinv_rejects_negative_tol_and_nan():
    with pytest.raises(NumericsError):
        pseudoinverse(np.eye(2), tol=-1)
    with pytest.raises(NumericsError):
        pseudoinverse(np.array([[np.nan]]))


# -- null space ------------------------------------------------------------------------

def test_null_space_of_rank_one_diagonal():
    (v,) = null_space(np.diag([1.0, 0.0]))
    assert abs(abs(v[1]) - 1) < 1e-14 and abs(v[0]) < 1e-14


def test_null_space_full_rank_is_empty():
    assert null_space(random_matrix(np.random.default_rng(1), 4)) == []


def test_null_space_of_decay_kernel_is_vacuum():
    series = markovian_maps(single_mode_decay_generator(2, 1.0), 0.1, 5)
    A = np.eye(4) - tensor_sum(transfer_tensors(series))
    (v,) = null_space(A)
    v = v / v[0]
    assert np.allclose(v, vec(np.diag([1.0, 0.0])), atol=1e-10)


@settings(max_examples=30, deadline=None)
@given(st.integers(2, 6), st.integers(1, 5), st.integers(0, 2 ** 32 - 1))
def test_null_space_vectors_are_annihilated(n, r, seed):
    rng = np.random.default_rng(seed)
    r = min(r, n - 1)
    A = random_matrix(rng, n, r) @ random_matrix(rng, r, n)
    basis = null_space(A)
    assert len(basis) == n - r
    smax = np.linalg.norm(A, 2)
    V = np.array(basis).T
    assert np.allclose(V.conj().T @ V, np.eye(n - r), atol=1e-10)
    for v in basis:
        assert np.linalg.norm(A @ v) <= 10 * 1e-10 * smax


# -- Hermitian eigendecomposition ------------------------------------------------------------

def test_hermitian_eig_examples():
    w, _ = hermitian_eig(np.diag([3.0, 1.0, 2.0]))
    assert np.allclose(w, [1, 2, 3])
    w, _ = hermitian_eig(np.array([[0, 1], [1, 0]]))
    assert np.allclose(w, [-1, 1])


def test_hermitian_eig_reconstructs_random_8x8():
    X = random_matrix(np.random.default_rng(8), 8)
    A = X + X.conj().T
    w, V = hermitian_eig(A)
    assert np.all(np.diff(w) >= 0)
    assert np.max(np.abs(V @ np.diag(w) @ V.conj().T - A)) <= 1e-10 * np.max(np.abs(A))


def test_hermitian_eig_rejects_non_hermitian():
    with pytest.raises(NumericsError):
        hermitian_eig(np.array([[0, 1], [0, 0]]))
