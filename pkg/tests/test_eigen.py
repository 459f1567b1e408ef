import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from kineticon.eigen import blocks, check_symmetric, eig_sym
from kineticon.errors import ContractViolationError

METHODS = ["ql", "jacobi"]


def random_symmetric(n, seed):
    rng = np.random.default_rng(seed)
    a = rng.normal(size=(n, n))
    return a + a.T


@pytest.mark.parametrize("method", METHODS)
def test_diagonal_2x2(method):
    assert eig_sym(np.array([[2.0, 0.0], [0.0, 1.0]]), method=method).tolist() == [1.0, 2.0]


@pytest.mark.parametrize("method", METHODS)
def test_pauli_x(method):
    w = eig_sym(np.array([[0.0, 1.0], [1.0, 0.0]]), method=method)
    assert w == pytest.approx([-1.0, 1.0], abs=1e-15)


@pytest.mark.parametrize("method", METHODS)
def test_harmonic_6x6(method):
    H = np.diag([50e9, 150e9, 250e9, 350e9, 450e9, 550e9])
    assert eig_sym(H, method=method) == pytest.approx([50e9, 150e9, 250e9, 350e9, 450e9, 550e9], rel=1e-15)


@pytest.mark.parametrize("method", METHODS)
def test_single_element(method):
    assert eig_sym(np.array([[3.5]]), method=method).tolist() == [3.5]


@pytest.mark.parametrize("method", METHODS)
@pytest.mark.parametrize("n", [3, 10, 41, 80])
def test_against_reference(method, n):
    H = random_symmetric(n, n)
    w = eig_sym(H, method=method)
    ref = np.linalg.eigh(H)[0]
    assert np.max(np.abs(w - ref)) < 1e-12 * np.max(np.abs(ref))


@pytest.mark.parametrize("method", METHODS)
@pytest.mark.parametrize("n", [5, 33, 64])
def test_residual_and_orthonormality(method, n):
    H = random_symmetric(n, 100 + n)
    w, V = eig_sym(H, vectors=True, method=method)
    scale = np.max(np.abs(w))
    assert np.max(np.abs(H @ V - V * w)) < 1e-12 * scale
    assert np.max(np.abs(V.T @ V - np.eye(n))) < 1e-12
    assert np.all(np.diff(w) >= 0)


def test_methods_agree():
    H = random_symmetric(50, 7)
    assert np.max(np.abs(eig_sym(H, method="ql") - eig_sym(H, method="jacobi"))) < 1e-12 * np.abs(H).max()


def test_block_structure_found():
    H = np.zeros((6, 6))
    H[0, 2] = H[2, 0] = 1.0
    H[1, 3] = H[3, 1] = 2.0
    comps = blocks(H)
    assert sorted(sorted(c) for c in map(list, comps)) == [[0, 2], [1, 3], [4], [5]]


def test_block_diagonal_vectors_are_full_size():
    H = np.diag([1.0, 2.0, 3.0, 4.0])
    H[0, 3] = H[3, 0] = 0.5
    w, V = eig_sym(H, vectors=True)
    assert V.shape == (4, 4)
    assert np.allclose(H @ V, V * w, atol=1e-14)


def test_degenerate_spectrum():
    H = np.eye(5) * 2.0
    w, V = eig_sym(H, vectors=True)
    assert w.tolist() == [2.0] * 5
    assert np.allclose(V.T @ V, np.eye(5))


def test_asymmetric_rejected():
    with pytest.raises(ContractViolationError):
        eig_sym(np.array([[1.0, 2.0], [0.0, 1.0]]))


def test_non_square_rejected():
    with pytest.raises(ContractViolationError):
        check_symmetric(np.zeros((2, 3)))


def test_non_finite_rejected():
    with pytest.raises(ContractViolationError):
        check_symmetric(np.array([[np.nan, 0.0], [0.0, 1.0]]))


def test_unknown_method():
    with pytest.raises(ValueError):
        eig_sym(np.eye(2), method="lapack")


@settings(max_examples=40, deadline=None)
@given(n=st.integers(1, 24), seed=st.integers(0, 2**31 - 1), method=st.sampled_from(METHODS))
def test_trace_and_residual_property(n, seed, method):
    H = random_symmetric(n, seed)
    w, V = eig_sym(H, vectors=True, method=method)
    scale = max(1.0, np.abs(w).max())
    assert abs(w.sum() - np.trace(H)) < 1e-12 * n * scale
    assert np.max(np.abs(H @ V - V * w)) < 1e-12 * scale
