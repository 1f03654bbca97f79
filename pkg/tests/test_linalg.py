"""Core matrix operations: inner products, eigen, solves, vectorization."""

import numpy as np
import pytest

from dynatomo import (
    NotHermitian,
    NotPositiveDefinite,
    Singular,
    adjoint,
    assert_density_matrix,
    determinant,
    devectorize,
    frobenius_inner,
    frobenius_norm,
    hermitian_eigen,
    inv_sqrt_pd,
    lstsq_via_normal_equations,
    make_rng,
    random_density_matrix,
    solve_linear,
    vectorize,
)
from dynatomo.errors import InvariantError
from dynatomo.presets import E_EXACT, E_INV_SQRT_EXACT


def random_complex(rng, *shape):
    return rng.standard_normal(shape) + 1j * rng.standard_normal(shape)


def test_adjoint_is_conjugate_transpose():
    a = np.array([[1, 2j], [3, 4]], dtype=complex)
    assert np.array_equal(adjoint(a), a.conj().T)
    assert np.array_equal(adjoint(adjoint(a)), a)


def test_frobenius_inner_identity_gives_dimension():
    for d in (2, 3, 5):
        assert frobenius_inner(np.eye(d), np.eye(d)) == pytest.approx(d)


def test_frobenius_inner_orthogonal_units():
    m01 = np.zeros((2, 2), dtype=complex)
    m01[0, 1] = 1
    m10 = np.zeros((2, 2), dtype=complex)
    m10[1, 0] = 1
    assert frobenius_inner(m01, m10) == pytest.approx(0)


def test_frobenius_inner_self():
    a = np.array([[1, 1j], [0, 2]], dtype=complex)
    assert frobenius_inner(a, a) == pytest.approx(6)
    assert frobenius_norm(a) == pytest.approx(np.sqrt(6))


def test_frobenius_inner_shape_mismatch():
    with pytest.raises(ValueError):
        frobenius_inner(np.eye(2), np.eye(3))


def test_hermitian_eigen_diag():
    eig = hermitian_eigen(np.diag([3.0, 1.0]).astype(complex))
    assert np.allclose(eig.eigenvalues, [1.0, 3.0])


def test_hermitian_eigen_demo_frame_operator():
    eig = hermitian_eigen(E_EXACT)
    assert np.allclose(eig.eigenvalues, [2 / 3, 1.0, 4 / 3], atol=1e-12)


def test_hermitian_eigen_pauli_x():
    eig = hermitian_eigen(np.array([[0, 1], [1, 0]], dtype=complex))
    assert np.allclose(eig.eigenvalues, [-1.0, 1.0])


def test_hermitian_eigen_rejects_non_hermitian():
    with pytest.raises(NotHermitian):
        hermitian_eigen(np.array([[0, 1], [0, 0]], dtype=complex))


def test_hermitian_eigen_random_reconstruction():
    rng = make_rng(101)
    for _ in range(100):
        d = int(rng.integers(2, 9))
        g = random_complex(rng, d, d)
        a = (g + adjoint(g)) / 2
        eig = hermitian_eigen(a)
        v, w = eig.eigenvectors, eig.eigenvalues
        assert np.all(np.diff(w) >= 0)
        rebuilt = (v * w) @ adjoint(v)
        assert frobenius_norm(rebuilt - a) <= 1e-10 * max(1.0, frobenius_norm(a))


def test_inv_sqrt_pd_diag():
    r = inv_sqrt_pd(np.diag([4.0, 1.0]).astype(complex))
    assert np.allclose(r, np.diag([0.5, 1.0]), atol=1e-14)


def test_inv_sqrt_pd_demo_closed_form():
    r = inv_sqrt_pd(E_EXACT)
    assert np.abs(r - E_INV_SQRT_EXACT).max() <= 1e-12
    # R E R = I is the defining property
    assert np.abs(r @ E_EXACT @ r - np.eye(3)).max() <= 1e-12


def test_inv_sqrt_pd_rejects_semidefinite():
    with pytest.raises(NotPositiveDefinite):
        inv_sqrt_pd(np.diag([1.0, 0.0]).astype(complex))
    with pytest.raises(NotPositiveDefinite):
        inv_sqrt_pd(np.diag([1.0, -1.0]).astype(complex))


def test_vectorize_row_major():
    a = np.array([[1, 2], [3, 4]], dtype=complex)
    assert np.array_equal(vectorize(a), [1, 2, 3, 4])
    assert np.array_equal(devectorize(vectorize(a), 2), a)


def test_vectorize_requires_square():
    with pytest.raises(ValueError):
        vectorize(np.zeros((2, 3)))


def test_solve_linear_random_recovery():
    rng = make_rng(77)
    for _ in range(50):
        d = int(rng.integers(2, 8))
        a = random_complex(rng, d, d)
        if np.linalg.cond(a) >= 1e6:
            continue
        x = random_complex(rng, d)
        b = a @ x
        got = solve_linear(a, b)
        assert np.linalg.norm(got - x) <= 1e-10 * max(1.0, np.linalg.norm(x))


def test_solve_linear_matrix_rhs():
    a = np.array([[2.0, 0], [0, 4.0]], dtype=complex)
    got = solve_linear(a, np.eye(2, dtype=complex))
    assert np.allclose(got, np.diag([0.5, 0.25]))


def test_solve_linear_singular():
    with pytest.raises(Singular):
        solve_linear(np.array([[1.0, 2.0], [2.0, 4.0]]), np.array([1.0, 1.0]))


def test_determinant_known_values():
    assert determinant(np.array([[1.0, 2.0], [3.0, 4.0]])) == pytest.approx(-2.0)
    assert determinant(np.eye(3)) == pytest.approx(1.0)
    assert determinant(np.array([[1.0, 2.0], [2.0, 4.0]])) == pytest.approx(0.0)


def test_determinant_matches_numpy_on_random():
    rng = make_rng(5)
    for _ in range(30):
        d = int(rng.integers(2, 7))
        a = random_complex(rng, d, d)
        assert determinant(a) == pytest.approx(np.linalg.det(a), rel=1e-9)


def test_lstsq_consistent_overdetermined():
    rng = make_rng(9)
    a = random_complex(rng, 9, 4)
    x = random_complex(rng, 4)
    got = lstsq_via_normal_equations(a, a @ x)
    assert np.linalg.norm(got - x) <= 1e-9


def test_lstsq_matches_numpy():
    rng = make_rng(10)
    a = random_complex(rng, 9, 4)
    b = random_complex(rng, 9)
    expected, *_ = np.linalg.lstsq(a, b, rcond=None)
    assert np.allclose(lstsq_via_normal_equations(a, b), expected, atol=1e-9)


def test_random_density_matrix_invariants():
    for seed in range(20):
        d = 2 + seed % 4
        rho = random_density_matrix(d, seed)
        assert frobenius_norm(rho - adjoint(rho)) <= 1e-14
        assert hermitian_eigen(rho).eigenvalues[0] >= -1e-12
        assert abs(np.trace(rho).real - 1.0) <= 1e-12


def test_random_density_matrix_deterministic():
    assert np.array_equal(random_density_matrix(3, 42), random_density_matrix(3, 42))
    assert not np.array_equal(random_density_matrix(3, 42), random_density_matrix(3, 43))


def test_make_rng_streams_are_independent():
    a = make_rng(7, stream=0).standard_normal(4)
    b = make_rng(7, stream=1).standard_normal(4)
    assert not np.allclose(a, b)
    assert np.array_equal(a, make_rng(7, stream=0).standard_normal(4))


def test_assert_density_matrix_rejects_bad_inputs():
    with pytest.raises(InvariantError):
        assert_density_matrix(np.diag([0.9, 0.2]).astype(complex))  # trace 1.1
    with pytest.raises(InvariantError):
        assert_density_matrix(np.array([[1.5, 0], [0, -0.5]], dtype=complex))
