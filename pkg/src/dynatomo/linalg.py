"""Dense complex linear algebra building blocks.

All matrices are plain numpy arrays of complex128. Conventions fixed here and
relied on by the rest of the package: eigenvalues ascending, row-major
vectorization, and all randomness through seeded counter-based generators.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import (
    InvariantError,
    NoConvergence,
    NotHermitian,
    NotPositiveDefinite,
    Singular,
)


def make_rng(seed: int, stream: int = 0) -> np.random.Generator:
    """Counter-based generator for a (seed, stream) pair.

    Same pair gives the same draws on any platform; distinct streams are
    statistically independent, which is what lets trials run in parallel
    without the results depending on execution order.
    """
    key = np.array([seed & (2**64 - 1), stream & (2**64 - 1)], dtype=np.uint64)
    return np.random.Generator(np.random.Philox(key=key))


def adjoint(a: np.ndarray) -> np.ndarray:
    """Conjugate transpose."""
    return np.asarray(a).conj().T


def frobenius_inner(a: np.ndarray, b: np.ndarray) -> complex:
    """tr(A^dagger B), the Hilbert-Schmidt inner product."""
    a = np.asarray(a)
    b = np.asarray(b)
    if a.shape != b.shape:
        raise ValueError(f"shape mismatch: {a.shape} vs {b.shape}")
    return complex(np.vdot(a, b))


def frobenius_norm(a: np.ndarray) -> float:
    return float(np.linalg.norm(a))


@dataclass(frozen=True)
class HermitianEigenSystem:
    """Eigendecomposition A = V diag(w) V^dagger with w ascending."""

    eigenvalues: np.ndarray
    eigenvectors: np.ndarray

    def __post_init__(self):
        v = self.eigenvectors
        d = v.shape[0]
        if frobenius_norm(adjoint(v) @ v - np.eye(d)) > 1e-10:
            raise InvariantError("eigenvector matrix is not orthonormal")


def hermitian_eigen(a: np.ndarray, tol: float = 1e-10) -> HermitianEigenSystem:
    """Eigendecomposition of a Hermitian matrix, eigenvalues ascending.

    Raises NotHermitian when ||A - A^dagger||_F exceeds tol * max(1, ||A||_F)
    and NoConvergence if the underlying solver gives up.
    """
    a = np.asarray(a, dtype=complex)
    scale = max(1.0, frobenius_norm(a))
    if frobenius_norm(a - adjoint(a)) > tol * scale:
        raise NotHermitian(
            f"asymmetry {frobenius_norm(a - adjoint(a)):.3e} exceeds {tol:.1e} * {scale:.3e}"
        )
    try:
        w, v = np.linalg.eigh(a)
    except np.linalg.LinAlgError as exc:
        raise NoConvergence(str(exc)) from exc
    system = HermitianEigenSystem(eigenvalues=w, eigenvectors=v)
    residual = frobenius_norm(a - (v * w) @ adjoint(v))
    if residual > 1e-10 * scale:
        raise InvariantError(f"eigen reconstruction residual {residual:.3e}")
    return system


def inv_sqrt_pd(a: np.ndarray, eig_floor: float | None = None) -> np.ndarray:
    """Inverse square root of a positive definite Hermitian matrix.

    eig_floor defaults to 1e-12 times the largest eigenvalue; anything below
    it raises NotPositiveDefinite.
    """
    system = hermitian_eigen(a)
    w, v = system.eigenvalues, system.eigenvectors
    if eig_floor is None:
        eig_floor = 1e-12 * float(w[-1])
    if w[0] < eig_floor:
        raise NotPositiveDefinite(
            f"eigenvalue {w[0]:.3e} below floor {eig_floor:.3e}"
        )
    r = (v * w**-0.5) @ adjoint(v)
    return (r + adjoint(r)) / 2


def vectorize(a: np.ndarray) -> np.ndarray:
    """Row-major stacking of a square matrix into a length d^2 vector."""
    a = np.asarray(a)
    if a.ndim != 2 or a.shape[0] != a.shape[1]:
        raise ValueError(f"expected square matrix, got shape {a.shape}")
    return a.reshape(-1)


def devectorize(v: np.ndarray, d: int) -> np.ndarray:
    return np.asarray(v).reshape(d, d)


def solve_linear(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    """Solve A x = b by Gaussian elimination with partial pivoting.

    b may be a vector or a matrix of stacked right-hand sides. Raises
    Singular when the best available pivot falls below 1e-13 times the
    largest entry of A.
    """
    a = np.array(a, dtype=complex)
    n = a.shape[0]
    if a.shape != (n, n):
        raise ValueError(f"expected square matrix, got shape {a.shape}")
    b = np.array(b, dtype=complex)
    vector_rhs = b.ndim == 1
    if vector_rhs:
        b = b[:, None]
    scale = float(np.abs(a).max()) if n else 0.0
    for col in range(n):
        pivot_row = col + int(np.argmax(np.abs(a[col:, col])))
        if np.abs(a[pivot_row, col]) < 1e-13 * scale:
            raise Singular(f"pivot {np.abs(a[pivot_row, col]):.3e} at column {col}")
        if pivot_row != col:
            a[[col, pivot_row]] = a[[pivot_row, col]]
            b[[col, pivot_row]] = b[[pivot_row, col]]
        factors = a[col + 1:, col] / a[col, col]
        a[col + 1:, col:] -= np.outer(factors, a[col, col:])
        b[col + 1:] -= np.outer(factors, b[col])
    x = np.zeros_like(b)
    for row in range(n - 1, -1, -1):
        x[row] = (b[row] - a[row, row + 1:] @ x[row + 1:]) / a[row, row]
    return x[:, 0] if vector_rhs else x


def determinant(a: np.ndarray) -> complex:
    """Determinant via partial-pivot elimination (0 when a pivot vanishes)."""
    a = np.array(a, dtype=complex)
    n = a.shape[0]
    if a.shape != (n, n):
        raise ValueError(f"expected square matrix, got shape {a.shape}")
    det = 1.0 + 0.0j
    for col in range(n):
        pivot_row = col + int(np.argmax(np.abs(a[col:, col])))
        if a[pivot_row, col] == 0:
            return 0.0j
        if pivot_row != col:
            a[[col, pivot_row]] = a[[pivot_row, col]]
            det = -det
        det *= a[col, col]
        factors = a[col + 1:, col] / a[col, col]
        a[col + 1:, col:] -= np.outer(factors, a[col, col:])
    return complex(det)


def lstsq_via_normal_equations(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    """Least-squares solution of A x ~ b through A^dagger A x = A^dagger b."""
    a = np.asarray(a, dtype=complex)
    return solve_linear(adjoint(a) @ a, adjoint(a) @ np.asarray(b, dtype=complex))


def random_density_matrix(d: int, seed: int) -> np.ndarray:
    """Random full-rank density matrix G G^dagger / tr, G complex Gaussian."""
    rng = make_rng(seed)
    g = rng.standard_normal((d, d)) + 1j * rng.standard_normal((d, d))
    rho = g @ adjoint(g)
    return rho / np.trace(rho).real


def assert_density_matrix(rho: np.ndarray, tol: float = 1e-10) -> None:
    """Raise InvariantError unless rho is Hermitian, PSD, and unit trace."""
    rho = np.asarray(rho)
    if frobenius_norm(rho - adjoint(rho)) > tol:
        raise InvariantError("state is not Hermitian")
    if abs(np.trace(rho).real - 1.0) > tol:
        raise InvariantError(f"state trace {np.trace(rho).real!r} is not 1")
    w = np.linalg.eigvalsh((rho + adjoint(rho)) / 2)
    if w[0] < -tol:
        raise InvariantError(f"state has negative eigenvalue {w[0]:.3e}")
