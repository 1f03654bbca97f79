"""Weyl-Heisenberg operator basis for a d-level system.

M_alpha = X^j Z^k with alpha = j*d + k, where X is the cyclic shift and Z the
phase matrix diag(omega^c). All phases are computed from integer exponents of
omega so trace orthogonality survives to d = 8 and beyond.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import DimensionTooSmall, InvariantError
from .linalg import adjoint, frobenius_inner, frobenius_norm


@dataclass(frozen=True, eq=False)
class WeylHeisenbergBasis:
    dimension: int
    omega: complex
    operators: list[np.ndarray] = field(default_factory=list)

    @property
    def shift(self) -> np.ndarray:
        """X, the cyclic shift."""
        return self.operators[self.dimension]

    @property
    def phase(self) -> np.ndarray:
        """Z, the diagonal phase matrix."""
        return self.operators[1]


def build_basis(d: int) -> WeylHeisenbergBasis:
    """All d^2 operators X^j Z^k, with the algebra certified at construction."""
    if d < 2:
        raise DimensionTooSmall(f"need d >= 2, got {d}")
    operators = []
    for j in range(d):
        for k in range(d):
            m = np.zeros((d, d), dtype=complex)
            for c in range(d):
                m[(c + j) % d, c] = np.exp(2j * np.pi * ((c * k) % d) / d)
            operators.append(m)
    if frobenius_norm(operators[0] - np.eye(d)) != 0.0:
        raise InvariantError("M_0 is not the identity")
    for alpha in range(1, d * d):
        if abs(np.trace(operators[alpha])) > 1e-12:
            raise InvariantError(f"M_{alpha} has trace {np.trace(operators[alpha])!r}")
    stack = np.array([m.reshape(-1) for m in operators])
    gram = stack.conj() @ stack.T
    if np.abs(gram - d * np.eye(d * d)).max() > 1e-12:
        raise InvariantError("trace orthogonality fails within 1e-12")
    return WeylHeisenbergBasis(
        dimension=d, omega=np.exp(2j * np.pi / d), operators=operators
    )


def adjoint_index(d: int, alpha: int) -> int:
    """Index beta with M_alpha^dagger proportional to M_beta (an involution)."""
    j, k = divmod(alpha, d)
    return ((-j) % d) * d + ((-k) % d)


def commutation_check(basis: WeylHeisenbergBasis, j: int, k: int) -> complex:
    """Measured scalar c with X^j Z^k = c * Z^k X^j (equals omega^(-jk))."""
    d = basis.dimension
    if not (0 <= j < d and 0 <= k < d):
        raise ValueError(f"need 0 <= j, k < {d}, got ({j}, {k})")
    lhs = basis.operators[j * d + k]
    rhs = np.linalg.matrix_power(basis.phase, k) @ np.linalg.matrix_power(
        basis.shift, j
    )
    row, col = np.unravel_index(int(np.argmax(np.abs(rhs))), rhs.shape)
    c = lhs[row, col] / rhs[row, col]
    if np.abs(lhs - c * rhs).max() > 1e-12:
        raise InvariantError("X^j Z^k and Z^k X^j differ by more than a scalar")
    return complex(c)


def twirl(basis: WeylHeisenbergBasis, rho: np.ndarray) -> np.ndarray:
    """sum_alpha M_alpha rho M_alpha^dagger = d * tr(rho) * I."""
    d = basis.dimension
    out = np.zeros((d, d), dtype=complex)
    for m in basis.operators:
        out += m @ rho @ adjoint(m)
    return out


def wh_expand(basis: WeylHeisenbergBasis, rho: np.ndarray) -> np.ndarray:
    """Coefficients c_alpha = tr(M_alpha^dagger rho)."""
    return np.array([frobenius_inner(m, rho) for m in basis.operators])


def wh_assemble(basis: WeylHeisenbergBasis, coeffs) -> np.ndarray:
    """Inverse of wh_expand: (1/d) sum_alpha c_alpha M_alpha."""
    d = basis.dimension
    out = np.zeros((d, d), dtype=complex)
    for c, m in zip(coeffs, basis.operators):
        out += c * m
    return out / d


def orbit(basis: WeylHeisenbergBasis, phi: np.ndarray) -> list[np.ndarray]:
    """The d^2 unit vectors M_alpha |phi> of a unit vector phi."""
    phi = np.asarray(phi, dtype=complex)
    if abs(np.linalg.norm(phi) - 1.0) > 1e-12:
        raise ValueError(f"phi norm {np.linalg.norm(phi)!r} is not 1")
    return [m @ phi for m in basis.operators]
