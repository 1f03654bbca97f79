"""Subnormalized projector families, frame operators, and IC/SIC checks.

A family {p_i |a_i><a_i|} with positive definite frame operator P turns into
the canonical POVM Q_i = P^(-1/2) p_i |a_i><a_i| P^(-1/2); informational
completeness is a numerical-rank test on the vectorized elements.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import InvariantError, NotPositiveDefinite
from .linalg import (
    adjoint,
    frobenius_norm,
    hermitian_eigen,
    inv_sqrt_pd,
    vectorize,
)


@dataclass(frozen=True, eq=False)
class SubnormalizedProjector:
    """Weight p > 0 together with a unit direction vector."""

    weight: float
    direction: np.ndarray

    def __post_init__(self):
        if not self.weight > 0:
            raise InvariantError(f"projector weight must be positive, got {self.weight}")
        norm = float(np.linalg.norm(self.direction))
        if abs(norm - 1.0) > 1e-12:
            raise InvariantError(f"direction norm {norm!r} is not 1 within 1e-12")

    @property
    def matrix(self) -> np.ndarray:
        a = np.asarray(self.direction, dtype=complex)
        return self.weight * np.outer(a, a.conj())


@dataclass(frozen=True, eq=False)
class ProjectorFamily:
    """Ordered collection of subnormalized projectors in one dimension."""

    dimension: int
    projectors: list[SubnormalizedProjector] = field(default_factory=list)

    def __post_init__(self):
        for k, proj in enumerate(self.projectors):
            if len(proj.direction) != self.dimension:
                raise InvariantError(
                    f"projector {k} lives in dimension {len(proj.direction)}, "
                    f"family is {self.dimension}"
                )

    @property
    def size(self) -> int:
        return len(self.projectors)


def family_from_vectors(vectors, weights, dimension: int | None = None) -> ProjectorFamily:
    """Build a family from raw (not necessarily normalized) vectors."""
    vectors = [np.asarray(v, dtype=complex) for v in vectors]
    if dimension is None and not vectors:
        raise ValueError("cannot infer the dimension of an empty family")
    d = dimension if dimension is not None else len(vectors[0])
    projs = [
        SubnormalizedProjector(weight=float(p), direction=v / np.linalg.norm(v))
        for p, v in zip(weights, vectors)
    ]
    return ProjectorFamily(dimension=d, projectors=projs)


@dataclass(frozen=True, eq=False)
class Povm:
    """PSD elements summing to the identity."""

    dimension: int
    elements: list[np.ndarray] = field(default_factory=list)

    def __post_init__(self):
        total = np.zeros((self.dimension, self.dimension), dtype=complex)
        for k, el in enumerate(self.elements):
            if frobenius_norm(el - adjoint(el)) > 1e-10:
                raise InvariantError(f"element {k} is not Hermitian within 1e-10")
            w = np.linalg.eigvalsh((el + adjoint(el)) / 2)
            if w[0] < -1e-10:
                raise InvariantError(f"element {k} has eigenvalue {w[0]:.3e} < -1e-10")
            total = total + el
        if frobenius_norm(total - np.eye(self.dimension)) > 1e-10:
            raise InvariantError("elements do not sum to the identity within 1e-10")


def frame_operator(fam: ProjectorFamily) -> np.ndarray:
    """P = sum p_i |a_i><a_i|, Hermitian by construction."""
    if fam.size == 0:
        raise ValueError("family is empty")
    p = np.zeros((fam.dimension, fam.dimension), dtype=complex)
    for proj in fam.projectors:
        p = p + proj.matrix
    return (p + adjoint(p)) / 2


def assert_positive_definite(p: np.ndarray) -> np.ndarray:
    """Return the eigenvalues of P, raising unless min > 1e-12 * max.

    Failure means the directions do not span the space.
    """
    w = hermitian_eigen(p).eigenvalues
    if not w[0] > 1e-12 * w[-1]:
        raise NotPositiveDefinite(
            f"min eigenvalue {w[0]:.3e} vs max {w[-1]:.3e}: family does not span"
        )
    return w


def canonical_ic_povm(fam: ProjectorFamily) -> Povm:
    """Q_i = P^(-1/2) P_i P^(-1/2). Scale-invariant in the weights."""
    p = frame_operator(fam)
    assert_positive_definite(p)
    r = inv_sqrt_pd(p)
    elements = [r @ proj.matrix @ r for proj in fam.projectors]
    return Povm(dimension=fam.dimension, elements=elements)


def is_ic(elements, tol: float = 1e-10) -> tuple[bool, int]:
    """Numerical-rank test: do the elements span the d x d operator space?

    Returns (verdict, rank). Singular values come from the eigenvalues of the
    Gram matrix of the vectorized elements; the rank threshold is
    tol * sigma_max.
    """
    stack = np.array([vectorize(el) for el in elements])
    d = elements[0].shape[0]
    gram = stack @ adjoint(stack)
    w = hermitian_eigen(gram).eigenvalues
    sigma = np.sqrt(np.clip(w, 0.0, None))
    if sigma[-1] == 0.0:
        return False, 0
    rank = int(np.count_nonzero(sigma > tol * sigma[-1]))
    return rank == d * d, rank


def sic_check(states) -> dict:
    """Check the constant-overlap condition |<u_i|u_j>|^2 = 1/(d+1).

    Expects exactly d^2 unit vectors. is_sic also requires that
    (1/d) sum |u_i><u_i| resolves the identity within 1e-9.
    """
    states = [np.asarray(u, dtype=complex) for u in states]
    d = len(states[0])
    if len(states) != d * d:
        raise ValueError(f"expected d^2 = {d * d} states, got {len(states)}")
    for k, u in enumerate(states):
        if abs(np.linalg.norm(u) - 1.0) > 1e-12:
            raise ValueError(f"state {k} is not a unit vector")
    target = 1.0 / (d + 1)
    max_dev = 0.0
    for i in range(len(states)):
        for j in range(i + 1, len(states)):
            overlap = abs(np.vdot(states[i], states[j])) ** 2
            max_dev = max(max_dev, abs(overlap - target))
    total = sum(np.outer(u, u.conj()) for u in states) / d
    sum_dev = frobenius_norm(total - np.eye(d))
    return {
        "max_pairwise_deviation": float(max_dev),
        "sum_deviation": float(sum_dev),
        "is_sic": bool(max_dev <= 1e-9 and sum_dev <= 1e-9),
    }
