"""Phase-normalized directions and quasi-Householder reflections.

Given the whitened directions b_i = z_i P^(-1/2)|a_i> / ||..||, each unitary
Hhat_i = conj(eta_i) (I - 2|w><w|) maps the reference direction b_j onto b_i.
Case 1 handles b_j ~ eta b_i (reflector chosen orthogonal to b_j), Case 2 the
generic reflector (b_j - eta b_i) / ||..||.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import (
    CertificationFailed,
    DimensionTooSmall,
    InvariantError,
    OverrideNotOrthogonal,
    OverrideViolatesReality,
    RealityViolated,
    ZeroVector,
)
from .linalg import adjoint, frobenius_norm
from .povm import ProjectorFamily


@dataclass(frozen=True, eq=False)
class NormalizedDirection:
    """Decomposition v = (lam / z) * b with ||b|| = 1 and |z| = 1."""

    lam: float
    b: np.ndarray
    z: complex

    def __post_init__(self):
        if not self.lam > 0:
            raise InvariantError(f"lam must be positive, got {self.lam}")
        if abs(np.linalg.norm(self.b) - 1.0) > 1e-12:
            raise InvariantError("b is not a unit vector")
        if abs(abs(self.z) - 1.0) > 1e-12:
            raise InvariantError("z is not unit modulus")


@dataclass(frozen=True, eq=False)
class QuasiHouseholder:
    """A unit-modulus scalar times a Householder reflection."""

    eta: complex
    case_tag: str
    reflector_vector: np.ndarray
    matrix: np.ndarray

    def __post_init__(self):
        d = self.matrix.shape[0]
        if frobenius_norm(adjoint(self.matrix) @ self.matrix - np.eye(d)) > 1e-10:
            raise InvariantError("matrix is not unitary within 1e-10")
        w = self.reflector_vector
        rebuilt = np.conj(self.eta) * (np.eye(d) - 2 * np.outer(w, w.conj()))
        if frobenius_norm(self.matrix - rebuilt) > 1e-10:
            raise InvariantError("matrix does not match its stored reflector")


@dataclass(frozen=True, eq=False)
class QuasiHouseholderSet:
    """All reflections mapping b_j to each b_i, plus the rescaled weights."""

    reference_index: int
    set: list[QuasiHouseholder] = field(default_factory=list)
    p_tilde: np.ndarray = None
    directions: list[NormalizedDirection] = field(default_factory=list)

    def dynamics_unitaries(self) -> list[np.ndarray]:
        """The evolution unitaries H_i = Hhat_i^dagger."""
        return [adjoint(qh.matrix) for qh in self.set]


def normalize_direction(v: np.ndarray, z: complex = 1.0) -> NormalizedDirection:
    """Split v into lam * b / z with b = z v / ||v||."""
    v = np.asarray(v, dtype=complex)
    norm = float(np.linalg.norm(v))
    if norm <= 1e-13:
        raise ZeroVector(f"norm {norm:.3e} below 1e-13")
    if abs(abs(z) - 1.0) > 1e-12:
        raise ValueError(f"z must be unit modulus, got |z| = {abs(z)!r}")
    return NormalizedDirection(lam=norm, b=z * v / norm, z=complex(z))


def choose_eta(b_i: np.ndarray, b_j: np.ndarray, override: complex | None = None) -> complex:
    """Unit-modulus eta with conj(eta) <b_i|b_j> real.

    Default takes the phase of <b_i|b_j> (real part nonnegative), falling back
    to 1 when the overlap vanishes. An override is validated against the
    reality condition within 1e-12.
    """
    ip = np.vdot(np.asarray(b_i, dtype=complex), np.asarray(b_j, dtype=complex))
    if override is not None:
        override = complex(override)
        if abs(abs(override) - 1.0) > 1e-12:
            raise OverrideViolatesReality(f"|eta| = {abs(override)!r} is not 1")
        if abs((np.conj(override) * ip).imag) > 1e-12:
            raise OverrideViolatesReality(
                f"conj(eta) <b_i|b_j> = {np.conj(override) * ip!r} is not real"
            )
        return override
    if abs(ip) > 1e-13:
        return complex(ip / abs(ip))
    return 1.0 + 0.0j


def _default_case1_reflector(b_j: np.ndarray) -> np.ndarray:
    """Basis vector with least overlap with b_j, orthogonalized against it."""
    k = int(np.argmin(np.abs(b_j)))
    u = np.zeros_like(b_j)
    u[k] = 1.0
    u = u - b_j * np.vdot(b_j, u)
    return u / np.linalg.norm(u)


def build_quasi_householder(
    b_i: np.ndarray,
    b_j: np.ndarray,
    eta: complex,
    case1_tol: float = 1e-10,
    u_tilde_override: np.ndarray | None = None,
) -> QuasiHouseholder:
    """Reflection sending b_j to b_i, given a reality-compatible eta."""
    b_i = np.asarray(b_i, dtype=complex)
    b_j = np.asarray(b_j, dtype=complex)
    d = len(b_j)
    if d < 2:
        raise DimensionTooSmall("no orthogonal complement exists in dimension 1")
    eta = complex(eta)
    if abs((np.conj(eta) * np.vdot(b_i, b_j)).imag) > 1e-12:
        raise RealityViolated(f"conj(eta) <b_i|b_j> not real for eta = {eta!r}")
    delta = b_j - eta * b_i
    gap = float(np.linalg.norm(delta))
    if gap < case1_tol:
        if u_tilde_override is not None:
            u = np.asarray(u_tilde_override, dtype=complex)
            u = u / np.linalg.norm(u)
            if abs(np.vdot(u, b_j)) > 1e-12:
                raise OverrideNotOrthogonal(
                    f"<u_tilde|b_j> = {np.vdot(u, b_j)!r} is not 0"
                )
        else:
            u = _default_case1_reflector(b_j)
        tag = "Case1"
    else:
        u = delta / gap
        tag = "Case2"
    matrix = np.conj(eta) * (np.eye(d) - 2 * np.outer(u, u.conj()))
    return QuasiHouseholder(eta=eta, case_tag=tag, reflector_vector=u, matrix=matrix)


def build_set(
    fam: ProjectorFamily,
    j: int,
    p_inv_sqrt: np.ndarray,
    overrides: dict | None = None,
) -> QuasiHouseholderSet:
    """Build every Hhat_i against reference index j and certify the set.

    p_inv_sqrt is the whitening operator applied to the family directions;
    passing it explicitly keeps the synthesis independent of how the frame
    operator was obtained. overrides maps an index to any of
    {"z": phase, "eta": phase, "u_tilde": vector}.

    Certifies Hhat_i b_j = b_i within 1e-10 and the conjugation identity
    Q_i = p_tilde_i Hhat_i Q_j Hhat_i^dagger within 1e-9, where
    Q_i = p_inv_sqrt P_i p_inv_sqrt.
    """
    if fam.dimension < 2:
        raise DimensionTooSmall("tomography needs dimension at least 2")
    if not 0 <= j < fam.size:
        raise ValueError(f"reference index {j} outside 0..{fam.size - 1}")
    overrides = overrides or {}
    p_inv_sqrt = np.asarray(p_inv_sqrt, dtype=complex)

    directions = []
    for i, proj in enumerate(fam.projectors):
        z = complex(overrides.get(i, {}).get("z", 1.0))
        directions.append(normalize_direction(p_inv_sqrt @ proj.direction, z=z))

    ref = directions[j]
    weights = np.array([p.weight for p in fam.projectors])
    p_tilde = np.array(
        [
            weights[i] * directions[i].lam ** 2 / (weights[j] * ref.lam**2)
            for i in range(fam.size)
        ]
    )

    reflections = []
    for i, nd in enumerate(directions):
        ov = overrides.get(i, {})
        eta = choose_eta(nd.b, ref.b, override=ov.get("eta"))
        reflections.append(
            build_quasi_householder(
                nd.b, ref.b, eta, u_tilde_override=ov.get("u_tilde")
            )
        )

    q = [p_inv_sqrt @ proj.matrix @ p_inv_sqrt for proj in fam.projectors]
    for i, qh in enumerate(reflections):
        mapping_err = float(np.linalg.norm(qh.matrix @ ref.b - directions[i].b))
        if mapping_err > 1e-10:
            raise CertificationFailed(
                f"Hhat_{i} b_j differs from b_{i} by {mapping_err:.3e}"
            )
        conj_err = frobenius_norm(
            q[i] - p_tilde[i] * qh.matrix @ q[j] @ adjoint(qh.matrix)
        )
        if conj_err > 1e-9:
            raise CertificationFailed(
                f"conjugation identity fails at index {i}: {conj_err:.3e}"
            )

    return QuasiHouseholderSet(
        reference_index=j, set=reflections, p_tilde=p_tilde, directions=directions
    )
