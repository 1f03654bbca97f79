"""Time-dependent averaged channels and single-projector reconstruction.

Averaging d^2 depolarizing-style channels over the Weyl-Heisenberg basis
gives the Kraus mixture sum_alpha mu_alpha(t) M_alpha rho M_alpha^dagger.
Measuring one projector |phi><phi| at d^2 instants and inverting the design
matrix recovers every tr(rho |psi_alpha><psi_alpha|) with
|psi_alpha> = M_alpha^dagger |phi>, which is enough to reconstruct rho
whenever the orbit of phi is informationally complete.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import (
    InvariantError,
    LambdaOutOfRange,
    NotAFiducial,
    NotInformationallyComplete,
    Singular,
    SingularDesign,
    ZeroVector,
)
from .linalg import adjoint, determinant, inv_sqrt_pd, make_rng, solve_linear
from .povm import Povm, is_ic
from .schedule import TimeGrid, build_design_U, mu_from_lambdas
from .tomography import ProbabilityRecord, ReconstructionReport, reconstruct_state
from .weyl import WeylHeisenbergBasis, adjoint_index, build_basis, orbit


@dataclass(frozen=True, eq=False)
class AverageChannel:
    """Weyl-Heisenberg basis plus one decay function per basis element."""

    basis: WeylHeisenbergBasis
    lambda_fns: list = field(default_factory=list)

    def __post_init__(self):
        n = self.basis.dimension ** 2
        if len(self.lambda_fns) != n:
            raise InvariantError(
                f"need {n} decay functions, got {len(self.lambda_fns)}"
            )

    def lambdas_at(self, t: float) -> np.ndarray:
        return np.array([f(t) for f in self.lambda_fns], dtype=float)


@dataclass(frozen=True, eq=False)
class GramSquaredMatrix:
    """Matrix of squared overlaps |<phi_j|phi_k>|^2 with its determinant."""

    matrix: np.ndarray
    det: float

    def __post_init__(self):
        m = self.matrix
        if np.abs(m - m.T).max() > 1e-12:
            raise InvariantError("squared-overlap matrix is not symmetric")
        if np.abs(np.diag(m) - 1.0).max() > 1e-12:
            raise InvariantError("diagonal is not 1: inputs were not unit vectors")


@dataclass(frozen=True, eq=False)
class FrameOperatorK:
    matrix: np.ndarray
    inv_sqrt: np.ndarray


@dataclass(frozen=True, eq=False)
class ChannelRunResult:
    report: ReconstructionReport
    record: ProbabilityRecord
    design: object
    traces: np.ndarray


def default_gammas(d: int, ratio: float = 6.0) -> np.ndarray:
    """Geometric decay ladder gamma_alpha = ratio^alpha, alpha = 0..d^2-1."""
    return ratio ** np.arange(d * d, dtype=float)


def exp_decay_lambdas(gammas) -> list:
    return [lambda t, g=float(g): float(np.exp(-g * t)) for g in gammas]


def default_channel(d: int, ratio: float = 6.0) -> AverageChannel:
    return AverageChannel(
        basis=build_basis(d), lambda_fns=exp_decay_lambdas(default_gammas(d, ratio))
    )


def default_channel_grid(d: int, ratio: float = 6.0, scale: float = 0.5) -> TimeGrid:
    """One instant per decade of the gamma ladder; keeps the design invertible."""
    n = d * d
    return TimeGrid(instants=scale * ratio ** (np.arange(n, dtype=float) - (n - 1)))


def depolarize(rho0: np.ndarray, lambda0: float, d: int) -> np.ndarray:
    """lambda rho + (1 - lambda)/d * I, the isotropic noise channel."""
    if not 0.0 <= lambda0 <= 1.0:
        raise LambdaOutOfRange(f"lambda0 = {lambda0!r} outside [0, 1]")
    return lambda0 * np.asarray(rho0, dtype=complex) + (
        (1.0 - lambda0) / d
    ) * np.eye(d)


def average_channel_apply(ch: AverageChannel, rho0: np.ndarray, t: float) -> np.ndarray:
    """Kraus mixture sum_alpha mu_alpha(t) M_alpha rho M_alpha^dagger."""
    d = ch.basis.dimension
    mu = mu_from_lambdas(ch.lambdas_at(t), d)
    out = np.zeros((d, d), dtype=complex)
    for weight, m in zip(mu, ch.basis.operators):
        out += weight * (m @ rho0 @ adjoint(m))
    return out


def probe_probability(
    ch: AverageChannel, rho0: np.ndarray, phi: np.ndarray, t: float
) -> float:
    """tr(Psi_t(rho) |phi><phi|) for a unit probe vector phi."""
    phi = np.asarray(phi, dtype=complex)
    if abs(np.linalg.norm(phi) - 1.0) > 1e-12:
        raise ValueError(f"phi norm {np.linalg.norm(phi)!r} is not 1")
    out = average_channel_apply(ch, rho0, t)
    return float(np.vdot(phi, out @ phi).real)


def solve_orbit_traces(
    ch: AverageChannel,
    phi: np.ndarray,
    grid,
    rho0: np.ndarray | None = None,
    p_values=None,
    shots: int = 0,
    seed: int = 0,
) -> tuple[np.ndarray, ProbabilityRecord, object]:
    """Shared solve stage: invert the design to get the orbit trace values.

    Exactly one of rho0 (simulate the probe probabilities, optionally with
    shot noise) or p_values (externally measured) must be given. Returns
    (traces y with y_alpha = tr(rho |psi_alpha><psi_alpha|), record, design).
    """
    d = ch.basis.dimension
    if (rho0 is None) == (p_values is None):
        raise ValueError("pass exactly one of rho0 or p_values")
    design = build_design_U(ch.lambda_fns, grid, d)
    grid = grid if isinstance(grid, TimeGrid) else TimeGrid(instants=np.asarray(grid, dtype=float))
    if p_values is not None:
        values = np.asarray(p_values, dtype=float)
    else:
        exact = np.array(
            [probe_probability(ch, rho0, phi, t) for t in grid.instants]
        )
        if shots > 0:
            rng = make_rng(seed, stream=1)
            values = rng.binomial(shots, np.clip(exact, 0.0, 1.0)) / shots
        else:
            values = exact
    record = ProbabilityRecord(grid=grid, outcome_index=0, values=values, shots=shots)
    try:
        traces = solve_linear(design.matrix, record.values).real
    except Singular as exc:
        raise SingularDesign(str(exc)) from exc
    return traces, record, design


def reconstruct_via_single_projector(
    ch: AverageChannel,
    phi: np.ndarray,
    grid,
    rho0: np.ndarray | None = None,
    p_values=None,
    shots: int = 0,
    seed: int = 0,
) -> ChannelRunResult:
    """Full reconstruction of rho from the single-projector time series.

    The recovered trace values feed a least-squares solve over the projectors
    |psi_alpha><psi_alpha| / d, which form a POVM for any unit phi (the orbit
    frame operator is d * I); informational completeness of the orbit is what
    makes the solve well-posed.
    """
    d = ch.basis.dimension
    traces, record, design = solve_orbit_traces(
        ch, phi, grid, rho0=rho0, p_values=p_values, shots=shots, seed=seed
    )
    phi = np.asarray(phi, dtype=complex)
    psis = [adjoint(m) @ phi for m in ch.basis.operators]
    povm = Povm(
        dimension=d,
        elements=[np.outer(psi, psi.conj()) / d for psi in psis],
    )
    report = reconstruct_state(
        traces / d,
        povm,
        truth=rho0,
        design_condition=design.condition_estimate,
    )
    return ChannelRunResult(
        report=report, record=record, design=design, traces=traces
    )


def gram_squared(orbit_vectors) -> GramSquaredMatrix:
    """Squared-overlap matrix of the orbit, with its determinant."""
    vecs = [np.asarray(v, dtype=complex) for v in orbit_vectors]
    n = len(vecs)
    m = np.empty((n, n))
    for a in range(n):
        for b in range(n):
            m[a, b] = abs(np.vdot(vecs[a], vecs[b])) ** 2
    return GramSquaredMatrix(matrix=m, det=float(determinant(m).real))


def orbit_frame_operator(orbit_vectors) -> FrameOperatorK:
    """K = sum |phi_alpha><phi_alpha| and its inverse square root."""
    vecs = [np.asarray(v, dtype=complex) for v in orbit_vectors]
    d = len(vecs[0])
    k = np.zeros((d, d), dtype=complex)
    for v in vecs:
        k += np.outer(v, v.conj())
    k = (k + adjoint(k)) / 2
    return FrameOperatorK(matrix=k, inv_sqrt=inv_sqrt_pd(k))


def canonical_orbit_povm(orbit_vectors) -> Povm:
    """K^(-1/2) |phi_alpha><phi_alpha| K^(-1/2); for a full orbit, 1/d scaling."""
    fk = orbit_frame_operator(orbit_vectors)
    r = fk.inv_sqrt
    elements = [
        r @ np.outer(v, np.conj(v)) @ r
        for v in (np.asarray(v, dtype=complex) for v in orbit_vectors)
    ]
    ok, rank = is_ic(elements)
    if not ok:
        d = elements[0].shape[0]
        raise NotInformationallyComplete(f"orbit spans rank {rank} < {d * d}")
    return Povm(dimension=elements[0].shape[0], elements=elements)


def perturb_family(phi: np.ndarray, count: int, magnitude: float, seed: int) -> list[dict]:
    """Random perturbations of phi with their orbit determinants.

    Each trial draws real and imaginary offsets uniformly from
    [-magnitude, magnitude]^d (trial k uses stream k of the seed), normalizes,
    and reports det of the squared-overlap matrix plus the rank-based IC
    verdict. The two verdicts are computed independently.
    """
    if magnitude < 0:
        raise ValueError(f"magnitude must be >= 0, got {magnitude}")
    phi = np.asarray(phi, dtype=complex)
    d = len(phi)
    basis = build_basis(d)
    results = []
    for trial in range(count):
        rng = make_rng(seed, stream=trial)
        offset = rng.uniform(-magnitude, magnitude, d) + 1j * rng.uniform(
            -magnitude, magnitude, d
        )
        state = phi + offset
        norm = np.linalg.norm(state)
        if norm <= 1e-13:
            raise ZeroVector("perturbation cancelled the state")
        state = state / norm
        vecs = orbit(basis, state)
        gram = gram_squared(vecs)
        ok, _ = is_ic([np.outer(v, v.conj()) for v in vecs])
        results.append({"state": state, "det": gram.det, "is_ic": ok})
    return results


def assert_fiducial(phi: np.ndarray, basis: WeylHeisenbergBasis, tol: float = 1e-9) -> None:
    """Raise NotAFiducial unless |<phi|M_alpha|phi>|^2 = 1/(d+1) for alpha != 0."""
    d = basis.dimension
    target = 1.0 / (d + 1)
    worst = 0.0
    for m in basis.operators[1:]:
        worst = max(worst, abs(abs(np.vdot(phi, m @ phi)) ** 2 - target))
    if worst > tol:
        raise NotAFiducial(
            f"orbit overlap deviates from 1/(d+1) by {worst:.3e} (tol {tol:.1e})"
        )


def simulate_sic(
    rho0: np.ndarray,
    phi: np.ndarray,
    ch: AverageChannel,
    grid,
    shots: int = 0,
    seed: int = 0,
) -> np.ndarray:
    """Estimate the SIC outcome probabilities tr(rho E_k) from the time series.

    The solve stage recovers tr(rho |psi_alpha><psi_alpha|) with
    |psi_alpha> = M_alpha^dagger |phi>; since M_alpha^dagger is M_beta up to
    phase (beta = adjoint_index), dividing the re-indexed traces by d gives
    the probabilities of E_k = (1/d) M_k |phi><phi| M_k^dagger. Exact-mode
    outputs sum to 1.
    """
    phi = np.asarray(phi, dtype=complex)
    assert_fiducial(phi, ch.basis)
    traces, _, _ = solve_orbit_traces(ch, phi, grid, rho0=rho0, shots=shots, seed=seed)
    d = ch.basis.dimension
    return np.array(
        [traces[adjoint_index(d, k)] / d for k in range(d * d)]
    )
