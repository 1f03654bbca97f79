"""End-to-end state reconstruction from random-unitary dynamics.

The state evolves as rho(t) = sum_i mu_i(t) H_i rho(0) H_i^dagger; measuring
the single canonical-POVM element Q_j at x instants and inverting the design
matrix recovers every tr(Q_i rho(0)), from which rho(0) follows by least
squares.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import (
    InvalidEffect,
    InvariantError,
    NotInformationallyComplete,
    Singular,
    SingularDesign,
)
from .householder import QuasiHouseholderSet, build_set
from .linalg import (
    adjoint,
    assert_density_matrix,
    devectorize,
    frobenius_norm,
    inv_sqrt_pd,
    lstsq_via_normal_equations,
    make_rng,
    random_density_matrix,
    solve_linear,
    vectorize,
)
from .povm import (
    Povm,
    ProjectorFamily,
    assert_positive_definite,
    frame_operator,
    is_ic,
)
from .schedule import (
    DesignMatrix,
    ExpDecaySchedule,
    TimeGrid,
    build_design_K,
    default_schedule,
    default_time_grid,
    mu_eval,
)


@dataclass(frozen=True, eq=False)
class RudEvolution:
    """Mixing unitaries plus the schedule that weights them."""

    unitaries: list[np.ndarray]
    schedule: ExpDecaySchedule

    def __post_init__(self):
        if len(self.unitaries) != self.schedule.count:
            raise InvariantError(
                f"{len(self.unitaries)} unitaries for a {self.schedule.count}-outcome schedule"
            )
        for k, u in enumerate(self.unitaries):
            d = u.shape[0]
            if frobenius_norm(adjoint(u) @ u - np.eye(d)) > 1e-10:
                raise InvariantError(f"unitary {k} fails unitarity within 1e-10")


@dataclass(frozen=True, eq=False)
class ProbabilityRecord:
    """Measured (or exact) outcome probabilities over a time grid."""

    grid: TimeGrid
    outcome_index: int
    values: np.ndarray
    shots: int

    def __post_init__(self):
        values = np.asarray(self.values, dtype=float)
        if len(values) and (values.min() < -1e-9 or values.max() > 1 + 1e-9):
            raise InvariantError(
                f"probabilities outside [0, 1]: range "
                f"[{values.min()!r}, {values.max()!r}]"
            )
        object.__setattr__(self, "values", np.clip(values, 0.0, 1.0))
        if self.shots < 0:
            raise InvariantError("shots must be >= 0 (0 means exact)")


@dataclass(frozen=True, eq=False)
class ReconstructionReport:
    """Recovered state plus the diagnostics of how it was obtained."""

    recovered_rho: np.ndarray
    raw_solution: np.ndarray
    frobenius_error_vs_truth: float | None
    trace_deviation: float
    min_eigenvalue: float
    design_condition: float | None

    def __post_init__(self):
        rho = self.recovered_rho
        if frobenius_norm(rho - adjoint(rho)) > 1e-12:
            raise InvariantError("recovered state is not Hermitian within 1e-12")
        if abs(np.trace(rho).real - 1.0) > 1e-10:
            raise InvariantError(
                f"recovered state trace {np.trace(rho).real!r} is not 1"
            )


def evolve(ev: RudEvolution, rho0: np.ndarray, t: float) -> np.ndarray:
    """rho(t) = sum_i mu_i(t) H_i rho(0) H_i^dagger."""
    assert_density_matrix(rho0)
    mu = mu_eval(ev.schedule, t)
    d = rho0.shape[0]
    out = np.zeros((d, d), dtype=complex)
    for weight, u in zip(mu, ev.unitaries):
        out += weight * (u @ rho0 @ adjoint(u))
    return out


def born_probabilities(
    ev: RudEvolution,
    rho0: np.ndarray,
    effect: np.ndarray,
    grid: TimeGrid,
    shots: int = 0,
    seed: int = 0,
    outcome_index: int = 0,
) -> ProbabilityRecord:
    """tr(Q rho(t)) at each instant, optionally binomially sampled.

    With shots > 0 each exact value p is replaced by the success fraction of
    `shots` Bernoulli(p) draws from the (seed, stream 1) generator.
    """
    effect = np.asarray(effect, dtype=complex)
    if frobenius_norm(effect - adjoint(effect)) > 1e-10:
        raise InvalidEffect("effect is not Hermitian")
    w = np.linalg.eigvalsh((effect + adjoint(effect)) / 2)
    if w[0] < -1e-10 or w[-1] > 1 + 1e-10:
        raise InvalidEffect(
            f"effect eigenvalues [{w[0]:.3e}, {w[-1]:.3e}] leave [0, 1]"
        )
    exact = np.array(
        [np.trace(effect @ evolve(ev, rho0, t)).real for t in grid.instants]
    )
    if shots > 0:
        rng = make_rng(seed, stream=1)
        values = rng.binomial(shots, np.clip(exact, 0.0, 1.0)) / shots
    else:
        values = exact
    return ProbabilityRecord(
        grid=grid, outcome_index=outcome_index, values=values, shots=shots
    )


def solve_for_q_traces(record: ProbabilityRecord, design: DesignMatrix) -> np.ndarray:
    """Invert the design matrix: returns the vector {tr(Q_i rho(0))}."""
    if len(record.values) != design.matrix.shape[0]:
        raise ValueError(
            f"{len(record.values)} probabilities for a "
            f"{design.matrix.shape[0]}-instant design"
        )
    try:
        return solve_linear(design.matrix, record.values).real
    except Singular as exc:
        raise SingularDesign(str(exc)) from exc


def reconstruct_state(
    v,
    povm: Povm,
    truth: np.ndarray | None = None,
    design_condition: float | None = None,
) -> ReconstructionReport:
    """Least-squares state from the trace values of an IC POVM.

    Solves tr(Q_i rho) = v_i over vectorized rho, hermitizes, then projects
    onto the PSD unit-trace cone by clipping negative eigenvalues and
    renormalizing. Both the raw minimizer and the projected state are kept.
    """
    ok, rank = is_ic(povm.elements)
    d = povm.dimension
    if not ok:
        raise NotInformationallyComplete(
            f"POVM spans rank {rank} < {d * d}; cannot reconstruct"
        )
    rows = np.array([vectorize(el).conj() for el in povm.elements])
    raw = devectorize(
        lstsq_via_normal_equations(rows, np.asarray(v, dtype=complex)), d
    )
    herm = (raw + adjoint(raw)) / 2
    eigs, vecs = np.linalg.eigh(herm)
    clipped = np.clip(eigs, 0.0, None)
    total = float(clipped.sum())
    if total <= 0:
        raise InvariantError("projection collapsed to the zero matrix")
    rho = (vecs * (clipped / total)) @ adjoint(vecs)
    rho = (rho + adjoint(rho)) / 2
    return ReconstructionReport(
        recovered_rho=rho,
        raw_solution=raw,
        frobenius_error_vs_truth=(
            frobenius_norm(rho - truth) if truth is not None else None
        ),
        trace_deviation=abs(np.trace(raw).real - 1.0),
        min_eigenvalue=float(eigs[0]),
        design_condition=design_condition,
    )


@dataclass(frozen=True, eq=False)
class RudProtocolConfig:
    """Everything run_protocol needs; None fields fall back to defaults."""

    family: ProjectorFamily
    outcome_index: int
    schedule: ExpDecaySchedule | None = None
    grid: TimeGrid | None = None
    shots: int = 0
    seed: int = 0
    rho0: np.ndarray | None = None
    overrides: dict | None = None


@dataclass(frozen=True, eq=False)
class RudRunResult:
    """Report plus the intermediates the CLI serializes."""

    report: ReconstructionReport
    record: ProbabilityRecord
    design: DesignMatrix
    povm: Povm
    rho0: np.ndarray
    reflections: QuasiHouseholderSet


def run_protocol(config: RudProtocolConfig) -> RudRunResult:
    """Compose the full pipeline: whiten, reflect, schedule, measure, invert."""
    fam = config.family
    d = fam.dimension
    x = fam.size
    if x < d * d:
        raise InvariantError(
            f"tomography needs at least d^2 = {d * d} projectors, got {x}"
        )
    p = frame_operator(fam)
    assert_positive_definite(p)
    r = inv_sqrt_pd(p)
    reflections = build_set(fam, config.outcome_index, r, overrides=config.overrides)
    povm = Povm(
        dimension=d, elements=[r @ proj.matrix @ r for proj in fam.projectors]
    )
    sched = config.schedule if config.schedule is not None else default_schedule(x)
    grid = config.grid if config.grid is not None else default_time_grid(x)
    design = build_design_K(sched, grid, reflections.p_tilde)
    rho0 = (
        config.rho0
        if config.rho0 is not None
        else random_density_matrix(d, config.seed)
    )
    assert_density_matrix(rho0)
    ev = RudEvolution(unitaries=reflections.dynamics_unitaries(), schedule=sched)
    record = born_probabilities(
        ev,
        rho0,
        povm.elements[config.outcome_index],
        grid,
        shots=config.shots,
        seed=config.seed,
        outcome_index=config.outcome_index,
    )
    v = solve_for_q_traces(record, design)
    report = reconstruct_state(
        v, povm, truth=rho0, design_condition=design.condition_estimate
    )
    return RudRunResult(
        report=report,
        record=record,
        design=design,
        povm=povm,
        rho0=rho0,
        reflections=reflections,
    )
