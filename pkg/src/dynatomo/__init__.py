"""Dynamical quantum state tomography from a single measurement outcome.

The package simulates two reconstruction protocols that trade measurement
diversity for time: evolving a state through a tunable mixture of unitaries
and reading one POVM outcome at several instants, and probing a decaying
averaged channel with a single projector. Supporting modules cover the
linear algebra, informationally complete POVM handling, quasi-Householder
unitary synthesis, shift/phase operator bases, and a CLI with deterministic
JSON/CSV reports.
"""

from .errors import (
    CertificationFailed,
    DimensionTooSmall,
    DynatomoError,
    GoldenMismatch,
    InvalidEffect,
    InvariantError,
    IoError,
    LambdaOutOfRange,
    NegativeTime,
    NoConvergence,
    NotAFiducial,
    NotHermitian,
    NotInformationallyComplete,
    NotPositiveDefinite,
    OverrideNotOrthogonal,
    OverrideViolatesReality,
    ParseError,
    RealityViolated,
    SchemaError,
    Singular,
    SingularDesign,
    ZeroVector,
)
from .linalg import (
    HermitianEigenSystem,
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
from .povm import (
    Povm,
    ProjectorFamily,
    SubnormalizedProjector,
    assert_positive_definite,
    canonical_ic_povm,
    family_from_vectors,
    frame_operator,
    is_ic,
    sic_check,
)
from .householder import (
    NormalizedDirection,
    QuasiHouseholder,
    QuasiHouseholderSet,
    build_quasi_householder,
    build_set,
    choose_eta,
    normalize_direction,
)
from .schedule import (
    DesignMatrix,
    ExpDecaySchedule,
    TimeGrid,
    build_design_K,
    build_design_U,
    default_schedule,
    default_time_grid,
    mu_eval,
    mu_from_lambdas,
)
from .tomography import (
    ProbabilityRecord,
    ReconstructionReport,
    RudEvolution,
    RudProtocolConfig,
    RudRunResult,
    born_probabilities,
    evolve,
    reconstruct_state,
    run_protocol,
    solve_for_q_traces,
)
from .weyl import (
    WeylHeisenbergBasis,
    adjoint_index,
    build_basis,
    commutation_check,
    orbit,
    twirl,
    wh_assemble,
    wh_expand,
)
from .avgchannel import (
    AverageChannel,
    ChannelRunResult,
    FrameOperatorK,
    GramSquaredMatrix,
    assert_fiducial,
    average_channel_apply,
    canonical_orbit_povm,
    default_channel,
    default_channel_grid,
    default_gammas,
    depolarize,
    exp_decay_lambdas,
    gram_squared,
    orbit_frame_operator,
    perturb_family,
    probe_probability,
    reconstruct_via_single_projector,
    simulate_sic,
    solve_orbit_traces,
)

__version__ = "0.1.0"
