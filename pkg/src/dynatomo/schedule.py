"""Time-dependent mixing distributions and the design matrices they induce.

The x-outcome schedule mu_i(t) = (1 - e^(-theta_i t))/x with the remainder
placed on the last component drives the random-unitary protocol; the
d^2-coefficient map mu_from_lambdas drives the average-channel protocol.
Sampling either at a grid of instants gives a square design matrix whose
invertibility is certified at construction.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import (
    InvariantError,
    LambdaOutOfRange,
    NegativeTime,
    SingularDesign,
)
from .linalg import determinant


@dataclass(frozen=True, eq=False)
class ExpDecaySchedule:
    """x outcomes driven by x - 1 distinct positive decay rates."""

    count: int
    thetas: np.ndarray

    def __post_init__(self):
        thetas = np.asarray(self.thetas, dtype=float)
        object.__setattr__(self, "thetas", thetas)
        if self.count < 1:
            raise InvariantError(f"count must be >= 1, got {self.count}")
        if len(thetas) != self.count - 1:
            raise InvariantError(
                f"need {self.count - 1} thetas for count {self.count}, got {len(thetas)}"
            )
        if len(thetas) and thetas.min() <= 0:
            raise InvariantError("thetas must be strictly positive")
        for a in range(len(thetas)):
            for b in range(a + 1, len(thetas)):
                if abs(thetas[a] - thetas[b]) < 1e-9:
                    raise InvariantError(
                        f"thetas {a} and {b} closer than 1e-9: "
                        f"{thetas[a]!r} vs {thetas[b]!r}"
                    )


@dataclass(frozen=True, eq=False)
class TimeGrid:
    """Strictly increasing nonnegative instants."""

    instants: np.ndarray

    def __post_init__(self):
        instants = np.asarray(self.instants, dtype=float)
        object.__setattr__(self, "instants", instants)
        if len(instants) and instants[0] < 0:
            raise InvariantError("instants must be nonnegative")
        if np.any(np.diff(instants) <= 0):
            raise InvariantError("instants must be strictly increasing")

    def __len__(self) -> int:
        return len(self.instants)


@dataclass(frozen=True, eq=False)
class DesignMatrix:
    matrix: np.ndarray
    det: float
    condition_estimate: float


def mu_eval(sched: ExpDecaySchedule, t: float) -> np.ndarray:
    """Probability vector at time t; the last entry carries the remainder.

    At t = 0 all mass sits on the last outcome; as t grows the distribution
    flattens toward uniform.
    """
    if t < 0:
        raise NegativeTime(f"t = {t!r}")
    x = sched.count
    decay = np.exp(-sched.thetas * t)
    out = np.empty(x)
    out[: x - 1] = (1.0 - decay) / x
    out[x - 1] = (1.0 + decay.sum()) / x
    return out


def mu_from_lambdas(lambdas, d: int) -> np.ndarray:
    """Kraus-mixture coefficients of the averaged channel at one instant.

    mu_0 = (1 - lam_0 + d^2 sum lam) / d^4 and
    mu_a = (1 - lam_0 + d^2 (1 - lam_a)) / d^4 for a >= 1; the d^2 entries
    sum to 1 identically.
    """
    lam = np.asarray(lambdas, dtype=float)
    n = d * d
    if len(lam) != n:
        raise ValueError(f"expected {n} lambda values, got {len(lam)}")
    if lam.min() < -1e-12 or lam.max() > 1 + 1e-12:
        raise LambdaOutOfRange(
            f"lambda values must lie in [0, 1], got range "
            f"[{lam.min()!r}, {lam.max()!r}]"
        )
    out = np.empty(n)
    out[0] = (1.0 - lam[0] + n * lam.sum()) / n**2
    out[1:] = (1.0 - lam[0] + n * (1.0 - lam[1:])) / n**2
    return out


def _instants(grid) -> np.ndarray:
    return np.asarray(getattr(grid, "instants", grid), dtype=float)


def _certify(matrix: np.ndarray) -> DesignMatrix:
    # Singularity is judged on sigma_min relative to sigma_max rather than on
    # |det| relative to the row-norm product: for row-stochastic designs that
    # Hadamard-style ratio shrinks like x^(-x/2) with the outcome count and
    # drops below any fixed threshold near x = 12 even for well-conditioned
    # matrices, while the spectral ratio stays scale-free at every size.
    det = determinant(matrix).real
    # The gate reads singular values from a direct SVD: the Gram-eigenvalue
    # route floors sigma_min at ~sqrt(eps) * sigma_max and would never see an
    # exactly rank-deficient design at the 1e-12 level.
    svals = np.linalg.svd(matrix, compute_uv=False)
    if svals[-1] <= 1e-12 * svals[0]:
        raise SingularDesign(
            f"smallest singular value {svals[-1]:.3e} below 1e-12 * largest "
            f"{svals[0]:.3e}: badly chosen instants"
        )
    gram_eigs = np.linalg.eigvalsh(matrix.T @ matrix)
    sigma = np.sqrt(np.clip(gram_eigs, 0.0, None))
    cond = float(sigma[-1] / sigma[0]) if sigma[0] > 0 else float("inf")
    return DesignMatrix(matrix=matrix, det=float(det), condition_estimate=cond)


def build_design_K(sched: ExpDecaySchedule, grid, p_tilde) -> DesignMatrix:
    """K[i][j] = mu_j(t_i) / p_tilde_j, certified invertible."""
    instants = _instants(grid)
    p_tilde = np.asarray(p_tilde, dtype=float)
    if len(instants) != sched.count or len(p_tilde) != sched.count:
        raise ValueError(
            f"need {sched.count} instants and weights, got "
            f"{len(instants)} and {len(p_tilde)}"
        )
    rows = np.array([mu_eval(sched, t) / p_tilde for t in instants])
    return _certify(rows)


def build_design_U(lambda_fns, grid, d: int) -> DesignMatrix:
    """U[i][alpha] = mu_alpha(t_i) for the averaged channel, certified."""
    instants = _instants(grid)
    n = d * d
    if len(lambda_fns) != n:
        raise ValueError(f"expected {n} decay functions, got {len(lambda_fns)}")
    if len(instants) != n:
        raise ValueError(f"expected {n} instants, got {len(instants)}")
    rows = np.array(
        [mu_from_lambdas([f(t) for f in lambda_fns], d) for t in instants]
    )
    return _certify(rows)


def default_schedule(x: int, ratio: float = 6.0) -> ExpDecaySchedule:
    """Geometric decay ladder theta_j = ratio^j, j = 0..x-2."""
    return ExpDecaySchedule(count=x, thetas=ratio ** np.arange(x - 1, dtype=float))


def default_time_grid(x: int, ratio: float = 6.0, scale: float = 0.5) -> TimeGrid:
    """Geometric instants matched to default_schedule's time scales.

    One instant per decade of the theta ladder plus a final one past the
    slowest scale; keeps the design matrix condition number small at any x.
    """
    if x == 1:
        return TimeGrid(instants=np.array([scale]))
    return TimeGrid(instants=scale * ratio ** (np.arange(x, dtype=float) - (x - 2)))
