"""Exception types shared across the package.

Each numerical contract failure gets its own class so callers (and the CLI
exit-code mapping) can distinguish config problems from numerical ones.
"""


class DynatomoError(Exception):
    """Base class for every error raised by this package."""


class InvariantError(DynatomoError):
    """A domain-type invariant was violated at construction time."""


# -- linear algebra ---------------------------------------------------------

class NotHermitian(DynatomoError):
    """Input matrix is not Hermitian within the stated tolerance."""


class NoConvergence(DynatomoError):
    """The eigensolver failed to converge."""


class NotPositiveDefinite(DynatomoError):
    """Matrix has an eigenvalue below the positive-definiteness floor."""


class Singular(DynatomoError):
    """Linear solve hit a pivot below threshold."""


# -- quasi-Householder synthesis -------------------------------------------

class ZeroVector(DynatomoError):
    """A direction with norm below threshold cannot be phase-normalized."""


class OverrideViolatesReality(DynatomoError):
    """A supplied eta fails the conj(eta)*<b_i|b_j> in R condition."""


class RealityViolated(DynatomoError):
    """The eta passed to the reflection builder fails the reality condition."""


class OverrideNotOrthogonal(DynatomoError):
    """A supplied reflector vector is not orthogonal to b_j."""


class CertificationFailed(DynatomoError):
    """A constructed object failed its numerical certificate."""


class DimensionTooSmall(DynatomoError):
    """The construction requires dimension at least 2."""


# -- schedules and designs --------------------------------------------------

class NegativeTime(DynatomoError):
    """Schedules are defined for t >= 0 only."""


class SingularDesign(DynatomoError):
    """Design matrix determinant below the relative threshold."""


# -- tomography -------------------------------------------------------------

class InvalidEffect(DynatomoError):
    """Measurement effect violates 0 <= Q <= I."""


class NotInformationallyComplete(DynatomoError):
    """Operator family does not span the full operator space."""


class LambdaOutOfRange(DynatomoError):
    """Channel decay coefficient outside [0, 1]."""


class NotAFiducial(DynatomoError):
    """State's orbit does not satisfy the constant-overlap condition."""


# -- CLI --------------------------------------------------------------------

class ParseError(DynatomoError):
    """Config file is not valid JSON."""


class SchemaError(DynatomoError):
    """Config JSON violates the schema; message lists JSON-pointer paths."""


class GoldenMismatch(DynatomoError):
    """Computed values differ from shipped reference data."""


class IoError(DynatomoError):
    """Report or config file could not be read or written."""
