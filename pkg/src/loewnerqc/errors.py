"""Exception types shared across the package.

Every numerical failure mode carries enough state (witness point, time,
last good iterate) for the caller to report something actionable.
Mathematical failures (a criterion not holding) are *results*, not
exceptions; exceptions mean an operation could not be carried out.
"""

from __future__ import annotations


class LoewnerQCError(Exception):
    """Base class for all package errors."""


class DomainError(LoewnerQCError):
    """Input lies outside the stated domain of the map."""


class PoleError(DomainError):
    """Evaluation exactly at a pole."""


class DegenerateTransformError(LoewnerQCError):
    """A transform became singular (vanishing derivative at the base point)."""


class SamplingError(LoewnerQCError):
    """Non-finite value met while sampling a circle for coefficients."""

    def __init__(self, message: str, theta: float | None = None):
        super().__init__(message)
        self.theta = theta


class StencilError(LoewnerQCError):
    """A finite-difference stencil point could not be evaluated."""

    def __init__(self, message: str, point: complex | None = None):
        super().__init__(message)
        self.point = point


class DegenerateDerivativeError(LoewnerQCError):
    """|f_z| below threshold, Beltrami quotient undefined."""


class CriticalPointError(LoewnerQCError):
    """f'(z) = 0 where a Schwarzian or pre-Schwarzian was requested."""

    def __init__(self, message: str, witness: complex | None = None):
        super().__init__(message)
        self.witness = witness


class InvalidAuxiliaryError(LoewnerQCError):
    """Auxiliary function failed its own subclass requirement."""


class OutOfBranchError(LoewnerQCError):
    """Argument left the branch of validity of an inverse trig formula."""


class StiffBoundaryError(LoewnerQCError):
    """Step size underflowed near the boundary of the disk."""

    def __init__(self, message: str, last_t: float, last_w: complex):
        super().__init__(message)
        self.last_t = last_t
        self.last_w = last_w


class SwallowingError(LoewnerQCError):
    """Chordal trajectory hit the boundary axis."""

    def __init__(self, message: str, time: float):
        super().__init__(message)
        self.time = time


class HorizonError(LoewnerQCError):
    """Chain limit failed to converge within the maximum horizon."""


class InversionError(LoewnerQCError):
    """Newton inversion of a chain map did not converge."""


class UkViolationError(LoewnerQCError):
    """Driving term left the hyperbolic disk U(k); carries a witness."""

    def __init__(self, message: str, z: complex, t: float, p: complex):
        super().__init__(message)
        self.z = z
        self.t = t
        self.p = p


class NormViolationError(LoewnerQCError):
    """Schwarzian-norm precondition violated; carries a witness."""

    def __init__(self, message: str, witness: complex, value: float):
        super().__init__(message)
        self.witness = witness
        self.value = value


class InvalidBaseError(LoewnerQCError):
    """Base map failed the subclass classifier required by a chain kind."""


class GridEvaluationError(LoewnerQCError):
    """Too many stencil failures on a verification grid."""


class PipelineError(LoewnerQCError):
    """Failure inside an extension pipeline, labelled with its stage."""

    def __init__(self, stage: str, cause: Exception):
        super().__init__(f"stage '{stage}': {cause}")
        self.stage = stage
        self.cause = cause


class SpecFormatError(LoewnerQCError):
    """Run-spec document rejected by strict parsing."""
