"""Exception types shared across the package.

Each class maps to a distinct CLI exit code, see cli.EXIT_CODES.
"""


class TMotiveError(Exception):
    """Base class for all package errors."""


class FieldError(TMotiveError):
    """Ambient finite field cannot satisfy a request (missing root, bad modulus)."""


class FieldMismatchError(TMotiveError):
    """Operands belong to different ambient fields."""


class PrecisionError(TMotiveError):
    """Tracked precision was exhausted before the requested computation finished."""


class NonContractionError(TMotiveError):
    """A fixed-point iteration failed to strictly increase its residual valuation."""


class SingularMatrixError(TMotiveError):
    """No usable pivot: matrix is singular to working precision."""


class NeighborhoodError(TMotiveError):
    """Input lies outside the configured neighborhood of the base point."""


class GammaShapeError(TMotiveError):
    """Matrix does not have the stabilizer block shape (G, w^2 H; H, G) over F_q[theta]."""


class RecoveryError(TMotiveError):
    """Polynomial change-of-basis recovery between lattice bases failed."""


class SchemaError(TMotiveError):
    """JSON input does not conform to the documented schema."""
