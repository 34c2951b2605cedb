"""Exception hierarchy.

Exit-code mapping used by the CLI:
  2 -> configuration / input errors (ConfigError, ParseError, CatalogKeyError,
       ConstructionError, DimensionMismatchError, PreconditionError)
  3 -> numerical failures (NumericalError, RangeCoverageError, ConditioningError,
       PoleError, BranchTrackingError)
  4 -> verification failures (VerificationError)
"""


class SpectralCfError(Exception):
    """Base class for all library errors."""


class ConfigError(SpectralCfError):
    """Invalid run configuration or unknown identifier."""


class ParseError(ConfigError):
    """Malformed input file; carries line/column context."""

    def __init__(self, message: str, line: int | None = None, column: int | None = None):
        loc = ""
        if line is not None:
            loc = f" (line {line}" + (f", column {column}" if column is not None else "") + ")"
        super().__init__(message + loc)
        self.line = line
        self.column = column


class CatalogKeyError(ConfigError):
    """Unknown catalogue name."""


class ConstructionError(SpectralCfError):
    """A domain-type invariant failed at construction (e.g. non-Hermitian input)."""


class DimensionMismatchError(SpectralCfError):
    """Operator/state dimensions do not match."""


class PreconditionError(SpectralCfError):
    """An operation precondition was violated."""


class NumericalError(SpectralCfError):
    """A numerical routine failed (non-convergence, residual too large, ...)."""


class ConditioningError(NumericalError):
    """Requested computation would be numerically ill-conditioned."""


class PoleError(NumericalError):
    """Evaluation requested at (or too close to) a pole of a closed form."""


class BranchTrackingError(NumericalError):
    """Square-root branch tracking failed (denominator winds through zero)."""


class RangeCoverageError(NumericalError):
    """Configured spectral window does not cover the spectrum.

    Carries suggested bounds derived from a Gershgorin pre-scan and the
    observed mass distribution.
    """

    def __init__(self, message: str, suggested_lo: float, suggested_hi: float):
        super().__init__(f"{message}; suggested window [{suggested_lo:.6g}, {suggested_hi:.6g}]")
        self.suggested_lo = suggested_lo
        self.suggested_hi = suggested_hi


class VerificationError(SpectralCfError):
    """A cross-validation check exceeded its tolerance."""
