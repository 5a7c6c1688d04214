"""Exception types shared across the package.

The CLI maps these onto distinct process exit codes, so keep the
hierarchy flat and specific.
"""


class DimensionError(ValueError):
    """Operand has an unsupported or mismatched Hilbert-space dimension."""


class DegenerateOutcomeError(RuntimeError):
    """A zero-probability measurement branch was requested."""


class InsufficientDataError(ValueError):
    """Counts carry no information (e.g. all zeros)."""


class IllPosedError(ValueError):
    """Reconstruction inputs do not span the required operator space."""


class SolverError(RuntimeError):
    """A numerical solver failed to converge or bracket its target."""


class DataQualityError(ValueError):
    """Ingested data needs repairs larger than the allowed cap."""


class ParseError(ValueError):
    """A file does not conform to the expected schema."""
