"""
Error taxonomy for the decomposition app.

Every failure the library can signal derives from DecompositionError so that
management commands can map them onto exit codes in one place.
"""


class DecompositionError(Exception):
    """Base class for all library errors"""


# ---------------------
# Argument / shape errors
# ---------------------
class DimMismatch(DecompositionError, ValueError):
    """Operand dimensions are incompatible"""


class BadTruncation(DecompositionError, ValueError):
    """PSTNN truncation parameter outside 0..min(n1, n2)"""


class NonMonotoneWeights(DecompositionError, ValueError):
    """A weight column decreases, so closed-form weighted shrinkage is invalid"""


class BadPrecision(DecompositionError, ValueError):
    """Likelihood precision must be strictly positive"""


class BadConfig(DecompositionError, ValueError):
    """Solver configuration failed validation"""


class BadSpec(DecompositionError, ValueError):
    """Synthetic instance specification failed validation"""


class TooSmall(DecompositionError, ValueError):
    """Image plane smaller than the SSIM window"""


class ZeroGroundTruth(DecompositionError, ValueError):
    """Relative error requested against an all-zero reference"""


# ---------------------
# Numerical errors
# ---------------------
class SymmetryViolation(DecompositionError):
    """Fourier-domain data lost the conjugate symmetry of a real tensor"""


class NumericalFailure(DecompositionError):
    """A slice SVD did not converge"""


class DegenerateScale(DecompositionError):
    """A Gamma scale parameter collapsed to a non-positive or non-finite value.

    The solver attaches the partial trace and the last valid posterior state
    so callers can still inspect the run up to the collapse.
    """

    def __init__(self, message, trace=None, state=None):
        super().__init__(message)
        self.trace = list(trace or [])
        self.state = state


# ---------------------
# File format errors
# ---------------------
class BadMagic(DecompositionError):
    pass


class UnsupportedVersion(DecompositionError):
    pass


class TruncatedPayload(DecompositionError):
    pass


class UnsupportedFormat(DecompositionError):
    pass


class CorruptHeader(DecompositionError):
    pass


class IoFailure(DecompositionError):
    pass
