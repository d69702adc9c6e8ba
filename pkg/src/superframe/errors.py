"""Exception types shared across the package."""


class SuperframeError(Exception):
    """Base class for every error raised by this library."""


class SingularMatrix(SuperframeError):
    """A matrix required to be invertible has determinant zero."""


class NotExpansive(SuperframeError):
    """A dilation matrix has an eigenvalue of modulus <= 1 (within tolerance)."""

    def __init__(self, message: str, eigenvalue: complex | None = None):
        super().__init__(message)
        self.eigenvalue = eigenvalue


class NotAPermutation(SuperframeError):
    """The dilation does not permute the coset labels; the pair is not admissible."""


class NotAdmissible(SuperframeError):
    """Operation requires an admissible matrix pair."""


class UnsupportedDimension(SuperframeError):
    """The exact function model only covers dimensions 1 and 2."""


class InvalidGeometry(SuperframeError):
    """Degenerate or non-convex region passed to a builder."""


class ShapeMismatch(SuperframeError):
    """Operands live in incompatible spaces (dimension or component count)."""


class SystemTooLarge(SuperframeError):
    """Truncated system exceeds the configured element limit."""


class EmptyTestSet(SuperframeError):
    """Bound estimation needs at least one nonzero test function."""


class IndexOutOfRange(SuperframeError):
    """System index outside the declared range."""
