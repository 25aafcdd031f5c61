"""Exception types raised across the package."""


class Rank2LUError(Exception):
    """Base class for all errors raised by this package."""


class ShapeMismatch(Rank2LUError):
    """Operands have incompatible shapes."""


class NotHermitian(Rank2LUError):
    """Matrix expected to be Hermitian is not, beyond tolerance."""


class NotUnitary(Rank2LUError):
    """Matrix expected to be unitary is not, beyond tolerance."""


class ConvergenceFailure(Rank2LUError):
    """An iterative decomposition failed to converge."""


class SingularInput(Rank2LUError):
    """Matrix is singular (or numerically rank deficient) where invertibility is required."""


class RankNotTwo(Rank2LUError):
    """Density matrix does not have exactly two significant eigenvalues."""


class DegenerateSpectrum(Rank2LUError):
    """The two significant eigenvalues are too close; the eigenbasis is not unique."""


class InvalidState(Rank2LUError):
    """Rank-two state data violates normalization or orthogonality invariants."""


class ClassConditionViolated(Rank2LUError):
    """Coefficient matrices fail the equal-Gram class condition."""


class BlockExtractionFailure(Rank2LUError):
    """Canonical block extraction produced a non-unitary commuting factor."""


class WitnessVerificationFailure(Rank2LUError):
    """A constructed equivalence witness failed its residual check."""


class SingularB(Rank2LUError):
    """Second coefficient matrix is singular where the SLOCC criterion needs its inverse."""


class NotNormalized(Rank2LUError):
    """Coefficient matrix is not normalized to unit Frobenius norm."""


class OrthogonalityUnsatisfiable(Rank2LUError):
    """Requested singular values and commuting factor admit no orthogonal eigenvector pair."""


class GenerationFailure(Rank2LUError):
    """A random generator could not produce a certified instance."""


class ParseError(Rank2LUError):
    """A state file could not be read or parsed."""
