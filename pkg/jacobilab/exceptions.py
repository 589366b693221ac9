"""
Error hierarchy.

Every error raised by the package derives from [`JacobiLabError`][jacobilab.exceptions.JacobiLabError].
Numeric precondition failures also derive from `ValueError`, so code that already guards against bad input keeps working.

A [`Refutation`][jacobilab.exceptions.Refutation] is different from a precondition failure: the input is a valid tensor, but it lies outside the class a classification result applies to.
Refutations carry the pipeline stage that produced them, the magnitude of the offending quantity, and any witness vectors.
"""

from collections.abc import Sequence

import numpy as np


class JacobiLabError(Exception):
    """Base class for all jacobilab errors."""


# Preconditions
# ---


class InvalidMatrix(JacobiLabError, ValueError):
    """Matrix is not square or has non-finite entries."""


class ZeroVector(JacobiLabError, ValueError):
    """A nonzero vector was required."""


class EmptyInput(JacobiLabError, ValueError):
    """An operation received an empty sequence."""


class DegenerateBasis(JacobiLabError, ValueError):
    """A list of vectors expected to be linearly independent is not."""


class SymmetryConflict(JacobiLabError, ValueError):
    """Tensor entries contradict the antisymmetries or the pair symmetry."""


class BianchiViolation(JacobiLabError, ValueError):
    """Tensor violates the first Bianchi identity."""


class NotSkew(JacobiLabError, ValueError):
    """Endomorphism is not skew-adjoint."""


class DegeneratePlane(JacobiLabError, ValueError):
    """Two vectors do not span a plane."""


class InvalidPattern(JacobiLabError, ValueError):
    """Multiplicity pattern does not add up to the dimension of the reduced operator."""


class InvalidTensorFile(JacobiLabError, ValueError):
    """Tensor file cannot be parsed."""


# Refutations
# ---


class Refutation(JacobiLabError):
    """The input lies outside the class a classification result applies to.

    :param message: Human-readable explanation
    :type message: str
    :param stage: Pipeline stage that produced the refutation
    :type stage: str
    :param magnitude: Size of the offending quantity, when one exists
    :type magnitude: float | None
    :param witness: Vectors at which the refutation was observed
    :type witness: Sequence[np.ndarray] | None
    """

    def __init__(
        self,
        message: str,
        *,
        stage: str,
        magnitude: float | None = None,
        witness: Sequence[np.ndarray] | None = None,
    ) -> None:
        super().__init__(message)
        self.message = message
        self.stage = stage
        self.magnitude = magnitude
        self.witness = [np.asarray(w, dtype=float) for w in witness or ()]


class NotTwoRoot(Refutation):
    pass


class NoDualPairsFound(Refutation):
    pass


class NotSimpleRootTwoRoot(Refutation):
    pass


class MuNotConstant(Refutation):
    pass


class RankExceeded(Refutation):
    """A form that must have rank at most one has a second significant eigenvalue."""


class ZeroSimpleRoot(RankExceeded):
    """The shifted tensor vanishes, so there is no simple root to extract."""


class SignInconsistency(Refutation):
    pass


class SkewnessViolation(Refutation):
    pass


class EigenvectorMismatch(Refutation):
    """The recovered endomorphism does not map X to an eigenvector of the shifted operator."""


class SingularP(Refutation):
    pass


class OddMultiplicity(Refutation):
    pass


class DimensionScreenFailed(Refutation):
    pass


class MultiplicityInadmissible(Refutation):
    pass
