"""Exception hierarchy.

Validation errors derive from :class:`ValueError` so callers that only care
about bad input can catch the builtin.  Numerical failures derive from
:class:`ArithmeticError`.
"""


class DirichletSpectraError(Exception):
    """Base class for every error raised by this package."""


class ValidationError(DirichletSpectraError, ValueError):
    pass


class NumericalError(DirichletSpectraError, ArithmeticError):
    pass


# graph construction
class NonPositiveMeasure(ValidationError):
    pass


class NegativeWeight(ValidationError):
    pass


class IndexOutOfRange(ValidationError, IndexError):
    pass


class SelfLoop(ValidationError):
    pass


class DimensionMismatch(ValidationError):
    pass


class EmptyComplement(ValidationError):
    pass


class DuplicateVertex(ValidationError):
    pass


# kernels
class InvalidAlpha(ValidationError):
    pass


class AsymmetricKernel(ValidationError):
    pass


class LowerBoundViolated(ValidationError):
    def __init__(self, message, witness=None, ratio=None):
        super().__init__(message)
        self.witness = witness
        self.ratio = ratio


class DisconnectedFromCenter(ValidationError):
    pass


# potential theory / spectral
class EmptySet(ValidationError):
    pass


class NegativeTime(ValidationError):
    pass


class NegativePotential(ValidationError):
    pass


class NonPositiveAlpha(ValidationError):
    pass


class TooLargeForDense(ValidationError):
    pass


class ExhaustionNotNested(ValidationError):
    pass


class ZeroVector(ValidationError):
    pass


class SupportViolation(ValidationError):
    pass


# stochastic
class InvalidSeedStream(ValidationError):
    pass


class UnboundedPotential(ValidationError):
    pass


# perturbations
class NegativeDensity(ValidationError):
    pass


class InadmissiblePerturbation(ValidationError):
    pass


# numerical
class SingularSystem(NumericalError):
    pass


class ConvergenceFailure(NumericalError):
    def __init__(self, message, residual=None):
        super().__init__(message)
        self.residual = residual
