"""Exception hierarchy.

Every error raised by the library derives from :class:`JiscatError`.  The two
intermediate classes split failures the way the command line reports them:
:class:`ClassError` means the input is outside the admissible class (exit 1),
:class:`NumericalError` means a computation broke down (exit 3).
"""


class JiscatError(Exception):
    exit_code = 3


class ClassError(JiscatError, ValueError):
    exit_code = 1


class NumericalError(JiscatError, ArithmeticError):
    exit_code = 3


# polynomial core
class NonConvergence(NumericalError):
    pass


class UnpairedRoot(ClassError):
    pass


class OddCircleMultiplicity(ClassError):
    pass


# lattice
class InvalidCoefficient(ClassError):
    pass


class EmptySupport(ClassError):
    pass


class DegreeMismatch(ClassError):
    pass


# scattering analysis
class NonRealBoundState(ClassError):
    pass


class NonSimpleBoundState(ClassError):
    pass


class PoleAtZ(NumericalError):
    pass


class NonPositiveNorming(ClassError):
    pass


class NotABoundState(ClassError):
    pass


# inverse problems
class NegativeSquare(ClassError):
    pass


class AmbiguousBoundState(ClassError):
    pass


class ClassViolation(ClassError):
    pass


class BelowTheoremScope(ClassError):
    """Raised by the inverse maps when m < 3."""


class EmptyF(ClassError):
    pass


class UnmatchedZero(ClassError):
    pass


# marchenko
class SeriesOverflow(NumericalError):
    pass


class QuadratureUnstable(NumericalError):
    pass


class SingularSystem(NumericalError):
    pass


class NonPositiveRatio(NumericalError):
    pass


class RoundTripFailure(NumericalError):
    pass
