"""Exception hierarchy.

Every error raised by the library derives from :class:`RDMError`, which is a
``ValueError`` so callers that only care about bad input can catch that.
"""


class RDMError(ValueError):
    """Base class for all library errors."""


class NotHermitian(RDMError):
    pass


class NotPSD(RDMError):
    pass


class NegativeEigenvalue(RDMError):
    pass


class TraceNotOne(RDMError):
    pass


class DimensionMismatch(RDMError):
    pass


class NoConvergence(RDMError):
    pass


class NotCommutingFamily(RDMError):
    pass


class BadWeights(RDMError):
    pass


class NotTracePreserving(RDMError):
    pass


class NotUnitary(RDMError):
    pass


class GammaOutOfRange(RDMError):
    pass


class BadKet(RDMError):
    pass


class ConstraintViolated(RDMError):
    pass


class NotAGroup(RDMError):
    pass


class RhoNotIncoherent(RDMError):
    pass


class InputsNotFree(RDMError):
    pass


class NotLinearDestroyer(RDMError):
    pass


class NumericalInconsistency(RDMError):
    """Two routes to the same quantity disagree beyond tolerance."""
