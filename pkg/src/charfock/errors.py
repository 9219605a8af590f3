"""Exception hierarchy shared by all charfock modules.

``CharfockError`` is the common base.  ``InputError`` subclasses signal that
the caller handed in data violating a documented precondition (bad shapes,
non-contractive data, out-of-range parameters); ``ComputationError``
subclasses signal that an internal consistency check failed on data that
looked valid.  The CLI maps the two branches to distinct exit codes.
"""


class CharfockError(Exception):
    """Base class for all charfock errors."""


class InputError(CharfockError):
    """A documented precondition on caller-supplied data was violated."""


class ComputationError(CharfockError):
    """A numerical consistency check failed during a computation."""


class NotSquare(InputError):
    pass


class NotHermitian(InputError):
    pass


class NotPSD(InputError):
    pass


class ShapeMismatch(InputError):
    pass


class TooLarge(InputError):
    pass


class ArityNotOne(InputError):
    pass


class NotContraction(InputError):
    pass


class GammaNotContractive(InputError):
    pass


class OutOfRange(InputError):
    pass


class BadParameter(InputError):
    pass


class SchemaError(InputError):
    """Raised when JSON input does not match the documented file schema."""


class HypothesisViolated(ComputationError):
    """A structural hypothesis required by a decomposition does not hold."""


class DecompositionFailed(ComputationError):
    pass


class ResidualTooLarge(ComputationError):
    pass


class NotWellDefined(ComputationError):
    pass


class DefectRankMismatch(ComputationError):
    pass
