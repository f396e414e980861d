"""Exception hierarchy.

Two roots: :class:`InputError` for bad arguments (CLI exit code 2) and
:class:`NumericalError` for algorithms that fail to converge (exit code 3).
"""


class SymsphereError(Exception):
    """Base class for all package errors."""


class InputError(SymsphereError, ValueError):
    pass


class NumericalError(SymsphereError, ArithmeticError):
    pass


class ZeroState(InputError):
    pass


class NotUnitary(InputError):
    pass


class NotPositive(InputError):
    pass


class EmptyCppSet(InputError):
    pass


class DegenerateQuadruple(InputError):
    pass


class DegenerateTriple(InputError):
    pass


class WrongDiversity(InputError):
    pass


class OutOfRange(InputError):
    pass


class OutOfSupport(InputError):
    pass


class CoincidentPoints(InputError):
    pass


class UnknownName(InputError, KeyError):
    pass


class MissingParameter(InputError):
    pass


class RootFindingFailed(NumericalError):
    pass
