"""Exception types raised across the package."""


class VecMeasureError(Exception):
    """Base class for all package errors."""


class DimError(VecMeasureError, ValueError):
    """Operands live in spaces of incompatible dimension."""


class EmptyBody(VecMeasureError, ValueError):
    pass


class WrongKind(VecMeasureError, TypeError):
    """A seminorm of an unsupported kind was passed to a kind-specific routine."""


class NotANorm(VecMeasureError, ValueError):
    """The operation requires a norm but the seminorm has a nontrivial kernel."""


class NoConvergence(VecMeasureError, RuntimeError):
    pass


class TooManyAtoms(VecMeasureError, ValueError):
    pass


class NoCertificate(VecMeasureError, ValueError):
    """An atom lies in the kernel of the seminorm, so no dual witness of norm one attains it."""


class NotContained(VecMeasureError, ValueError):
    pass


class UnknownScenario(VecMeasureError, KeyError):
    pass


class InputError(VecMeasureError, ValueError):
    """Malformed user input (JSON syntax or schema violation)."""
