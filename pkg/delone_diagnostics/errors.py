"""Exceptions raised by the library.

Two families: InputError for anything wrong with what was asked for (malformed
files, invalid generator specs, failed matchings), ScaleError for requests that
are well-formed but need a larger window or margin than was given. The CLI maps
the first to exit code 2 and the second to exit code 3.
"""


class DeloneError(ValueError):
    "Base class of all library errors."

    pass


class InputError(DeloneError):
    "Raised on malformed or invalid input."

    pass


class SpecError(InputError):
    "Raised if a generator spec violates one of its invariants."

    pass


class DimensionError(InputError):
    "Raised on unsupported or mismatching dimensions."

    pass


class SolverError(InputError):
    "Raised if the intersection solver cannot bracket a root."

    def __init__(self, msg: str, cell: tuple[int, int]):
        super().__init__(msg)
        self.cell = cell


class EmptyError(InputError):
    "Raised if a set is unexpectedly empty."

    pass


class NotUniqueError(InputError):
    "Raised if a matching unexpectedly finds more than one partner."

    pass


class NotAlmostPeriodError(InputError):
    "Raised if a translation vector fails the almost-period condition at some point."

    def __init__(self, msg: str, x: float):
        super().__init__(msg)
        self.x = x


class ScaleError(DeloneError):
    "Raised if a window is too small for the requested radius or margin."

    pass


def require_margin(have: float, need: float, what: str):
    """Raise ScaleError unless have >= need, spelling out the arithmetic."""
    if have < need:
        raise ScaleError(f"{what}: {have:g} < required {need:g}")
