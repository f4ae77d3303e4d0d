"""Exception hierarchy.

Everything raised on purpose derives from :class:`InspectRuinError` so callers
(and the CLI exit-code mapping) can tell model/usage errors from numerical
breakdowns.
"""


class InspectRuinError(Exception):
    pass


class ModelError(InspectRuinError, ValueError):
    """Invalid model or inspection-law parameters."""


class PoleError(InspectRuinError, ZeroDivisionError):
    """Evaluation at the pole alpha = -mu of the Laplace exponent."""


class NumericalError(InspectRuinError, ArithmeticError):
    """A numerical procedure failed its own certificate."""


class RootCountError(NumericalError):
    """Number of right half-plane roots differs from the theoretical count."""


class RootMultiplicityError(NumericalError):
    """Two roots closer than the distinctness threshold."""


class SingularSystemError(NumericalError):
    def __init__(self, message, condition=float("inf")):
        super().__init__(message)
        self.condition = condition
