"""Exception hierarchy shared by all modules."""


class SiegelLambertError(Exception):
    """Base class for every error raised by this package."""


class PoleError(SiegelLambertError, ValueError):
    """Evaluation requested at a pole."""


class ConvergenceError(SiegelLambertError, RuntimeError):
    """An iterative scheme (series, continued fraction, quadrature) did not converge."""


class ContourError(SiegelLambertError, ValueError):
    """No admissible Mellin-Barnes contour exists for the given parameters."""


class CharacterError(SiegelLambertError, ValueError):
    """A Dirichlet character does not satisfy a required property."""


class CountMismatchError(SiegelLambertError, RuntimeError):
    """Zero scan disagrees with the argument-principle count."""


class ParseError(SiegelLambertError, ValueError):
    """Malformed input file."""

    def __init__(self, message: str, line: int | None = None):
        self.line = line
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)


class SelfCheckError(SiegelLambertError, RuntimeError):
    """A coefficient model failed its functional-equation gate."""


class ContinuationUnavailable(SiegelLambertError, RuntimeError):
    """Analytic continuation was requested from a model that has none."""


class TruncationError(SiegelLambertError, RuntimeError):
    """Available coefficients are too few to reach the requested accuracy."""


class RootNumberError(SiegelLambertError, RuntimeError):
    """Self-calibration of a twisted root number failed."""


class SimplicityError(SiegelLambertError, RuntimeError):
    """A zero failed the simplicity check, so its residue formula does not apply."""
