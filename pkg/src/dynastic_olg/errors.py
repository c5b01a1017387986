"""Exception types raised across the package."""


class ModelError(Exception):
    """Base class for all errors raised by :mod:`dynastic_olg`."""


class DomainError(ModelError, ValueError):
    """An argument lies outside the domain of a log or power function."""


class ValidationError(ModelError, ValueError):
    """Model parameters violate one of their invariants."""


class DivergentDynasty(ModelError, ArithmeticError):
    """The dynastic value recursion does not converge (alpha * n >= 1)."""


class InfeasibleEverywhere(ModelError, RuntimeError):
    """No grid point of the brute-force search yields positive consumption."""


class InvalidGrid(ModelError, ValueError):
    """A sweep grid is not ascending or leaves the parameter domain."""


class ConfigError(ModelError, ValueError):
    """A scenario file could not be parsed.

    Attributes:
        line: 1-based line number of the offending entry (0 when the problem
            is not tied to a single line, e.g. a missing key).
        key: name of the key involved, if any.
    """

    def __init__(self, message, line=0, key=None):
        self.line = line
        self.key = key
        where = f"line {line}: " if line else ""
        super().__init__(f"{where}{message}")
