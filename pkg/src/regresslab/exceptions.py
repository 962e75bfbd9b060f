"""Exception hierarchy.

Input/contract violations derive from ``ValueError``; numerical breakdowns
derive from :class:`NumericalError` so callers (the CLI in particular) can
map them to distinct exit statuses.
"""


class ShapeError(ValueError):
    """Array dimensions do not conform."""


class ParameterError(ValueError):
    """A hyperparameter or argument is outside its admissible range."""


class CombinatorialBlowupError(ParameterError):
    """Requested basis would contain too many terms."""


class ConfigurationError(ValueError):
    """Incompatible combination of options (e.g. loss/output pairing)."""


class SchemaError(ValueError):
    """Input file or config does not match the expected schema."""


class EmptyInputError(SchemaError):
    """Input file contains no data rows."""


class ParseError(SchemaError):
    """A cell could not be parsed; carries 1-based ``row`` and ``col``."""

    def __init__(self, message, row=None, col=None):
        super().__init__(message)
        self.row = row
        self.col = col


class UndefinedMetricError(ValueError):
    """Metric is undefined for the given labels (e.g. AUC with one class)."""


class NumericalError(ArithmeticError):
    """Base class for numerical failures."""


class NotPositiveDefiniteError(NumericalError):
    """Cholesky factorization met a non-positive pivot."""


class SingularMatrixError(NumericalError):
    """LU elimination met a pivot below the singularity threshold."""


class MulticollinearityError(NotPositiveDefiniteError):
    """Normal equations are singular: collinear features or too few samples.

    Adding an L2 penalty (ridge, ``alpha > 0``) makes the system solvable.
    """


class DivergedError(NumericalError):
    """Iterative optimization blew up; the partial trace is attached."""

    def __init__(self, message, trace=None):
        super().__init__(message)
        self.trace = trace


class NotConvergedWarning(UserWarning):
    """Iteration budget exhausted before the tolerance was met."""
