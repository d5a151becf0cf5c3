"""Exception hierarchy shared by the benchmark packages."""


class CateBenchError(Exception):
    """Base class for all benchmark errors."""

    exit_code = 1


class ConfigError(CateBenchError, ValueError):
    """Invalid or unreadable benchmark configuration."""

    exit_code = 2


class DataError(CateBenchError, ValueError):
    """Dataset violates its invariants or cannot be generated."""

    exit_code = 3


class SchemaError(DataError):
    """Dataset file has a malformed header or cells."""


class SingularMatrixError(CateBenchError, ValueError):
    """Matrix is not (numerically) positive definite."""


class ModelFitError(CateBenchError, ValueError):
    """A nuisance or final model could not be fitted or predicted."""


class EstimatorError(CateBenchError, ValueError):
    """A CATE estimator is missing inputs or produced invalid output."""


class ScoreError(CateBenchError, ValueError):
    """A model-selection score could not be computed."""


class OutputError(CateBenchError, OSError):
    """Results could not be written."""

    exit_code = 3


PARTIAL_RUN_EXIT_CODE = 4
