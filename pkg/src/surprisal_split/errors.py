"""Exception taxonomy shared across the package.

The CLI maps these onto distinct exit codes so harnesses can tell failure
classes apart: ConfigError -> 2, DataError (and OSError) -> 3,
ScorerUnavailableError -> 4.
"""


class SurprisalSplitError(Exception):
    """Base class for all package errors."""


class ConfigError(SurprisalSplitError):
    """Invalid parameters or run configuration."""


class DataError(SurprisalSplitError):
    """Malformed, missing, or inconsistent input data."""


class SchemaError(DataError):
    """An input file does not match its expected schema."""


class EmptyCorpusError(DataError):
    """Training corpus contained no tokens."""


class MissingControlError(DataError):
    """Items with experimental rows lack a control row."""


class EmptyJoinError(DataError):
    """Predictor/amplitude join produced no pairs."""


class DegeneratePredictorError(DataError):
    """Regression predictor has zero variance."""


class ScorerUnavailableError(SurprisalSplitError):
    """The remote scoring service failed at transport or protocol level."""
