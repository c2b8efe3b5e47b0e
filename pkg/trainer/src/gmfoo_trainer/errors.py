"""Exception types shared across the trainer package."""


class TrainerError(Exception):
    """Base class for errors raised by this package."""


class ConfigError(TrainerError):
    """Invalid training configuration; message names the offending field."""


class DataError(TrainerError, ValueError):
    """A training corpus is missing, malformed, or rank deficient."""


class TrainingDiverged(TrainerError):
    """A loss became non-finite; message carries the epoch index."""
