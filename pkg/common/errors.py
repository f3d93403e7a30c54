"""
Exception hierarchy shared by all packages.

The CLI maps these onto exit codes: ConfigError and evalcli.cli.UsageError to evalcli.cli.EXIT_USAGE,
DataError and CheckpointError to evalcli.cli.EXIT_DATA, NumericError to evalcli.cli.EXIT_NUMERIC.
"""


class FingerspellError(Exception):
    """Base class for every error raised by this project."""


class ShapeError(FingerspellError, ValueError):
    """Tensor shapes or lengths do not agree with what an operation needs."""


class NumericError(FingerspellError, ArithmeticError):
    """A value that must be finite is NaN or infinite."""


class DataError(FingerspellError):
    """Invalid words, frames, manifests or experiment splits."""


class ConfigError(FingerspellError):
    """Unknown config keys or values that cannot be coerced."""


class NonDeterministicLossError(FingerspellError):
    """A loss function returned different values for identical inputs."""


class SearchSpaceError(FingerspellError):
    """An exhaustive search was asked to enumerate too many sequences."""


class CheckpointError(FingerspellError):
    """Base class for checkpoint persistence failures."""


class CorruptCheckpointError(CheckpointError):
    """The checkpoint file is truncated or fails its checksum."""


class CheckpointVersionError(CheckpointError):
    """The checkpoint was written by an unsupported format version."""


class CheckpointMismatchError(CheckpointError):
    """The checkpoint's mode or tensor shapes differ from the requested model."""
