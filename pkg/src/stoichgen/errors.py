"""Exception hierarchy shared across the package."""


class StoichgenError(Exception):
    """Base class for all package errors."""


class ElementDataError(StoichgenError):
    """Malformed or inconsistent element-data file."""


class MissingElementError(StoichgenError):
    """An element symbol is not present in the table or vocabulary in use."""

    def __init__(self, symbol, context=""):
        self.symbol = symbol
        msg = f"unknown element {symbol!r}"
        if context:
            msg += f" ({context})"
        super().__init__(msg)


class FormulaError(StoichgenError):
    """A formula string cannot be parsed."""


class FractionalCountError(FormulaError):
    """A formula contains a fractional stoichiometric count."""


class CountRangeError(StoichgenError):
    """An atom count falls outside the encodable range."""


class ShapeError(StoichgenError):
    """Tensor shapes do not match a layer or operation contract."""


class NumericError(StoichgenError):
    """Non-finite values encountered where finite ones are required."""


class StaleCacheError(StoichgenError):
    """backward() called without a cache from a matching training-mode forward."""


class ConfigError(StoichgenError):
    """Invalid configuration value or unusable input for an operation."""


class InputError(StoichgenError):
    """Mutually inconsistent inputs (e.g. overlapping train/holdout sets)."""


class TrainingDivergedError(StoichgenError):
    """Training hit a non-finite loss; carries the last finite checkpoint(s)."""

    def __init__(self, message, checkpoints=None, history=None):
        super().__init__(message)
        self.checkpoints = checkpoints
        self.history = history or []


class CheckpointError(StoichgenError):
    """Base class for checkpoint persistence failures."""


class CheckpointIntegrityError(CheckpointError):
    """Checkpoint file is corrupt or truncated (checksum mismatch)."""


class CheckpointVersionError(CheckpointError):
    """Checkpoint format version is not supported."""


class CheckpointKindError(CheckpointError):
    """Checkpoint holds a different model kind than expected."""


class DatasetFormatError(StoichgenError):
    """Dataset file is missing required structure (e.g. formula column)."""


class EnrichmentUndefinedError(StoichgenError):
    """Enrichment factor requested with a zero baseline fraction."""


class EnumerationCancelled(StoichgenError):
    """Raised by a sink to stop an enumeration early."""


class PartialEnumerationError(StoichgenError):
    """Enumeration was cancelled; carries the statistics gathered so far."""

    def __init__(self, message, partial_stats):
        super().__init__(message)
        self.partial_stats = partial_stats
