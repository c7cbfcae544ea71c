"""Exception types raised across the package."""


class FFTError(Exception):
    """Base class for all errors raised by parfft."""


class InvalidSizeError(FFTError, ValueError):
    """A length or grid dimension is not acceptable (zero, or not a power of two)."""


class InvalidInputError(FFTError, ValueError):
    """Input data does not match what the operation expects."""


class InvalidTopologyError(FFTError, ValueError):
    """The worker count cannot be laid out over the data length."""


class InvalidParametersError(FFTError, ValueError):
    pass


class CorruptMessageError(FFTError):
    """A packed message whose columns disagree in length."""


class RunError(FFTError, RuntimeError):
    """A parallel run failed; no partial result is returned."""


class PGMError(FFTError, ValueError):
    """Malformed PGM data. ``offset`` is the byte position of the problem."""

    def __init__(self, message: str, offset: int):
        super().__init__(f"{message} (at byte {offset})")
        self.offset = offset
