"""Exception types with positions attached where a position is meaningful."""

from __future__ import annotations


class StreamcodeError(Exception):
    """Base class for diagnostics raised by the pipeline."""


class TokenizationError(StreamcodeError):
    def __init__(self, message: str, position: int):
        super().__init__(f"{message} (at character {position})")
        self.position = position


class ZeroFrequencyError(StreamcodeError):
    """A realized token was assigned zero quantized probability."""

    def __init__(self, token: int, position: int):
        super().__init__(
            f"token {token} at position {position} has zero quantized "
            f"frequency; its cost is infinite under this model"
        )
        self.token = token
        self.position = position


class TraceFormatError(StreamcodeError):
    def __init__(self, message: str, line: int):
        super().__init__(f"{message} (trace line {line})")
        self.line = line


class BitstreamError(StreamcodeError):
    """Corrupted or truncated coded payload."""

    def __init__(self, message: str, position: int | None = None):
        if position is not None:
            message = f"{message} (at token position {position})"
        super().__init__(message)
        self.position = position
