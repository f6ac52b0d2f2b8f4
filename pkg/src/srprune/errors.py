"""Exception types shared across the package."""


class ContractError(ValueError):
    """An argument violates an operation's documented precondition."""


class ImageIOError(IOError):
    """A file could not be read as a supported 8-bit PNG image."""


class WeightsFormatError(ValueError):
    """A weights file is corrupt, truncated, or has mismatched dimensions."""


class TrainingDivergedError(RuntimeError):
    """Training loss became non-finite.  Carries the offending step index."""

    def __init__(self, step: int, message: str | None = None):
        self.step = step
        super().__init__(message or f"training diverged at step {step}")


class DegenerateSelectionError(ValueError):
    """A selection would be empty or its score distribution is degenerate."""


class FingerprintMismatchError(ValueError):
    """An artifact refers to a different dataset than the one supplied."""


class EmptyCorpusError(ValueError):
    """A source directory yielded no usable images."""
