"""Exception hierarchy.

The CLI maps exception classes to stable exit codes: ``ValidationError``
subclasses exit 2, ``FormatError`` subclasses (and ``OSError``) exit 3,
``InfeasibleUtterance`` exits 4.
"""

from __future__ import annotations


class EnsembleAsrError(Exception):
    """Base class for all errors raised by this package."""


class ValidationError(EnsembleAsrError):
    """Bad configuration or input that violates a documented precondition."""


class FormatError(EnsembleAsrError):
    """A file's bytes do not match the expected on-disk layout."""


class InvalidMatrix(ValidationError):
    """In-memory feature matrix violates its invariants (shape, finiteness, stride)."""


class InvalidConfig(ValidationError):
    pass


class StrideMismatch(ValidationError):
    pass


class LengthSpreadExceeded(ValidationError):
    """Frame-count spread across streams too large to be the same audio."""


class EmptyInput(ValidationError):
    pass


class DimMismatch(ValidationError):
    pass


class FrameMismatch(ValidationError):
    pass


class ShapeMismatch(ValidationError):
    pass


class MaskShapeMismatch(ShapeMismatch):
    pass


class OddWidth(ValidationError):
    pass


class IndexOutOfRange(ValidationError):
    pass


class UnknownSymbol(ValidationError):
    pass


class UnnormalizedInput(ValidationError):
    """Rows claimed to be (log-)probabilities do not normalize."""


class InstanceTooLarge(ValidationError):
    """Brute-force enumeration refused: path space too big."""


class InfeasibleTarget(ValidationError):
    """Target cannot be emitted in the given number of frames."""

    def __init__(self, message: str, required_frames: int):
        super().__init__(message)
        self.required_frames = required_frames


class EmptyCorpus(ValidationError):
    pass


class EmptyReference(ValidationError):
    """Error rate undefined: the reference has zero tokens."""


class TagMissing(ValidationError):
    pass


class InfeasibleUtterance(EnsembleAsrError):
    """One or more utterances cannot satisfy the CTC length bound."""

    def __init__(self, message: str, utterance_ids: list[str]):
        super().__init__(message)
        self.utterance_ids = utterance_ids


class NonFiniteLoss(EnsembleAsrError):
    """Training aborted on a NaN/Inf batch loss."""

    def __init__(self, message: str, epoch: int, batch_index: int):
        super().__init__(message)
        self.epoch = epoch
        self.batch_index = batch_index
