"""Exception types shared across the package."""

from __future__ import annotations


class EicError(Exception):
    """Base class for all errors raised by this package."""


class DomainError(EicError):
    """A parameter lies outside the supported problem domain."""


class DemandOverlapError(EicError):
    """A user demands a message it already holds as side information."""


class BlockAlignmentError(EicError):
    """A message length is incompatible with the required block split."""


class CaseMismatchError(EicError):
    """An encoder or decoder was invoked for the wrong side-information regime."""


class MissingSymbolError(EicError):
    """A decode chain references a symbol the schedule does not carry."""


class SideInfoGapError(EicError):
    """A decode chain needs a block outside the user's side information.

    This never fires for schedules produced by this package's encoders on
    valid instances; it is a sentinel for corrupted schedules or encoder bugs.
    """


class LengthMismatchError(EicError):
    """Byte strings or vectors that must agree in length do not."""


class DecodeFailure(EicError):
    """A recovered block does not match the original message bytes."""

    def __init__(self, user: int, message: int, block: int, detail: str = ""):
        self.user = user
        self.message = message
        self.block = block
        text = f"user {user} failed to recover block {block} of message {message}"
        if detail:
            text = f"{text}: {detail}"
        super().__init__(text)
