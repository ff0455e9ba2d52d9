"""Exception hierarchy shared by the codecs and the CLI."""


class UsageError(ValueError):
    """Caller violated a precondition (bad shape, bad parameter, ...)."""


class CorruptStreamError(Exception):
    """A container could not be decoded."""


class BadMagicError(CorruptStreamError):
    pass


class TruncatedStreamError(CorruptStreamError):
    pass


class BadPointerError(CorruptStreamError):
    """A back-reference or match length is out of range or not canonical."""


class OverlapMismatchError(CorruptStreamError):
    """Two overlapping blocks disagree on a shared site."""


class ChecksumError(CorruptStreamError):
    pass


class SealedStreamError(UsageError):
    """Attempt to append to a container whose final ring was already flushed."""
