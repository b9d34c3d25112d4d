"""Exception hierarchy shared by all modules."""


class SubnyquistError(Exception):
    """Base class for every error raised by this package."""


# audio_io
class MalformedHeader(SubnyquistError):
    pass


class UnsupportedEncoding(SubnyquistError):
    pass


class MultiChannel(SubnyquistError):
    pass


class IoFailure(SubnyquistError):
    pass


# parameter validation
class InvalidParameter(SubnyquistError, ValueError):
    pass


class NonIntegerFactor(InvalidParameter):
    pass


class InvalidRange(InvalidParameter):
    pass


class TooShort(SubnyquistError, ValueError):
    pass


# scoring
class EmptyReference(SubnyquistError, ValueError):
    pass


class NoValidPairs(SubnyquistError, ValueError):
    pass


class LengthMismatch(SubnyquistError, ValueError):
    pass


class DegenerateLabels(SubnyquistError, ValueError):
    pass


class TooFewItems(SubnyquistError, ValueError):
    pass


# corpus
class ParseError(SubnyquistError, ValueError):
    def __init__(self, message, line=None):
        self.line = line
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)


class DuplicateId(ParseError):
    def __init__(self, line, entry_id=None):
        self.entry_id = entry_id
        super().__init__(f"duplicate id {entry_id!r}", line)


class MissingHypotheses(SubnyquistError, KeyError):
    def __init__(self, ids):
        self.ids = sorted(ids)
        super().__init__(f"no hypothesis for {len(self.ids)} id(s): {', '.join(self.ids[:10])}")


class UnknownIds(SubnyquistError, KeyError):
    def __init__(self, ids, where="manifest"):
        self.ids = sorted(ids)
        super().__init__(f"{len(self.ids)} id(s) not in {where}: {', '.join(self.ids[:10])}")
