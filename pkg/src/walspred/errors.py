"""Shared error types. Everything data-dependent derives from DataError so the
CLI can map it to a single exit code."""


class DataError(ValueError):
    """A failure caused by the contents of input data."""


class IngestionError(DataError):
    """A file could not be parsed. Carries the path and 1-based line number."""

    def __init__(self, message, path=None, line=None):
        self.path = path
        self.line = line
        where = ""
        if path is not None:
            where = f"{path}:" if line is None else f"{path}:{line}:"
        elif line is not None:
            where = f"line {line}:"
        super().__init__(f"{where} {message}" if where else message)


class StructureError(DataError):
    """Ingested data violates a structural invariant (bad tree, bad link, ...).
    Carries the 1-based ordinal of the offending sentence when known."""

    def __init__(self, message, sentence=None):
        self.sentence = sentence
        if sentence is not None:
            message = f"sentence {sentence}: {message}"
        super().__init__(message)
