"""Exception hierarchy.

Every error carries the process exit code the command line maps it to:
3 for bad or inconsistent data, 4 for numerical failures.
"""


class StructBlockError(Exception):
    exit_code = 1


class DataError(StructBlockError):
    exit_code = 3


class CorpusFormatError(DataError):
    def __init__(self, message, line=None, path=None):
        self.line = line
        self.path = path
        where = ""
        if path is not None:
            where += f"{path}:"
        if line is not None:
            where += f"{line}:"
        super().__init__(f"{where} {message}" if where else message)


class AlignmentError(DataError):
    """Entity markers do not fall on token boundaries of the parse."""

    def __init__(self, message, text=None, tokens=None):
        self.text = text
        self.tokens = tokens
        detail = message
        if text is not None:
            detail += f"\n  marked text : {text!r}"
        if tokens is not None:
            detail += f"\n  parse tokens: {' '.join(tokens)!r}"
        super().__init__(detail)


class CapacityError(DataError):
    def __init__(self, kind, tag, capacity):
        self.kind = kind
        self.tag = tag
        self.capacity = capacity
        super().__init__(
            f"{kind} inventory exceeds {capacity} entries; overflowing tag {tag!r}"
        )


class TreeError(DataError):
    def __init__(self, message, nodes=None):
        self.nodes = nodes
        super().__init__(message)


class CheckpointFormatError(DataError):
    pass


class DigestMismatchError(DataError):
    pass


class NumericError(StructBlockError):
    exit_code = 4


class NonFiniteError(NumericError):
    pass


class DivergenceError(NumericError):
    pass


class GradCheckError(NumericError):
    pass
