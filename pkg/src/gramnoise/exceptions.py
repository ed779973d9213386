class DataError(Exception):
    """Base class for problems with input data (as opposed to usage errors)."""


class M2ParseError(DataError):
    def __init__(self, message, line_number=None):
        self.line_number = line_number
        if line_number is not None:
            message = f"line {line_number}: {message}"
        super().__init__(message)


class TreeParseError(DataError):
    def __init__(self, message, offset=None):
        self.offset = offset
        if offset is not None:
            message = f"at offset {offset}: {message}"
        super().__init__(message)


class MorphologyError(DataError):
    pass


class AlignmentError(DataError):
    """Raised when aligned inputs (corpus/tree, source/target, hyp/ref) disagree."""
