"""Grammatical error injection for parallel corpora, with BLEU-based robustness evaluation."""

__version__ = "0.1.0"

from gramnoise.confusion import EMPTY, ErrorType
from gramnoise.exceptions import (
    AlignmentError,
    DataError,
    M2ParseError,
    MorphologyError,
    TreeParseError,
)

__all__ = [
    "EMPTY",
    "ErrorType",
    "AlignmentError",
    "DataError",
    "M2ParseError",
    "MorphologyError",
    "TreeParseError",
    "__version__",
]
