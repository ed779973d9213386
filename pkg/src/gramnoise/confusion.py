"""Error types and their closed confusion sets."""

import enum

# Placeholder for "no word here": a deleted or not-yet-inserted token.
EMPTY = "∅"


class ErrorType(str, enum.Enum):
    DROP = "drop"
    ART = "art"
    PREP = "prep"
    NN = "nn"
    SVA = "sva"

    @classmethod
    def parse(cls, value):
        if isinstance(value, cls):
            return value
        try:
            return cls(str(value).lower())
        except ValueError:
            raise ValueError(f"unknown error type {value!r}; expected one of "
                             f"{', '.join(t.value for t in cls)}") from None


SG, PL = "SG", "PL"
THIRD_SG, NOT_THIRD_SG = "3SG", "not-3SG"
# "were" is the 2nd-person (and plural) past of "to be", "was" the rest.
SECOND_SG_PAST, NOT_SECOND_SG_PAST = "2SG-Past", "not-2SG-Past"

ARTICLES = ("a", "an", "the")

PREPOSITIONS = (
    "on", "in", "at", "from", "for", "under", "over", "with", "into",
    "during", "until", "against", "among", "throughout", "of", "to", "by",
    "about", "like", "before", "after", "since", "across", "behind", "but",
    "out", "up", "down", "off",
)

CONFUSION_SETS = {
    ErrorType.ART: ARTICLES + (EMPTY,),
    ErrorType.PREP: PREPOSITIONS + (EMPTY,),
    ErrorType.NN: (SG, PL),
    ErrorType.SVA: (THIRD_SG, NOT_THIRD_SG, SECOND_SG_PAST, NOT_SECOND_SG_PAST),
}

# SVA forms only confuse within a tense: present 3SG/not-3SG, past was/were.
_SVA_GROUPS = (
    (THIRD_SG, NOT_THIRD_SG),
    (SECOND_SG_PAST, NOT_SECOND_SG_PAST),
)

MATRIX_TYPES = (ErrorType.ART, ErrorType.PREP, ErrorType.NN, ErrorType.SVA)


def confusion_set(error_type):
    return CONFUSION_SETS[ErrorType.parse(error_type)]


def replacement_forms(error_type, form):
    """Forms that `form` may be erroneously replaced by (never `form` itself)."""
    error_type = ErrorType.parse(error_type)
    if error_type is ErrorType.SVA:
        for group in _SVA_GROUPS:
            if form in group:
                return tuple(f for f in group if f != form)
        raise KeyError(form)
    members = CONFUSION_SETS[error_type]
    if form not in members:
        raise KeyError(form)
    return tuple(f for f in members if f != form)
