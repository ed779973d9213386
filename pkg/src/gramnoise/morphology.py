"""English inflection needed to realise noun-number and agreement errors.

Lookups go through a small committed exception lexicon first, then fall back
to suffix rules.  All functions keep the capitalisation pattern of their input
(lower, Initial-cap or ALL-CAPS).
"""

import functools
from dataclasses import dataclass, field
from importlib import resources

from gramnoise.exceptions import MorphologyError

VOWELS = frozenset("aeiou")
_SIBILANT_ENDINGS = ("s", "x", "z", "ch", "sh")

# Present-tense forms with no agreement partner we can produce.
_UNTOGGLABLE_VERBS = frozenset({"am"})


@dataclass(frozen=True)
class InflectionLexicon:
    irregular_nouns: dict = field(default_factory=dict)  # singular -> plural
    irregular_verbs: dict = field(default_factory=dict)  # base -> 3SG
    invariant_nouns: frozenset = frozenset()
    article_exceptions: dict = field(default_factory=dict)  # word -> "a" | "an"

    def __post_init__(self):
        plurals = {}
        for sg, pl in self.irregular_nouns.items():
            if pl in plurals:
                raise ValueError(f"plural {pl!r} listed for both {plurals[pl]!r} and {sg!r}")
            plurals[pl] = sg
        object.__setattr__(self, "_noun_singulars", plurals)
        clash = (set(self.irregular_nouns) | set(plurals)) & self.invariant_nouns
        if clash:
            raise ValueError(f"words both irregular and invariant: {sorted(clash)}")
        bases = {}
        for base, third in self.irregular_verbs.items():
            if third in bases:
                raise ValueError(f"3SG form {third!r} listed for both {bases[third]!r} and {base!r}")
            bases[third] = base
        object.__setattr__(self, "_verb_bases", bases)

    def plural_of(self, singular):
        return self.irregular_nouns.get(singular)

    def singular_of(self, plural):
        return self._noun_singulars.get(plural)

    def third_person_of(self, base):
        return self.irregular_verbs.get(base)

    def base_of(self, third_person):
        return self._verb_bases.get(third_person)

    @classmethod
    def from_lines(cls, lines):
        nouns, verbs, articles = {}, {}, {}
        invariant = set()
        for lineno, line in enumerate(lines, 1):
            line = line.strip()
            if not line or line.startswith("#"):
                continue
            try:
                first, second, kind = line.split("\t")
            except ValueError:
                raise ValueError(f"lexicon line {lineno}: expected 3 tab-separated fields") from None
            if kind == "noun":
                nouns[first] = second
            elif kind == "verb":
                verbs[first] = second
            elif kind == "invariant":
                invariant.add(first)
            elif kind == "article":
                articles[first] = second
            else:
                raise ValueError(f"lexicon line {lineno}: unknown kind {kind!r}")
        return cls(nouns, verbs, frozenset(invariant), articles)


@functools.lru_cache(maxsize=None)
def default_lexicon():
    text = resources.files("gramnoise").joinpath("data/lexicon.tsv").read_text(encoding="utf-8")
    return InflectionLexicon.from_lines(text.splitlines())


def _case_pattern(token):
    if len(token) > 1 and token.isupper():
        return "upper"
    if token[:1].isupper():
        return "title"
    return "lower"


def _apply_case(word, pattern):
    if pattern == "upper":
        return word.upper()
    if pattern == "title":
        return word[:1].upper() + word[1:]
    return word


def match_case(word, model):
    """Give `word` the capitalisation pattern of `model`."""
    return _apply_case(word, _case_pattern(model))


def _check_word(token):
    if not token or not token.replace("-", "").isalpha():
        raise MorphologyError(f"cannot inflect non-alphabetic token {token!r}")


def _consonant_y(word):
    return len(word) > 1 and word.endswith("y") and word[-2] not in VOWELS


def _pluralize(word, lex):
    irregular = lex.plural_of(word)
    if irregular:
        return irregular
    if _consonant_y(word):
        return word[:-1] + "ies"
    if word.endswith(_SIBILANT_ENDINGS):
        return word + "es"
    return word + "s"


def _strip_plural_s(word):
    """Undo the regular -s/-es suffix; None if `word` carries no such suffix."""
    if word.endswith("ies") and len(word) > 4:
        return word[:-3] + "y"
    if word.endswith(("sses", "shes", "ches", "xes", "zzes")):
        return word[:-2]
    if word.endswith("zes") and len(word) > 4 and word[-4] not in VOWELS:
        return word[:-2]
    if word.endswith("s") and not word.endswith("ss") and len(word) > 1:
        return word[:-1]
    return None


def _singularize(word, lex):
    irregular = lex.singular_of(word)
    if irregular:
        return irregular
    return _strip_plural_s(word)


def looks_plural(word, lexicon=None):
    """Best guess at the number of a noun when no POS tag is available."""
    lex = lexicon or default_lexicon()
    word = word.lower()
    if lex.singular_of(word):
        return True
    if lex.plural_of(word):
        return False
    return word.endswith("s") and not word.endswith(("ss", "us", "is"))


def is_invariant_noun(token, plural=None, lexicon=None):
    """True when toggling `token` cannot produce a different surface form."""
    lex = lexicon or default_lexicon()
    word = token.lower()
    if word in lex.invariant_nouns:
        return True
    if plural is None:
        plural = looks_plural(word, lex)
    return plural and _singularize(word, lex) is None


def toggle_noun_number(token, plural=None, lexicon=None):
    """Return the other number of a noun: votes -> vote, verdict -> verdicts.

    `plural` states the current number when known (from an NN/NNS tag);
    otherwise it is guessed from the form.  Invariant nouns come back
    unchanged, which callers treat as "no error possible here".
    """
    _check_word(token)
    lex = lexicon or default_lexicon()
    word = token.lower()
    if is_invariant_noun(word, plural, lex):
        return token
    if plural is None:
        plural = looks_plural(word, lex)
    out = _singularize(word, lex) if plural else _pluralize(word, lex)
    return _apply_case(out, _case_pattern(token))


def _third_person(base, lex):
    irregular = lex.third_person_of(base)
    if irregular:
        return irregular
    if _consonant_y(base):
        return base[:-1] + "ies"
    if base.endswith(_SIBILANT_ENDINGS):
        return base + "es"
    return base + "s"


def _base_form(third, lex):
    irregular = lex.base_of(third)
    if irregular:
        return irregular
    base = _strip_plural_s(third)
    if base is None:
        raise MorphologyError(f"{third!r} does not look like a 3SG verb form")
    return base


def can_toggle_verb(token, tag):
    word = token.lower()
    if not word.isalpha():
        return False
    if tag == "VBD":
        return word in ("was", "were")
    if tag == "VBZ":
        return word.endswith("s") or default_lexicon().base_of(word) is not None
    if tag == "VBP":
        return word not in _UNTOGGLABLE_VERBS
    return False


def toggle_verb_agreement(token, tag, lexicon=None):
    """Swap a present-tense verb between 3SG and not-3SG, or was <-> were."""
    _check_word(token)
    lex = lexicon or default_lexicon()
    word = token.lower()
    if tag == "VBD":
        if word == "was":
            out = "were"
        elif word == "were":
            out = "was"
        else:
            raise MorphologyError(f"only was/were can be toggled in the past tense, got {token!r}")
    elif tag == "VBZ":
        out = _base_form(word, lex)
    elif tag == "VBP":
        if word in _UNTOGGLABLE_VERBS:
            raise MorphologyError(f"no agreement partner for {token!r}")
        out = _third_person(word, lex)
    else:
        raise MorphologyError(f"unsupported verb tag {tag!r}")
    return _apply_case(out, _case_pattern(token))


def _number_needs_an(digits):
    if digits.startswith("8"):
        return True
    # eleven, eighteen (and their thousands/millions)
    return digits[:2] in ("11", "18") and (len(digits) - 2) % 3 == 0


def choose_indefinite(next_word, lexicon=None):
    """Pick "a" or "an" for the word that follows the article."""
    if not next_word:
        raise ValueError("choose_indefinite needs the following word")
    lex = lexicon or default_lexicon()
    word = next_word.lower()
    if word in lex.article_exceptions:
        return lex.article_exceptions[word]
    if word[0].isdigit():
        digits = "".join(ch for ch in word if ch.isdigit() or ch == ".").split(".")[0]
        return "an" if _number_needs_an(digits) else "a"
    if word.startswith("eu") or (word.startswith("uni") and not word.startswith(("unin", "unim", "unid"))):
        return "a"
    return "an" if word[0] in VOWELS else "a"
