import pytest
from hypothesis import given, strategies as st

from gramnoise.exceptions import MorphologyError
from gramnoise.morphology import (
    InflectionLexicon,
    choose_indefinite,
    default_lexicon,
    is_invariant_noun,
    match_case,
    toggle_noun_number,
    toggle_verb_agreement,
)

from conftest import DATA, read_lines


def inflection_pairs():
    pairs = []
    for line in read_lines(DATA / "noun_inflections.tsv"):
        if line and not line.startswith("#"):
            singular, plural = line.split("\t")
            pairs.append((singular, plural))
    return pairs


PAIRS = inflection_pairs()


@pytest.mark.parametrize("word, expected", [
    ("votes", "vote"),        # Table 3: 226 votes/*vote
    ("verdict", "verdicts"),  # Table 3: The verdict/*verdicts
    ("city", "cities"),
    ("child", "children"),
])
def test_toggle_noun_examples(word, expected):
    assert toggle_noun_number(word) == expected


@pytest.mark.parametrize("singular, plural", PAIRS)
def test_word_list_both_directions(singular, plural):
    assert toggle_noun_number(singular, plural=False) == plural
    assert toggle_noun_number(plural, plural=True) == singular


@pytest.mark.parametrize("singular, plural", PAIRS)
def test_noun_involution_on_regulars(singular, plural):
    assert toggle_noun_number(toggle_noun_number(singular, False), True) == singular
    assert toggle_noun_number(toggle_noun_number(plural, True), False) == plural


def test_irregular_nouns_are_mutual_inverses():
    lex = default_lexicon()
    assert len(lex.irregular_nouns) > 20
    for singular, plural in lex.irregular_nouns.items():
        assert lex.singular_of(plural) == singular
        assert toggle_noun_number(singular, plural=False) == plural
        assert toggle_noun_number(plural, plural=True) == singular


def test_invariant_nouns_are_flagged_and_unchanged():
    lex = default_lexicon()
    assert "sheep" in lex.invariant_nouns
    assert not lex.invariant_nouns & set(lex.irregular_nouns)
    for word in ("sheep", "news", "species"):
        assert is_invariant_noun(word)
        assert toggle_noun_number(word) == word


def test_lexicon_rejects_overlap_and_duplicate_plurals():
    with pytest.raises(ValueError):
        InflectionLexicon({"sheep": "sheeps"}, {}, frozenset({"sheep"}))
    with pytest.raises(ValueError):
        InflectionLexicon({"axe": "axes", "axis": "axes"})
    with pytest.raises(ValueError):
        InflectionLexicon.from_lines(["only two\tfields"])


def test_lexicon_file_size():
    lines = [l for l in read_lines(DATA.parent.parent / "src/gramnoise/data/lexicon.tsv")
             if l.strip() and not l.startswith("#")]
    assert 150 <= len(lines) <= 300


@pytest.mark.parametrize("word", ["vote", "Vote", "VOTE", "city", "City", "CHILD"])
def test_noun_case_preserved(word):
    out = toggle_noun_number(word, plural=False)
    assert out.lower() == toggle_noun_number(word.lower(), plural=False)
    assert match_case(out, word) == out


def test_non_alphabetic_noun_rejected():
    with pytest.raises(MorphologyError):
        toggle_noun_number("226")
    with pytest.raises(MorphologyError):
        toggle_noun_number("")


@pytest.mark.parametrize("word, tag, expected", [
    ("win", "VBP", "wins"),                 # Table 3: Islamists win/*wins
    ("accompanies", "VBZ", "accompany"),    # Table 3: accompanies/*accompany
    ("was", "VBD", "were"),
    ("were", "VBD", "was"),
    ("has", "VBZ", "have"),
    ("are", "VBP", "is"),
    ("does", "VBZ", "do"),
    ("reaches", "VBZ", "reach"),
    ("fix", "VBP", "fixes"),
    ("carry", "VBP", "carries"),
    ("Win", "VBP", "Wins"),
    ("WAS", "VBD", "WERE"),
])
def test_verb_examples(word, tag, expected):
    assert toggle_verb_agreement(word, tag) == expected


REGULAR_VERBS = ["win", "require", "support", "reach", "discuss", "approve", "fix",
                 "carry", "hear", "reject", "accompany", "play", "buzz", "wish", "watch"]


@pytest.mark.parametrize("base", REGULAR_VERBS)
def test_verb_involution_regular(base):
    third = toggle_verb_agreement(base, "VBP")
    assert third != base
    assert toggle_verb_agreement(third, "VBZ") == base


def test_verb_involution_lexicon():
    lex = default_lexicon()
    assert lex.irregular_verbs
    for base, third in lex.irregular_verbs.items():
        assert toggle_verb_agreement(base, "VBP") == third
        assert toggle_verb_agreement(third, "VBZ") == base


@pytest.mark.parametrize("word, tag", [("went", "VBD"), ("am", "VBP"), ("run", "NN")])
def test_verb_errors(word, tag):
    with pytest.raises(MorphologyError):
        toggle_verb_agreement(word, tag)


@pytest.mark.parametrize("word, expected", [
    ("apple", "an"),
    ("gas", "a"),   # Table 3: a/*∅ disadvantageous gas deal
    ("hour", "an"),
    ("university", "a"),
    ("honest", "an"),
    ("European", "a"),
    ("8", "an"),
    ("11", "an"),
    ("226", "a"),
    ("unimportant", "an"),
    ("disadvantageous", "a"),
])
def test_choose_indefinite(word, expected):
    assert choose_indefinite(word) == expected


def test_choose_indefinite_requires_word():
    with pytest.raises(ValueError):
        choose_indefinite("")


_letters = st.text(alphabet="abcdefghijklmnopqrstuvwxyz", min_size=1, max_size=10)


@given(_letters, st.sampled_from(["lower", "title", "upper"]))
def test_match_case_property(word, style):
    model = {"lower": "word", "title": "Word", "upper": "WORD"}[style]
    out = match_case(word, model)
    assert out.lower() == word
    if style == "upper" and len(word) > 1:
        assert out.isupper()
    elif style != "lower":
        assert out[0].isupper()
    else:
        assert out == word
