import random
from collections import Counter

import pytest

from gramnoise.confusion import EMPTY, ErrorType
from gramnoise.exceptions import AlignmentError, DataError
from gramnoise.noiser import (
    DEFAULT_SEED,
    ErrorEvent,
    NoiseConfig,
    apply_event,
    apply_site,
    drop_one_char,
    format_events,
    noisify_corpus,
    noisify_line,
    noisify_sentence,
    parse_events,
    replay_events,
)
from gramnoise.treebank import CandidateSite, parse_ptb

from conftest import DATA, read_lines
from oracles import binomial_bounds, levenshtein, token_distance_ignoring_case

CAT = "(S (NP (DT The) (NN cat)) (VP (VBZ sits)) (. .))"

# Per-type changed-line percentages on the 100-line news sample with the
# learner-fixture matrices and seed 7, frozen after the first run.
NEWS_RATES = {"drop": 100, "art": 90, "prep": 87, "nn": 96, "sva": 60}

# (line, type, seed, expected noisy sentence): seeds were searched once so that
# each draw lands on the site and replacement Table 3 documents, then frozen.
TABLE3 = [
    (0, "art", 11, "In October , Tymoshenko was sentenced to seven years in prison for entering "
                   "into what was reported to be disadvantageous gas deal with Russia ."),
    (1, "art", 0, "Its ratification would require the 226 votes ."),
    (1, "prep", 25, "Its ratification would require for 226 votes ."),
    (1, "nn", 0, "Its ratification would require 226 vote ."),
    (2, "art", 7, "It is the good result , which nevertheless involves a certain risk ."),
    (3, "prep", 193, "the motion to revoke an article based in which the opposition leader , "
                     "Yulia Tymoshenko , was sentenced ."),
    (4, "nn", 0, "The verdicts is not yet final ; the court will hear Tymoshenko 's appeal in December ."),
    (5, "sva", 0, "As a rule , Islamists wins in the country ; the question is whether they are "
                  "the moderate or the radical ones ."),
    (6, "sva", 0, "This cultural signature accompany the development of Moleskine ;"),
]


@pytest.mark.parametrize("index, error_type, seed, expected", TABLE3)
def test_table3_golden(table3, uniform_matrices, index, error_type, seed, expected):
    sentences, trees = table3
    config = NoiseConfig(error_type, uniform_matrices, seed)
    out, event = noisify_sentence(sentences[index].split(), parse_ptb(trees[index]), config, index)
    assert " ".join(out) == expected
    assert event is not None and event.original != event.replacement


def test_single_site_noun(uniform_matrices):
    for seed in range(5):
        out, event = noisify_sentence("The cat sits .".split(), parse_ptb(CAT),
                                      NoiseConfig("nn", uniform_matrices, seed), 0)
        assert out == ["The", "cats", "sits", "."]
        assert (event.site_kind, event.position, event.original, event.replacement) == (
            "substitute", 1, "cat", "cats")


def test_verbless_sentence_unchanged(uniform_matrices):
    tree = parse_ptb("(NP (DT the) (JJ big) (NN dog))")
    out, event = noisify_sentence(["the", "big", "dog"], tree, NoiseConfig("sva", uniform_matrices), 0)
    assert out == ["the", "big", "dog"] and event is None


def test_misaligned_tree_names_line(uniform_matrices):
    with pytest.raises(AlignmentError, match="line 42"):
        noisify_sentence(["A", "dog", "sits", "."], parse_ptb(CAT), NoiseConfig("nn", uniform_matrices), 42)


def test_config_validation(uniform_matrices):
    with pytest.raises(ValueError):
        NoiseConfig("art")
    with pytest.raises(ValueError):
        NoiseConfig("drop", seed=-1)
    with pytest.raises(ValueError):
        NoiseConfig("drop", seed=2**64)
    assert NoiseConfig("drop").seed == DEFAULT_SEED
    assert NoiseConfig("ART", uniform_matrices).error_type is ErrorType.ART


# realisation details -----------------------------------------------------------

def site(error_type, kind, index, form, tag=""):
    return CandidateSite(ErrorType.parse(error_type), kind, index, form, tag)


def test_insert_at_start_recases_neighbor():
    tree = parse_ptb("(S (NP (NNS Votes)) (VP (VBD came)) (. .))")
    out, event = apply_site(["Votes", "came", "."], tree.tagged_leaves(),
                            site("art", "insert", 0, EMPTY, "NNS"), "the")
    assert out == ["The", "votes", "came", "."]
    assert event.neighbor == "votes"
    assert apply_event("Votes came .", event) == "The votes came ."


def test_insert_before_proper_noun_keeps_case():
    tree = parse_ptb("(S (NP (NNP Russia)) (VP (VBD won)))")
    out, event = apply_site(["Russia", "won"], tree.tagged_leaves(),
                            site("art", "insert", 0, EMPTY, "NNP"), "the")
    assert out == ["The", "Russia", "won"] and event.neighbor is None


def test_delete_sentence_initial_article():
    tree = parse_ptb(CAT)
    out, event = apply_site(["The", "cat", "sits", "."], tree.tagged_leaves(),
                            site("art", "substitute", 0, "the", "DT"), EMPTY)
    assert out == ["Cat", "sits", "."]
    assert event.site_kind == "delete" and event.neighbor == "Cat"
    assert apply_event("The cat sits .", event) == "Cat sits ."


def test_indefinite_resolved_on_insert():
    tree = parse_ptb("(S (VP (VBP eat) (NP (NN apple))))")
    out, event = apply_site(["eat", "apple"], tree.tagged_leaves(),
                            site("art", "insert", 1, EMPTY, "NN"), "a")
    assert out == ["eat", "an", "apple"]
    assert event.replacement_form == "an"


def test_substitution_keeps_case():
    tree = parse_ptb(CAT)
    out, _ = apply_site(["The", "cat", "sits", "."], tree.tagged_leaves(),
                        site("art", "substitute", 0, "the", "DT"), "a")
    assert out[0] == "A"


# DROP ------------------------------------------------------------------------------

def test_drop_examples():
    assert drop_one_char("", NoiseConfig("drop"), 0) == ("", None)
    assert drop_one_char("   ", NoiseConfig("drop"), 0) == ("   ", None)
    out, event = drop_one_char("ab", NoiseConfig("drop", seed=1), 0)
    assert out == "b"
    assert (event.site_kind, event.position, event.original, event.replacement) == (
        "char_drop", 0, "a", EMPTY)


def test_drop_never_removes_whitespace():
    for i in range(300):
        out, event = drop_one_char("a b  c", NoiseConfig("drop", seed=3), i)
        assert not event.original.isspace()
        assert out.count(" ") == 3


def test_drop_positions_binomial():
    n = 1000
    counts = Counter(drop_one_char("abcd", NoiseConfig("drop", seed=5), i)[1].original
                     for i in range(n))
    low, high = binomial_bounds(n, 0.25)
    assert set(counts) == set("abcd")
    for ch in "abcd":
        assert low <= counts[ch] <= high, counts


# corpus level ------------------------------------------------------------------------

def test_news_sample_rates(fixture_matrices):
    raw = read_lines(DATA / "news_sample.txt")
    trees = read_lines(DATA / "news_sample.ptb")
    assert len(raw) == len(trees) == 100
    rates = {}
    for error_type in NEWS_RATES:
        result = noisify_corpus(raw, trees, NoiseConfig(error_type, fixture_matrices, 7))
        rates[error_type] = result.summary()["changed_percent"]
        assert result.summary()["lines"] == 100
    assert rates == NEWS_RATES
    # ordering as in Table 2: drop first, SVA lowest
    assert rates["drop"] == 100
    assert min(rates, key=rates.get) == "sva"
    assert all(rates[t] > 80 for t in ("art", "prep", "nn"))


def test_corpus_determinism_and_replay(fixture_matrices):
    raw = read_lines(DATA / "news_sample.txt")
    trees = read_lines(DATA / "news_sample.ptb")
    for error_type in ("drop", "art", "prep", "nn", "sva"):
        config = NoiseConfig(error_type, fixture_matrices, 123)
        first = noisify_corpus(raw, trees, config)
        second = noisify_corpus(raw, trees, config, chunk_size=7)
        assert first.lines == second.lines and first.events == second.events
        assert replay_events(raw, first.events) == first.lines
        assert parse_events(format_events(first.events)) == first.events
        changed = {e.line_index for e in first.events}
        for i, (a, b) in enumerate(zip(raw, first.lines)):
            if i in changed:
                if error_type == "drop":
                    assert levenshtein(a, b) == 1
                else:
                    assert token_distance_ignoring_case(a.split(), b.split()) == 1
            else:
                assert a == b


def test_line_independence(fixture_matrices):
    raw = read_lines(DATA / "news_sample.txt")
    trees = read_lines(DATA / "news_sample.ptb")
    config = NoiseConfig("art", fixture_matrices, 99)
    full = noisify_corpus(raw, trees, config).lines
    rng = random.Random(0)
    others = list(range(100))
    rng.shuffle(others)
    # scramble every line except 37 and check line 37 is unaffected
    mixed_raw, mixed_trees = list(raw), list(trees)
    for i, j in zip(range(100), others):
        if i != 37 and j != 37:
            mixed_raw[i], mixed_trees[i] = raw[j], trees[j]
    assert noisify_corpus(mixed_raw, mixed_trees, config).lines[37] == full[37]
    assert noisify_line(raw[37], trees[37], config, 37)[0] == full[37]


def test_different_seeds_differ(fixture_matrices):
    raw = read_lines(DATA / "news_sample.txt")
    trees = read_lines(DATA / "news_sample.ptb")
    a = noisify_corpus(raw, trees, NoiseConfig("prep", fixture_matrices, 1)).lines
    b = noisify_corpus(raw, trees, NoiseConfig("prep", fixture_matrices, 2)).lines
    assert a != b


def test_corpus_line_mismatch(fixture_matrices):
    with pytest.raises(AlignmentError, match="2 lines but tree file has 1"):
        noisify_corpus(["a", "b"], [CAT], NoiseConfig("nn", fixture_matrices))
    with pytest.raises(AlignmentError):
        noisify_corpus(["a"], None, NoiseConfig("nn", fixture_matrices))
    # DROP ignores trees entirely
    assert noisify_corpus(["ab"], None, NoiseConfig("drop")).summary()["changed"] == 1


def test_bad_tree_reports_line(fixture_matrices):
    with pytest.raises(DataError, match="line 1"):
        noisify_corpus(["x", "y"], ["(X (Y x))", "(X (Y y)"], NoiseConfig("nn", fixture_matrices))


def test_event_rows():
    event = ErrorEvent(3, ErrorType.ART, "insert", 0, EMPTY, "The", EMPTY, "the", "votes")
    assert ErrorEvent.from_row(event.to_row()) == event
    header = format_events([event]).splitlines()[0].split("\t")
    assert header[:6] == ["line_index", "type", "site_kind", "position", "original", "replacement"]
    with pytest.raises(DataError):
        ErrorEvent.from_row("1\tart")


def test_replay_detects_wrong_base():
    event = ErrorEvent(0, ErrorType.NN, "substitute", 1, "cat", "cats", "SG", "PL")
    with pytest.raises(AlignmentError):
        apply_event("The dog sits .", event)
