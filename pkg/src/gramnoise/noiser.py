"""Inject exactly one grammatical error per sentence, wherever possible.

Every line draws from its own random stream keyed by ``(seed, line_index)``,
so the output for a line never depends on other lines or on how the corpus
was split across workers.
"""

import bisect
import itertools
import logging
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass

import numpy as np

from gramnoise.confusion import EMPTY, PL, ErrorType, replacement_forms
from gramnoise.exceptions import AlignmentError, DataError
from gramnoise.morphology import (
    choose_indefinite,
    match_case,
    toggle_noun_number,
    toggle_verb_agreement,
)
from gramnoise.treebank import candidate_sites, decode_token, parse_ptb

logger = logging.getLogger(__name__)

DEFAULT_SEED = 20190601
EVENT_COLUMNS = ("line_index", "type", "site_kind", "position", "original",
                 "replacement", "original_form", "replacement_form", "neighbor")


@dataclass(frozen=True)
class NoiseConfig:
    error_type: ErrorType
    matrices: object = None
    seed: int = DEFAULT_SEED

    def __post_init__(self):
        object.__setattr__(self, "error_type", ErrorType.parse(self.error_type))
        if not 0 <= int(self.seed) < 2**64:
            raise ValueError("seed must be an unsigned 64-bit integer")
        if self.error_type is not ErrorType.DROP:
            if self.matrices is None or self.error_type not in self.matrices.matrices:
                raise ValueError(f"matrices for {self.error_type.value} are required")


@dataclass(frozen=True)
class ErrorEvent:
    """What was changed in one line.

    `position` is a token index, or a character index for char_drop.
    `original`/`replacement` are surface strings (EMPTY for none);
    `original_form`/`replacement_form` are the confusion-set members.
    `neighbor` is the re-cased adjacent token when a sentence-initial word was
    deleted or displaced, else None.
    """

    line_index: int
    error_type: ErrorType
    site_kind: str
    position: int
    original: str
    replacement: str
    original_form: str = ""
    replacement_form: str = ""
    neighbor: str = None

    def to_row(self):
        return "\t".join([
            str(self.line_index), self.error_type.value, self.site_kind, str(self.position),
            self.original, self.replacement, self.original_form, self.replacement_form,
            self.neighbor or "",
        ])

    @classmethod
    def from_row(cls, row):
        fields = row.rstrip("\n").split("\t")
        if len(fields) != len(EVENT_COLUMNS):
            raise DataError(f"event row has {len(fields)} fields, expected {len(EVENT_COLUMNS)}")
        return cls(int(fields[0]), ErrorType.parse(fields[1]), fields[2], int(fields[3]),
                   fields[4], fields[5], fields[6], fields[7], fields[8] or None)


def line_rng(seed, line_index):
    """Independent generator for one line, derived from (seed, line_index)."""
    return np.random.Generator(np.random.PCG64(
        np.random.SeedSequence(entropy=int(seed), spawn_key=(int(line_index),))))


def sample_replacement(row, error_type, current_form, rng):
    """Draw an erroneous form for `current_form`, never the form itself."""
    outcomes = [f for f in replacement_forms(error_type, current_form) if row.get(f, 0) > 0]
    if outcomes:
        weights = [row[f] for f in outcomes]
    else:
        outcomes = list(replacement_forms(error_type, current_form))
        weights = [1.0] * len(outcomes)
    total = sum(weights)
    cumulative = list(itertools.accumulate(w / total for w in weights))
    idx = bisect.bisect_right(cumulative, rng.random() * cumulative[-1])
    return outcomes[min(idx, len(outcomes) - 1)]


def _check_alignment(tokens, tree, line_index):
    leaves = [leaf.token for leaf in tree.leaves()]
    if len(leaves) != len(tokens) or any(
            tok != leaf and tok != decode_token(leaf) for tok, leaf in zip(tokens, leaves)):
        raise AlignmentError(
            f"line {line_index}: tree leaves {leaves[:8]}... do not match tokens {list(tokens[:8])}...")
    return tree.tagged_leaves()


def _is_sentence_case(token, tag):
    return (token[:1].isupper() and not (len(token) > 1 and token.isupper())
            and tag not in ("NNP", "NNPS") and token != "I")


def _capitalize(token):
    return token[:1].upper() + token[1:]


def noisify_sentence(tokens, tree, config, line_index):
    """Return (new_tokens, event or None) for one tokenized sentence."""
    if line_index < 0:
        raise ValueError("line_index must be >= 0")
    tokens = list(tokens)
    tagged = _check_alignment(tokens, tree, line_index)
    sites = candidate_sites(tree, config.error_type)
    if not sites:
        return tokens, None
    rng = line_rng(config.seed, line_index)
    site = sites[int(rng.integers(len(sites)))]
    row = config.matrices.row(config.error_type, site.current_form)
    form = sample_replacement(row, config.error_type, site.current_form, rng)
    return apply_site(tokens, tagged, site, form, line_index)


def apply_site(tokens, tagged, site, form, line_index=0):
    """Realise `form` at `site`; the deterministic half of noisify_sentence."""
    i = site.token_index
    out = list(tokens)
    neighbor = None
    error_type = site.error_type
    if site.site_kind == "insert":
        if error_type is ErrorType.ART and form in ("a", "an"):
            form = choose_indefinite(out[i])
        surface = form
        if i == 0:
            surface = _capitalize(form)
            if _is_sentence_case(out[0], tagged[0][1]):
                neighbor = out[0].lower()
                out[0] = neighbor
        out.insert(i, surface)
        return out, ErrorEvent(line_index, error_type, "insert", i, EMPTY, surface,
                               EMPTY, form, neighbor)

    original = out[i]
    if error_type is ErrorType.NN:
        surface = toggle_noun_number(original, plural=site.current_form == PL)
    elif error_type is ErrorType.SVA:
        surface = toggle_verb_agreement(original, site.tag)
    elif form == EMPTY:
        del out[i]
        if i == 0 and out and original[:1].isupper():
            cased = _capitalize(out[0])
            if cased != out[0]:
                neighbor = out[0] = cased
        return out, ErrorEvent(line_index, error_type, "delete", i, original, EMPTY,
                               site.current_form, EMPTY, neighbor)
    else:
        surface = match_case(form, original)
    if surface == original:
        raise DataError(f"line {line_index}: cannot realise {form!r} at token {i} ({original!r})")
    out[i] = surface
    return out, ErrorEvent(line_index, error_type, "substitute", i, original, surface,
                           site.current_form, form, neighbor)


def drop_one_char(sentence, config, line_index):
    """Delete one non-whitespace character chosen uniformly at random."""
    positions = [k for k, ch in enumerate(sentence) if not ch.isspace()]
    if not positions:
        return sentence, None
    rng = line_rng(config.seed, line_index)
    k = positions[int(rng.integers(len(positions)))]
    event = ErrorEvent(line_index, ErrorType.DROP, "char_drop", k, sentence[k], EMPTY)
    return sentence[:k] + sentence[k + 1:], event


def apply_event(line, event):
    """Replay a recorded event onto the clean line."""
    if event.site_kind == "char_drop":
        k = event.position
        if line[k:k + 1] != event.original:
            raise AlignmentError(f"line {event.line_index}: char {k} is not {event.original!r}")
        return line[:k] + line[k + 1:]
    tokens = line.split()
    i = event.position
    if event.site_kind == "insert":
        tokens.insert(i, event.replacement)
        if event.neighbor is not None:
            tokens[1] = event.neighbor
    else:
        if i >= len(tokens) or tokens[i] != event.original:
            raise AlignmentError(f"line {event.line_index}: token {i} is not {event.original!r}")
        if event.site_kind == "delete":
            del tokens[i]
            if event.neighbor is not None:
                tokens[0] = event.neighbor
        else:
            tokens[i] = event.replacement
    return " ".join(tokens)


def replay_events(clean_lines, events):
    out = list(clean_lines)
    for event in events:
        out[event.line_index] = apply_event(out[event.line_index], event)
    return out


def noisify_line(line, tree_line, config, line_index):
    """Noise one raw corpus line (tree line ignored for DROP)."""
    if config.error_type is ErrorType.DROP:
        return drop_one_char(line, config, line_index)
    tokens = line.split()
    if not tokens:
        return line, None
    try:
        tree = parse_ptb(tree_line)
    except DataError as exc:
        raise DataError(f"tree for line {line_index}: {exc}") from exc
    new_tokens, event = noisify_sentence(tokens, tree, config, line_index)
    if event is None:
        return line, None
    return " ".join(new_tokens), event


def _noisify_chunk(args):
    start, lines, trees, config = args
    out, events = [], []
    for offset, line in enumerate(lines):
        tree_line = trees[offset] if trees is not None else None
        new_line, event = noisify_line(line, tree_line, config, start + offset)
        out.append(new_line)
        if event is not None:
            events.append(event)
    return out, events


@dataclass
class NoiseResult:
    lines: list
    events: list
    error_type: ErrorType

    @property
    def changed(self):
        return len(self.events)

    @property
    def changed_percent(self):
        return 100.0 * self.changed / len(self.lines) if self.lines else 0.0

    def summary(self):
        return {
            "type": self.error_type.value,
            "lines": len(self.lines),
            "changed": self.changed,
            "changed_percent": round(self.changed_percent, 1),
        }


def noisify_corpus(raw_lines, tree_lines, config, workers=1, chunk_size=2000):
    """Noise a whole corpus; `raw_lines`/`tree_lines` are aligned line lists.

    Output is identical for any `workers` value.
    """
    raw_lines = [line.rstrip("\n") for line in raw_lines]
    if config.error_type is ErrorType.DROP:
        tree_lines = None
    else:
        if tree_lines is None:
            raise AlignmentError(f"{config.error_type.value} noise needs a tree file")
        tree_lines = [line.rstrip("\n") for line in tree_lines]
        if len(tree_lines) != len(raw_lines):
            raise AlignmentError(
                f"corpus has {len(raw_lines)} lines but tree file has {len(tree_lines)}")
    jobs = []
    for start in range(0, len(raw_lines), chunk_size):
        trees = tree_lines[start:start + chunk_size] if tree_lines is not None else None
        jobs.append((start, raw_lines[start:start + chunk_size], trees, config))
    if workers > 1 and len(jobs) > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            results = list(pool.map(_noisify_chunk, jobs))
    else:
        results = [_noisify_chunk(job) for job in jobs]
    lines, events = [], []
    for chunk_lines, chunk_events in results:
        lines.extend(chunk_lines)
        events.extend(chunk_events)
    result = NoiseResult(lines, events, config.error_type)
    logger.info("%s: changed %d of %d lines (%.1f%%)", config.error_type.value,
                result.changed, len(lines), result.changed_percent)
    return result


def format_events(events):
    return "\t".join(EVENT_COLUMNS) + "\n" + "".join(e.to_row() + "\n" for e in events)


def parse_events(text):
    lines = text.splitlines()
    if lines and lines[0].startswith("line_index"):
        lines = lines[1:]
    return [ErrorEvent.from_row(line) for line in lines if line.strip()]
