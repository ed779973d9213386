"""Corpus BLEU with multiple references, and noise-impact reports built on it.

Scoring works on detokenized text: each line is split with a fixed
punctuation normalization (the 13a scheme of mteval) and then on whitespace.
The brevity penalty uses, per line, the reference length closest to the
hypothesis length, ties going to the shorter reference.
"""

import math
import re
from collections import Counter
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field

from gramnoise.confusion import CONFUSION_SETS, EMPTY, ErrorType
from gramnoise.exceptions import AlignmentError, DataError

NORMALIZATION_VERSION = "13a-punct/1"
MAX_N = 4

_13A_RULES = [
    (re.compile(r"([\{-\~\[-\` -\&\(-\+\:-\@\/])"), r" \1 "),
    (re.compile(r"([^0-9])([\.,])"), r"\1 \2 "),
    (re.compile(r"([\.,])([^0-9])"), r" \1 \2"),
    (re.compile(r"([0-9])(-)"), r"\1 \2 "),
]


def tokenize_13a(line):
    line = line.replace("<skipped>", "").replace("-\n", "").replace("\n", " ")
    if "&" in line:
        line = (line.replace("&quot;", '"').replace("&amp;", "&")
                .replace("&lt;", "<").replace("&gt;", ">"))
    line = f" {line} "
    for pattern, repl in _13A_RULES:
        line = pattern.sub(repl, line)
    return line.split()


TOKENIZERS = {
    "13a": tokenize_13a,
    "none": str.split,
}


def _ngrams(tokens, n):
    return Counter(tuple(tokens[i:i + n]) for i in range(len(tokens) - n + 1))


def closest_ref_length(hyp_len, ref_lengths):
    return min(ref_lengths, key=lambda r: (abs(r - hyp_len), r))


@dataclass
class BleuStats:
    """Sufficient statistics for BLEU; adding two gives the stats of the union."""

    matches: list
    totals: list
    hyp_length: int = 0
    ref_length: int = 0

    @classmethod
    def zero(cls, max_n=MAX_N):
        return cls([0] * max_n, [0] * max_n)

    def __add__(self, other):
        return BleuStats([a + b for a, b in zip(self.matches, other.matches)],
                         [a + b for a, b in zip(self.totals, other.totals)],
                         self.hyp_length + other.hyp_length,
                         self.ref_length + other.ref_length)


def line_stats(hyp_tokens, ref_token_lists, max_n=MAX_N):
    if not ref_token_lists:
        raise AlignmentError("every hypothesis needs at least one reference")
    matches, totals = [], []
    for n in range(1, max_n + 1):
        hyp_counts = _ngrams(hyp_tokens, n)
        max_ref = Counter()
        for ref in ref_token_lists:
            for gram, count in _ngrams(ref, n).items():
                if count > max_ref[gram]:
                    max_ref[gram] = count
        matches.append(sum(min(c, max_ref[g]) for g, c in hyp_counts.items()))
        totals.append(max(len(hyp_tokens) - n + 1, 0))
    ref_len = closest_ref_length(len(hyp_tokens), [len(r) for r in ref_token_lists])
    return BleuStats(matches, totals, len(hyp_tokens), ref_len)


def _check_aligned(hypotheses, reference_sets):
    if len(hypotheses) == 0:
        raise AlignmentError("no hypotheses to score")
    if len(hypotheses) != len(reference_sets):
        raise AlignmentError(
            f"{len(hypotheses)} hypotheses but {len(reference_sets)} reference sets")


def _stats_chunk(args):
    hypotheses, reference_sets, max_n, tokenize = args
    tok = TOKENIZERS[tokenize]
    total = BleuStats.zero(max_n)
    for hyp, refs in zip(hypotheses, reference_sets):
        if isinstance(refs, str):
            refs = [refs]
        total = total + line_stats(tok(hyp), [tok(r) for r in refs], max_n)
    return total


def corpus_stats(hypotheses, reference_sets, max_n=MAX_N, tokenize="13a", workers=1,
                 chunk_size=5000):
    hypotheses, reference_sets = list(hypotheses), list(reference_sets)
    _check_aligned(hypotheses, reference_sets)
    jobs = [(hypotheses[i:i + chunk_size], reference_sets[i:i + chunk_size], max_n, tokenize)
            for i in range(0, len(hypotheses), chunk_size)]
    if workers > 1 and len(jobs) > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            parts = list(pool.map(_stats_chunk, jobs))
    else:
        parts = [_stats_chunk(job) for job in jobs]
    total = BleuStats.zero(max_n)
    for part in parts:
        total = total + part
    return total


@dataclass
class BleuScore:
    score: float
    precisions: list
    brevity_penalty: float
    hyp_length: int
    ref_length: int
    matches: list = field(default_factory=list)
    totals: list = field(default_factory=list)
    normalization: str = NORMALIZATION_VERSION
    smoothing: str = "none"

    def __str__(self):
        prec = "/".join(f"{100 * p:.1f}" for p in self.precisions)
        return (f"BLEU = {self.score:.2f} {prec} (BP = {self.brevity_penalty:.3f} "
                f"ratio = {self.hyp_length / max(self.ref_length, 1):.3f} "
                f"hyp_len = {self.hyp_length} ref_len = {self.ref_length})")

    def to_dict(self):
        return {
            "score": self.score,
            "precisions": list(self.precisions),
            "brevity_penalty": self.brevity_penalty,
            "hyp_length": self.hyp_length,
            "ref_length": self.ref_length,
            "matches": list(self.matches),
            "totals": list(self.totals),
            "normalization": self.normalization,
            "smoothing": self.smoothing,
        }


def brevity_penalty(hyp_length, ref_length):
    if hyp_length == 0:
        return 0.0
    if hyp_length >= ref_length:
        return 1.0
    return math.exp(1.0 - ref_length / hyp_length)


def score_from_stats(stats, add_one_from=None, tokenize="13a"):
    """Combine statistics into a score.

    With `add_one_from=k`, orders n >= k get +1 on numerator and denominator.
    """
    matches, totals = list(stats.matches), list(stats.totals)
    smoothing = "none"
    if add_one_from is not None:
        smoothing = f"add-one for n>={add_one_from}"
        for i in range(add_one_from - 1, len(matches)):
            matches[i] += 1
            totals[i] += 1
    precisions = [m / t if t > 0 else 0.0 for m, t in zip(matches, totals)]
    bp = brevity_penalty(stats.hyp_length, stats.ref_length)
    if min(precisions) == 0.0:
        score = 0.0
    else:
        score = bp * math.exp(math.fsum(math.log(p) for p in precisions) / len(precisions)) * 100
    normalization = NORMALIZATION_VERSION if tokenize == "13a" else tokenize
    return BleuScore(score, precisions, bp, stats.hyp_length, stats.ref_length,
                     list(stats.matches), list(stats.totals), normalization, smoothing)


def corpus_bleu(hypotheses, reference_sets, max_n=MAX_N, tokenize="13a", workers=1):
    """Corpus BLEU; `reference_sets[i]` is the list of references for line i."""
    stats = corpus_stats(hypotheses, reference_sets, max_n, tokenize, workers)
    return score_from_stats(stats, tokenize=tokenize)


def sentence_bleu(hypothesis, references, max_n=MAX_N, tokenize="13a"):
    """Single-sentence BLEU with add-one smoothing on orders 2 and up."""
    if isinstance(references, str):
        references = [references]
    tok = TOKENIZERS[tokenize]
    hyp = tok(hypothesis)
    stats = line_stats(hyp, [tok(r) for r in references], max_n)
    if not hyp:
        return BleuScore(0.0, [0.0] * max_n, 0.0, 0, stats.ref_length, stats.matches,
                         stats.totals, smoothing="add-one for n>=2")
    return score_from_stats(stats, add_one_from=2, tokenize=tokenize)


def transpose_references(streams):
    """Turn reference files (one list per reference set) into per-line lists."""
    streams = [list(s) for s in streams]
    if not streams:
        raise AlignmentError("at least one reference set is required")
    lengths = {len(s) for s in streams}
    if len(lengths) != 1:
        raise AlignmentError(f"reference sets have different lengths: {sorted(lengths)}")
    return [list(refs) for refs in zip(*streams)]


def self_bleu_robustness(noisy_translations, clean_translations, tokenize="13a", workers=1):
    """BLEU of noisy-input translations against clean-input translations.

    `clean_translations` is either one list of lines or a list of such lists
    (several clean-source translation sets used together as references).
    100 means the noise left every translation untouched.
    """
    clean = list(clean_translations)
    if clean and isinstance(clean[0], str):
        reference_sets = [[line] for line in clean]
    else:
        reference_sets = transpose_references(clean)
    return corpus_bleu(noisy_translations, reference_sets, tokenize=tokenize, workers=workers)


ALL = "all"


@dataclass
class DeltaCell:
    delta: float
    lines: int
    noisy_bleu: float
    clean_bleu: float

    def to_dict(self):
        return {"delta": self.delta, "lines": self.lines,
                "noisy_bleu": self.noisy_bleu, "clean_bleu": self.clean_bleu}


@dataclass
class DeltaReport:
    """BLEU(noisy input) - BLEU(clean input) per (original, replacement) group."""

    rows: list
    columns: list
    cells: dict
    row_marginals: dict
    column_marginals: dict
    overall: DeltaCell
    error_type: str = None

    def to_dict(self):
        return {
            "error_type": self.error_type,
            "normalization": NORMALIZATION_VERSION,
            "rows": self.rows,
            "columns": self.columns,
            "cells": [{"original": o, "replacement": r, **c.to_dict()}
                      for (o, r), c in sorted(self.cells.items())],
            "row_marginals": {k: v.to_dict() for k, v in self.row_marginals.items()},
            "column_marginals": {k: v.to_dict() for k, v in self.column_marginals.items()},
            "all": self.overall.to_dict(),
        }

    def format_table(self, places=1):
        """Rows are correct forms, columns substituted forms, plus `all` margins."""
        def fmt(cell):
            return "--" if cell is None else f"{cell.delta:+.{places}f}"

        header = ["correct \\ substituted"] + self.columns + [ALL]
        body = []
        for r in self.rows:
            body.append([r] + [fmt(self.cells.get((r, c))) for c in self.columns]
                        + [fmt(self.row_marginals.get(r))])
        body.append([ALL] + [fmt(self.column_marginals.get(c)) for c in self.columns]
                    + [fmt(self.overall)])
        widths = [max(len(row[i]) for row in [header] + body) for i in range(len(header))]
        lines = [f"# BLEU delta (noisy - clean), normalization {NORMALIZATION_VERSION}"]
        for row in [header] + body:
            lines.append("  ".join(cell.rjust(w) for cell, w in zip(row, widths)))
        return "\n".join(lines) + "\n"


def _group_key(event):
    original = event.original_form or event.original
    replacement = event.replacement_form or event.replacement
    if event.error_type in (ErrorType.ART, ErrorType.PREP):
        original, replacement = original.lower(), replacement.lower()
    return original, replacement


# Confusion sets up to this size are shown in full, like the article table;
# larger ones (prepositions) list only the forms that occur.
FULL_GRID_MAX = 4


def _form_order(error_type, forms):
    if error_type in CONFUSION_SETS:
        members = CONFUSION_SETS[error_type]
        if len(members) <= FULL_GRID_MAX:
            order = list(members)
        else:
            order = [f for f in members if f in forms]
        return order + sorted(forms - set(order))
    return sorted(forms, key=lambda f: (f == EMPTY, f))


def delta_report(events, noisy_translations, clean_translations, references,
                 tokenize="13a"):
    """Per-substitution BLEU change on the lines each substitution touched.

    `references[i]` lists the references of line i (a bare string is one
    reference).  Every group, marginal and the overall cell is scored as a
    corpus over its own lines.
    """
    noisy, clean = list(noisy_translations), list(clean_translations)
    refs = [[r] if isinstance(r, str) else list(r) for r in references]
    if not (len(noisy) == len(clean) == len(refs)):
        raise AlignmentError(
            f"translation/reference files disagree: {len(noisy)} noisy, "
            f"{len(clean)} clean, {len(refs)} references")
    groups = {}
    error_types = set()
    for event in events:
        if not 0 <= event.line_index < len(noisy):
            raise DataError(f"event for line {event.line_index} has no translation "
                            f"({len(noisy)} lines available)")
        groups.setdefault(_group_key(event), []).append(event.line_index)
        error_types.add(event.error_type)
    if not groups:
        raise DataError("no events to report on")

    def cell(lines):
        lines = sorted(lines)
        if not lines:
            return None
        n = corpus_bleu([noisy[i] for i in lines], [refs[i] for i in lines], tokenize=tokenize)
        c = corpus_bleu([clean[i] for i in lines], [refs[i] for i in lines], tokenize=tokenize)
        return DeltaCell(n.score - c.score, len(lines), n.score, c.score)

    error_type = error_types.pop() if len(error_types) == 1 else None
    rows = _form_order(error_type, {o for o, _ in groups})
    columns = _form_order(error_type, {r for _, r in groups})
    cells = {key: cell(lines) for key, lines in groups.items()}
    row_marginals = {r: cell([i for (o, _), ls in groups.items() if o == r for i in ls]) for r in rows}
    column_marginals = {c: cell([i for (_, x), ls in groups.items() if x == c for i in ls]) for c in columns}
    row_marginals = {k: v for k, v in row_marginals.items() if v is not None}
    column_marginals = {k: v for k, v in column_marginals.items() if v is not None}
    overall = cell([i for ls in groups.values() for i in ls])
    return DeltaReport(rows, columns, cells, row_marginals, column_marginals, overall,
                       error_type.value if error_type else None)
