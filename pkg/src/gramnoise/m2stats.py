"""Learn error confusion matrices from M2-annotated learner text.

An M2 file holds blocks like::

    S The cat sit .
    A 2 3|||SVA|||sits|||REQUIRED|||-NONE-|||0

Annotations are tallied per error type as (learner form, corrected form)
pairs and then turned around: the stored matrices map a *correct* form to a
distribution over the *erroneous* forms a learner produced in its place,
which is the direction error injection needs.
"""

import json
import math
from collections import Counter, defaultdict
from dataclasses import dataclass, field

from gramnoise.confusion import (
    ARTICLES,
    CONFUSION_SETS,
    EMPTY,
    MATRIX_TYPES,
    NOT_SECOND_SG_PAST,
    NOT_THIRD_SG,
    PL,
    PREPOSITIONS,
    SECOND_SG_PAST,
    SG,
    THIRD_SG,
    ErrorType,
    replacement_forms,
)
from gramnoise.exceptions import DataError, M2ParseError, MorphologyError
from gramnoise.morphology import toggle_noun_number, toggle_verb_agreement

FORMAT_VERSION = 1
ROW_TOLERANCE = 1e-9

DEFAULT_CODE_MAP = {
    "ArtOrDet": ErrorType.ART,
    "Prep": ErrorType.PREP,
    "Nn": ErrorType.NN,
    "SVA": ErrorType.SVA,
}

NOOP_CODES = frozenset({"noop"})
SITE_ACTIONS = ("delete", "substitute", "insert")


@dataclass(frozen=True)
class Annotation:
    start: int
    end: int
    code: str
    correction: str
    annotator: int = 0
    required: str = "REQUIRED"
    comment: str = "-NONE-"

    @property
    def is_insertion(self):
        return self.start == self.end


@dataclass(frozen=True)
class M2Entry:
    tokens: tuple
    annotations: tuple = ()

    def span_text(self, annotation):
        return " ".join(self.tokens[annotation.start:annotation.end])


def _parse_annotation(body, lineno, n_tokens):
    fields = body.split("|||")
    if len(fields) < 3:
        raise M2ParseError("annotation needs at least span, code and correction", lineno)
    span = fields[0].split()
    if len(span) != 2:
        raise M2ParseError(f"malformed span {fields[0]!r}", lineno)
    try:
        start, end = int(span[0]), int(span[1])
    except ValueError:
        raise M2ParseError(f"non-integer span {fields[0]!r}", lineno) from None
    code = fields[1].strip()
    if not code:
        raise M2ParseError("empty error code", lineno)
    if code in NOOP_CODES or (start, end) == (-1, -1):
        return None
    if start < 0 or start > end:
        raise M2ParseError(f"span start {start} > end {end}" if start > end
                           else f"negative span start {start}", lineno)
    if end > n_tokens:
        raise M2ParseError(f"span end {end} beyond {n_tokens} tokens", lineno)
    correction = fields[2].strip()
    if correction == "-NONE-":
        correction = ""
    required = fields[3] if len(fields) > 3 else "REQUIRED"
    comment = fields[4] if len(fields) > 4 else "-NONE-"
    try:
        annotator = int(fields[5]) if len(fields) > 5 else 0
    except ValueError:
        raise M2ParseError(f"non-integer annotator id {fields[5]!r}", lineno) from None
    return Annotation(start, end, code, correction, annotator, required, comment)


def parse_m2(lines):
    """Parse M2 text into a list of M2Entry; accepts a string or an iterable of lines."""
    if isinstance(lines, str):
        lines = lines.splitlines()
    entries = []
    tokens = None
    annotations = []
    for lineno, raw in enumerate(lines, 1):
        line = raw.rstrip("\r\n")
        if not line.strip():
            if tokens is not None:
                entries.append(M2Entry(tuple(tokens), tuple(annotations)))
            tokens, annotations = None, []
        elif line.startswith("S ") or line == "S":
            if tokens is not None:
                entries.append(M2Entry(tuple(tokens), tuple(annotations)))
                annotations = []
            tokens = line[2:].split()
        elif line.startswith("A "):
            if tokens is None:
                raise M2ParseError("annotation line before any sentence line", lineno)
            annotation = _parse_annotation(line[2:], lineno, len(tokens))
            if annotation is not None:
                annotations.append(annotation)
        else:
            raise M2ParseError(f"unrecognised line {line[:20]!r}", lineno)
    if tokens is not None:
        entries.append(M2Entry(tuple(tokens), tuple(annotations)))
    return entries


def format_m2(entries):
    out = []
    for entry in entries:
        out.append("S " + " ".join(entry.tokens))
        for a in entry.annotations:
            out.append(f"A {a.start} {a.end}|||{a.code}|||{a.correction}|||"
                       f"{a.required}|||{a.comment}|||{a.annotator}")
        out.append("")
    return "\n".join(out) + ("\n" if out else "")


@dataclass
class ErrorCounts:
    """Raw tallies: cells[type][learner_form][corrected_form] = n."""

    cells: dict = field(default_factory=lambda: {t: defaultdict(Counter) for t in MATRIX_TYPES})
    other: dict = field(default_factory=lambda: {t: Counter() for t in MATRIX_TYPES})
    unmapped: Counter = field(default_factory=Counter)
    entries: int = 0

    def total_cells(self, error_type=None):
        types = [ErrorType.parse(error_type)] if error_type else MATRIX_TYPES
        return sum(n for t in types for row in self.cells[t].values() for n in row.values())

    def total_other(self, error_type=None):
        types = [ErrorType.parse(error_type)] if error_type else MATRIX_TYPES
        return sum(sum(self.other[t].values()) for t in types)

    def to_dict(self):
        return {
            "cells": {t.value: {lf: dict(row) for lf, row in sorted(self.cells[t].items())}
                      for t in MATRIX_TYPES},
            "other": {t.value: {f"{a} -> {b}": n for (a, b), n in sorted(self.other[t].items())}
                      for t in MATRIX_TYPES},
            "unmapped": dict(sorted(self.unmapped.items())),
            "entries": self.entries,
        }


_CLOSED_WORD_SETS = {
    ErrorType.ART: frozenset(ARTICLES),
    ErrorType.PREP: frozenset(PREPOSITIONS),
}


def _noun_categories(learner, corrected):
    if " " in learner or " " in corrected or not learner.isalpha() or not corrected.isalpha():
        return None
    try:
        if toggle_noun_number(learner, plural=False) == corrected:
            return SG, PL
        if toggle_noun_number(learner, plural=True) == corrected:
            return PL, SG
    except MorphologyError:
        return None
    return None


def _verb_categories(learner, corrected):
    past = {"was": NOT_SECOND_SG_PAST, "were": SECOND_SG_PAST}
    if learner in past and corrected in past:
        return past[learner], past[corrected]
    if " " in learner or " " in corrected or not learner.isalpha() or not corrected.isalpha():
        return None
    for tag, cats in (("VBP", (NOT_THIRD_SG, THIRD_SG)), ("VBZ", (THIRD_SG, NOT_THIRD_SG))):
        try:
            if toggle_verb_agreement(learner, tag) == corrected:
                return cats
        except MorphologyError:
            continue
    return None


def classify_annotation(error_type, learner, corrected):
    """Map surface forms to confusion-set members, or None if they fall outside."""
    if error_type in _CLOSED_WORD_SETS:
        members = _CLOSED_WORD_SETS[error_type]
        ok = all(f == EMPTY or f in members for f in (learner, corrected))
        return (learner, corrected) if ok else None
    if EMPTY in (learner, corrected):
        return None
    if error_type is ErrorType.NN:
        return _noun_categories(learner, corrected)
    return _verb_categories(learner, corrected)


def collect_stats(entries, code_map=None):
    """Tally mapped annotations of every annotator into an ErrorCounts."""
    code_map = {k: ErrorType.parse(v) for k, v in (code_map or DEFAULT_CODE_MAP).items()}
    counts = ErrorCounts()
    for entry in entries:
        counts.entries += 1
        for a in entry.annotations:
            error_type = code_map.get(a.code)
            if error_type is None or error_type is ErrorType.DROP:
                counts.unmapped[a.code] += 1
                continue
            learner = entry.span_text(a).lower() or EMPTY
            corrected = a.correction.lower() or EMPTY
            forms = classify_annotation(error_type, learner, corrected)
            if forms is None:
                counts.other[error_type][(learner, corrected)] += 1
            else:
                counts.cells[error_type][forms[0]][forms[1]] += 1
    return counts


@dataclass
class ConfusionMatrixSet:
    """Per-type noise tables: matrices[type][correct_form][erroneous_form] = p."""

    matrices: dict
    site_action_priors: dict
    smoothing: float = 0.0
    metadata: dict = field(default_factory=dict)

    def row(self, error_type, form):
        return self.matrices[ErrorType.parse(error_type)][form]

    def validate(self):
        for error_type, table in self.matrices.items():
            support = set(CONFUSION_SETS[error_type])
            for form, row in table.items():
                if form not in support:
                    raise DataError(f"{error_type.value}: row {form!r} outside confusion set")
                bad = set(row) - support
                if bad:
                    raise DataError(f"{error_type.value}: row {form!r} has columns {sorted(bad)} outside confusion set")
                total = math.fsum(row.values())
                if abs(total - 1.0) > ROW_TOLERANCE:
                    raise DataError(f"{error_type.value}: row {form!r} sums to {total!r}")
                if any(p < 0 for p in row.values()):
                    raise DataError(f"{error_type.value}: row {form!r} has a negative probability")
        return self

    def to_json(self):
        doc = {
            "format_version": FORMAT_VERSION,
            "smoothing": self.smoothing,
            "matrices": {t.value: table for t, table in self.matrices.items()},
            "site_action_priors": {t.value: p for t, p in self.site_action_priors.items()},
            "metadata": self.metadata,
        }
        return json.dumps(doc, ensure_ascii=False, indent=2, sort_keys=True) + "\n"

    @classmethod
    def from_json(cls, text):
        doc = json.loads(text)
        version = doc.get("format_version")
        if version != FORMAT_VERSION:
            raise DataError(f"unsupported matrix format_version {version!r}")
        matrices = {ErrorType.parse(t): table for t, table in doc["matrices"].items()}
        priors = {ErrorType.parse(t): p for t, p in doc.get("site_action_priors", {}).items()}
        return cls(matrices, priors, doc.get("smoothing", 0.0), doc.get("metadata", {})).validate()

    def save(self, path):
        with open(path, "w", encoding="utf-8") as f:
            f.write(self.to_json())

    @classmethod
    def load(cls, path):
        with open(path, encoding="utf-8") as f:
            return cls.from_json(f.read())


def _site_actions(error_type, cells):
    if error_type in (ErrorType.NN, ErrorType.SVA):
        return {"delete": 0.0, "substitute": 1.0, "insert": 0.0}, False
    tally = Counter()
    for learner, row in cells.items():
        for corrected, n in row.items():
            if learner == corrected:
                continue
            if corrected == EMPTY:
                tally["insert"] += n  # learner wrote a word that should not be there
            elif learner == EMPTY:
                tally["delete"] += n
            else:
                tally["substitute"] += n
    total = sum(tally.values())
    if total == 0:
        return {k: 1.0 / len(SITE_ACTIONS) for k in SITE_ACTIONS}, True
    return {k: tally[k] / total for k in SITE_ACTIONS}, False


def build_confusion_matrices(counts, smoothing=0.0):
    """Normalise raw counts into noise-direction matrices.

    Row `f` holds how often learners wrote each other form where `f` was
    correct, plus `smoothing` per cell.  Identity outcomes are left out.
    Rows with no mass become uniform over the non-identity forms.
    """
    if smoothing < 0:
        raise ValueError("smoothing must be >= 0")
    matrices, priors = {}, {}
    uniform_rows = []
    for error_type in MATRIX_TYPES:
        cells = counts.cells[error_type]
        table = {}
        for correct in CONFUSION_SETS[error_type]:
            targets = replacement_forms(error_type, correct)
            mass = {e: cells.get(e, {}).get(correct, 0) + smoothing for e in targets}
            total = math.fsum(mass.values())
            if total == 0:
                uniform_rows.append(f"{error_type.value}:{correct}")
                table[correct] = {e: 1.0 / len(targets) for e in targets}
            else:
                table[correct] = {e: m / total for e, m in mass.items()}
        matrices[error_type] = table
        priors[error_type], uniform = _site_actions(error_type, cells)
        if uniform:
            uniform_rows.append(f"{error_type.value}:site_actions")
    metadata = {
        "entries": counts.entries,
        "mapped_annotations": counts.total_cells() + counts.total_other(),
        "other_annotations": counts.total_other(),
        "unmapped_codes": dict(sorted(counts.unmapped.items())),
        "uniform_rows": uniform_rows,
        "all_uniform": counts.total_cells() == 0,
        "site_action_priors_note": (
            "estimated from non-identity annotation counts; informational, "
            "sites are drawn uniformly during injection"),
        "counts": counts.to_dict(),
    }
    return ConfusionMatrixSet(matrices, priors, smoothing, metadata).validate()


def learn_from_m2(lines, code_map=None, smoothing=0.0):
    return build_confusion_matrices(collect_stats(parse_m2(lines), code_map), smoothing)
