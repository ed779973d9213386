"""Training mixtures built from a clean corpus and its noised copies.

* ``error``        the noised corpus alone
* ``clean+error``  the clean corpus followed by one noised copy (2N lines)
* ``mix-all``      the clean corpus followed by one copy per error type (6N lines)
"""

import hashlib
import logging
from dataclasses import dataclass, field
from fractions import Fraction

from gramnoise.confusion import ErrorType
from gramnoise.exceptions import AlignmentError, DataError

logger = logging.getLogger(__name__)

CLEAN = "clean"
NOISE_TYPES = (ErrorType.DROP, ErrorType.ART, ErrorType.PREP, ErrorType.NN, ErrorType.SVA)
MIX_ALL_TAGS = (CLEAN,) + tuple(t.value for t in NOISE_TYPES)


@dataclass
class ParallelCorpus:
    source: list
    target: list
    tags: list = None
    # per line: does the source differ from its clean original?
    changed: list = None

    def __post_init__(self):
        self.source = list(self.source)
        self.target = list(self.target)
        if len(self.source) != len(self.target):
            raise AlignmentError(
                f"source has {len(self.source)} lines but target has {len(self.target)}")
        for name in ("tags", "changed"):
            values = getattr(self, name)
            if values is not None:
                values = list(values)
                setattr(self, name, values)
                if len(values) != len(self.source):
                    raise AlignmentError(f"{name} cover {len(values)} of {len(self.source)} lines")

    def __len__(self):
        return len(self.source)

    def changed_count(self):
        return sum(self.changed) if self.changed is not None else 0

    def changed_fraction(self):
        """Exact fraction of lines whose source carries an injected error."""
        if not self.source:
            return Fraction(0)
        return Fraction(self.changed_count(), len(self.source))

    def composition(self):
        counts = {}
        for tag in self.tags or ():
            counts[tag] = counts.get(tag, 0) + 1
        return counts


def mark_changes(clean, noisy, tag=None):
    """The noised copy of `clean`, with per-line change flags filled in."""
    _check_same_target(clean, noisy, "noisy")
    changed = [a != b for a, b in zip(clean.source, noisy.source)]
    tags = [tag] * len(noisy) if tag is not None else noisy.tags
    return ParallelCorpus(noisy.source, noisy.target, tags, changed)


def _check_same_target(clean, other, name):
    if len(clean) != len(other):
        raise AlignmentError(f"{name} corpus has {len(other)} lines, clean has {len(clean)}")
    for i, (a, b) in enumerate(zip(clean.target, other.target)):
        if a != b:
            raise AlignmentError(f"{name} corpus target differs from clean at line {i}")


def build_clean_plus_error(clean, noisy, tag="error"):
    """All clean pairs followed by all noisy pairs."""
    noisy = mark_changes(clean, noisy, tag)
    return ParallelCorpus(
        clean.source + noisy.source,
        clean.target + noisy.target,
        [CLEAN] * len(clean) + noisy.tags,
        [False] * len(clean) + noisy.changed,
    )


def build_mix_all(clean, noisy_by_type):
    """Clean block followed by one block per error type, in canonical type order."""
    by_type = {ErrorType.parse(k): v for k, v in noisy_by_type.items()}
    missing = [t.value for t in NOISE_TYPES if t not in by_type]
    if missing:
        raise DataError(f"mix-all needs every error type; missing: {', '.join(missing)}")
    source, target = list(clean.source), list(clean.target)
    tags, changed = [CLEAN] * len(clean), [False] * len(clean)
    for error_type in NOISE_TYPES:
        block = mark_changes(clean, by_type[error_type], error_type.value)
        source += block.source
        target += block.target
        tags += block.tags
        changed += block.changed
    return ParallelCorpus(source, target, tags, changed)


def filter_by_length(corpus, max_words=80):
    """Drop pairs where either side has more than `max_words` whitespace tokens.

    Returns (filtered corpus, number of removed pairs).
    """
    if max_words <= 0:
        raise ValueError("max_words must be positive")
    keep = [i for i, (s, t) in enumerate(zip(corpus.source, corpus.target))
            if len(s.split()) <= max_words and len(t.split()) <= max_words]
    removed = len(corpus) - len(keep)
    logger.info("length filter (max %d words): kept %d, removed %d", max_words, len(keep), removed)

    def pick(values):
        return [values[i] for i in keep] if values is not None else None

    return ParallelCorpus(pick(corpus.source), pick(corpus.target),
                          pick(corpus.tags), pick(corpus.changed)), removed


def percent(fraction, places=1):
    """Render a Fraction as a percentage rounded half-up."""
    scaled = fraction * 100 * 10**places
    rounded = (scaled.numerator * 2 + scaled.denominator) // (2 * scaled.denominator)
    return rounded / 10**places


def file_digest(path):
    h = hashlib.sha256()
    with open(path, "rb") as f:
        for block in iter(lambda: f.read(1 << 20), b""):
            h.update(block)
    return "sha256:" + h.hexdigest()


def lines_digest(lines):
    h = hashlib.sha256()
    for line in lines:
        h.update(line.encode("utf-8"))
        h.update(b"\n")
    return "sha256:" + h.hexdigest()


@dataclass
class CorpusManifest:
    mode: str
    composition: dict
    seed: int = None
    sources: dict = field(default_factory=dict)  # name -> digest
    changed_lines: int = 0
    total_lines: int = 0
    changed_by_type: dict = field(default_factory=dict)  # tag -> percent of its own block
    removed_by_length: int = 0
    notes: list = field(default_factory=list)
    provenance: list = field(default_factory=list)

    def __post_init__(self):
        if sum(self.composition.values()) != self.total_lines:
            raise DataError("manifest composition does not add up to the total line count")

    @property
    def changed_percent(self):
        return percent(Fraction(self.changed_lines, self.total_lines)) if self.total_lines else 0.0

    def to_dict(self):
        return {
            "mode": self.mode,
            "total_lines": self.total_lines,
            "composition": dict(sorted(self.composition.items())),
            "changed_lines": self.changed_lines,
            "changed_percent": self.changed_percent,
            "changed_percent_by_type": dict(sorted(self.changed_by_type.items())),
            "removed_by_length": self.removed_by_length,
            "seed": self.seed,
            "sources": dict(sorted(self.sources.items())),
            "notes": self.notes,
            "provenance": self.provenance,
        }


MIX_ALL_NOTE = (
    "changed_percent counts every noised line over all 6N lines, so it equals "
    "sum(per-type rates) / 6; no further halving is applied")


def make_manifest(mode, corpus, seed=None, sources=None, removed=0):
    by_type = {}
    if corpus.tags is not None and corpus.changed is not None:
        totals, hits = {}, {}
        for tag, flag in zip(corpus.tags, corpus.changed):
            totals[tag] = totals.get(tag, 0) + 1
            hits[tag] = hits.get(tag, 0) + int(flag)
        by_type = {tag: percent(Fraction(hits[tag], totals[tag])) for tag in totals if tag != CLEAN}
    notes = [MIX_ALL_NOTE] if mode == "mix-all" else []
    composition = corpus.composition() if corpus.tags is not None else {"unlabelled": len(corpus)}
    return CorpusManifest(mode, composition, seed, dict(sources or {}), corpus.changed_count(),
                          len(corpus), by_type, removed, notes)
