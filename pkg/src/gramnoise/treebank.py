"""Bracketed constituency trees and the error sites they expose.

Trees come one per line in Penn Treebank notation, e.g. the output of the
Berkeley parser:

    ( (S (NP (DT The) (NN cat)) (VP (VBZ sits)) (. .)) )

Leaves keep their escaped spelling (``-LRB-``); `render_tokens` decodes it.
"""

import functools
import re
from dataclasses import dataclass

from gramnoise.confusion import (
    ARTICLES,
    EMPTY,
    NOT_SECOND_SG_PAST,
    NOT_THIRD_SG,
    PL,
    PREPOSITIONS,
    SECOND_SG_PAST,
    SG,
    THIRD_SG,
    ErrorType,
)
from gramnoise.exceptions import TreeParseError
from gramnoise.morphology import can_toggle_verb, is_invariant_noun

PTB_ESCAPES = {
    "-LRB-": "(", "-RRB-": ")",
    "-LSB-": "[", "-RSB-": "]",
    "-LCB-": "{", "-RCB-": "}",
}
_PREP_SET = frozenset(PREPOSITIONS)
_ARTICLE_SET = frozenset(ARTICLES)

# An NP starting with one of these already has a determiner-like word.
_DETERMINED_TAGS = frozenset({"DT", "PDT", "PRP", "PRP$", "WP", "WP$", "WDT", "EX", "POS"})
# ...and one preceded by one of these is inside a determined phrase.
_DETERMINER_BEFORE = frozenset({"DT", "PDT", "PRP$", "WP$", "POS"})

_TOKEN_RE = re.compile(r"\(|\)|[^\s()]+")


def decode_token(token):
    return PTB_ESCAPES.get(token, token)


class ParseTree:
    """An immutable constituency tree node.

    Leaves have no children and carry `token` and `token_index`; every other
    node carries a constituent or POS label.  `start`/`end` give the half-open
    range of leaf indices the node covers.
    """

    __slots__ = ("label", "children", "token", "token_index", "start", "end",
                 "_nodes", "_leaves", "_tagged")

    def __init__(self, label, children=(), token=None, token_index=None, start=0, end=0):
        self.label = label
        self.children = tuple(children)
        self.token = token
        self.token_index = token_index
        self.start = start
        self.end = end
        self._nodes = None
        self._leaves = None
        self._tagged = None

    @property
    def is_leaf(self):
        return not self.children

    def __eq__(self, other):
        if not isinstance(other, ParseTree):
            return NotImplemented
        return (self.label, self.token, self.token_index, self.children) == (
            other.label, other.token, other.token_index, other.children)

    def __hash__(self):
        return hash((self.label, self.token, self.token_index, self.children))

    def __repr__(self):
        return f"ParseTree({render_bracketed(self)!r})"

    def subtrees(self):
        """All nodes in pre-order (computed once; trees are immutable)."""
        if self._nodes is None:
            nodes, stack = [], [self]
            while stack:
                node = stack.pop()
                nodes.append(node)
                stack.extend(reversed(node.children))
            self._nodes = nodes
        return self._nodes

    def leaves(self):
        if self._leaves is None:
            self._leaves = [node for node in self.subtrees() if not node.children]
        return self._leaves

    def tagged_leaves(self):
        """(decoded token, POS tag) pairs in sentence order."""
        if self._tagged is None:
            self._tagged = [(decode_token(node.children[0].token), node.label)
                            for node in self.subtrees()
                            if len(node.children) == 1 and not node.children[0].children]
        return self._tagged


@functools.lru_cache(maxsize=4096)
def _base_label(label):
    # NP-SBJ-1, NP=2 -> NP; leave -NONE- and -LRB- alone
    if label.startswith("-"):
        return label
    return re.split(r"[-=]", label, maxsplit=1)[0]


def parse_ptb(line):
    """Parse one bracketed tree.  Raises TreeParseError with a character offset."""
    if not line or not line.strip():
        raise TreeParseError("empty tree line", 0)
    tokens = _TOKEN_RE.findall(line)
    n_tokens = len(tokens)

    def offset(k):
        # character offsets are only needed for error messages
        if k >= n_tokens:
            return len(line)
        return [m.start() for m in _TOKEN_RE.finditer(line)][k]

    if tokens[0] != "(":
        raise TreeParseError(f"expected '(' but found {tokens[0]!r}", 0)
    # each open constituent is [label, children, first leaf index]
    stack = []
    leaves, tagged = [], []
    leaf_count = 0
    pos = 0
    tree = None
    while pos < n_tokens:
        tok = tokens[pos]
        if tok == "(":
            if tree is not None:
                raise TreeParseError("trailing material after tree", offset(pos))
            pos += 1
            label = ""
            if pos < n_tokens and tokens[pos] != "(" and tokens[pos] != ")":
                label = tokens[pos]
                pos += 1
                # preterminal: "(TAG word)"
                if pos < n_tokens and tokens[pos] != "(" and tokens[pos] != ")":
                    word = tokens[pos]
                    pos += 1
                    if pos < n_tokens and tokens[pos] != ")":
                        raise TreeParseError("a POS tag must dominate exactly one word", offset(pos))
                    if pos >= n_tokens:
                        raise TreeParseError("unexpected end of input, unbalanced brackets", len(line))
                    pos += 1
                    leaf = ParseTree(word, token=word, token_index=leaf_count,
                                     start=leaf_count, end=leaf_count + 1)
                    node = ParseTree(label, (leaf,), start=leaf_count, end=leaf_count + 1)
                    leaves.append(leaf)
                    tagged.append((decode_token(word), label))
                    leaf_count += 1
                    if stack:
                        stack[-1][1].append(node)
                    else:
                        tree = node
                    continue
            stack.append([label, [], leaf_count])
        elif tok == ")":
            if not stack:
                raise TreeParseError("trailing material after tree", offset(pos))
            label, children, first = stack.pop()
            if not children:
                raise TreeParseError(f"constituent {label!r} has no children", offset(pos))
            node = ParseTree(label, children, start=first, end=leaf_count)
            pos += 1
            if stack:
                stack[-1][1].append(node)
            else:
                tree = node
        else:
            if tree is not None:
                raise TreeParseError("trailing material after tree", offset(pos))
            raise TreeParseError(f"unexpected word {tok!r}", offset(pos))
    if stack or tree is None:
        raise TreeParseError("unexpected end of input, unbalanced brackets", len(line))
    tree._leaves = leaves
    tree._tagged = tagged
    return tree


def render_bracketed(tree):
    if tree.is_leaf:
        return tree.token
    inner = " ".join(render_bracketed(child) for child in tree.children)
    return f"({tree.label} {inner})"


def render_tokens(tree):
    return [decode_token(leaf.token) for leaf in tree.leaves()]


def read_trees(lines):
    """Parse an iterable of tree lines, naming the line number on failure."""
    for lineno, line in enumerate(lines, 1):
        try:
            yield parse_ptb(line)
        except TreeParseError as exc:
            raise TreeParseError(f"tree line {lineno}: {exc}") from exc


@dataclass(frozen=True)
class CandidateSite:
    """A position where one error of `error_type` can be introduced.

    `site_kind` is "substitute" for an existing word (the drawn replacement
    may be EMPTY, which turns the edit into a deletion) or "insert" for a
    gap before `token_index`.
    """

    error_type: ErrorType
    site_kind: str
    token_index: int
    current_form: str
    tag: str = ""


def _np_starts(tree):
    starts = set()
    for node in tree.subtrees():
        if node.children and _base_label(node.label) == "NP":
            starts.add(node.start)
    return sorted(starts)


def _article_sites(tagged, np_starts):
    sites = []
    for i, (tok, tag) in enumerate(tagged):
        if tag == "DT" and tok.lower() in _ARTICLE_SET:
            sites.append(CandidateSite(ErrorType.ART, "substitute", i, tok.lower(), tag))
    for s in np_starts:
        tok, tag = tagged[s]
        if tag in _DETERMINED_TAGS or not tok[:1].isalnum():
            continue
        if s > 0 and tagged[s - 1][1] in _DETERMINER_BEFORE:
            continue
        sites.append(CandidateSite(ErrorType.ART, "insert", s, EMPTY, tag))
    return sites


def _preposition_sites(tagged, np_starts):
    sites = []
    for i, (tok, tag) in enumerate(tagged):
        if tag in ("IN", "TO") and tok.lower() in _PREP_SET:
            sites.append(CandidateSite(ErrorType.PREP, "substitute", i, tok.lower(), tag))
    for s in np_starts:
        if s == 0:
            continue
        head_tag = tagged[s - 1][1]
        if head_tag.startswith(("VB", "NN")) and tagged[s][0][:1].isalnum():
            sites.append(CandidateSite(ErrorType.PREP, "insert", s, EMPTY, tagged[s][1]))
    return sites


def _noun_sites(tagged):
    sites = []
    for i, (tok, tag) in enumerate(tagged):
        if tag not in ("NN", "NNS") or not tok.replace("-", "").isalpha():
            continue
        plural = tag == "NNS"
        if is_invariant_noun(tok, plural):
            continue
        sites.append(CandidateSite(ErrorType.NN, "substitute", i, PL if plural else SG, tag))
    return sites


def _verb_sites(tagged):
    sites = []
    for i, (tok, tag) in enumerate(tagged):
        if tag not in ("VBZ", "VBP", "VBD") or not can_toggle_verb(tok, tag):
            continue
        if tag == "VBZ":
            form = THIRD_SG
        elif tag == "VBP":
            form = NOT_THIRD_SG
        else:
            form = SECOND_SG_PAST if tok.lower() == "were" else NOT_SECOND_SG_PAST
        sites.append(CandidateSite(ErrorType.SVA, "substitute", i, form, tag))
    return sites


def candidate_sites(tree, error_type):
    """All positions where an error of `error_type` fits, left to right."""
    error_type = ErrorType.parse(error_type)
    if error_type is ErrorType.DROP:
        return []
    tagged = tree.tagged_leaves()
    if error_type is ErrorType.ART:
        sites = _article_sites(tagged, _np_starts(tree))
    elif error_type is ErrorType.PREP:
        sites = _preposition_sites(tagged, _np_starts(tree))
    elif error_type is ErrorType.NN:
        sites = _noun_sites(tagged)
    else:
        sites = _verb_sites(tagged)
    return sorted(sites, key=lambda s: (s.token_index, s.site_kind != "substitute"))
