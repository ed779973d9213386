"""Independent reference computations used to check the library.

Nothing here imports gramnoise: each oracle recomputes its quantity from
first principles with the most literal algorithm available.
"""

import math


def all_ngrams(tokens, n):
    """Every n-gram occurrence, as a plain list of tuples."""
    return [tuple(tokens[i:i + n]) for i in range(len(tokens) - n + 1)]


def occurrences(gram, grams):
    return sum(1 for g in grams if g == gram)


def brute_force_bleu(hyps, refsets, max_n=4):
    """Corpus BLEU by exhaustive enumeration over whitespace tokens.

    For every distinct hypothesis n-gram, count its occurrences by scanning
    and clip by the largest count seen in any one reference.
    """
    matches = [0] * max_n
    totals = [0] * max_n
    hyp_len = ref_len = 0
    for hyp, refs in zip(hyps, refsets):
        h = hyp.split()
        rs = [r.split() for r in refs]
        hyp_len += len(h)
        best = None
        for r in rs:
            d = abs(len(r) - len(h))
            if best is None or d < best[0] or (d == best[0] and len(r) < best[1]):
                best = (d, len(r))
        ref_len += best[1]
        for n in range(1, max_n + 1):
            hg = all_ngrams(h, n)
            totals[n - 1] += len(hg)
            for gram in set(hg):
                clip = max(occurrences(gram, all_ngrams(r, n)) for r in rs)
                matches[n - 1] += min(occurrences(gram, hg), clip)
    precisions = [m / t if t else 0.0 for m, t in zip(matches, totals)]
    if any(p == 0 for p in precisions):
        return 0.0, precisions
    bp = 1.0 if hyp_len >= ref_len else math.exp(1 - ref_len / hyp_len)
    log_mean = sum(math.log(p) for p in precisions) / max_n
    return 100 * bp * math.exp(log_mean), precisions


def levenshtein(a, b):
    """Classic dynamic-programming edit distance over two sequences."""
    prev = list(range(len(b) + 1))
    for i, x in enumerate(a, 1):
        cur = [i]
        for j, y in enumerate(b, 1):
            cur.append(min(prev[j] + 1, cur[j - 1] + 1, prev[j - 1] + (x != y)))
        prev = cur
    return prev[-1]


def token_distance_ignoring_case(a, b):
    """Token edit distance where a pure re-casing of a word is not an edit.

    Inserting or deleting a sentence-initial word re-cases its neighbour, which
    is a rendering repair and not a second error.
    """
    return levenshtein([t.lower() for t in a], [t.lower() for t in b])


def binomial_bounds(n, p, sigmas=3):
    mean = n * p
    sd = math.sqrt(n * p * (1 - p))
    return mean - sigmas * sd, mean + sigmas * sd


def one_edit_apart(a, b):
    """True iff sequences a and b differ by exactly one insert, delete or substitute.

    Strip the longest common prefix and suffix; what is left must be one
    element on at most one side, or one element on each side.
    """
    if a == b or abs(len(a) - len(b)) > 1:
        return False
    p = 0
    while p < min(len(a), len(b)) and a[p] == b[p]:
        p += 1
    s = 0
    while s < min(len(a), len(b)) - p and a[len(a) - 1 - s] == b[len(b) - 1 - s]:
        s += 1
    return len(a) - p - s <= 1 and len(b) - p - s <= 1


def multinomial_bounds(n, probs, sigmas=3):
    """Per-outcome 3-sigma bounds: each count is Binomial(n, p) marginally."""
    return {k: binomial_bounds(n, p, sigmas) for k, p in probs.items()}
