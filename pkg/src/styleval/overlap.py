"""Word-overlap metrics: ROUGE-1/2/L, BLEU, SARI, METEOR.

All metrics operate on lowercase word tokens (punctuation and numbers
excluded) so case changes and punctuation style are not double-counted
against meaning preservation.
"""

from __future__ import annotations

import math
from collections import Counter
from functools import lru_cache

from .errors import NoReferences
from .textproc import Document, ngrams, stem

# candidates/references at or below this length get the provably optimal
# METEOR alignment; longer texts fall back to a deterministic greedy pass
METEOR_EXACT_LIMIT = 12

METEOR_ALPHA = 0.9
METEOR_GAMMA = 0.5
METEOR_BETA = 3.0


def _words(doc: Document) -> list[str]:
    return doc.word_surfaces()


# --- ROUGE -------------------------------------------------------------------

def rouge_n(candidate: Document, reference: Document, n: int) -> float:
    """F1 over clipped n-gram matches; 0 when either side has no n-grams."""
    cand = ngrams(_words(candidate), n)
    ref = ngrams(_words(reference), n)
    total_cand = sum(cand.values())
    total_ref = sum(ref.values())
    if total_cand == 0 or total_ref == 0:
        return 0.0
    overlap = sum((cand & ref).values())
    precision = overlap / total_cand
    recall = overlap / total_ref
    if precision + recall == 0.0:
        return 0.0
    return 2.0 * precision * recall / (precision + recall)


def _lcs_length(a: list[str], b: list[str]) -> int:
    if not a or not b:
        return 0
    prev = [0] * (len(b) + 1)
    for x in a:
        cur = [0]
        for j, y in enumerate(b, start=1):
            if x == y:
                cur.append(prev[j - 1] + 1)
            else:
                cur.append(max(prev[j], cur[-1]))
        prev = cur
    return prev[-1]


def rouge_l(candidate: Document, reference: Document) -> float:
    """F1 from longest-common-subsequence length over words."""
    cand = _words(candidate)
    ref = _words(reference)
    if not cand or not ref:
        return 0.0
    lcs = _lcs_length(cand, ref)
    if lcs == 0:
        return 0.0
    precision = lcs / len(cand)
    recall = lcs / len(ref)
    return 2.0 * precision * recall / (precision + recall)


def overlap_rouge(output: Document, target: Document) -> tuple[float, float, float]:
    """(ROUGE-1, ROUGE-2, ROUGE-L) with the target as reference."""
    return (
        rouge_n(output, target, 1),
        rouge_n(output, target, 2),
        rouge_l(output, target),
    )


# --- BLEU --------------------------------------------------------------------

def bleu(candidate: Document, references: list[Document]) -> float:
    """BLEU-4 with add-1 smoothing on zero higher-order counts.

    Brevity penalty uses the reference length closest to the candidate
    (smaller length wins ties). An empty candidate scores 0.
    """
    if not references:
        raise NoReferences("bleu needs at least one reference")
    cand = _words(candidate)
    refs = [_words(r) for r in references]
    c = len(cand)
    if c == 0:
        return 0.0

    log_sum = 0.0
    for n in range(1, 5):
        cand_counts = ngrams(cand, n)
        total = sum(cand_counts.values())
        clipped = Counter()
        for ref in refs:
            ref_counts = ngrams(ref, n)
            for gram in cand_counts:
                clipped[gram] = max(clipped[gram], min(cand_counts[gram], ref_counts[gram]))
        matched = sum(clipped.values())
        if n == 1:
            if matched == 0:
                return 0.0
            precision = matched / total
        else:
            if matched == 0:
                precision = (matched + 1) / (total + 1)
            else:
                precision = matched / total
        log_sum += 0.25 * math.log(precision)

    r = min((abs(len(ref) - c), len(ref)) for ref in refs)[1]
    brevity = 1.0 if c >= r else math.exp(1.0 - r / c)
    return brevity * math.exp(log_sum)


# --- SARI --------------------------------------------------------------------

def _ratio(numerator: float, denominator: float) -> float:
    return 1.0 if denominator == 0 else numerator / denominator


def _f1(p: float, r: float) -> float:
    if p + r == 0.0:
        return 0.0
    return 2.0 * p * r / (p + r)


def _sari_order(input_counts: Counter, cand_counts: Counter,
                ref_counts: list[Counter]) -> tuple[float, float, float]:
    """(F_keep, P_del, F_add) for one n-gram order."""
    num_refs = len(ref_counts)
    grams = set(input_counts) | set(cand_counts)
    for rc in ref_counts:
        grams |= set(rc)
    r_avg = {g: sum(rc[g] for rc in ref_counts) / num_refs for g in grams}

    keep_num = keep_cand = keep_ref = 0.0
    del_num = del_cand = 0.0
    for g in grams:
        i, cnd = input_counts[g], cand_counts[g]
        kept = min(i, cnd)
        should_keep = min(i, r_avg[g])
        keep_num += min(kept, should_keep)
        keep_cand += kept
        keep_ref += should_keep
        deleted = max(i - cnd, 0)
        should_delete = max(i - r_avg[g], 0.0)
        del_num += min(deleted, should_delete)
        del_cand += deleted
    f_keep = _f1(_ratio(keep_num, keep_cand), _ratio(keep_num, keep_ref))
    if keep_cand == 0 and keep_ref == 0:
        f_keep = 1.0
    p_del = _ratio(del_num, del_cand)

    added = set(cand_counts) - set(input_counts)
    should_add = {g for rc in ref_counts for g in rc} - set(input_counts)
    good = len(added & should_add)
    p_add = _ratio(good, len(added))
    r_add = _ratio(good, len(should_add))
    f_add = _f1(p_add, r_add)
    if not added and not should_add:
        f_add = 1.0
    return f_keep, p_del, f_add


def sari(input_doc: Document, candidate: Document, references: list[Document]) -> float:
    """Mean of F_keep, P_del, F_add averaged over n-gram orders 1..4.

    Reference counts are averaged over the reference list; components with
    nothing to measure on either side score 1 by convention.
    """
    if not references:
        raise NoReferences("sari needs at least one reference")
    inp = _words(input_doc)
    cand = _words(candidate)
    refs = [_words(r) for r in references]
    total = 0.0
    for n in range(1, 5):
        f_keep, p_del, f_add = _sari_order(
            ngrams(inp, n), ngrams(cand, n), [ngrams(r, n) for r in refs]
        )
        total += (f_keep + p_del + f_add) / 3.0
    return total / 4.0


# --- METEOR ------------------------------------------------------------------

@lru_cache(maxsize=65536)
def _stem_cached(word: str) -> str:
    return stem(word)


def _pair_kind(cand_word: str, ref_word: str, cand_stem: str, ref_stem: str) -> int:
    """2 = exact match, 1 = stem match, 0 = no match."""
    if cand_word == ref_word:
        return 2
    if cand_stem == ref_stem:
        return 1
    return 0


def _align_exact(cand: list[str], ref: list[str]) -> tuple[int, int]:
    """Optimal (matches, chunks) by lexicographic search over alignments.

    Maximizes total matches, then exact (surface) matches, then minimizes
    chunks. Exponential-state memoized search; callers bound input length.
    """
    cand_stems = [_stem_cached(w) for w in cand]
    ref_stems = [_stem_cached(w) for w in ref]
    kinds = [
        [_pair_kind(cw, rw, cs, rs) for rw, rs in zip(ref, ref_stems)]
        for cw, cs in zip(cand, cand_stems)
    ]
    n_ref = len(ref)
    memo: dict[tuple[int, int, int], tuple[int, int, int]] = {}

    def best(i: int, used: int, prev: int) -> tuple[int, int, int]:
        # prev = 1 + ref index matched at candidate position i-1, else 0
        if i == len(cand):
            return (0, 0, 0)
        key = (i, used, prev)
        if key in memo:
            return memo[key]
        # skip candidate word i
        total, exact, neg_chunks = best(i + 1, used, 0)
        result = (total, exact, neg_chunks)
        for j in range(n_ref):
            if used & (1 << j):
                continue
            kind = kinds[i][j]
            if kind == 0:
                continue
            sub = best(i + 1, used | (1 << j), j + 1)
            # continues a chunk only when candidate i-1 matched ref j-1
            new_chunk = 0 if (prev != 0 and prev == j) else 1
            candidate_result = (
                sub[0] + 1,
                sub[1] + (1 if kind == 2 else 0),
                sub[2] - new_chunk,
            )
            if candidate_result > result:
                result = candidate_result
        memo[key] = result
        return result

    total, _, neg_chunks = best(0, 0, 0)
    return total, -neg_chunks


def _align_greedy(cand: list[str], ref: list[str]) -> tuple[int, int]:
    """Deterministic two-stage alignment for long inputs.

    Matches exact surfaces first, then stems, assigning occurrences left
    to right; chunks counted on the resulting pair set.
    """
    pairs: list[tuple[int, int]] = []
    used_ref = [False] * len(ref)
    used_cand = [False] * len(cand)
    for stage in (2, 1):
        if stage == 2:
            key_c = cand
            key_r = ref
        else:
            key_c = [_stem_cached(w) for w in cand]
            key_r = [_stem_cached(w) for w in ref]
        positions: dict[str, list[int]] = {}
        for j in range(len(ref) - 1, -1, -1):
            if not used_ref[j]:
                positions.setdefault(key_r[j], []).append(j)
        for i in range(len(cand)):
            if used_cand[i]:
                continue
            stack = positions.get(key_c[i])
            if stack:
                j = stack.pop()
                pairs.append((i, j))
                used_cand[i] = True
                used_ref[j] = True
    pairs.sort()
    chunks = 0
    prev = None
    for i, j in pairs:
        if prev is None or prev != (i - 1, j - 1):
            chunks += 1
        prev = (i, j)
    return len(pairs), chunks


def meteor(candidate: Document, reference: Document) -> float:
    """METEOR with exact and Porter-stem match stages.

    score = F_mean * (1 - penalty); F_mean weights precision over recall
    with alpha = 0.9; penalty = gamma * (chunks / matches) ** beta.
    """
    cand = _words(candidate)
    ref = _words(reference)
    if not cand or not ref:
        return 0.0
    if len(cand) <= METEOR_EXACT_LIMIT and len(ref) <= METEOR_EXACT_LIMIT:
        matches, chunks = _align_exact(cand, ref)
    else:
        matches, chunks = _align_greedy(cand, ref)
    if matches == 0:
        return 0.0
    precision = matches / len(cand)
    recall = matches / len(ref)
    f_mean = (precision * recall) / (
        METEOR_ALPHA * precision + (1.0 - METEOR_ALPHA) * recall
    )
    penalty = METEOR_GAMMA * (chunks / matches) ** METEOR_BETA
    return f_mean * (1.0 - penalty)
