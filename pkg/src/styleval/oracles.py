"""Independent reference implementations for cross-checking metrics.

Everything here is written from the metric definitions with different
code structure than the production implementations: plain dict loops,
full DP tables, and exhaustive enumeration instead of the optimized
paths. The bundled fixture generator freezes oracle outputs so the test
suite can compare the production code against them.
"""

from __future__ import annotations

import itertools
import math

from .rng import SplitMix64

# --- tokenizer oracle --------------------------------------------------------

def oracle_tokenize(raw: str) -> list[tuple[str, str]]:
    """Character-walk tokenizer; returns (surface, kind) pairs."""
    out: list[tuple[str, str]] = []
    i = 0
    n = len(raw)

    def is_letter(c: str) -> bool:
        return c.isalpha()

    while i < n:
        c = raw[i]
        if c.isspace():
            i += 1
            continue
        if is_letter(c):
            j = i + 1
            while j < n:
                if is_letter(raw[j]):
                    j += 1
                elif raw[j] in "'’-" and j + 1 < n and is_letter(raw[j + 1]):
                    j += 2
                else:
                    break
            out.append((raw[i:j], "word"))
            i = j
        elif c.isdigit():
            j = i + 1
            while j < n:
                if raw[j].isdigit():
                    j += 1
                elif raw[j] in ".," and j + 1 < n and raw[j + 1].isdigit():
                    j += 2
                else:
                    break
            out.append((raw[i:j], "number"))
            i = j
        else:
            import unicodedata
            kind = "punctuation" if unicodedata.category(c).startswith("P") else "symbol"
            out.append((c, kind))
            i += 1
    return out


# --- Porter stemmer oracle ---------------------------------------------------
#
# Table-driven rewrite of the algorithm using a CV-form string for the
# measure computation instead of the production per-character scan.

def _cv_form(word: str) -> str:
    form = []
    for i, ch in enumerate(word):
        if ch in "aeiou":
            form.append("V")
        elif ch == "y":
            form.append("V" if i > 0 and form[i - 1] == "C" else "C")
        else:
            form.append("C")
    return "".join(form)


def _m(stem_part: str) -> int:
    return _cv_form(stem_part).count("VC") if stem_part else 0


def _contains_vowel(s: str) -> bool:
    return "V" in _cv_form(s)


def _double_cons(s: str) -> bool:
    return len(s) >= 2 and s[-1] == s[-2] and _cv_form(s)[-1] == "C"


def _cvc(s: str) -> bool:
    return len(s) >= 3 and _cv_form(s)[-3:] == "CVC" and s[-1] not in "wxy"


def oracle_stem(word: str) -> str:
    if len(word) <= 2:
        return word
    w = word

    for suffix, keep in (("sses", 2), ("ies", 1), ("ss", 2), ("s", 0)):
        if w.endswith(suffix):
            w = w[: len(w) - len(suffix) + keep]
            break

    if w.endswith("eed"):
        if _m(w[:-3]) > 0:
            w = w[:-1]
    else:
        stripped = None
        if w.endswith("ed") and _contains_vowel(w[:-2]):
            stripped = w[:-2]
        elif w.endswith("ing") and _contains_vowel(w[:-3]):
            stripped = w[:-3]
        if stripped is not None:
            w = stripped
            if w[-2:] in ("at", "bl", "iz"):
                w += "e"
            elif _double_cons(w) and w[-1] not in "lsz":
                w = w[:-1]
            elif _m(w) == 1 and _cvc(w):
                w += "e"

    if w.endswith("y") and _contains_vowel(w[:-1]):
        w = w[:-1] + "i"

    for table in (
        (("ational", "ate"), ("tional", "tion"), ("enci", "ence"),
         ("anci", "ance"), ("izer", "ize"), ("abli", "able"), ("alli", "al"),
         ("entli", "ent"), ("eli", "e"), ("ousli", "ous"), ("ization", "ize"),
         ("ation", "ate"), ("ator", "ate"), ("alism", "al"),
         ("iveness", "ive"), ("fulness", "ful"), ("ousness", "ous"),
         ("aliti", "al"), ("iviti", "ive"), ("biliti", "ble")),
        (("icate", "ic"), ("ative", ""), ("alize", "al"), ("iciti", "ic"),
         ("ical", "ic"), ("ful", ""), ("ness", "")),
    ):
        for suffix, repl in table:
            if w.endswith(suffix):
                if _m(w[: len(w) - len(suffix)]) > 0:
                    w = w[: len(w) - len(suffix)] + repl
                break

    for suffix in ("al", "ance", "ence", "er", "ic", "able", "ible", "ant",
                   "ement", "ment", "ent", "ion", "ou", "ism", "ate", "iti",
                   "ous", "ive", "ize"):
        if w.endswith(suffix):
            root = w[: len(w) - len(suffix)]
            if suffix == "ion" and not (root.endswith("s") or root.endswith("t")):
                continue
            if _m(root) > 1:
                w = root
            break

    if w.endswith("e"):
        root = w[:-1]
        if _m(root) > 1 or (_m(root) == 1 and not _cvc(root)):
            w = root
    if _m(w) > 1 and _double_cons(w) and w.endswith("l"):
        w = w[:-1]
    return w


# --- n-gram helpers ----------------------------------------------------------

def _gram_counts(words: list[str], n: int) -> dict[tuple[str, ...], int]:
    counts: dict[tuple[str, ...], int] = {}
    for i in range(len(words) - n + 1):
        gram = tuple(words[i : i + n])
        counts[gram] = counts.get(gram, 0) + 1
    return counts


# --- metric oracles ----------------------------------------------------------

def oracle_rouge_n(cand: list[str], ref: list[str], n: int) -> float:
    cand_counts = _gram_counts(cand, n)
    ref_counts = _gram_counts(ref, n)
    total_c = sum(cand_counts.values())
    total_r = sum(ref_counts.values())
    if total_c == 0 or total_r == 0:
        return 0.0
    remaining = dict(ref_counts)
    hits = 0
    for gram, count in cand_counts.items():
        available = remaining.get(gram, 0)
        hits += min(count, available)
    if hits == 0:
        return 0.0
    p = hits / total_c
    r = hits / total_r
    return 2 * p * r / (p + r)


def oracle_rouge_l(cand: list[str], ref: list[str]) -> float:
    if not cand or not ref:
        return 0.0
    table = [[0] * (len(ref) + 1) for _ in range(len(cand) + 1)]
    for i in range(1, len(cand) + 1):
        for j in range(1, len(ref) + 1):
            if cand[i - 1] == ref[j - 1]:
                table[i][j] = table[i - 1][j - 1] + 1
            else:
                table[i][j] = max(table[i - 1][j], table[i][j - 1])
    lcs = table[-1][-1]
    if lcs == 0:
        return 0.0
    p = lcs / len(cand)
    r = lcs / len(ref)
    return 2 * p * r / (p + r)


def oracle_bleu(cand: list[str], refs: list[list[str]]) -> float:
    if len(cand) == 0:
        return 0.0
    precisions = []
    for n in range(1, 5):
        cand_counts = _gram_counts(cand, n)
        total = sum(cand_counts.values())
        matched = 0
        for gram, count in cand_counts.items():
            best = 0
            for ref in refs:
                best = max(best, _gram_counts(ref, n).get(gram, 0))
            matched += min(count, best)
        if n == 1:
            if matched == 0:
                return 0.0
            precisions.append(matched / total)
        else:
            if matched == 0:
                precisions.append((matched + 1) / (total + 1))
            else:
                precisions.append(matched / total)
    geo = 1.0
    for p in precisions:
        geo *= p
    geo = geo ** 0.25
    best_r = None
    for ref in refs:
        if best_r is None:
            best_r = len(ref)
        else:
            da, db = abs(len(ref) - len(cand)), abs(best_r - len(cand))
            if da < db or (da == db and len(ref) < best_r):
                best_r = len(ref)
    bp = 1.0 if len(cand) >= best_r else math.exp(1 - best_r / len(cand))
    return bp * geo


def oracle_sari(inp: list[str], cand: list[str], refs: list[list[str]]) -> float:
    total = 0.0
    for n in range(1, 5):
        i_counts = _gram_counts(inp, n)
        c_counts = _gram_counts(cand, n)
        r_counts = [_gram_counts(r, n) for r in refs]
        grams: set[tuple[str, ...]] = set(i_counts) | set(c_counts)
        for rc in r_counts:
            grams |= set(rc)

        keep_hit = keep_in_cand = keep_in_ref = 0.0
        del_hit = del_in_cand = 0.0
        for g in grams:
            gi = i_counts.get(g, 0)
            gc = c_counts.get(g, 0)
            gr = sum(rc.get(g, 0) for rc in r_counts) / len(refs)
            kept = gi if gi < gc else gc
            should = gi if gi < gr else gr
            keep_hit += kept if kept < should else should
            keep_in_cand += kept
            keep_in_ref += should
            dropped = gi - gc if gi > gc else 0
            should_drop = gi - gr if gi > gr else 0.0
            del_hit += dropped if dropped < should_drop else should_drop
            del_in_cand += dropped

        def safe(num: float, den: float) -> float:
            return 1.0 if den == 0 else num / den

        p_keep = safe(keep_hit, keep_in_cand)
        r_keep = safe(keep_hit, keep_in_ref)
        if keep_in_cand == 0 and keep_in_ref == 0:
            f_keep = 1.0
        elif p_keep + r_keep == 0:
            f_keep = 0.0
        else:
            f_keep = 2 * p_keep * r_keep / (p_keep + r_keep)
        p_del = safe(del_hit, del_in_cand)

        new_in_cand = {g for g in c_counts if g not in i_counts}
        new_in_refs = set()
        for rc in r_counts:
            for g in rc:
                if g not in i_counts:
                    new_in_refs.add(g)
        good = len(new_in_cand & new_in_refs)
        p_add = safe(good, len(new_in_cand))
        r_add = safe(good, len(new_in_refs))
        if not new_in_cand and not new_in_refs:
            f_add = 1.0
        elif p_add + r_add == 0:
            f_add = 0.0
        else:
            f_add = 2 * p_add * r_add / (p_add + r_add)

        total += (f_keep + p_del + f_add) / 3
    return total / 4


def oracle_meteor(cand: list[str], ref: list[str]) -> float:
    """Exhaustive search over all alignments; only viable for short inputs."""
    if not cand or not ref:
        return 0.0
    cand_stems = [oracle_stem(w) for w in cand]
    ref_stems = [oracle_stem(w) for w in ref]

    compatible: list[list[int]] = []
    for i in range(len(cand)):
        row = []
        for j in range(len(ref)):
            if cand[i] == ref[j]:
                row.append(2)
            elif cand_stems[i] == ref_stems[j]:
                row.append(1)
            else:
                row.append(0)
        compatible.append(row)

    best = (0, 0, 0)  # (matches, exact, -chunks)
    best_pair_count = 0
    best_chunks = 1

    def walk(i: int, used: frozenset, pairs: tuple[tuple[int, int], ...]):
        nonlocal best, best_pair_count, best_chunks
        if i == len(cand):
            exact = sum(1 for (ci, rj) in pairs if compatible[ci][rj] == 2)
            chunks = 0
            prev = None
            for ci, rj in pairs:
                if prev is None or (ci, rj) != (prev[0] + 1, prev[1] + 1):
                    chunks += 1
                prev = (ci, rj)
            key = (len(pairs), exact, -chunks)
            if key > best:
                best = key
                best_pair_count = len(pairs)
                best_chunks = chunks
            return
        walk(i + 1, used, pairs)
        for j in range(len(ref)):
            if j in used or compatible[i][j] == 0:
                continue
            walk(i + 1, used | {j}, pairs + ((i, j),))

    walk(0, frozenset(), ())
    if best_pair_count == 0:
        return 0.0
    p = best_pair_count / len(cand)
    r = best_pair_count / len(ref)
    f = (p * r) / (0.9 * p + 0.1 * r)
    penalty = 0.5 * (best_chunks / best_pair_count) ** 3
    return f * (1 - penalty)


def oracle_pareto(points: list[tuple[float, float]]) -> list[int]:
    """Indices of non-dominated points (maximizing both coordinates)."""
    keep = []
    for i, (xi, yi) in enumerate(points):
        dominated = False
        for j, (xj, yj) in enumerate(points):
            if j == i:
                continue
            if xj >= xi and yj >= yi and (xj > xi or yj > yi):
                dominated = True
                break
        if not dominated:
            keep.append(i)
    return keep


# --- fixture generation ------------------------------------------------------

FIXTURE_SEED = 20250817
VOCAB = [
    "a", "b", "c", "the", "cat", "cats", "dog", "dogs", "run", "runs",
    "running", "ran", "sat", "sits", "quickly", "happy", "happily", "jump",
    "jumped", "big",
]


def generate_metric_fixture(n_cases: int = 200) -> dict:
    """Randomized small metric cases with oracle-computed expected values."""
    rng = SplitMix64(FIXTURE_SEED)

    def random_words(max_len: int = 8) -> list[str]:
        length = rng.randbelow(max_len + 1)
        return [VOCAB[rng.randbelow(len(VOCAB))] for _ in range(length)]

    cases = []
    for index in range(n_cases):
        inp = random_words()
        cand = random_words()
        n_refs = 1 + rng.randbelow(2)
        refs = [random_words() for _ in range(n_refs)]
        while not refs[0]:
            refs[0] = random_words()
        entry = {
            "id": index,
            "input": inp,
            "candidate": cand,
            "references": refs,
            "expected": {
                "rouge1": oracle_rouge_n(cand, refs[0], 1),
                "rouge2": oracle_rouge_n(cand, refs[0], 2),
                "rougeL": oracle_rouge_l(cand, refs[0]),
                "bleu": oracle_bleu(cand, refs),
                "sari": oracle_sari(inp, cand, refs),
                "meteor": oracle_meteor(cand, refs[0]),
            },
        }
        cases.append(entry)

    pinned = [
        {
            "id": "bleu-cat-sat",
            "input": [],
            "candidate": ["the", "cat", "sat"],
            "references": [["the", "cat", "sat", "down"]],
            "expected": {
                "bleu": oracle_bleu(["the", "cat", "sat"], [["the", "cat", "sat", "down"]]),
            },
        },
        {
            "id": "meteor-stem-pair",
            "input": [],
            "candidate": ["cats", "run"],
            "references": [["cat", "runs"]],
            "expected": {
                "meteor": oracle_meteor(["cats", "run"], ["cat", "runs"]),
            },
        },
        {
            "id": "sari-one-edit",
            "input": ["the", "cat", "sat"],
            "candidate": ["the", "dog", "sat"],
            "references": [["the", "dog", "sat"]],
            "expected": {
                "sari": oracle_sari(["the", "cat", "sat"], ["the", "dog", "sat"],
                                    [["the", "dog", "sat"]]),
            },
        },
    ]
    return {"seed": FIXTURE_SEED, "cases": cases, "pinned": pinned}
