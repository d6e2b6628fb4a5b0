"""Independent reference implementations the fast code is tested against.

Everything here is deliberately written the slow, obvious way — regex
tokenization, dict-scan phrase matching, arbitrary-precision arithmetic —
and shares no code with the package under test beyond the stdlib.
"""

from __future__ import annotations

import random
import re

# Word tokens are maximal \w runs glued across interior apostrophes;
# everything else that is not whitespace is a single-character token.
REF_TOKEN_RE = re.compile(r"\w+(?:['’]\w+)*|[^\w\s]")


def ref_fold_char(ch: str) -> str:
    if ch == "’":
        return "'"
    low = ch.lower()
    return low if len(low) == 1 else ch


def ref_fold(text: str) -> str:
    return "".join(ref_fold_char(c) for c in text)


def ref_tokenize(text: str) -> list[tuple[str, int, int]]:
    """(surface, char start, char end) for every token."""
    return [(m.group(), m.start(), m.end()) for m in REF_TOKEN_RE.finditer(text)]


def phrase_key(phrase: str) -> tuple[str, ...]:
    return tuple(ref_fold(tok) for tok, _, _ in ref_tokenize(phrase))


def build_phrase_table(entries) -> dict[tuple[str, ...], tuple[object, str]]:
    """folded token tuple -> (category, canonical phrase string)."""
    table = {}
    for phrase, category in entries:
        table[phrase_key(phrase)] = (category, phrase)
    return table


def oracle_match(text: str, entries):
    """Leftmost-longest matches of ``entries`` in ``text``.

    Returns (token start, token end, char start, char end, category,
    canonical phrase) tuples, non-overlapping, in order.
    """
    table = build_phrase_table(entries)
    if not table:
        return []
    max_len = max(len(k) for k in table)
    toks = ref_tokenize(text)
    folded = [ref_fold(t) for t, _, _ in toks]
    out = []
    i = 0
    while i < len(toks):
        hit = None
        for length in range(min(max_len, len(toks) - i), 0, -1):
            key = tuple(folded[i : i + length])
            if key in table:
                hit = (length,) + table[key]
                break
        if hit is None:
            i += 1
            continue
        length, category, phrase = hit
        out.append(
            (i, i + length, toks[i][1], toks[i + length - 1][2], category, phrase)
        )
        i += length
    return out


# --- fuzz text generation -------------------------------------------------

_PLAIN_WORDS = (
    "river stone window music garden travel weather report signal evening "
    "market bridge animal forest pattern sequence deband thush bothered "
    "sand brand orchid butterfly noric realso handout notion evenly "
    "hencely threat euros butler yetis furthermore2 nexus alsoran"
).split()

_UNICODE_WORDS = ("café", "naïve", "Zürich", "日本語", "résumé", "пример")

_APOSTROPHE_WORDS = ("isn't", "can’t", "won't", "doesn’t", "o'clock", "rock'n'roll")

_PUNCT = list(".,;:!?()\"-—…»«")


def _mangle_case(rng: random.Random, text: str) -> str:
    out = []
    for ch in text:
        if "a" <= ch <= "z" and rng.random() < 0.4:
            out.append(ch.upper())
        elif "A" <= ch <= "Z" and rng.random() < 0.4:
            out.append(ch.lower())
        else:
            out.append(ch)
    return "".join(out)


def fuzz_text(rng: random.Random, phrases: list[str]) -> str:
    """One random text mixing lexicon phrases, near-miss words, unicode,
    apostrophes and punctuation with irregular spacing."""
    pieces = []
    for _ in range(rng.randint(3, 40)):
        roll = rng.random()
        if roll < 0.35:
            pieces.append(_mangle_case(rng, rng.choice(phrases)))
        elif roll < 0.60:
            pieces.append(rng.choice(_PLAIN_WORDS))
        elif roll < 0.70:
            pieces.append(rng.choice(_APOSTROPHE_WORDS))
        elif roll < 0.78:
            pieces.append(rng.choice(_UNICODE_WORDS))
        elif roll < 0.90:
            pieces.append(rng.choice(_PUNCT))
        elif roll < 0.95:
            pieces.append(str(rng.randint(0, 99999)))
        else:
            # phrase glued to junk: must NOT match (boundary safety)
            pieces.append(rng.choice(phrases).replace(" ", "") + "x")
    out = []
    for piece in pieces:
        if out:
            out.append(rng.choice((" ", " ", " ", "  ", "\n", "\t", "")))
        out.append(piece)
    return "".join(out)


def fuzz_corpus(n: int, phrases: list[str], seed: int = 20260822) -> list[str]:
    rng = random.Random(seed)
    return [fuzz_text(rng, phrases) for _ in range(n)]


# --- loss oracle ----------------------------------------------------------

def mp_cross_entropy(logits, gold: int, dps: int = 60) -> float:
    """Arbitrary-precision −log softmax(logits)[gold] via mpmath."""
    import mpmath as mp

    with mp.workdps(dps):
        zs = [mp.mpf(repr(float(v))) for v in logits]
        total = mp.fsum(mp.e ** z for z in zs)
        return float(mp.log(total) - zs[gold])


def mp_lcp_loss(samples, reduction: str = "paper-sum", dps: int = 60) -> float:
    """samples: list of (logit rows, gold codes)."""
    import mpmath as mp

    with mp.workdps(dps):
        per = []
        for rows, golds in samples:
            if len(rows) == 0:
                per.append(mp.mpf(0))
                continue
            ces = [
                mp.log(mp.fsum(mp.e ** mp.mpf(repr(float(v))) for v in row))
                - mp.mpf(repr(float(row[g])))
                for row, g in zip(rows, golds)
            ]
            per.append(mp.fsum(ces) / len(rows))
        total = mp.fsum(per)
        if reduction == "batch-mean":
            total /= len(samples)
        return float(total)
