"""Indicator ablation: delete chosen indicator categories from text.

The transform finds indicator matches with the *full* lexicon (leftmost-
longest, same rules as corpus construction) and removes the matches whose
category is slated for removal. Deletion mode repairs the wound: an
immediately following comma goes with the phrase, doubled whitespace
collapses, whitespace before closing punctuation is dropped, and a deletion
at sentence start capitalizes the word that now opens the sentence.
Placeholder mode substitutes ``[REMOVED]`` instead and leaves the
surroundings alone.

Deletions can create new adjacencies that themselves form lexicon phrases
("as well" + deletion + "as" …), so the transform re-runs until a pass
deletes nothing. The result object reports per-category deletion counts and
the number of passes taken.
"""

from __future__ import annotations

import re
from collections import Counter
from dataclasses import dataclass, field

import numpy as np

from .errors import LogicorpusError
from .ingest import paragraph_ranges
from .lexicon import LEXICON_CATEGORIES, IndicatorCategory
from .tokenizer import codepoints, fold_codepoints, tokenize_codepoints

PLACEHOLDER = "[REMOVED]"

_MAX_PASSES = 10
_CLOSING_PUNCT = ".,;:!?"
_SENTENCE_END = ".!?"

MODES = ("delete", "placeholder")


class AblationError(LogicorpusError):
    module = "ablate"


@dataclass(frozen=True)
class AblationSpec:
    """Which categories to remove and how."""

    categories: frozenset[IndicatorCategory]
    mode: str = "delete"

    def __post_init__(self) -> None:
        if not self.categories:
            raise AblationError("no categories to remove")
        bad = set(self.categories) - set(LEXICON_CATEGORIES)
        if bad:
            names = ", ".join(sorted(c.name for c in bad))
            raise AblationError(f"{names} is not an ablatable lexicon category")
        if self.mode not in MODES:
            raise AblationError(f"mode must be one of {MODES}, got {self.mode!r}")


def parse_categories(text: str) -> frozenset[IndicatorCategory]:
    """Parse a --remove argument: 'pmi,cli', 'nti', ..., or 'all'."""
    names = [part.strip() for part in text.split(",") if part.strip()]
    if not names:
        raise AblationError("no categories to remove")
    if any(n.lower() == "all" for n in names):
        if len(names) > 1:
            raise AblationError("'all' cannot be combined with other categories")
        return frozenset(LEXICON_CATEGORIES)
    cats = set()
    for name in names:
        try:
            cat = IndicatorCategory[name.upper()]
        except KeyError:
            raise AblationError(f"unknown category {name!r}") from None
        if cat is IndicatorCategory.LUI:
            raise AblationError(
                "LUI is not ablatable: it labels random tokens, not phrases"
            )
        cats.add(cat)
    return frozenset(cats)


@dataclass
class AblationResult:
    text: str
    deleted: Counter = field(default_factory=Counter)  # category name -> count
    passes: int = 0


def _doc_matches(text: str, matcher):
    """(char_start, char_end, category) for all matches, paragraph-scoped,
    with offsets into the full document."""
    cp = codepoints(text)
    folded = fold_codepoints(cp)
    g_starts, g_ends = tokenize_codepoints(cp, backend=matcher.backend)
    ids = matcher.token_ids(folded, g_starts, g_ends)
    cuts = [0]
    for bs, be in paragraph_ranges(text):
        lo = int(np.searchsorted(g_starts, bs, side="left"))
        hi = int(np.searchsorted(g_starts, be, side="left"))
        if lo > cuts[-1]:
            cuts.append(lo)  # tokens in markup lines: their own segment
        if hi > cuts[-1]:
            cuts.append(hi)
    if g_starts.shape[0] > cuts[-1]:
        cuts.append(g_starts.shape[0])
    bounds = np.array(cuts, dtype=np.int64)
    m_start, m_end, m_cat, _ = matcher.match_ids(ids, bounds)
    return [
        (int(g_starts[s]), int(g_ends[e - 1]), IndicatorCategory(int(c)))
        for s, e, c in zip(m_start.tolist(), m_end.tolist(), m_cat.tolist())
    ]


def _delete_spans(text: str, spans: list[tuple[int, int]]) -> str:
    """Remove spans and repair punctuation, spacing and capitalization."""
    # Pull a directly trailing comma into each deletion.
    extended = []
    for s, e in spans:
        m = re.match(r"[ \t]*,", text[e:])
        if m:
            e += m.end()
        extended.append((s, e))

    out = text[: extended[0][0]]
    for i, (s, e) in enumerate(extended):
        nxt = extended[i + 1][0] if i + 1 < len(extended) else len(text)
        right = text[e:nxt]
        if out[-1:] in ("", " ", "\t", "\n") and right[:1] in (" ", "\t"):
            right = right.lstrip(" \t")
        if right[:1] in _CLOSING_PUNCT:
            out = out.rstrip(" \t")
            # "He left, <deleted>." — the comma is now orphaned too.
            if out.endswith(",") and right[:1] != ",":
                out = out[:-1].rstrip(" \t")
        lead = out.rstrip()
        if not lead or lead[-1] in _SENTENCE_END:
            first = re.search(r"\w", right)
            if first and right[first.start()].isalpha():
                k = first.start()
                right = right[:k] + right[k].upper() + right[k + 1 :]
        out += right
    return out


def _replace_spans(text: str, spans: list[tuple[int, int]]) -> str:
    out = []
    cursor = 0
    for s, e in spans:
        out.append(text[cursor:s])
        out.append(PLACEHOLDER)
        cursor = e
    out.append(text[cursor:])
    return "".join(out)


def ablate_text(text: str, lexicon, spec: AblationSpec) -> AblationResult:
    """Remove every match of the removed categories, to fixpoint."""
    matcher = lexicon.compiled()
    result = AblationResult(text=text)
    for _ in range(_MAX_PASSES):
        hits = [
            (s, e, cat)
            for s, e, cat in _doc_matches(result.text, matcher)
            if cat in spec.categories
        ]
        if not hits:
            break
        result.passes += 1
        for _, _, cat in hits:
            result.deleted[cat.name] += 1
        spans = [(s, e) for s, e, _ in hits]
        if spec.mode == "delete":
            result.text = _delete_spans(result.text, spans)
        else:
            result.text = _replace_spans(result.text, spans)
    else:
        raise AblationError(
            f"ablation did not reach a fixpoint in {_MAX_PASSES} passes"
        )
    return result
