"""Indicator categories, the built-in phrase libraries, and lexicon loading.

A lexicon maps lowercase phrases to one of five logical-relation categories:
premise (PMI), conclusion (CLI), negative (NTI), adversative (ATI) and
coordinating (CNI). The sixth category, LUI (logic-unrelated), is reserved for
the masker's random-token channel and never appears in a lexicon.

Lexicon file format: UTF-8 text, one record per line as ``CATEGORY<TAB>phrase``,
``#`` starts a comment, blank lines ignored. ``logicorpus lexicon dump`` emits
the built-in default in exactly this format.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterable

from .errors import LexiconParseError, LexiconValidationError


class IndicatorCategory(enum.IntEnum):
    """Six-way category code. Integer values are stable and part of the output format."""

    PMI = 0  # premise
    CLI = 1  # conclusion
    NTI = 2  # negative
    ATI = 3  # adversative
    CNI = 4  # coordinating
    LUI = 5  # logic-unrelated (masker-only, never matched from a lexicon)


#: Categories a lexicon entry may carry.
LEXICON_CATEGORIES = (
    IndicatorCategory.PMI,
    IndicatorCategory.CLI,
    IndicatorCategory.NTI,
    IndicatorCategory.ATI,
    IndicatorCategory.CNI,
)

_PMI_PHRASES = (
    "given that", "seeing that", "for the reason that", "owing to",
    "as indicated by", "on the grounds that", "on account of", "considering",
    "because of", "due to", "now that", "may be inferred from",
    "by virtue of", "in view of", "for the sake of", "thanks to",
    "as long as", "based on that", "as a result of", "considering that",
    "inasmuch as", "if and only if", "according to", "in that", "only if",
    "because", "depend on", "rely on",
)

_CLI_PHRASES = (
    "conclude that", "entail that", "infer that", "that is why", "therefore",
    "thereby", "wherefore", "accordingly", "hence", "thus", "consequently",
    "whence", "so that", "it follows that", "imply that", "as a result",
    "suggest that", "prove that", "as a conclusion", "conclusively",
    "for this reason", "as a consequence", "on that account", "in conclusion",
    "to that end", "because of this", "that being so", "ergo", "in this way",
    "in this manner", "by such means", "as it turns out", "result in",
    "in order that", "show that", "eventually",
)

_NTI_PHRASES = (
    "not", "neither", "none of", "unable", "few", "little", "hardly",
    "merely", "seldom", "without", "never", "nobody", "nothing", "nowhere",
    "rarely", "scarcely", "barely", "no longer", "isn't", "aren't", "wasn't",
    "weren't", "can't", "cannot", "couldn't", "won't", "wouldn't", "don't",
    "doesn't", "didn't", "haven't", "hasn't",
)

_ATI_PHRASES = (
    "although", "though", "but", "nevertheless", "however", "instead of",
    "nonetheless", "yet", "rather", "whereas", "otherwise", "conversely",
    "on the contrary", "even", "despite", "in spite of", "in contrast",
    "even if", "even though", "unless", "regardless of", "reckless of",
)

_CNI_PHRASES = (
    "and", "or", "nor", "also", "moreover", "in addition",
    "on the other hand", "meanwhile", "further", "afterward", "next",
    "besides", "additionally", "meantime", "furthermore", "as well",
    "simultaneously", "either", "both", "similarly", "likewise",
)

#: Built-in (category, phrase) table.
BUILTIN_ENTRIES: tuple[tuple[IndicatorCategory, str], ...] = tuple(
    (cat, phrase)
    for cat, phrases in (
        (IndicatorCategory.PMI, _PMI_PHRASES),
        (IndicatorCategory.CLI, _CLI_PHRASES),
        (IndicatorCategory.NTI, _NTI_PHRASES),
        (IndicatorCategory.ATI, _ATI_PHRASES),
        (IndicatorCategory.CNI, _CNI_PHRASES),
    )
    for phrase in phrases
)

#: Single-word phrases too frequent to count toward the logical-density filter.
DEFAULT_EXCLUSIONS = frozenset(
    {"and", "or", "also", "both", "even", "further", "next", "either"}
)


def _normalize_phrase(phrase: str) -> str:
    # Curly apostrophes fold to straight ones so matching never depends on
    # typography; internal whitespace collapses to single spaces.
    return " ".join(phrase.replace("’", "'").lower().split())


@dataclass
class IndicatorLexicon:
    """Validated, immutable-after-load phrase table.

    entries hold (phrase, category) with phrases lowercase and
    whitespace-normalized; no phrase appears under two categories.
    """

    entries: tuple[tuple[str, IndicatorCategory], ...]
    exclusions: frozenset[str] = DEFAULT_EXCLUSIONS
    source: str = "builtin"
    _matcher: object = field(default=None, repr=False, compare=False)

    def __post_init__(self) -> None:
        seen: dict[str, IndicatorCategory] = {}
        for phrase, cat in self.entries:
            if not phrase or phrase != phrase.strip():
                raise LexiconValidationError(f"empty or unstripped phrase {phrase!r}")
            if cat not in LEXICON_CATEGORIES:
                raise LexiconValidationError(
                    f"phrase {phrase!r} carries non-lexicon category {cat.name}"
                )
            prev = seen.get(phrase)
            if prev is not None and prev != cat:
                raise LexiconValidationError(
                    f"phrase {phrase!r} listed under both {prev.name} and {cat.name}"
                )
            seen[phrase] = cat

    def __len__(self) -> int:
        return len(self.entries)

    def phrases(self, category: IndicatorCategory | None = None) -> list[str]:
        if category is None:
            return [p for p, _ in self.entries]
        return [p for p, c in self.entries if c == category]

    def category_of(self, phrase: str) -> IndicatorCategory | None:
        norm = _normalize_phrase(phrase)
        for p, c in self.entries:
            if p == norm:
                return c
        return None

    def compiled(self):
        """Compiled matcher for this lexicon (built once, then shared)."""
        if self._matcher is None:
            from .matcher import CompiledMatcher

            self._matcher = CompiledMatcher(self.entries)
        return self._matcher

    def dump(self) -> str:
        """Render in the lexicon file format."""
        lines = [f"# lexicon: {self.source}", "# format: CATEGORY<TAB>phrase"]
        lines += [f"{cat.name}\t{phrase}" for phrase, cat in self.entries]
        return "\n".join(lines) + "\n"


def _dedupe(pairs: Iterable[tuple[IndicatorCategory, str]]) -> tuple[tuple[str, IndicatorCategory], ...]:
    out: list[tuple[str, IndicatorCategory]] = []
    seen: set[tuple[str, IndicatorCategory]] = set()
    for cat, phrase in pairs:
        key = (phrase, cat)
        if key not in seen:
            seen.add(key)
            out.append(key)
    return tuple(out)


def builtin_lexicon(exclusions: Iterable[str] | None = None) -> IndicatorLexicon:
    """The default five-library lexicon."""
    excl = DEFAULT_EXCLUSIONS if exclusions is None else frozenset(
        _normalize_phrase(e) for e in exclusions
    )
    return IndicatorLexicon(entries=_dedupe(BUILTIN_ENTRIES), exclusions=excl, source="builtin")


def load_lexicon(
    source: str | Path,
    exclusions: Iterable[str] | None = None,
) -> IndicatorLexicon:
    """Load a lexicon from a file, or return the built-in one for ``"builtin"``.

    Duplicate (category, phrase) records are deduplicated; the same phrase under
    two categories is a validation error naming the phrase and both categories.
    """
    if isinstance(source, str) and source == "builtin":
        return builtin_lexicon(exclusions)

    path = Path(source)
    pairs: list[tuple[IndicatorCategory, str]] = []
    for lineno, raw in enumerate(path.read_text(encoding="utf-8").splitlines(), start=1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        if "\t" not in line:
            raise LexiconParseError(
                f"{path}:{lineno}: expected CATEGORY<TAB>phrase, got {raw!r}"
            )
        cat_name, phrase = line.split("\t", 1)
        cat_name = cat_name.strip().upper()
        try:
            cat = IndicatorCategory[cat_name]
        except KeyError:
            raise LexiconParseError(
                f"{path}:{lineno}: unknown category {cat_name!r}"
            ) from None
        if cat is IndicatorCategory.LUI:
            raise LexiconValidationError(
                f"{path}:{lineno}: LUI is not a lexicon category (it labels random tokens)"
            )
        phrase = _normalize_phrase(phrase)
        if not phrase:
            raise LexiconParseError(f"{path}:{lineno}: empty phrase")
        pairs.append((cat, phrase))

    return IndicatorLexicon(
        entries=_dedupe(pairs),
        exclusions=(
            DEFAULT_EXCLUSIONS
            if exclusions is None
            else frozenset(_normalize_phrase(e) for e in exclusions)
        ),
        source=str(path),
    )
