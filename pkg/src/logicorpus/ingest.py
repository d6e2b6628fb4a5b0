"""Document ingestion: raw text in, filtered tokenized paragraphs out.

Documents split into paragraphs at runs of blank lines. Lines that are
leftover extraction markup (tag or table residue) are skipped and act as
paragraph boundaries. Each paragraph keeps its exact text slice from the
document, so token character offsets are indices into ``paragraph.text``.

Paragraph identity is a 64-bit blake2b hash of ``source id`` and paragraph
index — a pure function of content location, never of processing order.
"""

from __future__ import annotations

import hashlib
import json
from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterable, Iterator

import numpy as np

from .errors import IngestError
from .tokenizer import codepoints, tokenize_codepoints

# Line prefixes (after leading whitespace) treated as extraction residue
# rather than prose: tag remnants and wikitext table/template leftovers.
MARKUP_PREFIXES = ("<", "{{", "}}", "{|", "|")


def paragraph_id(source_id: str, index: int) -> int:
    """Stable 64-bit paragraph id from source id and paragraph index."""
    key = f"{source_id}\x1f{index}".encode("utf-8")
    return int.from_bytes(hashlib.blake2b(key, digest_size=8).digest(), "big")


@dataclass
class TokenizedParagraph:
    """One paragraph with its token boundaries.

    ``starts``/``ends`` are int64 arrays of character offsets into ``text``;
    ``tokens`` materializes the (surface, start, end) view on demand.
    """

    pid: int
    source_id: str
    index: int
    text: str
    starts: np.ndarray = field(repr=False)
    ends: np.ndarray = field(repr=False)

    @property
    def token_count(self) -> int:
        return int(self.starts.shape[0])

    @property
    def tokens(self) -> list[tuple[str, int, int]]:
        return [
            (self.text[s:e], s, e)
            for s, e in zip(self.starts.tolist(), self.ends.tolist())
        ]

    def surfaces(self) -> list[str]:
        return [self.text[s:e] for s, e in zip(self.starts.tolist(), self.ends.tolist())]


def _is_markup(line: str) -> bool:
    stripped = line.lstrip()
    return stripped.startswith(MARKUP_PREFIXES)


def paragraph_ranges(text: str) -> list[tuple[int, int]]:
    """Character ranges of paragraph blocks in ``text``.

    A block is a maximal run of lines that are neither blank nor markup
    residue; internal newlines stay part of the block.
    """
    ranges: list[tuple[int, int]] = []
    pos = 0
    block_start = -1
    block_end = -1
    for line in text.splitlines(keepends=True):
        end = pos + len(line)
        bare = line.rstrip("\r\n")
        if not bare.strip() or _is_markup(bare):
            if block_start >= 0:
                ranges.append((block_start, block_end))
                block_start = -1
        else:
            if block_start < 0:
                block_start = pos
            block_end = pos + len(bare)
        pos = end
    if block_start >= 0:
        ranges.append((block_start, block_end))
    return ranges


def split_paragraphs(
    text: str, source_id: str, backend=None
) -> list[TokenizedParagraph]:
    """Split one document into tokenized paragraphs (indices 0, 1, ...)."""
    cp = codepoints(text)
    g_starts, g_ends = tokenize_codepoints(cp, backend=backend)
    out: list[TokenizedParagraph] = []
    for bs, be in paragraph_ranges(text):
        lo = int(np.searchsorted(g_starts, bs, side="left"))
        hi = int(np.searchsorted(g_starts, be, side="left"))
        if hi <= lo:
            continue
        index = len(out)
        out.append(
            TokenizedParagraph(
                pid=paragraph_id(source_id, index),
                source_id=source_id,
                index=index,
                text=text[bs:be],
                starts=g_starts[lo:hi] - bs,
                ends=g_ends[lo:hi] - bs,
            )
        )
    return out


@dataclass(frozen=True)
class FilterPolicy:
    """Which paragraphs survive into the corpus."""

    min_tokens: int = 6
    min_indicators: int = 1
    min_density: float | None = None  # non-excluded indicators per 100 tokens

    def __post_init__(self) -> None:
        if self.min_tokens < 1:
            raise ValueError("min_tokens must be >= 1")
        if self.min_indicators < 0:
            raise ValueError("min_indicators must be >= 0")
        if self.min_density is not None and self.min_density < 0:
            raise ValueError("min_density must be >= 0 when set")


#: Drop reasons in the order they are checked.
DROP_REASONS = ("too_short", "too_few_indicators", "low_density")


def drop_reason(
    token_count: int, non_excluded_matches: int, policy: FilterPolicy
) -> str | None:
    """Why a paragraph is dropped, or None to keep it."""
    if token_count < policy.min_tokens:
        return "too_short"
    if non_excluded_matches < policy.min_indicators:
        return "too_few_indicators"
    if policy.min_density is not None:
        density = 100.0 * non_excluded_matches / token_count
        if density < policy.min_density:
            return "low_density"
    return None


def filter_paragraphs(paragraphs, lexicon, policy: FilterPolicy | None = None):
    """Keep paragraphs passing ``policy`` under ``lexicon``, order preserved."""
    from .matcher import find_indicators

    if policy is None:
        policy = FilterPolicy()
    kept = []
    for para in paragraphs:
        matches = find_indicators(para, lexicon)
        non_excl = sum(1 for m in matches if m.phrase not in lexicon.exclusions)
        if drop_reason(para.token_count, non_excl, policy) is None:
            kept.append(para)
    return kept


def _decode(data: bytes, origin: str) -> str:
    try:
        return data.decode("utf-8")
    except UnicodeDecodeError as exc:
        raise IngestError(
            f"{origin}: invalid UTF-8 at byte offset {exc.start}"
        ) from None


def read_documents(
    path: str | Path, input_format: str | None = None
) -> Iterator[tuple[str, str]]:
    """Yield (source id, text) pairs from a plain-text or JSONL file.

    Plain files yield a single document whose source id is the path as given.
    ``.jsonl``/``.ndjson`` files (or ``input_format='jsonl'``) yield one
    document per line from objects with ``id`` and ``text`` fields.
    """
    path = Path(path)
    if input_format is None:
        input_format = "jsonl" if path.suffix in (".jsonl", ".ndjson") else "plain"
    if input_format not in ("plain", "jsonl"):
        raise IngestError(f"unknown input format {input_format!r}")
    if input_format == "plain":
        yield str(path), _decode(path.read_bytes(), str(path))
        return
    with open(path, "rb") as fh:
        for lineno, raw in enumerate(fh, start=1):
            line = _decode(raw, f"{path}:{lineno}").strip()
            if not line:
                continue
            try:
                obj = json.loads(line)
            except json.JSONDecodeError as exc:
                raise IngestError(f"{path}:{lineno}: invalid JSON ({exc.msg})") from None
            if not isinstance(obj, dict) or "id" not in obj or "text" not in obj:
                raise IngestError(
                    f"{path}:{lineno}: record must be an object with 'id' and 'text'"
                )
            if not isinstance(obj["text"], str):
                raise IngestError(f"{path}:{lineno}: 'text' must be a string")
            yield str(obj["id"]), obj["text"]


def iter_paragraphs(
    paths: Iterable[str | Path],
    input_format: str | None = None,
    backend=None,
) -> Iterator[TokenizedParagraph]:
    """All paragraphs from several input files, in file order."""
    for path in paths:
        for source_id, text in read_documents(path, input_format):
            yield from split_paragraphs(text, source_id, backend=backend)
