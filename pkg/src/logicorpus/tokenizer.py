"""Unicode-aware word/punctuation tokenizer over codepoint arrays.

Text becomes a ``uint32`` codepoint array (one slot per Python ``str``
character, so token offsets are plain string indices). Each codepoint gets a
class — whitespace, word, apostrophe, punctuation — using the same character
semantics as the regex classes ``\\w`` and ``\\s``. An apostrophe (``'`` or
``’``) counts as part of a word exactly when both neighbors are word
characters ("isn't" is one token, a quote before "tis" is not). Tokens are
maximal word runs plus single punctuation characters; whitespace separates.

Class tables are built lazily per codepoint and cached, with a precomputed
fast path for ASCII.
"""

from __future__ import annotations

import re

import numpy as np

from ._kernels import get_backend

SPACE, WORD, APOSTROPHE, PUNCT = 0, 1, 2, 3

_APOSTROPHES = frozenset({"'", "’"})
_WORD_RE = re.compile(r"\w")
_SPACE_RE = re.compile(r"\s")


def _class_of(cp: int) -> int:
    ch = chr(cp)
    if ch in _APOSTROPHES:
        return APOSTROPHE
    if _SPACE_RE.match(ch):
        return SPACE
    if _WORD_RE.match(ch):
        return WORD
    return PUNCT


def _fold_of(cp: int) -> int:
    """Case/apostrophe folding for one codepoint (identity if lowering
    would change the character count, e.g. 'İ')."""
    if cp == 0x2019:
        return 0x27
    low = chr(cp).lower()
    return ord(low) if len(low) == 1 else cp


_ASCII_CLASS = np.array([_class_of(c) for c in range(128)], dtype=np.uint8)
_ASCII_FOLD = np.array([_fold_of(c) for c in range(128)], dtype=np.uint32)
_CLASS_CACHE: dict[int, int] = {}
_FOLD_CACHE: dict[int, int] = {}


def codepoints(text: str) -> np.ndarray:
    """The text as a read-only uint32 codepoint array."""
    return np.frombuffer(text.encode("utf-32-le"), dtype=np.uint32)


def _map_codepoints(cp: np.ndarray, ascii_table, cache, fn, dtype) -> np.ndarray:
    out = np.empty(cp.shape[0], dtype=dtype)
    is_ascii = cp < 128
    out[is_ascii] = ascii_table[cp[is_ascii]]
    rest = ~is_ascii
    if rest.any():
        uniq = np.unique(cp[rest])
        vals = np.empty(uniq.shape[0], dtype=dtype)
        for i, c in enumerate(uniq.tolist()):
            v = cache.get(c)
            if v is None:
                v = fn(c)
                cache[c] = v
            vals[i] = v
        out[rest] = vals[np.searchsorted(uniq, cp[rest])]
    return out


def char_classes(cp: np.ndarray) -> np.ndarray:
    """Raw per-codepoint classes (apostrophes still class 2)."""
    return _map_codepoints(cp, _ASCII_CLASS, _CLASS_CACHE, _class_of, np.uint8)


def resolve_classes(cls: np.ndarray) -> np.ndarray:
    """Resolve apostrophes: word-class between two word characters (in the
    *unresolved* classes), punctuation otherwise."""
    apo = cls == APOSTROPHE
    if not apo.any():
        return cls
    out = cls.copy()
    n = cls.shape[0]
    prev_word = np.empty(n, dtype=bool)
    prev_word[0] = False
    np.equal(cls[:-1], WORD, out=prev_word[1:])
    next_word = np.empty(n, dtype=bool)
    next_word[-1] = False
    np.equal(cls[1:], WORD, out=next_word[:-1])
    out[apo] = PUNCT
    out[apo & prev_word & next_word] = WORD
    return out


def fold_codepoints(cp: np.ndarray) -> np.ndarray:
    """Lowercased codepoints with ``’`` folded to ``'`` (matching is
    case-insensitive and apostrophe-insensitive)."""
    return _map_codepoints(cp, _ASCII_FOLD, _FOLD_CACHE, _fold_of, np.uint32)


def fold_text(text: str) -> str:
    return "".join(map(chr, fold_codepoints(codepoints(text)).tolist()))


def tokenize_codepoints(cp: np.ndarray, backend=None) -> tuple[np.ndarray, np.ndarray]:
    """Token (start, end) offset arrays for a codepoint array."""
    if backend is None:
        backend = get_backend()
    cls = resolve_classes(char_classes(cp))
    return backend.token_spans(cls)


def tokenize(text: str, backend=None) -> list[str]:
    """Token surfaces of ``text`` (convenience wrapper)."""
    cp = codepoints(text)
    starts, ends = tokenize_codepoints(cp, backend=backend)
    return [text[s:e] for s, e in zip(starts.tolist(), ends.tolist())]
