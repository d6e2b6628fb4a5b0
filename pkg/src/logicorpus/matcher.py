"""Multi-pattern indicator matching over tokenized paragraphs.

A lexicon compiles once into flat array tables: every distinct phrase word is
interned to a small integer id (tokens outside the lexicon vocabulary intern
to 0), phrases become id sequences in a flattened trie, and matching walks
token-id arrays greedily — at each position the longest phrase wins and the
scan resumes after it, so matches never overlap. Matching is case-insensitive
(codepoint folding, curly apostrophes folded to straight) and aligned to
token boundaries by construction: "not" can never fire inside "nothing"
because "nothing" interns to a different id.

The compiled tables are immutable and shared freely across workers.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ._kernels import get_backend
from .errors import LexiconValidationError
from .rng import MASK64, token_hash
from .tokenizer import codepoints, fold_codepoints, tokenize_codepoints

_PAD = np.uint32(0xFFFFFFFF)


@dataclass(frozen=True)
class IndicatorMatch:
    """One indicator occurrence in a paragraph."""

    pid: int
    start: int  # token index, inclusive
    end: int  # token index, exclusive
    char_start: int
    char_end: int
    phrase: str
    category: "IndicatorCategory"  # noqa: F821 - imported lazily to avoid a cycle


@dataclass(frozen=True)
class MatcherTables:
    """Flat arrays consumed by both kernel backends."""

    # word interning: sorted hash -> id, plus per-id key material
    wh_sorted: np.ndarray  # uint64[W]
    wid_sorted: np.ndarray  # int32[W]
    wkeys: np.ndarray  # uint32[W+1, K], PAD-filled
    wlen: np.ndarray  # int32[W+1]
    max_word_len: int
    # trie over word ids (numba walk)
    edge_start: np.ndarray  # int32[nodes+1]
    edge_word: np.ndarray  # int32[edges], sorted within each node
    edge_dest: np.ndarray  # int32[edges]
    node_cat: np.ndarray  # int8[nodes], -1 = non-terminal
    node_phrase: np.ndarray  # int32[nodes], -1 = non-terminal
    # flattened phrase list (numpy scan)
    ph_words: np.ndarray  # int32[sum of lengths]
    ph_off: np.ndarray  # int32[P+1]
    ph_cat: np.ndarray  # int8[P]


def _phrase_words(phrase: str) -> tuple[str, ...]:
    """A phrase as its folded token sequence."""
    folded = fold_codepoints(codepoints(phrase))
    starts, ends = tokenize_codepoints(folded, backend=get_backend("numpy"))
    chars = folded.tolist()
    return tuple(
        "".join(map(chr, chars[s:e]))
        for s, e in zip(starts.tolist(), ends.tolist())
    )


class CompiledMatcher:
    """Immutable compiled form of an IndicatorLexicon."""

    def __init__(self, entries, backend=None):
        """``entries`` is a sequence of (phrase, category) pairs, phrases
        already normalized and unique across categories."""
        self._backend = backend if backend is not None else get_backend()

        word_id: dict[str, int] = {}
        phrase_seqs: list[tuple[int, ...]] = []
        phrase_strings: list[str] = []
        phrase_cats: list[int] = []
        seen_seq: dict[tuple[int, ...], int] = {}
        for phrase, cat in entries:
            words = _phrase_words(phrase)
            if not words:
                raise LexiconValidationError(
                    f"phrase {phrase!r} contains no tokens"
                )
            seq = tuple(
                word_id.setdefault(w, len(word_id) + 1) for w in words
            )
            prior = seen_seq.get(seq)
            if prior is not None:
                if phrase_cats[prior] != int(cat):
                    raise LexiconValidationError(
                        f"phrases {phrase_strings[prior]!r} and {phrase!r} "
                        "tokenize identically but belong to different categories"
                    )
                continue
            seen_seq[seq] = len(phrase_seqs)
            phrase_seqs.append(seq)
            phrase_strings.append(phrase)
            phrase_cats.append(int(cat))

        self.phrase_strings: tuple[str, ...] = tuple(phrase_strings)
        self.phrase_categories: tuple[int, ...] = tuple(phrase_cats)
        self.tables = _build_tables(word_id, phrase_seqs, phrase_cats, phrase_strings)

    @property
    def backend(self):
        return self._backend

    def token_ids(self, folded_cp: np.ndarray, starts, ends) -> np.ndarray:
        return self._backend.token_ids(folded_cp, starts, ends, self.tables)

    def match_ids(self, ids: np.ndarray, bounds: np.ndarray):
        """Raw (start, end, category, phrase index) arrays over token ids."""
        return self._backend.match_spans(ids, bounds, self.tables)

    def match_paragraph(self, paragraph, lexicon=None) -> list[IndicatorMatch]:
        folded = fold_codepoints(codepoints(paragraph.text))
        ids = self.token_ids(folded, paragraph.starts, paragraph.ends)
        bounds = np.array([0, ids.shape[0]], dtype=np.int64)
        m_start, m_end, _, m_ph = self.match_ids(ids, bounds)
        return self._to_matches(paragraph, m_start, m_end, m_ph)

    def _to_matches(self, paragraph, m_start, m_end, m_ph) -> list[IndicatorMatch]:
        from .lexicon import IndicatorCategory

        out = []
        starts = paragraph.starts
        ends = paragraph.ends
        for s, e, p in zip(m_start.tolist(), m_end.tolist(), m_ph.tolist()):
            out.append(
                IndicatorMatch(
                    pid=paragraph.pid,
                    start=s,
                    end=e,
                    char_start=int(starts[s]),
                    char_end=int(ends[e - 1]),
                    phrase=self.phrase_strings[p],
                    category=IndicatorCategory(self.phrase_categories[p]),
                )
            )
        return out


def _build_tables(word_id, phrase_seqs, phrase_cats, phrase_strings) -> MatcherTables:
    n_words = len(word_id)
    max_len = max((len(w) for w in word_id), default=1)
    wkeys = np.full((n_words + 1, max_len), _PAD, dtype=np.uint32)
    wlen = np.zeros(n_words + 1, dtype=np.int32)
    hashes = np.zeros(n_words + 1, dtype=np.uint64)
    for word, wid in word_id.items():
        chars = [ord(c) for c in word]
        wkeys[wid, : len(chars)] = chars
        wlen[wid] = len(chars)
        hashes[wid] = token_hash(chars) & MASK64
    if n_words and np.unique(hashes[1:]).shape[0] != n_words:
        raise LexiconValidationError(
            "internal word-hash collision in lexicon vocabulary"
        )
    order = np.argsort(hashes[1:], kind="stable")
    wh_sorted = hashes[1:][order]
    wid_sorted = (order + 1).astype(np.int32)

    # trie
    children: list[dict[int, int]] = [{}]
    term_cat: list[int] = [-1]
    term_ph: list[int] = [-1]
    for ph_idx, seq in enumerate(phrase_seqs):
        node = 0
        for wid in seq:
            nxt = children[node].get(wid)
            if nxt is None:
                nxt = len(children)
                children[node][wid] = nxt
                children.append({})
                term_cat.append(-1)
                term_ph.append(-1)
            node = nxt
        term_cat[node] = phrase_cats[ph_idx]
        term_ph[node] = ph_idx
    n_nodes = len(children)
    edge_counts = [len(c) for c in children]
    edge_start = np.zeros(n_nodes + 1, dtype=np.int32)
    edge_start[1:] = np.cumsum(edge_counts)
    n_edges = int(edge_start[-1])
    edge_word = np.zeros(n_edges, dtype=np.int32)
    edge_dest = np.zeros(n_edges, dtype=np.int32)
    for node, kids in enumerate(children):
        base = int(edge_start[node])
        for i, (wid, dest) in enumerate(sorted(kids.items())):
            edge_word[base + i] = wid
            edge_dest[base + i] = dest

    ph_off = np.zeros(len(phrase_seqs) + 1, dtype=np.int32)
    ph_off[1:] = np.cumsum([len(s) for s in phrase_seqs])
    ph_words = np.fromiter(
        (wid for seq in phrase_seqs for wid in seq), dtype=np.int32,
        count=int(ph_off[-1]),
    )

    return MatcherTables(
        wh_sorted=wh_sorted,
        wid_sorted=wid_sorted,
        wkeys=wkeys,
        wlen=wlen,
        max_word_len=max_len,
        edge_start=edge_start,
        edge_word=edge_word,
        edge_dest=edge_dest,
        node_cat=np.array(term_cat, dtype=np.int8),
        node_phrase=np.array(term_ph, dtype=np.int32),
        ph_words=ph_words,
        ph_off=ph_off,
        ph_cat=np.array(phrase_cats, dtype=np.int8),
    )


def find_indicators(paragraph, lexicon) -> list[IndicatorMatch]:
    """All indicator matches in one paragraph.

    ``paragraph`` may be a :class:`~logicorpus.ingest.TokenizedParagraph` or a
    plain string (tokenized on the fly, pid 0); ``lexicon`` may be an
    :class:`~logicorpus.lexicon.IndicatorLexicon` or an already-compiled
    matcher.
    """
    if isinstance(paragraph, str):
        from .ingest import TokenizedParagraph

        starts, ends = tokenize_codepoints(codepoints(paragraph))
        paragraph = TokenizedParagraph(
            pid=0, source_id="", index=0, text=paragraph, starts=starts, ends=ends
        )
    matcher = lexicon if isinstance(lexicon, CompiledMatcher) else lexicon.compiled()
    return matcher.match_paragraph(paragraph)
