"""Pure-numpy kernel backend.

Vectorized counterparts of the numba kernels. All randomness math runs on
uint64 *arrays*: numpy wraps array arithmetic silently, while scalar uint64
ops would emit overflow warnings, so scalars never enter the hash pipeline.
"""

from __future__ import annotations

import numpy as np

NAME = "numpy"

_U64 = np.uint64
_M1 = _U64(0xBF58476D1CE4E5B9)
_M2 = _U64(0x94D049BB133111EB)
_FNV_OFFSET = _U64(0xCBF29CE484222325)
_FNV_PRIME = _U64(0x100000001B3)


def mix64(x: np.ndarray) -> np.ndarray:
    x = x ^ (x >> _U64(30))
    x = x * _M1
    x = x ^ (x >> _U64(27))
    x = x * _M2
    return x ^ (x >> _U64(31))


def channel_u64(base: int, channel: int, ks: np.ndarray) -> np.ndarray:
    """Counter-hash draws for an array of counters ``ks`` (uint64)."""
    ks = np.ascontiguousarray(ks, dtype=np.uint64)
    word = _U64((int(base) ^ ((channel & 0xFF) << 56)) & 0xFFFFFFFFFFFFFFFF)
    return mix64(word ^ ks)


def token_spans(cls: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Token (start, end) pairs from resolved character classes.

    ``cls`` holds 0 = whitespace, 1 = word, 3 = punctuation (apostrophes are
    already resolved to 1 or 3). Word runs become single tokens; each
    punctuation character is its own token.
    """
    n = cls.shape[0]
    if n == 0:
        empty = np.empty(0, dtype=np.int64)
        return empty, empty.copy()
    word = cls == 1
    lead = np.empty(n, dtype=bool)
    lead[0] = word[0]
    np.logical_and(word[1:], ~word[:-1], out=lead[1:])
    trail = np.empty(n, dtype=bool)
    trail[-1] = word[-1]
    np.logical_and(word[:-1], ~word[1:], out=trail[:-1])
    w_start = np.flatnonzero(lead)
    w_end = np.flatnonzero(trail) + 1
    p_start = np.flatnonzero(cls == 3)
    starts = np.concatenate([w_start, p_start])
    ends = np.concatenate([w_end, p_start + 1])
    order = np.argsort(starts, kind="stable")
    return starts[order], ends[order]


def token_ids(
    cp: np.ndarray,
    starts: np.ndarray,
    ends: np.ndarray,
    tables,
) -> np.ndarray:
    """Map each token to its interned lexicon word id (0 = not in lexicon)."""
    n = starts.shape[0]
    out = np.zeros(n, dtype=np.int32)
    n_words = tables.wh_sorted.shape[0]
    if n == 0 or n_words == 0:
        return out
    lens = ends - starts
    candidate = lens <= tables.max_word_len
    if not candidate.any():
        return out
    pos = np.flatnonzero(candidate)
    c_starts = starts[pos]
    c_lens = lens[pos]
    h = np.full(pos.shape[0], _FNV_OFFSET, dtype=np.uint64)
    last = cp.shape[0] - 1
    cp64 = cp.astype(np.uint64)
    for k in range(int(tables.max_word_len)):
        live = c_lens > k
        if not live.any():
            break
        idx = np.minimum(c_starts + k, last)
        step = h * _FNV_PRIME + cp64[idx]
        h = np.where(live, step, h)
    slot = np.searchsorted(tables.wh_sorted, h)
    slot = np.minimum(slot, n_words - 1)
    hit = tables.wh_sorted[slot] == h
    if not hit.any():
        return out
    hpos = np.flatnonzero(hit)
    wid = tables.wid_sorted[slot[hpos]]
    ok = tables.wlen[wid] == c_lens[hpos]
    for k in range(int(tables.max_word_len)):
        need = ok & (c_lens[hpos] > k)
        if not need.any():
            break
        idx = np.minimum(c_starts[hpos] + k, last)
        same = cp[idx] == tables.wkeys[wid, k]
        ok &= same | (c_lens[hpos] <= k)
    out[pos[hpos[ok]]] = wid[ok]
    return out


def match_spans(
    ids: np.ndarray,
    bounds: np.ndarray,
    tables,
) -> tuple[np.ndarray, np.ndarray, np.ndarray, np.ndarray]:
    """Leftmost-longest non-overlapping phrase matches.

    Returns (start, end, category, phrase index) arrays over global token
    positions; phrases never cross the paragraph bounds in ``bounds``.
    """
    n = ids.shape[0]
    es = np.empty(0, dtype=np.int64)
    if n == 0 or tables.ph_off.shape[0] <= 1:
        return es, es.copy(), np.empty(0, dtype=np.int8), np.empty(0, dtype=np.int32)

    best_len = np.zeros(n, dtype=np.int32)
    best_cat = np.full(n, -1, dtype=np.int8)
    best_ph = np.full(n, -1, dtype=np.int32)

    order = np.argsort(ids, kind="stable")
    sorted_ids = ids[order]
    para_of = np.searchsorted(bounds, np.arange(n, dtype=np.int64), side="right")

    n_phrases = tables.ph_off.shape[0] - 1
    for ph in range(n_phrases):
        a = int(tables.ph_off[ph])
        b = int(tables.ph_off[ph + 1])
        length = b - a
        lo = np.searchsorted(sorted_ids, tables.ph_words[a], side="left")
        hi = np.searchsorted(sorted_ids, tables.ph_words[a], side="right")
        pos = order[lo:hi]
        if length > 1:
            pos = pos[pos + length <= n]
            for k in range(1, length):
                if pos.shape[0] == 0:
                    break
                pos = pos[ids[pos + k] == tables.ph_words[a + k]]
            if pos.shape[0]:
                pos = pos[para_of[pos] == para_of[pos + length - 1]]
        if pos.shape[0] == 0:
            continue
        upd = best_len[pos] < length
        pos = pos[upd]
        best_len[pos] = length
        best_cat[pos] = tables.ph_cat[ph]
        best_ph[pos] = ph

    cand = np.flatnonzero(best_len)
    m_start: list[int] = []
    m_end: list[int] = []
    m_cat: list[int] = []
    m_ph: list[int] = []
    blocked_until = 0
    for p in cand.tolist():
        if p < blocked_until:
            continue
        length = int(best_len[p])
        m_start.append(p)
        m_end.append(p + length)
        m_cat.append(int(best_cat[p]))
        m_ph.append(int(best_ph[p]))
        blocked_until = p + length
    return (
        np.asarray(m_start, dtype=np.int64),
        np.asarray(m_end, dtype=np.int64),
        np.asarray(m_cat, dtype=np.int8),
        np.asarray(m_ph, dtype=np.int32),
    )
