"""Numba kernel backend.

Compiled loops matching ``np_backend`` result-for-result. Wrappers unpack the
matcher table object into plain arrays so the jitted cores see only numpy
types. Compilation caches on disk (``cache=True``), so the cost is paid once.
"""

from __future__ import annotations

import numpy as np
from numba import njit

NAME = "numba"

_MASK64 = np.uint64(0xFFFFFFFFFFFFFFFF)
_M1 = np.uint64(0xBF58476D1CE4E5B9)
_M2 = np.uint64(0x94D049BB133111EB)
_FNV_OFFSET = np.uint64(0xCBF29CE484222325)
_FNV_PRIME = np.uint64(0x100000001B3)


@njit(cache=True)
def _mix64(x):
    x = np.uint64(x)
    x = (x ^ (x >> np.uint64(30))) * _M1
    x = (x ^ (x >> np.uint64(27))) * _M2
    return x ^ (x >> np.uint64(31))


@njit(cache=True)
def _channel_u64(word, ks):
    out = np.empty(ks.shape[0], dtype=np.uint64)
    for i in range(ks.shape[0]):
        out[i] = _mix64(word ^ ks[i])
    return out


def channel_u64(base: int, channel: int, ks: np.ndarray) -> np.ndarray:
    ks = np.ascontiguousarray(ks, dtype=np.uint64)
    word = np.uint64((int(base) ^ ((channel & 0xFF) << 56)) & 0xFFFFFFFFFFFFFFFF)
    return _channel_u64(word, ks)


@njit(cache=True)
def _token_spans(cls):
    n = cls.shape[0]
    count = 0
    prev_word = False
    for i in range(n):
        c = cls[i]
        if c == 1:
            if not prev_word:
                count += 1
            prev_word = True
        else:
            prev_word = False
            if c == 3:
                count += 1
    starts = np.empty(count, dtype=np.int64)
    ends = np.empty(count, dtype=np.int64)
    t = 0
    prev_word = False
    for i in range(n):
        c = cls[i]
        if c == 1:
            if not prev_word:
                starts[t] = i
                t += 1
            ends[t - 1] = i + 1
            prev_word = True
        else:
            prev_word = False
            if c == 3:
                starts[t] = i
                ends[t] = i + 1
                t += 1
    return starts, ends


def token_spans(cls: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    return _token_spans(np.ascontiguousarray(cls, dtype=np.uint8))


@njit(cache=True)
def _token_ids(cp, starts, ends, wh_sorted, wid_sorted, wkeys, wlen, max_len):
    n = starts.shape[0]
    out = np.zeros(n, dtype=np.int32)
    n_words = wh_sorted.shape[0]
    if n_words == 0:
        return out
    for t in range(n):
        s = starts[t]
        e = ends[t]
        length = e - s
        if length > max_len:
            continue
        h = _FNV_OFFSET
        for i in range(s, e):
            h = h * _FNV_PRIME + np.uint64(cp[i])
        lo = 0
        hi = n_words
        while lo < hi:
            mid = (lo + hi) // 2
            if wh_sorted[mid] < h:
                lo = mid + 1
            else:
                hi = mid
        if lo >= n_words or wh_sorted[lo] != h:
            continue
        wid = wid_sorted[lo]
        if wlen[wid] != length:
            continue
        match = True
        for k in range(length):
            if cp[s + k] != wkeys[wid, k]:
                match = False
                break
        if match:
            out[t] = wid
    return out


def token_ids(
    cp: np.ndarray,
    starts: np.ndarray,
    ends: np.ndarray,
    tables,
) -> np.ndarray:
    return _token_ids(
        np.ascontiguousarray(cp, dtype=np.uint32),
        starts,
        ends,
        tables.wh_sorted,
        tables.wid_sorted,
        tables.wkeys,
        tables.wlen,
        np.int64(tables.max_word_len),
    )


@njit(cache=True)
def _walk_count(ids, bounds, edge_start, edge_word, edge_dest, node_cat):
    count = 0
    for p in range(bounds.shape[0] - 1):
        i = bounds[p]
        hi = bounds[p + 1]
        while i < hi:
            node = 0
            best = 0
            j = i
            while j < hi:
                w = ids[j]
                if w <= 0:
                    break
                a = edge_start[node]
                b = edge_start[node + 1]
                dest = -1
                while a < b:
                    mid = (a + b) // 2
                    ew = edge_word[mid]
                    if ew == w:
                        dest = edge_dest[mid]
                        break
                    elif ew < w:
                        a = mid + 1
                    else:
                        b = mid
                if dest < 0:
                    break
                node = dest
                j += 1
                if node_cat[node] >= 0:
                    best = j - i
            if best > 0:
                count += 1
                i += best
            else:
                i += 1
    return count


@njit(cache=True)
def _walk_fill(
    ids, bounds, edge_start, edge_word, edge_dest, node_cat, node_phrase,
    m_start, m_end, m_cat, m_ph,
):
    t = 0
    for p in range(bounds.shape[0] - 1):
        i = bounds[p]
        hi = bounds[p + 1]
        while i < hi:
            node = 0
            best = 0
            best_node = -1
            j = i
            while j < hi:
                w = ids[j]
                if w <= 0:
                    break
                a = edge_start[node]
                b = edge_start[node + 1]
                dest = -1
                while a < b:
                    mid = (a + b) // 2
                    ew = edge_word[mid]
                    if ew == w:
                        dest = edge_dest[mid]
                        break
                    elif ew < w:
                        a = mid + 1
                    else:
                        b = mid
                if dest < 0:
                    break
                node = dest
                j += 1
                if node_cat[node] >= 0:
                    best = j - i
                    best_node = node
            if best > 0:
                m_start[t] = i
                m_end[t] = i + best
                m_cat[t] = node_cat[best_node]
                m_ph[t] = node_phrase[best_node]
                t += 1
                i += best
            else:
                i += 1
    return t


def match_spans(
    ids: np.ndarray,
    bounds: np.ndarray,
    tables,
) -> tuple[np.ndarray, np.ndarray, np.ndarray, np.ndarray]:
    ids = np.ascontiguousarray(ids, dtype=np.int32)
    bounds = np.ascontiguousarray(bounds, dtype=np.int64)
    count = _walk_count(
        ids, bounds, tables.edge_start, tables.edge_word, tables.edge_dest,
        tables.node_cat,
    )
    m_start = np.empty(count, dtype=np.int64)
    m_end = np.empty(count, dtype=np.int64)
    m_cat = np.empty(count, dtype=np.int8)
    m_ph = np.empty(count, dtype=np.int32)
    _walk_fill(
        ids, bounds, tables.edge_start, tables.edge_word, tables.edge_dest,
        tables.node_cat, tables.node_phrase, m_start, m_end, m_cat, m_ph,
    )
    return m_start, m_end, m_cat, m_ph
