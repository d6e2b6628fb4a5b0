"""Three-channel masking and the emitted record format.

Channels, applied to each paragraph independently:

1. Indicator channel — each lexicon match is kept or replaced with
   probability ``p_lg``; a replaced match's whole token span collapses to a
   single ``[LGMASK]`` token labeled with the match's category.
2. LUI channel — each token *outside every match span* is replaced by
   ``[LGMASK]`` with the logic-unrelated label (code 5) with probability
   ``p_lui``.
3. Classic MLM — every surviving token (including tokens of unselected
   indicator spans) is selected at ``mlm_rate`` and then masked / replaced
   by a random vocabulary token / kept per the (0.8, 0.1, 0.1) split; all
   three branches record the original as an MLM label.

Every decision is a counter-hash of (seed, paragraph id, channel, position),
so outputs are independent of processing order and worker count. Labels are
indexed by *final* positions — the sequence shrinks where multi-token spans
collapse.

Records serialize one-per-line as compact JSON with fixed key order:
``{"pid": ..., "tokens": [...], "lcp": [[pos, code]...],
"mlm": [[pos, original]...], "prov": [[pos, original]...]}``. ``prov``
carries the pre-mask surface of every ``[LGMASK]`` position so audits and
statistics can recover what was removed.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterable

import numpy as np

from ._kernels import get_backend
from .errors import EmissionError, IntegrityError, RecordError
from .lexicon import IndicatorCategory
from .rng import (
    CH_LG,
    CH_LUI,
    CH_MLM,
    CH_MLM_BRANCH,
    CH_MLM_RANDOM,
    bernoulli_threshold,
    paragraph_base,
)

LGMASK = "[LGMASK]"
MASK = "[MASK]"

RECORD_KEYS = ("pid", "tokens", "lcp", "mlm", "prov")


@dataclass(frozen=True)
class MaskPolicy:
    """Masking probabilities and the dataset seed."""

    seed: int
    p_lg: float = 0.70
    p_lui: float = 0.006
    mlm_rate: float = 0.15
    mlm_split: tuple[float, float, float] = (0.8, 0.1, 0.1)
    # Phrases never replaced by the indicator channel. Empty by default:
    # filter exclusions do not carry over to masking unless configured.
    lgmask_exclusions: frozenset[str] = frozenset()

    def __post_init__(self) -> None:
        for name in ("p_lg", "p_lui", "mlm_rate"):
            v = getattr(self, name)
            if not 0.0 <= v <= 1.0:
                raise ValueError(f"{name} must lie in [0, 1], got {v}")
        if len(self.mlm_split) != 3 or any(v < 0 for v in self.mlm_split):
            raise ValueError("mlm_split must be three non-negative weights")
        if abs(sum(self.mlm_split) - 1.0) > 1e-9:
            raise ValueError("mlm_split must sum to 1")


@dataclass
class MaskedSample:
    """A masked paragraph with its labels, all on final positions."""

    pid: int
    tokens: list[str]
    lcp: list[tuple[int, int]] = field(default_factory=list)
    mlm: list[tuple[int, str]] = field(default_factory=list)
    prov: list[tuple[int, str]] = field(default_factory=list)


def _selected(u64s: np.ndarray, p: float) -> np.ndarray:
    nonzero, bound = bernoulli_threshold(p)
    if not nonzero:
        return np.zeros(u64s.shape[0], dtype=bool)
    return u64s <= np.uint64(bound)


def mask_paragraph(
    paragraph,
    matches,
    policy: MaskPolicy,
    vocab=None,
    backend=None,
) -> MaskedSample:
    """Mask one paragraph. ``matches`` is the lexicon output for it.

    ``vocab`` supplies the MLM random-replacement pool (normally the corpus
    vocabulary); when omitted, the paragraph's own distinct surfaces stand in
    so the operation stays self-contained.
    """
    if backend is None:
        backend = get_backend()
    n = paragraph.token_count
    starts = paragraph.starts
    ends = paragraph.ends
    surfaces = paragraph.surfaces()

    m_start = np.array([m.start for m in matches], dtype=np.int64)
    m_end = np.array([m.end for m in matches], dtype=np.int64)
    _check_matches(paragraph, matches, m_start, m_end, n)

    base = paragraph_base(policy.seed, paragraph.pid)

    # Channel 1: indicator spans.
    if len(matches):
        u_lg = backend.channel_u64(base, CH_LG, m_start.astype(np.uint64))
        lg_sel = _selected(u_lg, policy.p_lg)
        if policy.lgmask_exclusions:
            for i, m in enumerate(matches):
                if m.phrase in policy.lgmask_exclusions:
                    lg_sel[i] = False
    else:
        lg_sel = np.zeros(0, dtype=bool)

    in_match = np.zeros(n, dtype=bool)
    for s, e in zip(m_start.tolist(), m_end.tolist()):
        in_match[s:e] = True

    # Channel 2: logic-unrelated tokens.
    pos_all = np.arange(n, dtype=np.uint64)
    free = ~in_match
    lui_sel = np.zeros(n, dtype=bool)
    if free.any() and policy.p_lui > 0.0:
        u_lui = backend.channel_u64(base, CH_LUI, pos_all[free])
        lui_sel[free] = _selected(u_lui, policy.p_lui)

    # Channel 3: MLM over everything not becoming [LGMASK].
    covered = np.zeros(n, dtype=bool)
    for i in np.flatnonzero(lg_sel).tolist():
        covered[m_start[i] : m_end[i]] = True
    mlm_eligible = ~covered & ~lui_sel
    mlm_branch = np.zeros(n, dtype=np.int8)  # 0 none, 1 mask, 2 random, 3 keep
    if mlm_eligible.any() and policy.mlm_rate > 0.0:
        elig = pos_all[mlm_eligible]
        u_sel = backend.channel_u64(base, CH_MLM, elig)
        chosen = elig[_selected(u_sel, policy.mlm_rate)]
        if chosen.shape[0]:
            u_br = backend.channel_u64(base, CH_MLM_BRANCH, chosen)
            b1 = _selected(u_br, policy.mlm_split[0])
            b2 = _selected(u_br, policy.mlm_split[0] + policy.mlm_split[1])
            branch = np.where(b1, 1, np.where(b2, 2, 3)).astype(np.int8)
            mlm_branch[chosen.astype(np.int64)] = branch

    rand_pool = list(vocab) if vocab else sorted(set(surfaces))

    # Assemble the final sequence.
    lg_at: dict[int, int] = {
        int(m_start[i]): i for i in np.flatnonzero(lg_sel).tolist()
    }
    tokens: list[str] = []
    lcp: list[tuple[int, int]] = []
    mlm: list[tuple[int, str]] = []
    prov: list[tuple[int, str]] = []
    t = 0
    while t < n:
        match_idx = lg_at.get(t)
        if match_idx is not None:
            final = len(tokens)
            m = matches[match_idx]
            tokens.append(LGMASK)
            lcp.append((final, int(m.category)))
            prov.append((final, paragraph.text[m.char_start : m.char_end]))
            t = int(m_end[match_idx])
            continue
        final = len(tokens)
        surface = surfaces[t]
        if lui_sel[t]:
            tokens.append(LGMASK)
            lcp.append((final, int(IndicatorCategory.LUI)))
            prov.append((final, surface))
        else:
            branch = int(mlm_branch[t])
            if branch == 1:
                tokens.append(MASK)
                mlm.append((final, surface))
            elif branch == 2:
                u = int(
                    backend.channel_u64(
                        base, CH_MLM_RANDOM, np.array([t], dtype=np.uint64)
                    )[0]
                )
                tokens.append(rand_pool[u % len(rand_pool)])
                mlm.append((final, surface))
            elif branch == 3:
                tokens.append(surface)
                mlm.append((final, surface))
            else:
                tokens.append(surface)
        t += 1

    return MaskedSample(pid=paragraph.pid, tokens=tokens, lcp=lcp, mlm=mlm, prov=prov)


def _check_matches(paragraph, matches, m_start, m_end, n) -> None:
    last_end = 0
    for i, m in enumerate(matches):
        if m.pid != paragraph.pid:
            raise IntegrityError(
                f"match {i} belongs to paragraph {m.pid}, not {paragraph.pid}"
            )
        s, e = int(m_start[i]), int(m_end[i])
        if not (0 <= s < e <= n):
            raise IntegrityError(
                f"match {i} span [{s}, {e}) outside paragraph of {n} tokens"
            )
        if s < last_end:
            raise IntegrityError(f"match {i} overlaps or precedes an earlier match")
        last_end = e


def format_record(sample: MaskedSample) -> str:
    """One output line (no trailing newline), compact fixed-key-order JSON."""
    payload = {
        "pid": sample.pid,
        "tokens": sample.tokens,
        "lcp": [[p, c] for p, c in sample.lcp],
        "mlm": [[p, o] for p, o in sample.mlm],
        "prov": [[p, o] for p, o in sample.prov],
    }
    return json.dumps(payload, ensure_ascii=False, separators=(",", ":"))


def _fail(msg: str, line: int | None) -> RecordError:
    return RecordError(msg, line=line)


def parse_record(text: str, line: int | None = None) -> MaskedSample:
    """Parse and validate one emitted record line."""
    try:
        obj = json.loads(text)
    except json.JSONDecodeError as exc:
        raise _fail(f"invalid JSON ({exc.msg})", line) from None
    if not isinstance(obj, dict) or set(obj) != set(RECORD_KEYS):
        raise _fail(
            f"record must be an object with keys {list(RECORD_KEYS)}", line
        )
    pid = obj["pid"]
    if not isinstance(pid, int) or isinstance(pid, bool) or not 0 <= pid < 2**64:
        raise _fail("pid must be an unsigned 64-bit integer", line)
    tokens = obj["tokens"]
    if not isinstance(tokens, list) or not all(
        isinstance(t, str) and t for t in tokens
    ):
        raise _fail("tokens must be a list of non-empty strings", line)
    n = len(tokens)

    def pairs(key: str, second_type, name: str):
        raw = obj[key]
        if not isinstance(raw, list):
            raise _fail(f"{key} must be a list of [position, {name}] pairs", line)
        out = []
        prev = -1
        for item in raw:
            if (
                not isinstance(item, list)
                or len(item) != 2
                or not isinstance(item[0], int)
                or isinstance(item[0], bool)
                or not isinstance(item[1], second_type)
                or (second_type is int and isinstance(item[1], bool))
            ):
                raise _fail(f"{key} entries must be [position, {name}] pairs", line)
            p = item[0]
            if not 0 <= p < n:
                raise _fail(f"{key} position {p} outside {n} tokens", line)
            if p <= prev:
                raise _fail(f"{key} positions must be strictly increasing", line)
            prev = p
            out.append((p, item[1]))
        return out

    lcp = pairs("lcp", int, "category code")
    mlm = pairs("mlm", str, "original surface")
    prov = pairs("prov", str, "original surface")

    for p, c in lcp:
        if not 0 <= c <= 5:
            raise _fail(f"lcp category code {c} outside 0..5", line)
    lcp_pos = [p for p, _ in lcp]
    lg_pos = [i for i, t in enumerate(tokens) if t == LGMASK]
    if lcp_pos != lg_pos:
        raise _fail("lcp labels must coincide exactly with [LGMASK] tokens", line)
    if [p for p, _ in prov] != lcp_pos:
        raise _fail("prov entries must mirror lcp positions", line)
    for p, _ in mlm:
        if tokens[p] == LGMASK:
            raise _fail(f"mlm label at [LGMASK] position {p}", line)

    return MaskedSample(pid=pid, tokens=tokens, lcp=lcp, mlm=mlm, prov=prov)


def emit_samples(samples: Iterable[MaskedSample], path: str | Path) -> int:
    """Write records sorted by paragraph id; returns the count written."""
    ordered = sorted(samples, key=lambda s: s.pid)
    written = 0
    try:
        with open(path, "w", encoding="utf-8", newline="\n") as fh:
            for sample in ordered:
                fh.write(format_record(sample))
                fh.write("\n")
                written += 1
    except OSError as exc:
        raise EmissionError(
            f"failed writing {path} after {written} records: {exc}", written=written
        ) from None
    return written


def read_records(path: str | Path) -> Iterable[MaskedSample]:
    """Parse an emitted dataset file, yielding samples; 1-based line numbers
    in errors."""
    with open(path, "r", encoding="utf-8") as fh:
        for lineno, raw in enumerate(fh, start=1):
            raw = raw.rstrip("\n")
            if not raw:
                continue
            yield parse_record(raw, line=lineno)
