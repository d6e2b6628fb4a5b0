"""End-to-end corpus build: ingest → filter → match → mask → emit.

Two phases over a bounded worker pool:

- Phase A scans whole files: documents tokenize once, paragraphs slice out
  of the document token stream, matches come from one batched matcher call
  per document, and the filter decides who survives. Each file also
  contributes its surviving surfaces to the corpus vocabulary.
- Phase B masks surviving paragraphs in chunks using vectorized channel
  draws — the same counter-hash decisions ``mask_paragraph`` makes one
  paragraph at a time (tests pin the two routes to byte-equal output) — and
  serializes records.

Records sort by paragraph id before writing, and every masking decision is
keyed by (seed, paragraph id, channel, position), so output bytes are
identical for any worker count and any scheduling.
"""

from __future__ import annotations

import sys
import time
from collections import Counter
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field, replace
from pathlib import Path

import numpy as np

from ._kernels import get_backend
from .errors import EmissionError, PipelineConfigError
from .ingest import (
    DROP_REASONS,
    FilterPolicy,
    drop_reason,
    paragraph_id,
    paragraph_ranges,
    read_documents,
)
from .lexicon import load_lexicon
from .masker import LGMASK, MASK, MaskedSample, MaskPolicy, format_record
from .rng import (
    CH_LG,
    CH_LUI,
    CH_MLM,
    CH_MLM_BRANCH,
    CH_MLM_RANDOM,
    MASK64,
    bernoulli_threshold,
    paragraph_base,
)
from .tokenizer import codepoints, fold_codepoints, tokenize_codepoints

_CHUNK_PARAGRAPHS = 2000

WORKERS_ENV = "LOGICORPUS_WORKERS"


@dataclass(frozen=True)
class PipelineConfig:
    """Everything a build needs; validated before any I/O."""

    inputs: tuple[str, ...]
    output: str
    seed: int | None = None
    lexicon: str = "builtin"
    input_format: str | None = None
    # filter
    min_tokens: int = 6
    min_indicators: int = 1
    min_density: float | None = None
    # masking
    p_lg: float = 0.70
    p_lui: float = 0.006
    mlm_rate: float = 0.15
    mlm_split: tuple[float, float, float] = (0.8, 0.1, 0.1)
    no_mlm: bool = False
    exclude_from_lgmask: bool = False
    # orchestration
    workers: int = 1
    progress_every: int = 50000
    quiet: bool = False

    def validated(self) -> "PipelineConfig":
        if self.seed is None:
            raise PipelineConfigError("build requires an explicit --seed")
        if not self.output:
            raise PipelineConfigError("build requires an output path")
        if self.workers < 1:
            raise PipelineConfigError("workers must be >= 1")
        if self.progress_every < 1:
            raise PipelineConfigError("progress interval must be >= 1")
        if self.input_format not in (None, "plain", "jsonl"):
            raise PipelineConfigError(
                f"input format must be 'plain' or 'jsonl', got {self.input_format!r}"
            )
        cfg = self
        if cfg.no_mlm and cfg.mlm_rate != 0.0:
            cfg = replace(cfg, mlm_rate=0.0)
        try:
            cfg.filter_policy()
            cfg.mask_policy(frozenset())
        except ValueError as exc:
            raise PipelineConfigError(str(exc)) from None
        return cfg

    def filter_policy(self) -> FilterPolicy:
        return FilterPolicy(
            min_tokens=self.min_tokens,
            min_indicators=self.min_indicators,
            min_density=self.min_density,
        )

    def mask_policy(self, lexicon_exclusions: frozenset[str]) -> MaskPolicy:
        return MaskPolicy(
            seed=self.seed if self.seed is not None else 0,
            p_lg=self.p_lg,
            p_lui=self.p_lui,
            mlm_rate=0.0 if self.no_mlm else self.mlm_rate,
            mlm_split=self.mlm_split,
            lgmask_exclusions=(
                lexicon_exclusions if self.exclude_from_lgmask else frozenset()
            ),
        )


@dataclass
class BuildSummary:
    records: int = 0
    kept: int = 0
    dropped: dict = field(default_factory=lambda: {r: 0 for r in DROP_REASONS})
    files: int = 0
    documents: int = 0
    vocab_size: int = 0
    elapsed_seconds: float = 0.0
    output: str = ""

    def to_dict(self) -> dict:
        return {
            "records": self.records,
            "kept": self.kept,
            "dropped": dict(self.dropped),
            "files": self.files,
            "documents": self.documents,
            "vocab_size": self.vocab_size,
            "elapsed_seconds": self.elapsed_seconds,
            "output": self.output,
        }


def expand_inputs(paths) -> list[str]:
    """Files from a mix of file and directory arguments, sorted within
    each directory; missing paths fail fast."""
    out: list[str] = []
    for raw in paths:
        p = Path(raw)
        if p.is_dir():
            out.extend(sorted(str(f) for f in p.rglob("*") if f.is_file()))
        elif p.is_file():
            out.append(str(p))
        else:
            raise PipelineConfigError(f"input path {raw} does not exist")
    return out


# Worker-process state, built once per process by the pool initializer.
_CTX: dict = {}


def _init_worker(config: PipelineConfig, vocab: tuple[str, ...] | None) -> None:
    _CTX.clear()
    _CTX.update(_build_ctx(config, vocab))


def _build_ctx(config: PipelineConfig, vocab: tuple[str, ...] | None) -> dict:
    lexicon = load_lexicon(config.lexicon)
    matcher = lexicon.compiled()
    excluded_phrase = np.array(
        [p in lexicon.exclusions for p in matcher.phrase_strings], dtype=bool
    )
    policy = config.mask_policy(lexicon.exclusions)
    lg_barred = (
        np.array(
            [p in policy.lgmask_exclusions for p in matcher.phrase_strings],
            dtype=bool,
        )
        if policy.lgmask_exclusions
        else None
    )
    return {
        "config": config,
        "lexicon": lexicon,
        "matcher": matcher,
        "excluded_phrase": excluded_phrase,
        "filter_policy": config.filter_policy(),
        "policy": policy,
        "lg_barred": lg_barred,
        "vocab": vocab,
        "backend": get_backend(),
    }


# A surviving paragraph travels between phases as a plain tuple:
# (pid, text, starts, ends, m_start, m_end, m_cat, m_ph)


def _scan_document(text: str, source_id: str, ctx: dict):
    matcher = ctx["matcher"]
    backend = ctx["backend"]
    policy = ctx["filter_policy"]
    excluded = ctx["excluded_phrase"]

    cp = codepoints(text)
    g_starts, g_ends = tokenize_codepoints(cp, backend=backend)
    ranges = paragraph_ranges(text)
    drops = Counter()
    kept = []
    vocab: set[str] = set()
    if not ranges:
        return kept, drops, vocab

    r_start = np.array([bs for bs, _ in ranges], dtype=np.int64)
    r_end = np.array([be for _, be in ranges], dtype=np.int64)
    all_lo = np.searchsorted(g_starts, r_start, side="left")
    all_hi = np.searchsorted(g_starts, r_end, side="left")
    bearing = np.flatnonzero(all_hi > all_lo)
    if not bearing.shape[0]:
        return kept, drops, vocab
    b_bs = r_start[bearing]
    b_be = r_end[bearing]
    b_lo = all_lo[bearing]
    b_hi = all_hi[bearing]

    # One matcher pass over the concatenated in-block tokens.
    sel = np.concatenate(
        [np.arange(lo, hi, dtype=np.int64) for lo, hi in zip(b_lo, b_hi)]
    )
    folded = fold_codepoints(cp)
    ids = matcher.token_ids(folded, g_starts[sel], g_ends[sel])
    bounds = np.zeros(bearing.shape[0] + 1, dtype=np.int64)
    np.cumsum(b_hi - b_lo, out=bounds[1:])
    m_start, m_end, m_cat, m_ph = matcher.match_ids(ids, bounds)
    m_a = np.searchsorted(m_start, bounds[:-1], side="left")
    m_b = np.searchsorted(m_start, bounds[1:], side="left")
    ne_cum = np.zeros(m_ph.shape[0] + 1, dtype=np.int64)
    if m_ph.shape[0]:
        np.cumsum(~excluded[m_ph], out=ne_cum[1:])

    # Block ordinal k is the paragraph index: split_paragraphs numbers
    # every token-bearing block, kept or dropped downstream.
    for k in range(bearing.shape[0]):
        lo, hi = int(b_lo[k]), int(b_hi[k])
        a, b = int(m_a[k]), int(m_b[k])
        reason = drop_reason(hi - lo, int(ne_cum[b] - ne_cum[a]), policy)
        if reason is not None:
            drops[reason] += 1
            continue
        bs = int(b_bs[k])
        c_lo = int(bounds[k])
        starts = g_starts[lo:hi]
        ends = g_ends[lo:hi]
        kept.append(
            (
                paragraph_id(source_id, k),
                text[bs : int(b_be[k])],
                (starts - bs).astype(np.int32),
                (ends - bs).astype(np.int32),
                (m_start[a:b] - c_lo).astype(np.int32),
                (m_end[a:b] - c_lo).astype(np.int32),
                m_cat[a:b].copy(),
                m_ph[a:b].copy(),
            )
        )
        vocab.update(
            map(text.__getitem__, map(slice, starts.tolist(), ends.tolist()))
        )
    return kept, drops, vocab


def _scan_file(path: str) -> tuple[list, Counter, set, int]:
    ctx = _CTX
    works: list = []
    drops: Counter = Counter()
    vocab: set[str] = set()
    docs = 0
    for source_id, text in read_documents(path, ctx["config"].input_format):
        docs += 1
        kept, d, v = _scan_document(text, source_id, ctx)
        works.extend(kept)
        drops += d
        vocab |= v
    return works, drops, vocab, docs


def _mask_chunk(paras: list) -> list[tuple[int, str]]:
    """Serialize masked records for a chunk of surviving paragraphs.

    Vectorizes the channel draws across the whole chunk; decisions are
    identical to ``mask_paragraph`` on each paragraph alone.
    """
    from ._kernels.np_backend import mix64 as mix64_np

    ctx = _CTX
    policy: MaskPolicy = ctx["policy"]
    vocab: tuple[str, ...] = ctx["vocab"] or ()
    matcher = ctx["matcher"]
    lg_barred = ctx["lg_barred"]
    if not paras:
        return []

    n_para = len(paras)
    counts = np.array([p[2].shape[0] for p in paras], dtype=np.int64)
    tok_off = np.zeros(n_para + 1, dtype=np.int64)
    tok_off[1:] = np.cumsum(counts)
    n_tok = int(tok_off[-1])

    u64 = np.uint64
    pids = np.array([p[0] for p in paras], dtype=np.uint64)
    from .rng import SEED_SALT, mix64 as mix64_scalar

    h0 = u64(mix64_scalar((policy.seed & MASK64) ^ SEED_SALT))
    bases = mix64_np(h0 ^ pids)

    para_of = np.repeat(np.arange(n_para, dtype=np.int64), counts)
    base_tok = bases[para_of]
    pos_local = (np.arange(n_tok, dtype=np.int64) - tok_off[para_of]).astype(np.uint64)

    m_counts = np.array([p[4].shape[0] for p in paras], dtype=np.int64)
    m_off = np.zeros(n_para + 1, dtype=np.int64)
    m_off[1:] = np.cumsum(m_counts)
    n_match = int(m_off[-1])
    if n_match:
        ms_l = np.concatenate([p[4] for p in paras]).astype(np.int64)
        me_l = np.concatenate([p[5] for p in paras]).astype(np.int64)
        m_cat = np.concatenate([p[6] for p in paras])
        m_ph = np.concatenate([p[7] for p in paras])
        m_para = np.repeat(np.arange(n_para, dtype=np.int64), m_counts)
        ms_g = ms_l + tok_off[m_para]
        me_g = me_l + tok_off[m_para]
    else:
        ms_l = me_l = ms_g = me_g = m_para = np.zeros(0, dtype=np.int64)
        m_cat = np.zeros(0, dtype=np.int8)
        m_ph = np.zeros(0, dtype=np.int32)

    def chan(word_tag: int, base_arr, ks) -> np.ndarray:
        return mix64_np((base_arr ^ u64(word_tag << 56)) ^ ks)

    def thresh(u, p: float) -> np.ndarray:
        nonzero, bound = bernoulli_threshold(p)
        if not nonzero:
            return np.zeros(u.shape[0], dtype=bool)
        return u <= u64(bound)

    # Channel 1: indicator spans.
    if n_match:
        u_lg = chan(CH_LG, bases[m_para], ms_l.astype(np.uint64))
        sel_lg = thresh(u_lg, policy.p_lg)
        if lg_barred is not None:
            sel_lg &= ~lg_barred[m_ph]
    else:
        sel_lg = np.zeros(0, dtype=bool)

    def span_mask(starts, ends, shift: int = 0) -> np.ndarray:
        delta = np.zeros(n_tok + 1, dtype=np.int32)
        np.add.at(delta, starts + shift, 1)
        np.add.at(delta, ends, -1)
        return np.cumsum(delta[:-1]) > 0

    in_match = span_mask(ms_g, me_g) if n_match else np.zeros(n_tok, dtype=bool)
    sel_idx = np.flatnonzero(sel_lg)
    covered = (
        span_mask(ms_g[sel_idx], me_g[sel_idx])
        if sel_idx.shape[0]
        else np.zeros(n_tok, dtype=bool)
    )

    # Channel 2: logic-unrelated tokens.
    lui_mask = np.zeros(n_tok, dtype=bool)
    if policy.p_lui > 0.0:
        free = np.flatnonzero(~in_match)
        if free.shape[0]:
            u_lui = chan(CH_LUI, base_tok[free], pos_local[free])
            lui_mask[free[thresh(u_lui, policy.p_lui)]] = True

    # Channel 3: MLM.
    mlm_pos = np.zeros(0, dtype=np.int64)
    mlm_branch = np.zeros(0, dtype=np.int8)
    mlm_vidx = {}
    if policy.mlm_rate > 0.0:
        elig = np.flatnonzero(~covered & ~lui_mask)
        if elig.shape[0]:
            u_sel = chan(CH_MLM, base_tok[elig], pos_local[elig])
            mlm_pos = elig[thresh(u_sel, policy.mlm_rate)]
        if mlm_pos.shape[0]:
            u_br = chan(CH_MLM_BRANCH, base_tok[mlm_pos], pos_local[mlm_pos])
            b1 = thresh(u_br, policy.mlm_split[0])
            b2 = thresh(u_br, policy.mlm_split[0] + policy.mlm_split[1])
            mlm_branch = np.where(b1, 1, np.where(b2, 2, 3)).astype(np.int8)
            rnd = np.flatnonzero(mlm_branch == 2)
            if rnd.shape[0]:
                if not vocab:
                    raise EmissionError(
                        "random-replacement draw with an empty corpus vocabulary"
                    )
                u_r = chan(
                    CH_MLM_RANDOM, base_tok[mlm_pos[rnd]], pos_local[mlm_pos[rnd]]
                )
                vidx = (u_r % u64(len(vocab))).astype(np.int64)
                mlm_vidx = dict(zip(mlm_pos[rnd].tolist(), vidx.tolist()))

    # Final positions: tokens after a selected span's first slot vanish.
    collapse = (
        span_mask(ms_g[sel_idx], me_g[sel_idx], shift=1)
        if sel_idx.shape[0]
        else np.zeros(n_tok, dtype=bool)
    )
    pc = np.zeros(n_tok + 1, dtype=np.int64)
    np.cumsum(collapse, out=pc[1:])
    final_pos = pos_local.astype(np.int64) - (pc[:-1] - pc[tok_off[para_of]])

    lui_all = np.flatnonzero(lui_mask)
    out: list[tuple[int, str]] = []
    sp = lp = mp = 0  # cursors into sel_idx, lui_all, mlm_pos
    for i, para in enumerate(paras):
        pid, text, starts, ends = para[0], para[1], para[2], para[3]
        lo, hi = int(tok_off[i]), int(tok_off[i + 1])
        surfaces = list(
            map(text.__getitem__, map(slice, starts.tolist(), ends.tolist()))
        )
        tokens = surfaces[:]
        events: list[tuple[int, int, str, str]] = []  # final pos, code, prov, kind

        while lp < lui_all.shape[0] and lui_all[lp] < hi:
            g = int(lui_all[lp])
            t = g - lo
            tokens[t] = LGMASK
            events.append((int(final_pos[g]), 5, surfaces[t], "lcp"))
            lp += 1

        mlm_labels: list[tuple[int, str]] = []
        while mp < mlm_pos.shape[0] and mlm_pos[mp] < hi:
            g = int(mlm_pos[mp])
            t = g - lo
            br = int(mlm_branch[mp])
            if br == 1:
                tokens[t] = MASK
            elif br == 2:
                tokens[t] = vocab[mlm_vidx[g]]
            mlm_labels.append((int(final_pos[g]), surfaces[t]))
            mp += 1

        spans = []
        while sp < sel_idx.shape[0] and ms_g[sel_idx[sp]] < hi:
            j = int(sel_idx[sp])
            s, e = int(ms_l[j]), int(me_l[j])
            prov = text[int(starts[s]) : int(ends[e - 1])]
            events.append((int(final_pos[lo + s]), int(m_cat[j]), prov, "lcp"))
            spans.append((s, e))
            sp += 1
        for s, e in reversed(spans):
            tokens[s:e] = [LGMASK]

        events.sort()
        sample = MaskedSample(
            pid=pid,
            tokens=tokens,
            lcp=[(p, c) for p, c, _, _ in events],
            mlm=mlm_labels,
            prov=[(p, o) for p, _, o, _ in events],
        )
        out.append((pid, format_record(sample)))
    return out


def run_build(config: PipelineConfig) -> BuildSummary:
    """Execute a full corpus build; returns exact counts."""
    config = config.validated()
    t0 = time.monotonic()
    files = expand_inputs(config.inputs)
    summary = BuildSummary(output=config.output, files=len(files))

    def progress(msg: str) -> None:
        if not config.quiet:
            print(msg, file=sys.stderr, flush=True)

    works: list = []
    drops: Counter = Counter()
    vocab: set[str] = set()
    if config.workers == 1:
        _init_worker(config, None)
        scans = map(_scan_file, files)
    else:
        pool_a = ProcessPoolExecutor(
            max_workers=config.workers,
            initializer=_init_worker,
            initargs=(config, None),
        )
        scans = pool_a.map(_scan_file, files)
    for done, (w, d, v, dc) in enumerate(scans, start=1):
        works.extend(w)
        drops += d
        vocab |= v
        summary.documents += dc
        progress(f"scanned {done}/{len(files)} files ({len(works)} paragraphs kept)")
    if config.workers > 1:
        pool_a.shutdown()

    for reason in DROP_REASONS:
        summary.dropped[reason] = drops.get(reason, 0)
    summary.kept = len(works)
    vocab_t = tuple(sorted(vocab))
    summary.vocab_size = len(vocab_t)

    chunks = [
        works[i : i + _CHUNK_PARAGRAPHS]
        for i in range(0, len(works), _CHUNK_PARAGRAPHS)
    ]
    lines: list[tuple[int, str]] = []
    if chunks:
        if config.workers == 1:
            _init_worker(config, vocab_t)
            results = map(_mask_chunk, chunks)
        else:
            pool_b = ProcessPoolExecutor(
                max_workers=config.workers,
                initializer=_init_worker,
                initargs=(config, vocab_t),
            )
            results = pool_b.map(_mask_chunk, chunks)
        masked = 0
        reported = 0
        for part in results:
            lines.extend(part)
            masked += len(part)
            if masked - reported >= config.progress_every:
                reported = masked
                progress(f"masked {masked}/{len(works)} paragraphs")
        if config.workers > 1:
            pool_b.shutdown()

    lines.sort()
    written = 0
    try:
        with open(config.output, "w", encoding="utf-8", newline="\n") as fh:
            for _, line in lines:
                fh.write(line)
                fh.write("\n")
                written += 1
    except OSError as exc:
        raise EmissionError(
            f"failed writing {config.output} after {written} records: {exc}",
            written=written,
        ) from None

    summary.records = written
    summary.elapsed_seconds = time.monotonic() - t0
    progress(
        f"wrote {summary.records} records to {config.output} "
        f"in {summary.elapsed_seconds:.2f}s "
        f"(dropped: {summary.dropped})"
    )
    return summary


def load_config_file(path: str | Path) -> dict:
    """Flat key=value build configuration; '#' starts a comment."""
    known = {f.name for f in PipelineConfig.__dataclass_fields__.values()}
    out: dict = {}
    text = Path(path).read_text(encoding="utf-8")
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise PipelineConfigError(
                f"{path}:{lineno}: expected key = value, got {raw.strip()!r}"
            )
        key, value = (part.strip() for part in line.split("=", 1))
        key = key.replace("-", "_")
        if key not in known:
            raise PipelineConfigError(f"{path}:{lineno}: unknown key {key!r}")
        out[key] = value
    return out


def coerce_config_values(raw: dict) -> dict:
    """String config values to their typed forms."""
    out: dict = {}
    for key, value in raw.items():
        try:
            _coerce_one(out, key, value)
        except ValueError:
            raise PipelineConfigError(
                f"bad value for {key}: {value!r}"
            ) from None
    return out


def _coerce_one(out: dict, key: str, value) -> None:
    if key == "inputs":
        out[key] = tuple(part for part in value.split(",") if part)
    elif key in ("seed", "min_tokens", "min_indicators", "workers", "progress_every"):
        out[key] = int(value)
    elif key in ("min_density", "p_lg", "p_lui", "mlm_rate"):
        out[key] = float(value)
    elif key == "mlm_split":
        parts = [float(p) for p in value.split(",")]
        if len(parts) != 3:
            raise PipelineConfigError("mlm_split needs three comma-separated weights")
        out[key] = tuple(parts)
    elif key in ("no_mlm", "exclude_from_lgmask", "quiet"):
        low = value.strip().lower()
        if low not in ("true", "false", "1", "0", "yes", "no"):
            raise PipelineConfigError(f"{key} must be a boolean, got {value!r}")
        out[key] = low in ("true", "1", "yes")
    else:
        out[key] = value
