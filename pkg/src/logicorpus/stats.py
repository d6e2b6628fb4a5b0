"""Corpus reports over emitted record files.

For every record the original token sequence is reconstructed exactly —
``[LGMASK]`` positions expand to their provenance surfaces, MLM positions
restore their recorded originals — and re-matched against the lexicon. That
yields true pre-mask indicator occurrences, which in turn give empirical
masking-rate estimates:

- indicator channel: category-labeled ``[LGMASK]`` count over pre-mask
  indicator occurrences;
- logic-unrelated channel: LUI-labeled count over pre-mask non-indicator
  tokens;
- MLM channel: MLM-label count over final non-``[LGMASK]`` positions.

Rates carry Wilson 95% intervals. Accumulators merge associatively, so a
map-reduce over file shards equals the sequential scan exactly. A malformed
record aborts the whole scan with its line number — partially valid files
are rejected, never partially counted.
"""

from __future__ import annotations

import math
from collections import Counter
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .lexicon import LEXICON_CATEGORIES, IndicatorCategory, IndicatorLexicon, builtin_lexicon
from .masker import LGMASK, MaskedSample, read_records
from .tokenizer import codepoints, fold_codepoints, tokenize_codepoints

_CATEGORY_NAMES = tuple(c.name for c in IndicatorCategory)


def wilson_interval(k: int, n: int, z: float = 1.959963984540054) -> tuple[float, float]:
    """Wilson score 95% interval for k successes in n trials."""
    if n == 0:
        return (0.0, 1.0)
    p = k / n
    z2 = z * z
    denom = 1.0 + z2 / n
    center = p + z2 / (2 * n)
    half = z * math.sqrt(p * (1.0 - p) / n + z2 / (4 * n * n))
    return ((center - half) / denom, (center + half) / denom)


@dataclass
class CorpusReport:
    """Aggregate view of one dataset file (or a merge of shards)."""

    samples: int
    tokens_original: int
    tokens_final: int
    lgmask_by_category: dict[str, int]
    indicators_by_category: dict[str, int]
    rates: dict[str, dict]
    density_bucket: float
    density_histogram: list[tuple[float, int]]

    @property
    def lgmask_total(self) -> int:
        return sum(self.lgmask_by_category.values())

    @property
    def indicators_total(self) -> int:
        return sum(self.indicators_by_category.values())

    def to_dict(self) -> dict:
        return {
            "samples": self.samples,
            "tokens": {
                "original": self.tokens_original,
                "final": self.tokens_final,
            },
            "lgmask": {
                "total": self.lgmask_total,
                "by_category": dict(self.lgmask_by_category),
            },
            "indicators_before_masking": {
                "total": self.indicators_total,
                "by_category": dict(self.indicators_by_category),
            },
            "masking_rates": self.rates,
            "density": {
                "bucket_width": self.density_bucket,
                "histogram": [[b, c] for b, c in self.density_histogram],
            },
        }


class StatsAccumulator:
    """Streaming, mergeable collector behind ``report``."""

    def __init__(self, lexicon: IndicatorLexicon | None = None, hist_bucket: float = 1.0):
        if hist_bucket <= 0:
            raise ValueError("hist_bucket must be positive")
        self.lexicon = lexicon if lexicon is not None else builtin_lexicon()
        self.hist_bucket = float(hist_bucket)
        self.samples = 0
        self.tokens_original = 0
        self.tokens_final = 0
        self.lgmask = Counter()  # category name -> count
        self.indicators = Counter()  # category name -> pre-mask count
        self.lg_events = 0
        self.lg_trials = 0
        self.lui_events = 0
        self.lui_trials = 0
        self.mlm_events = 0
        self.mlm_trials = 0
        self.histogram = Counter()  # bucket start -> count

    def add(self, sample: MaskedSample) -> None:
        matcher = self.lexicon.compiled()
        prov = dict(sample.prov)
        mlm = dict(sample.mlm)
        original: list[str] = []
        for i, tok in enumerate(sample.tokens):
            if tok == LGMASK:
                original.extend(_split_tokens(prov[i], matcher.backend))
            elif i in mlm:
                original.append(mlm[i])
            else:
                original.append(tok)

        text = " ".join(original)
        cp = codepoints(text)
        starts, ends = tokenize_codepoints(cp, backend=matcher.backend)
        ids = matcher.token_ids(fold_codepoints(cp), starts, ends)
        bounds = np.array([0, ids.shape[0]], dtype=np.int64)
        m_start, m_end, m_cat, _ = matcher.match_ids(ids, bounds)

        n_orig = ids.shape[0]
        n_final = len(sample.tokens)
        matched_tokens = int((m_end - m_start).sum()) if m_start.shape[0] else 0

        self.samples += 1
        self.tokens_original += n_orig
        self.tokens_final += n_final
        n_lgmask = len(sample.lcp)
        for _, code in sample.lcp:
            name = IndicatorCategory(code).name
            self.lgmask[name] += 1
            if code == IndicatorCategory.LUI:
                self.lui_events += 1
            else:
                self.lg_events += 1
        n_matches = m_start.shape[0]
        for c in m_cat.tolist():
            self.indicators[IndicatorCategory(c).name] += 1
        self.lg_trials += n_matches
        self.lui_trials += n_orig - matched_tokens
        self.mlm_events += len(sample.mlm)
        self.mlm_trials += n_final - n_lgmask

        if n_orig > 0:
            density = 100.0 * n_matches / n_orig
            bucket = math.floor(density / self.hist_bucket) * self.hist_bucket
            self.histogram[bucket] += 1

    def merge(self, other: "StatsAccumulator") -> "StatsAccumulator":
        if other.hist_bucket != self.hist_bucket:
            raise ValueError("cannot merge accumulators with different buckets")
        self.samples += other.samples
        self.tokens_original += other.tokens_original
        self.tokens_final += other.tokens_final
        self.lgmask += other.lgmask
        self.indicators += other.indicators
        self.lg_events += other.lg_events
        self.lg_trials += other.lg_trials
        self.lui_events += other.lui_events
        self.lui_trials += other.lui_trials
        self.mlm_events += other.mlm_events
        self.mlm_trials += other.mlm_trials
        self.histogram += other.histogram
        return self

    def _rate(self, events: int, trials: int) -> dict:
        lo, hi = wilson_interval(events, trials)
        return {
            "events": events,
            "trials": trials,
            "estimate": (events / trials) if trials else None,
            "ci95": [lo, hi],
        }

    def report(self) -> CorpusReport:
        return CorpusReport(
            samples=self.samples,
            tokens_original=self.tokens_original,
            tokens_final=self.tokens_final,
            lgmask_by_category={n: self.lgmask.get(n, 0) for n in _CATEGORY_NAMES},
            indicators_by_category={
                c.name: self.indicators.get(c.name, 0) for c in LEXICON_CATEGORIES
            },
            rates={
                "lg": self._rate(self.lg_events, self.lg_trials),
                "lui": self._rate(self.lui_events, self.lui_trials),
                "mlm": self._rate(self.mlm_events, self.mlm_trials),
            },
            density_bucket=self.hist_bucket,
            density_histogram=sorted(self.histogram.items()),
        )


def _split_tokens(surface: str, backend) -> list[str]:
    cp = codepoints(surface)
    starts, ends = tokenize_codepoints(cp, backend=backend)
    return [surface[s:e] for s, e in zip(starts.tolist(), ends.tolist())]


def report(
    path: str | Path,
    lexicon: IndicatorLexicon | None = None,
    hist_bucket: float = 1.0,
) -> CorpusReport:
    """Scan one emitted dataset file into a CorpusReport."""
    acc = StatsAccumulator(lexicon=lexicon, hist_bucket=hist_bucket)
    for sample in read_records(path):
        acc.add(sample)
    return acc.report()
