"""Category-prediction loss and the λ-weighted composite, as pure numerics.

The category loss sums, over samples, the per-sample *mean* cross-entropy of
the six-way predictions at masked-indicator positions; a sample with no
masked positions contributes exactly zero. The composite interpolates the
category loss with an externally supplied MLM loss by weight λ.

Numerical contract (these are tested, not aspirational):

- cross-entropy uses the max-shifted log-sum-exp form, so it is finite for
  any finite logits and exactly non-negative;
- sums across masks and samples use compensated summation (``math.fsum``),
  so permuting samples cannot change the result and duplicating a sample
  exactly doubles its contribution;
- the composite hits its λ=0 and λ=1 endpoints exactly and never leaves the
  closed interval between its two operands.

Everything here is a pure function: any trainer can use this module as the
forward-value oracle its own loss is checked against.
"""

from __future__ import annotations

import json
import math
import warnings
from dataclasses import dataclass
from pathlib import Path
from typing import Iterable, Sequence

import numpy as np

from .errors import LossConfigError, NumericInputError

N_CATEGORIES = 6

REDUCTIONS = ("paper-sum", "batch-mean")


@dataclass(frozen=True)
class LossConfig:
    """λ weight and reduction mode."""

    lambda_: float = 0.8
    reduction: str = "paper-sum"

    def __post_init__(self) -> None:
        if not (
            isinstance(self.lambda_, (int, float))
            and math.isfinite(self.lambda_)
            and 0.0 <= self.lambda_ <= 1.0
        ):
            raise LossConfigError(f"lambda must lie in [0, 1], got {self.lambda_!r}")
        if self.reduction not in REDUCTIONS:
            raise LossConfigError(
                f"reduction must be one of {REDUCTIONS}, got {self.reduction!r}"
            )


@dataclass
class LcpBatch:
    """Per-sample logit matrices and gold codes for masked positions.

    ``samples[i]`` is a pair of a float64 ``(m_i, 6)`` logit matrix and an
    int64 ``(m_i,)`` gold-code vector; ``m_i`` may be zero.
    """

    samples: list[tuple[np.ndarray, np.ndarray]]

    @classmethod
    def from_lists(
        cls, items: Iterable[tuple[Sequence[Sequence[float]], Sequence[int]]]
    ) -> "LcpBatch":
        samples = []
        for i, (logits, gold) in enumerate(items):
            z = np.asarray(logits, dtype=np.float64)
            g = np.asarray(gold, dtype=np.int64)
            if z.size == 0:
                z = z.reshape(0, N_CATEGORIES)
            if z.ndim != 2 or z.shape[1] != N_CATEGORIES:
                raise NumericInputError(
                    f"sample {i}: each logit vector must have exactly "
                    f"{N_CATEGORIES} entries"
                )
            if g.ndim != 1 or g.shape[0] != z.shape[0]:
                raise NumericInputError(
                    f"sample {i}: {z.shape[0]} logit vectors but {g.shape[0]} golds"
                )
            if not np.isfinite(z).all():
                raise NumericInputError(f"sample {i}: non-finite logit")
            if g.size and (g.min() < 0 or g.max() >= N_CATEGORIES):
                raise NumericInputError(
                    f"sample {i}: gold codes must lie in 0..{N_CATEGORIES - 1}"
                )
            samples.append((z, g))
        return cls(samples)

    def __len__(self) -> int:
        return len(self.samples)


def cross_entropy(logits: Sequence[float], gold: int) -> float:
    """−log softmax(logits)[gold], max-shifted; exactly ≥ 0."""
    z = [float(v) for v in logits]
    if len(z) != N_CATEGORIES:
        raise NumericInputError(
            f"logit vector must have exactly {N_CATEGORIES} entries"
        )
    if not all(math.isfinite(v) for v in z):
        raise NumericInputError("non-finite logit")
    if not 0 <= gold < N_CATEGORIES:
        raise NumericInputError(f"gold code {gold} outside 0..{N_CATEGORIES - 1}")
    top = max(z)
    s = math.fsum(math.exp(v - top) for v in z)
    return (top - z[gold]) + math.log(s)


def lcp_loss(batch: LcpBatch, config: LossConfig | None = None) -> float:
    """Sum over samples of the mean cross-entropy at masked positions.

    ``batch-mean`` reduction divides the sum by the sample count (counting
    mask-free samples). An empty batch returns 0.0 and warns.
    """
    if config is None:
        config = LossConfig()
    if not batch.samples:
        warnings.warn("lcp_loss over an empty batch", stacklevel=2)
        return 0.0
    per_sample = []
    for z, g in batch.samples:
        m = z.shape[0]
        if m == 0:
            per_sample.append(0.0)
            continue
        ces = [cross_entropy(z[j], int(g[j])) for j in range(m)]
        per_sample.append(math.fsum(ces) / m)
    total = math.fsum(per_sample)
    if config.reduction == "batch-mean":
        total /= len(batch.samples)
    return total


def idol_loss(lcp: float, mlm: float, config: LossConfig | None = None) -> float:
    """λ·lcp + (1−λ)·mlm with exact endpoints and exact convex bounds."""
    if config is None:
        config = LossConfig()
    for name, v in (("lcp", lcp), ("mlm", mlm)):
        if not (isinstance(v, (int, float)) and math.isfinite(v) and v >= 0):
            raise NumericInputError(f"{name} loss must be finite and >= 0, got {v!r}")
    lam = config.lambda_
    if lam == 0.0:
        return float(mlm)
    if lam == 1.0:
        return float(lcp)
    # One-product form: stays inside [min(lcp, mlm), max(lcp, mlm)] in
    # floating point, which the naive two-product form does not guarantee.
    return mlm + lam * (lcp - mlm)


def read_logit_file(path: str | Path) -> LcpBatch:
    """Parse the loss CLI input: one JSON object per line with ``logits``
    (list of 6-float vectors) and ``gold`` (list of codes)."""
    items = []
    with open(path, "r", encoding="utf-8") as fh:
        for lineno, raw in enumerate(fh, start=1):
            raw = raw.strip()
            if not raw:
                continue
            try:
                obj = json.loads(raw)
            except json.JSONDecodeError as exc:
                raise NumericInputError(f"line {lineno}: invalid JSON ({exc.msg})") from None
            if not isinstance(obj, dict) or "logits" not in obj or "gold" not in obj:
                raise NumericInputError(
                    f"line {lineno}: record must carry 'logits' and 'gold'"
                )
            items.append((obj["logits"], obj["gold"]))
    try:
        return LcpBatch.from_lists(items)
    except NumericInputError as exc:
        raise NumericInputError(f"{path}: {exc}") from None
