"""Load masked-corpus records and prepare them for the model.

The input is the corpus builder's record format: one JSON object per
line with ``tokens`` (final token strings), ``lcp`` ([position,
category-code] pairs for every ``[LGMASK]``), ``mlm`` ([position,
original-token] pairs for MLM-corrupted positions), plus ``pid`` and
``prov`` which training does not consume. This module never imports the
builder — the record file format is the whole contract.
"""

from __future__ import annotations

import json
import random
from dataclasses import dataclass
from pathlib import Path

from .errors import DataError

PAD_TOKEN = "[PAD]"
MASK_TOKEN = "[MASK]"
LGMASK_TOKEN = "[LGMASK]"
N_CATEGORIES = 6

_SPLIT_SALT = 0x5EED5EED


@dataclass(frozen=True)
class Sample:
    """One record: final tokens plus the two label streams."""

    pid: int
    tokens: tuple[str, ...]
    lcp: tuple[tuple[int, int], ...]  # (position, category code)
    mlm: tuple[tuple[int, str], ...]  # (position, original token)


@dataclass(frozen=True)
class Vocab:
    """Token-string <-> id table with fixed reserved entries.

    ``[PAD]``=0, ``[MASK]``=1 and ``[LGMASK]``=2 are always present and
    distinct; the remaining ids cover the dataset's surface forms and
    MLM original tokens in sorted order.
    """

    tokens: tuple[str, ...]
    index: dict[str, int]

    def __len__(self) -> int:
        return len(self.tokens)

    def id_of(self, token: str) -> int:
        try:
            return self.index[token]
        except KeyError:
            raise DataError(
                f"vocabulary mismatch: token {token!r} not in the model vocabulary"
            ) from None


@dataclass(frozen=True)
class EncodedSample:
    """Integer view of a sample, truncated to the sequence cap."""

    ids: tuple[int, ...]
    lcp_pos: tuple[int, ...]
    lcp_gold: tuple[int, ...]
    mlm_pos: tuple[int, ...]
    mlm_gold: tuple[int, ...]


def _label_pairs(obj, key: str, lineno: int) -> list:
    val = obj.get(key, [])
    if not isinstance(val, list):
        raise DataError(f"line {lineno}: {key!r} must be a list")
    out = []
    for item in val:
        if not isinstance(item, list) or len(item) != 2:
            raise DataError(f"line {lineno}: {key!r} entries must be [position, value] pairs")
        out.append(item)
    return out


def read_dataset(path: str | Path) -> list[Sample]:
    """Parse a records file, validating label positions against the tokens.

    Every ``lcp`` position must hold the ``[LGMASK]`` token and carry a
    category code in [0, 6); every label position must be in range.
    """
    samples: list[Sample] = []
    with open(path, "r", encoding="utf-8") as fh:
        for lineno, raw in enumerate(fh, start=1):
            raw = raw.strip()
            if not raw:
                continue
            try:
                obj = json.loads(raw)
            except json.JSONDecodeError as exc:
                raise DataError(f"line {lineno}: invalid JSON ({exc.msg})") from None
            if not isinstance(obj, dict) or "tokens" not in obj:
                raise DataError(f"line {lineno}: record lacks field 'tokens'")
            tokens = obj["tokens"]
            if not isinstance(tokens, list) or not all(isinstance(t, str) for t in tokens):
                raise DataError(f"line {lineno}: 'tokens' must be a list of strings")
            n = len(tokens)
            lcp: list[tuple[int, int]] = []
            for pos, code in _label_pairs(obj, "lcp", lineno):
                if not isinstance(pos, int) or not 0 <= pos < n:
                    raise DataError(
                        f"line {lineno}: lcp position {pos!r} outside {n} tokens"
                    )
                if tokens[pos] != LGMASK_TOKEN:
                    raise DataError(
                        f"line {lineno}: lcp position {pos} holds {tokens[pos]!r}, "
                        f"not {LGMASK_TOKEN!r}"
                    )
                if not isinstance(code, int) or not 0 <= code < N_CATEGORIES:
                    raise DataError(
                        f"line {lineno}: category code {code!r} outside [0, {N_CATEGORIES})"
                    )
                lcp.append((pos, code))
            mlm: list[tuple[int, str]] = []
            for pos, orig in _label_pairs(obj, "mlm", lineno):
                if not isinstance(pos, int) or not 0 <= pos < n:
                    raise DataError(
                        f"line {lineno}: mlm position {pos!r} outside {n} tokens"
                    )
                if not isinstance(orig, str):
                    raise DataError(f"line {lineno}: mlm original {orig!r} is not a string")
                mlm.append((pos, orig))
            samples.append(
                Sample(
                    pid=int(obj.get("pid", 0)),
                    tokens=tuple(tokens),
                    lcp=tuple(lcp),
                    mlm=tuple(mlm),
                )
            )
    return samples


def build_vocab(samples: list[Sample]) -> Vocab:
    """Vocabulary over every surface form and MLM original in the dataset."""
    seen: set[str] = set()
    for s in samples:
        seen.update(s.tokens)
        seen.update(orig for _, orig in s.mlm)
    seen.discard(PAD_TOKEN)
    seen.discard(MASK_TOKEN)
    seen.discard(LGMASK_TOKEN)
    tokens = (PAD_TOKEN, MASK_TOKEN, LGMASK_TOKEN, *sorted(seen))
    return Vocab(tokens=tokens, index={t: i for i, t in enumerate(tokens)})


def encode(sample: Sample, vocab: Vocab, seq_cap: int) -> EncodedSample:
    """Map to ids, truncating to ``seq_cap`` (labels beyond the cap drop)."""
    ids = tuple(vocab.id_of(t) for t in sample.tokens[:seq_cap])
    lcp = [(p, g) for p, g in sample.lcp if p < seq_cap]
    mlm = [(p, vocab.id_of(o)) for p, o in sample.mlm if p < seq_cap]
    return EncodedSample(
        ids=ids,
        lcp_pos=tuple(p for p, _ in lcp),
        lcp_gold=tuple(g for _, g in lcp),
        mlm_pos=tuple(p for p, _ in mlm),
        mlm_gold=tuple(g for _, g in mlm),
    )


def split_dataset(
    samples: list[Sample], heldout_frac: float, seed: int
) -> tuple[list[Sample], list[Sample]]:
    """Deterministic train/held-out split (held-out gets the rounded share)."""
    if not 0.0 <= heldout_frac < 1.0:
        raise DataError(f"heldout fraction must lie in [0, 1), got {heldout_frac}")
    order = list(range(len(samples)))
    random.Random(seed ^ _SPLIT_SALT).shuffle(order)
    k = int(round(len(samples) * heldout_frac))
    held = sorted(order[:k])
    kept = sorted(order[k:])
    return [samples[i] for i in kept], [samples[i] for i in held]


def majority_baseline(samples: list[Sample]) -> tuple[int, float]:
    """Most frequent category code and its share of all ``lcp`` labels."""
    counts = [0] * N_CATEGORIES
    total = 0
    for s in samples:
        for _, code in s.lcp:
            counts[code] += 1
            total += 1
    if total == 0:
        raise DataError("no lcp labels in the dataset; majority baseline undefined")
    best = max(range(N_CATEGORIES), key=counts.__getitem__)
    return best, counts[best] / total
