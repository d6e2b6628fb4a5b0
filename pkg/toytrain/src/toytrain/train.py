"""Train the tiny encoder on a records file and report both losses.

The category-prediction loss (``lcp``) is the mean cross-entropy over a
sample's ``[LGMASK]`` positions, averaged over samples (mask-free
samples contribute zero but count in the denominator) — the same
``batch-mean`` reduction the corpus toolkit's ``loss`` command offers,
which is how the two implementations are compared number-for-number.
The MLM loss is mean-per-token by default: one mean over every labelled
position in the evaluated set. ``mlm_loss_mode="sample-mean"`` switches
to per-sample means averaged over samples, mirroring the lcp shape; the
choice is reported so downstream numbers are interpretable.

The composite objective is ``mlm + lambda * (lcp - mlm)`` with exact
branches at lambda 0 and 1, so an endpoint run never routes gradient
through the switched-off head.
"""

from __future__ import annotations

import json
import math
import subprocess
import sys
import tempfile
import time
import warnings
from dataclasses import asdict, dataclass
from pathlib import Path

import torch
import torch.nn.functional as F

from .data import (
    EncodedSample,
    Sample,
    Vocab,
    build_vocab,
    encode,
    majority_baseline,
    read_dataset,
    split_dataset,
)
from .errors import ConfigError, DataError, OracleError, TrainingError
from .model import TinyEncoder

_ORDER_SALT = 0xDA7A07DE

AGREEMENT_RTOL = 1e-4


@dataclass(frozen=True)
class ToyModelConfig:
    """Everything one training run needs."""

    steps: int
    seed: int
    lambda_: float = 0.8
    hidden: int = 128
    layers: int = 2
    heads: int = 2
    seq_cap: int = 96
    batch_size: int = 32
    lr: float = 1e-3
    heldout_frac: float = 0.1
    mlm_loss_mode: str = "token-mean"
    loss_cli: tuple[str, ...] | None = None  # command prefix for the loss oracle

    def validated(self) -> "ToyModelConfig":
        if self.steps < 1:
            raise ConfigError(f"steps must be >= 1, got {self.steps}")
        if not 0.0 <= self.lambda_ <= 1.0:
            raise ConfigError(f"lambda must lie in [0, 1], got {self.lambda_}")
        for name in ("hidden", "layers", "heads", "seq_cap", "batch_size"):
            if getattr(self, name) < 1:
                raise ConfigError(f"{name} must be positive, got {getattr(self, name)}")
        if self.hidden % self.heads:
            raise ConfigError(
                f"hidden ({self.hidden}) must divide evenly by heads ({self.heads})"
            )
        if self.lr <= 0:
            raise ConfigError(f"learning rate must be positive, got {self.lr}")
        if not 0.0 <= self.heldout_frac < 1.0:
            raise ConfigError(
                f"heldout fraction must lie in [0, 1), got {self.heldout_frac}"
            )
        if self.mlm_loss_mode not in ("token-mean", "sample-mean"):
            raise ConfigError(
                f"mlm loss mode must be 'token-mean' or 'sample-mean', "
                f"got {self.mlm_loss_mode!r}"
            )
        return self


def composite(lcp: float, mlm: float, lambda_: float) -> float:
    """Weighted combination with exact endpoints."""
    if lambda_ == 0.0:
        return mlm
    if lambda_ == 1.0:
        return lcp
    return mlm + lambda_ * (lcp - mlm)


def _collate(batch: list[EncodedSample]) -> dict[str, torch.Tensor]:
    width = max(len(e.ids) for e in batch)
    ids = torch.zeros((len(batch), width), dtype=torch.long)
    pad = torch.ones((len(batch), width), dtype=torch.bool)
    lcp_row, lcp_pos, lcp_gold = [], [], []
    mlm_row, mlm_pos, mlm_gold = [], [], []
    for r, e in enumerate(batch):
        ids[r, : len(e.ids)] = torch.tensor(e.ids, dtype=torch.long)
        pad[r, : len(e.ids)] = False
        lcp_row.extend([r] * len(e.lcp_pos))
        lcp_pos.extend(e.lcp_pos)
        lcp_gold.extend(e.lcp_gold)
        mlm_row.extend([r] * len(e.mlm_pos))
        mlm_pos.extend(e.mlm_pos)
        mlm_gold.extend(e.mlm_gold)
    as_long = lambda v: torch.tensor(v, dtype=torch.long)  # noqa: E731
    return {
        "ids": ids,
        "pad": pad,
        "lcp_row": as_long(lcp_row),
        "lcp_pos": as_long(lcp_pos),
        "lcp_gold": as_long(lcp_gold),
        "mlm_row": as_long(mlm_row),
        "mlm_pos": as_long(mlm_pos),
        "mlm_gold": as_long(mlm_gold),
    }


def _sample_mean(ce: torch.Tensor, rows: torch.Tensor, n_rows: int) -> torch.Tensor:
    """Mean CE within each sample, then mean over all ``n_rows`` samples."""
    sums = torch.zeros(n_rows, dtype=ce.dtype).index_add_(0, rows, ce)
    cnts = torch.zeros(n_rows, dtype=ce.dtype).index_add_(
        0, rows, torch.ones_like(ce)
    )
    return (sums / cnts.clamp(min=1.0)).sum() / n_rows


def _batch_losses(
    model: TinyEncoder, batch: dict[str, torch.Tensor], mlm_mode: str
) -> tuple[torch.Tensor, torch.Tensor]:
    h = model(batch["ids"], batch["pad"])
    zero = h.sum() * 0.0  # graph-connected exact zero for empty label sets
    n_rows = batch["ids"].shape[0]
    if batch["lcp_gold"].numel():
        logits = model.lcp_head(h[batch["lcp_row"], batch["lcp_pos"]])
        ce = F.cross_entropy(logits, batch["lcp_gold"], reduction="none")
        lcp = _sample_mean(ce, batch["lcp_row"], n_rows)
    else:
        lcp = zero
    if batch["mlm_gold"].numel():
        logits = model.mlm_head(h[batch["mlm_row"], batch["mlm_pos"]])
        ce = F.cross_entropy(logits, batch["mlm_gold"], reduction="none")
        if mlm_mode == "token-mean":
            mlm = ce.mean()
        else:
            mlm = _sample_mean(ce, batch["mlm_row"], n_rows)
    else:
        mlm = zero
    return lcp, mlm


@dataclass
class EvalResult:
    lcp: float
    mlm: float
    per_sample: list[tuple[list[list[float]], list[int]]]  # (logits, gold) per sample


def evaluate(
    model: TinyEncoder,
    encoded: list[EncodedSample],
    mlm_mode: str = "token-mean",
    batch_size: int = 64,
) -> EvalResult:
    """Full-set losses in float64 plus per-sample category logits.

    The returned logits are exactly the float64 numbers the loss is
    computed from, so serializing them for the external evaluator
    reproduces the same value.
    """
    model.eval()
    per_sample: list[tuple[list[list[float]], list[int]]] = []
    sample_means: list[float] = []
    tok_sum = 0.0
    tok_cnt = 0
    mlm_sample_means: list[float] = []
    with torch.no_grad():
        for at in range(0, len(encoded), batch_size):
            chunk = encoded[at : at + batch_size]
            batch = _collate(chunk)
            h = model(batch["ids"], batch["pad"])
            lcp_logits = model.lcp_head(
                h[batch["lcp_row"], batch["lcp_pos"]]
            ).double()
            mlm_logits = model.mlm_head(
                h[batch["mlm_row"], batch["mlm_pos"]]
            ).double()
            lcp_ce = (
                F.cross_entropy(lcp_logits, batch["lcp_gold"], reduction="none")
                if batch["lcp_gold"].numel()
                else torch.zeros(0, dtype=torch.float64)
            )
            mlm_ce = (
                F.cross_entropy(mlm_logits, batch["mlm_gold"], reduction="none")
                if batch["mlm_gold"].numel()
                else torch.zeros(0, dtype=torch.float64)
            )
            tok_sum += float(mlm_ce.sum())
            tok_cnt += int(mlm_ce.numel())
            cursor = 0
            m_cursor = 0
            for r, e in enumerate(chunk):
                m = len(e.lcp_pos)
                rows = lcp_logits[cursor : cursor + m]
                per_sample.append(
                    ([list(map(float, row)) for row in rows], list(e.lcp_gold))
                )
                sample_means.append(
                    float(lcp_ce[cursor : cursor + m].mean()) if m else 0.0
                )
                cursor += m
                k = len(e.mlm_pos)
                mlm_sample_means.append(
                    float(mlm_ce[m_cursor : m_cursor + k].mean()) if k else 0.0
                )
                m_cursor += k
    n = len(encoded)
    lcp = math.fsum(sample_means) / n if n else 0.0
    if mlm_mode == "token-mean":
        mlm = tok_sum / tok_cnt if tok_cnt else 0.0
    else:
        mlm = math.fsum(mlm_sample_means) / n if n else 0.0
    return EvalResult(lcp=lcp, mlm=mlm, per_sample=per_sample)


def write_logit_file(
    per_sample: list[tuple[list[list[float]], list[int]]], path: str | Path
) -> int:
    """Serialize per-sample logits in the loss evaluator's input format."""
    with open(path, "w", encoding="utf-8") as fh:
        for logits, gold in per_sample:
            fh.write(json.dumps({"logits": logits, "gold": gold}) + "\n")
    return len(per_sample)


def export_logits(
    model: TinyEncoder, dataset_path: str | Path, output_path: str | Path
) -> int:
    """Run the model over a records file and write one logits line per
    sample, covering every ``[LGMASK]`` position. Returns the count."""
    samples = read_dataset(dataset_path)
    encoded = [encode(s, model.vocab, model.seq_cap) for s in samples]
    result = evaluate(model, encoded)
    return write_logit_file(result.per_sample, output_path)


def cli_loss(
    logit_path: str | Path,
    lambda_: float,
    mlm_loss: float,
    command: tuple[str, ...] | None = None,
) -> dict:
    """Score an exported logits file with the corpus toolkit's ``loss``
    command (batch-mean reduction, matching :func:`evaluate`)."""
    cmd = list(command or (sys.executable, "-m", "logicorpus.cli"))
    cmd += [
        "loss", str(logit_path),
        "--lambda", repr(float(lambda_)),
        "--mlm-loss", repr(float(mlm_loss)),
        "--reduction", "batch-mean",
    ]
    proc = subprocess.run(cmd, capture_output=True, text=True)
    if proc.returncode != 0:
        raise OracleError(
            f"loss evaluator exited {proc.returncode}: "
            f"{proc.stderr.strip() or proc.stdout.strip()}"
        )
    try:
        return json.loads(proc.stdout)
    except json.JSONDecodeError:
        raise OracleError(
            f"loss evaluator printed non-JSON: {proc.stdout!r}"
        ) from None


def _checked_against_cli(
    result: EvalResult, cfg: ToyModelConfig, workdir: Path, tag: str
) -> dict:
    path = workdir / f"logits-{tag}.jsonl"
    write_logit_file(result.per_sample, path)
    got = cli_loss(path, cfg.lambda_, result.mlm, command=cfg.loss_cli)
    rel = abs(got["lcp"] - result.lcp) / max(abs(got["lcp"]), abs(result.lcp), 1e-12)
    if rel > AGREEMENT_RTOL:
        raise OracleError(
            f"{tag} lcp disagreement: trainer {result.lcp!r} vs loss "
            f"evaluator {got['lcp']!r} (relative {rel:.3e})"
        )
    return {
        "lcp": result.lcp,
        "mlm": result.mlm,
        "idol": composite(result.lcp, result.mlm, cfg.lambda_),
        "cli_lcp": got["lcp"],
        "cli_idol": got["idol"],
        "lcp_rel_err": rel,
    }


def _accuracy(result: EvalResult) -> tuple[float | None, int]:
    hits = 0
    total = 0
    for logits, gold in result.per_sample:
        for row, g in zip(logits, gold):
            if max(range(len(row)), key=row.__getitem__) == g:
                hits += 1
            total += 1
    return (hits / total if total else None), total


def train(
    dataset_path: str | Path,
    config: ToyModelConfig,
    step_callback=None,
) -> dict:
    """Train for the step budget and return the full JSON-ready report.

    ``step_callback(step, model, losses)`` — if given — runs after each
    backward pass, before the optimizer step.
    """
    cfg = config.validated()
    t0 = time.perf_counter()
    samples = read_dataset(dataset_path)
    if not samples:
        raise DataError("dataset has no records")
    if len(samples) < 500:
        warnings.warn(
            f"dataset has {len(samples)} records; results below the "
            f"supported minimum of 500 may be noisy",
            stacklevel=2,
        )
    train_s, held_s = split_dataset(samples, cfg.heldout_frac, cfg.seed)
    if not train_s:
        raise DataError("train split is empty")
    vocab = build_vocab(samples)
    torch.manual_seed(cfg.seed)
    model = TinyEncoder(vocab, cfg.hidden, cfg.layers, cfg.heads, cfg.seq_cap)
    enc_all = [encode(s, vocab, cfg.seq_cap) for s in samples]
    enc_train = [encode(s, vocab, cfg.seq_cap) for s in train_s]
    enc_held = [encode(s, vocab, cfg.seq_cap) for s in held_s]
    maj_code, maj_freq = majority_baseline(samples)

    opt = torch.optim.Adam(model.parameters(), lr=cfg.lr)
    order_gen = torch.Generator().manual_seed(cfg.seed ^ _ORDER_SALT)

    with tempfile.TemporaryDirectory(prefix="toytrain-") as tmp:
        workdir = Path(tmp)
        initial = _checked_against_cli(
            evaluate(model, enc_all, cfg.mlm_loss_mode), cfg, workdir, "initial"
        )
        held_initial = evaluate(model, enc_held, cfg.mlm_loss_mode)
        acc_initial, held_masks = _accuracy(held_initial)

        curves: dict[str, list[float]] = {"lcp": [], "mlm": [], "idol": []}
        order: list[int] = []
        model.train()
        for step in range(cfg.steps):
            if len(order) < cfg.batch_size:
                order += torch.randperm(
                    len(enc_train), generator=order_gen
                ).tolist()
            picks, order = order[: cfg.batch_size], order[cfg.batch_size :]
            batch = _collate([enc_train[i] for i in picks])
            lcp_t, mlm_t = _batch_losses(model, batch, cfg.mlm_loss_mode)
            if cfg.lambda_ == 0.0:
                total = mlm_t
            elif cfg.lambda_ == 1.0:
                total = lcp_t
            else:
                total = mlm_t + cfg.lambda_ * (lcp_t - mlm_t)
            lcp_v, mlm_v = float(lcp_t.detach()), float(mlm_t.detach())
            if not (math.isfinite(lcp_v) and math.isfinite(mlm_v)):
                raise TrainingError(
                    f"training diverged: non-finite loss at step {step}",
                    step=step,
                )
            curves["lcp"].append(lcp_v)
            curves["mlm"].append(mlm_v)
            curves["idol"].append(composite(lcp_v, mlm_v, cfg.lambda_))
            opt.zero_grad(set_to_none=True)
            total.backward()
            if step_callback is not None:
                step_callback(step, model, {"lcp": lcp_v, "mlm": mlm_v})
            opt.step()
            model.train()

        final = _checked_against_cli(
            evaluate(model, enc_all, cfg.mlm_loss_mode), cfg, workdir, "final"
        )
        held_final = evaluate(model, enc_held, cfg.mlm_loss_mode)
        acc_final, _ = _accuracy(held_final)

    report = {
        "config": {k: v for k, v in asdict(cfg).items() if k != "loss_cli"},
        "dataset": {
            "path": str(dataset_path),
            "records": len(samples),
            "train": len(train_s),
            "heldout": len(held_s),
            "vocab_size": len(vocab),
            "majority_category": maj_code,
            "majority_frequency": maj_freq,
        },
        "initial": initial,
        "final": final,
        "curves": curves,
        "heldout": {
            "masks": held_masks,
            "initial_accuracy": acc_initial,
            "final_accuracy": acc_final,
        },
        "elapsed_seconds": time.perf_counter() - t0,
    }
    return report
