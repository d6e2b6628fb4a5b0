"""Command-line entry: train on a records file, write a JSON report."""

from __future__ import annotations

import argparse
import json
import sys

from .errors import ToytrainError
from .train import ToyModelConfig, train


def _build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(
        prog="toytrain",
        description="Train a tiny two-headed encoder on masked-corpus records.",
    )
    p.add_argument("--data", required=True, help="records file to train on")
    p.add_argument("--lambda", dest="lambda_", type=float, default=0.8,
                   help="category-loss weight in [0, 1]")
    p.add_argument("--steps", type=int, required=True, help="optimizer steps")
    p.add_argument("--seed", type=int, required=True, help="run seed")
    p.add_argument("--report", required=True, help="path for the JSON report")
    p.add_argument("--hidden", type=int, default=128)
    p.add_argument("--layers", type=int, default=2)
    p.add_argument("--heads", type=int, default=2)
    p.add_argument("--seq-cap", type=int, default=96)
    p.add_argument("--batch-size", type=int, default=32)
    p.add_argument("--lr", type=float, default=1e-3)
    p.add_argument("--heldout", type=float, default=0.1,
                   help="held-out fraction for the accuracy check")
    p.add_argument("--mlm-loss-mode", choices=("token-mean", "sample-mean"),
                   default="token-mean",
                   help="MLM reduction: one mean over every labelled token "
                        "(default), or per-sample means averaged over samples")
    return p


def main(argv=None) -> int:
    args = _build_parser().parse_args(argv)
    config = ToyModelConfig(
        steps=args.steps,
        seed=args.seed,
        lambda_=args.lambda_,
        hidden=args.hidden,
        layers=args.layers,
        heads=args.heads,
        seq_cap=args.seq_cap,
        batch_size=args.batch_size,
        lr=args.lr,
        heldout_frac=args.heldout,
        mlm_loss_mode=args.mlm_loss_mode,
    )
    try:
        report = train(args.data, config)
        with open(args.report, "w", encoding="utf-8") as fh:
            json.dump(report, fh, indent=2)
            fh.write("\n")
    except ToytrainError as exc:
        print(exc.tagged(), file=sys.stderr)
        return 1
    except OSError as exc:
        print(f"error[toytrain]: {exc}", file=sys.stderr)
        return 1
    print(json.dumps({
        "steps": config.steps,
        "initial_lcp": report["initial"]["lcp"],
        "final_lcp": report["final"]["lcp"],
        "final_idol": report["final"]["idol"],
        "heldout_accuracy": report["heldout"]["final_accuracy"],
        "report": args.report,
    }))
    return 0


if __name__ == "__main__":
    sys.exit(main())
