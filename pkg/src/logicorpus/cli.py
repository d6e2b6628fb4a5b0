"""Command-line entry point: build, stats, ablate, loss, lexicon.

Configuration precedence for ``build`` is total and fixed: dataclass
defaults, then ``--config`` file values, then the ``LOGICORPUS_WORKERS``
environment variable, then explicit flags. Every failure path exits 1 with a
single ``error[<module>]: ...`` line on stderr; usage errors exit 2.
"""

from __future__ import annotations

import argparse
import json
import os
import sys

from . import ablate as ablate_mod
from . import stats as stats_mod
from .errors import LogicorpusError, PipelineConfigError
from .lexicon import builtin_lexicon, load_lexicon
from .loss import LossConfig, idol_loss, lcp_loss, read_logit_file
from .pipeline import (
    WORKERS_ENV,
    PipelineConfig,
    coerce_config_values,
    load_config_file,
    run_build,
)

PROG = "logicorpus"


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog=PROG,
        description="Build and inspect logically-dense masked pre-training corpora.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    b = sub.add_parser("build", help="construct a masked corpus from text inputs")
    b.add_argument("inputs", nargs="*", help="input files or directories")
    b.add_argument("-o", "--output", help="output records file")
    b.add_argument("--config", help="flat key=value configuration file")
    b.add_argument("--seed", type=int, help="64-bit dataset seed (required)")
    b.add_argument("--lexicon", help="lexicon file path or 'builtin'")
    b.add_argument(
        "--input-format", choices=("plain", "jsonl"), help="force input parsing"
    )
    b.add_argument("--min-tokens", type=int, help="drop paragraphs shorter than this")
    b.add_argument(
        "--min-indicators", type=int, help="drop paragraphs with fewer non-excluded matches"
    )
    b.add_argument(
        "--min-density", type=float, help="drop paragraphs below this matches-per-100-tokens"
    )
    b.add_argument("--p-lg", type=float, help="indicator masking probability")
    b.add_argument("--p-lui", type=float, help="logic-unrelated masking probability")
    b.add_argument("--mlm-rate", type=float, help="MLM selection rate")
    b.add_argument("--mlm-split", help="mask,random,keep weights, e.g. 0.8,0.1,0.1")
    b.add_argument(
        "--no-mlm", action="store_const", const=True, help="disable MLM masking entirely"
    )
    b.add_argument(
        "--exclude-from-lgmask",
        action="store_const",
        const=True,
        help="also bar filter-excluded phrases from indicator masking",
    )
    b.add_argument("--workers", type=int, help="worker process count")
    b.add_argument("--progress-every", type=int, help="progress line interval")
    b.add_argument(
        "-q", "--quiet", action="store_const", const=True, help="suppress progress"
    )

    s = sub.add_parser("stats", help="report counts and rates over a records file")
    s.add_argument("dataset", help="emitted records file")
    s.add_argument("--lexicon", default="builtin", help="lexicon file path or 'builtin'")
    s.add_argument(
        "--hist-bucket", type=float, default=1.0, help="density histogram bucket width"
    )

    a = sub.add_parser("ablate", help="remove indicator categories from record texts")
    a.add_argument("-i", "--input", required=True, help="line-delimited JSON records")
    a.add_argument("-o", "--output", default="-", help="output path ('-' = stdout)")
    a.add_argument(
        "--remove", required=True, help="categories: e.g. pmi,cli | nti | ati | cni | all"
    )
    a.add_argument("--mode", choices=ablate_mod.MODES, default="delete")
    a.add_argument("--text-field", default="text", help="record field holding the text")
    a.add_argument("--lexicon", default="builtin", help="lexicon file path or 'builtin'")

    lo = sub.add_parser("loss", help="evaluate losses over an exported logits file")
    lo.add_argument("logits", help="line-delimited {logits, gold} file")
    lo.add_argument(
        "--lambda", dest="lambda_", type=float, default=0.8, help="composite weight"
    )
    lo.add_argument(
        "--mlm-loss", type=float, default=0.0, help="externally computed MLM loss"
    )
    lo.add_argument("--reduction", choices=("paper-sum", "batch-mean"), default="paper-sum")

    lx = sub.add_parser("lexicon", help="lexicon utilities")
    lx.add_argument("action", choices=("dump",), help="dump: print the builtin lexicon")

    return parser


def _cmd_build(args) -> int:
    values: dict = {}
    if args.config:
        values.update(coerce_config_values(load_config_file(args.config)))
    env_workers = os.environ.get(WORKERS_ENV)
    if env_workers:
        try:
            values["workers"] = int(env_workers)
        except ValueError:
            raise PipelineConfigError(
                f"{WORKERS_ENV} must be an integer, got {env_workers!r}"
            ) from None
    flag_map = {
        "output": args.output,
        "seed": args.seed,
        "lexicon": args.lexicon,
        "input_format": args.input_format,
        "min_tokens": args.min_tokens,
        "min_indicators": args.min_indicators,
        "min_density": args.min_density,
        "p_lg": args.p_lg,
        "p_lui": args.p_lui,
        "mlm_rate": args.mlm_rate,
        "no_mlm": args.no_mlm,
        "exclude_from_lgmask": args.exclude_from_lgmask,
        "workers": args.workers,
        "progress_every": args.progress_every,
        "quiet": args.quiet,
    }
    for key, value in flag_map.items():
        if value is not None:
            values[key] = value
    if args.mlm_split is not None:
        parts = [float(p) for p in args.mlm_split.split(",")]
        if len(parts) != 3:
            raise PipelineConfigError("--mlm-split needs three comma-separated weights")
        values["mlm_split"] = tuple(parts)
    if args.inputs:
        values["inputs"] = tuple(args.inputs)
    config = PipelineConfig(
        inputs=values.pop("inputs", ()),
        output=values.pop("output", ""),
        **values,
    )
    if not config.inputs:
        raise PipelineConfigError("no input paths given")
    summary = run_build(config)
    print(json.dumps(summary.to_dict()))
    return 0


def _cmd_stats(args) -> int:
    lexicon = load_lexicon(args.lexicon)
    report = stats_mod.report(args.dataset, lexicon, hist_bucket=args.hist_bucket)
    print(json.dumps(report.to_dict(), indent=2))
    return 0


def _cmd_ablate(args) -> int:
    lexicon = load_lexicon(args.lexicon)
    spec = ablate_mod.AblationSpec(
        categories=ablate_mod.parse_categories(args.remove), mode=args.mode
    )
    deleted: dict = {}
    out_lines: list[str] = []
    with open(args.input, "r", encoding="utf-8") as fh:
        for lineno, raw in enumerate(fh, start=1):
            raw = raw.rstrip("\n")
            if not raw.strip():
                continue
            try:
                obj = json.loads(raw)
            except json.JSONDecodeError as exc:
                raise ablate_mod.AblationError(
                    f"{args.input}:{lineno}: invalid JSON ({exc.msg})"
                ) from None
            if not isinstance(obj, dict) or args.text_field not in obj:
                raise ablate_mod.AblationError(
                    f"{args.input}:{lineno}: record lacks field {args.text_field!r}"
                )
            result = ablate_mod.ablate_text(obj[args.text_field], lexicon, spec)
            obj[args.text_field] = result.text
            for name, count in result.deleted.items():
                deleted[name] = deleted.get(name, 0) + count
            out_lines.append(json.dumps(obj, ensure_ascii=False, separators=(",", ":")))
    payload = "\n".join(out_lines) + ("\n" if out_lines else "")
    if args.output == "-":
        sys.stdout.write(payload)
    else:
        with open(args.output, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(payload)
    print(
        json.dumps({name: deleted.get(name, 0) for name in sorted(deleted)}),
        file=sys.stderr,
    )
    return 0


def _cmd_loss(args) -> int:
    config = LossConfig(lambda_=args.lambda_, reduction=args.reduction)
    batch = read_logit_file(args.logits)
    lcp = lcp_loss(batch, config)
    idol = idol_loss(lcp, args.mlm_loss, config)
    print(json.dumps({"lcp": lcp, "mlm": args.mlm_loss, "idol": idol}))
    return 0


def _cmd_lexicon(args) -> int:
    if args.action == "dump":
        sys.stdout.write(builtin_lexicon().dump())
    return 0


_HANDLERS = {
    "build": _cmd_build,
    "stats": _cmd_stats,
    "ablate": _cmd_ablate,
    "loss": _cmd_loss,
    "lexicon": _cmd_lexicon,
}


def main(argv=None) -> int:
    parser = _build_parser()
    args = parser.parse_args(argv)
    try:
        return _HANDLERS[args.command](args)
    except LogicorpusError as exc:
        print(exc.tagged(), file=sys.stderr)
        return 1
    except OSError as exc:
        print(f"error[{args.command}]: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
