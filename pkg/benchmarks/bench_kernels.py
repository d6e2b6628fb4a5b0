"""Compare the numba and numpy kernel backends.

Times the three hot kernels (token_spans, token_ids+match_spans,
channel_u64) on identical inputs, then an end-to-end build with each
backend forced via LOGICORPUS_KERNELS. Run from the repository root:

    python3 benchmarks/bench_kernels.py --mb 20
"""

from __future__ import annotations

import argparse
import json
import os
import pathlib
import shutil
import tempfile
import time

import numpy as np

from logicorpus._kernels import available_backends, get_backend
from logicorpus.lexicon import builtin_lexicon
from logicorpus.matcher import CompiledMatcher
from logicorpus.pipeline import PipelineConfig, run_build
from logicorpus.tokenizer import (
    char_classes,
    codepoints,
    fold_codepoints,
    resolve_classes,
)

FIXTURE = pathlib.Path(__file__).resolve().parent.parent / (
    "tests/data/fixture_corpus.txt"
)


def best_of(fn, repeat: int) -> float:
    best = float("inf")
    for _ in range(repeat):
        t0 = time.perf_counter()
        fn()
        best = min(best, time.perf_counter() - t0)
    return best


def micro_inputs(chars: int):
    text = FIXTURE.read_text(encoding="utf-8")
    text = text * (chars // len(text) + 1)
    text = text[:chars]
    cp = codepoints(text)
    cls = resolve_classes(char_classes(cp))
    folded = fold_codepoints(cp)
    return cp, cls, folded


def bench_micro(repeat: int, chars: int) -> dict[str, dict[str, float]]:
    cp, cls, folded = micro_inputs(chars)
    rows: dict[str, dict[str, float]] = {}
    for name in available_backends():
        backend = get_backend(name)
        starts, ends = backend.token_spans(cls)  # warm-up + shared input
        matcher = CompiledMatcher(builtin_lexicon().entries, backend=backend)
        ids = matcher.token_ids(folded, starts, ends)
        bounds = np.array([0, ids.shape[0]], dtype=np.int64)
        matcher.match_ids(ids, bounds)
        ks = np.arange(1_000_000, dtype=np.uint64)
        backend.channel_u64(0x9E3779B97F4A7C15, 3, ks)
        rows[name] = {
            "token_spans": best_of(lambda: backend.token_spans(cls), repeat),
            "match": best_of(
                lambda: matcher.match_ids(
                    matcher.token_ids(folded, starts, ends), bounds
                ),
                repeat,
            ),
            "channel_u64": best_of(
                lambda: backend.channel_u64(0x9E3779B97F4A7C15, 3, ks), repeat
            ),
        }
    return rows


def bench_build(mb: int) -> dict[str, float]:
    text = FIXTURE.read_text(encoding="utf-8")
    line = json.dumps({"id": "d0", "text": text}) + "\n"
    n = max(1, int(mb * 1_000_000 / len(line.encode())))
    results: dict[str, float] = {}
    tmp = pathlib.Path(tempfile.mkdtemp(prefix="logicorpus-bench-"))
    try:
        src = tmp / "corpus.jsonl"
        with src.open("w", encoding="utf-8") as f:
            for i in range(n):
                f.write(json.dumps({"id": f"d{i}", "text": text}) + "\n")
        size_mb = src.stat().st_size / 1e6
        for name in available_backends():
            os.environ["LOGICORPUS_KERNELS"] = name
            out = tmp / f"out-{name}.jsonl"
            cfg = PipelineConfig(
                inputs=(str(src),), output=str(out), seed=42, workers=1,
                quiet=True,
            )
            run_build(cfg)  # warm-up (JIT load, page cache)
            t0 = time.perf_counter()
            run_build(cfg)
            results[name] = size_mb / (time.perf_counter() - t0)
        outs = {
            p.read_bytes() for p in tmp.glob("out-*.jsonl")
        }
        if len(outs) != 1:
            raise SystemExit("backends produced different build output")
    finally:
        os.environ.pop("LOGICORPUS_KERNELS", None)
        shutil.rmtree(tmp, ignore_errors=True)
    return results


def main() -> None:
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--mb", type=int, default=20,
                    help="corpus size for the end-to-end build (default 20)")
    ap.add_argument("--chars", type=int, default=2_000_000,
                    help="characters for kernel micro-benchmarks")
    ap.add_argument("--repeat", type=int, default=5,
                    help="repeats per micro-benchmark (best is kept)")
    ap.add_argument("--skip-build", action="store_true",
                    help="only run the kernel micro-benchmarks")
    args = ap.parse_args()

    names = available_backends()
    print(f"backends: {', '.join(names)}")
    if "numba" not in names:
        print("note: numba not importable; only the numpy fallback is timed")

    rows = bench_micro(args.repeat, args.chars)
    print(f"\nkernel micro-benchmarks ({args.chars:,} chars, "
          f"best of {args.repeat}):")
    kernels = ["token_spans", "match", "channel_u64"]
    header = f"  {'kernel':<14}" + "".join(f"{n:>12}" for n in rows)
    print(header)
    for k in kernels:
        cells = "".join(f"{rows[n][k] * 1e3:>10.2f}ms" for n in rows)
        print(f"  {k:<14}{cells}")
    if len(rows) == 2:
        print("  speedup (numpy/numba):")
        for k in kernels:
            print(f"    {k:<14}{rows['numpy'][k] / rows['numba'][k]:>8.2f}x")

    if not args.skip_build:
        print(f"\nend-to-end build ({args.mb} MB, workers=1, warm):")
        for name, rate in bench_build(args.mb).items():
            print(f"  {name:<8}{rate:>8.2f} MB/s")


if __name__ == "__main__":
    main()
