#!/usr/bin/env python3
"""Regenerate the bundled 200-paragraph fixture corpus and its frozen counts.

The corpus is deterministic and exercises the whole input surface: multi-word
indicators, mixed case, curly apostrophes, hard-wrapped paragraphs, markup
residue lines, and paragraphs the default filter drops (too short, zero
indicators, exclusion-only indicators).

Expected counts land in fixture_expected.json. They are computed with the
independent reference implementations from tests/oracles.py (regex tokenizer,
dictionary-scan matcher) over the frozen phrase lists from tests/test_lexicon.py
— not with the library code under test. The script then cross-checks the
library's own build + stats output against those frozen numbers and refuses to
write a fixture the library disagrees with.
"""

from __future__ import annotations

import hashlib
import json
import math
import random
import sys
from pathlib import Path

ROOT = Path(__file__).resolve().parent.parent
sys.path.insert(0, str(ROOT / "tests"))

from oracles import oracle_match, ref_tokenize  # noqa: E402
from test_lexicon import CANON  # noqa: E402

DATA_DIR = ROOT / "tests" / "data"
CORPUS_PATH = DATA_DIR / "fixture_corpus.txt"
EXPECTED_PATH = DATA_DIR / "fixture_expected.json"

ENTRIES = [(p, name) for name, phrases in CANON.items() for p in phrases]
EXCLUSIONS = {"and", "or", "also", "both", "even", "further", "next", "either"}
NON_EXCLUDED = [p for p, _ in ENTRIES if p not in EXCLUSIONS]

FILLER = (
    "river harvest garden signal copper lantern meadow ledger orchard "
    "granite workshop causeway turbine harbor chimney walnut parliament "
    "glacier compass quarry furnace village pigment lattice whistle "
    "saddle barrel mill acre scaffold pulley spindle anvil hedge brook "
    "ferry bakery cellar attic steeple plough sickle loom kiln forge"
).split()

# words that contain indicator strings without being indicators
TRAPS = (
    "sandbox Anderson evenly notable oregano thusly butter hencewood "
    "nevermore rathering soothing fewest whereabouts organ"
).split()

UNICODE_WORDS = ["café", "naïve", "Zürich", "séance", "Øresund"]
CONTRACTIONS = ["can’t", "won’t", "doesn’t", "isn’t", "couldn’t"]

MARKUP_LINES = [
    '{| class="wikitable" style="because: none"',
    "| colspan=2 | therefore hence thus",
    "|-",
    "|}",
    '{{cite web |title=Nevertheless |year=1998}}',
    "}}",
    '<ref name="delta">however</ref>',
    "<div class=\"note\">",
    "</div>",
    "{{Infobox settlement",
]


def tokens_of(text: str) -> list[str]:
    return [t for t, _, _ in ref_tokenize(text)]


def classify(text: str) -> str:
    """Apply the default filter rules with the reference matcher."""
    n = len(tokens_of(text))
    matches = oracle_match(text, ENTRIES)
    non_excl = sum(1 for *_, phrase in matches if phrase not in EXCLUSIONS)
    if n < 6:
        return "too_short"
    if non_excl < 1:
        return "too_few_indicators"
    return "kept"


def _case(rng: random.Random, phrase: str) -> str:
    roll = rng.random()
    if roll < 0.70:
        return phrase
    if roll < 0.90:
        return phrase[0].upper() + phrase[1:]
    return phrase.upper()


def _sentence(rng: random.Random, n_indicators: int) -> str:
    words = [rng.choice(FILLER) for _ in range(rng.randint(5, 11))]
    if rng.random() < 0.25:
        words.insert(rng.randrange(len(words)), rng.choice(TRAPS))
    if rng.random() < 0.12:
        words.insert(rng.randrange(len(words)), rng.choice(UNICODE_WORDS))
    if rng.random() < 0.12:
        words.insert(rng.randrange(len(words)), rng.choice(CONTRACTIONS))
    for _ in range(n_indicators):
        phrase = _case(rng, rng.choice(NON_EXCLUDED))
        style = rng.random()
        if style < 0.45:
            words.insert(rng.randrange(len(words) + 1), phrase)
        elif style < 0.65:
            words.insert(rng.randrange(len(words) + 1), phrase + ",")
        elif style < 0.8:
            words.insert(rng.randrange(len(words) + 1), "(" + phrase + ")")
        elif style < 0.9:
            words.append(phrase)
        else:
            words.insert(0, phrase + ",")
    text = " ".join(words)
    text = text[0].upper() + text[1:]
    return text + rng.choice([".", ".", ".", "!", "?", ";"])


def make_keepable(rng: random.Random) -> str:
    sents = [
        _sentence(rng, rng.choice((0, 1, 1, 1, 2, 2, 3)))
        for _ in range(rng.randint(1, 3))
    ]
    while not oracle_match(" ".join(sents), NON_EXCLUDED_ENTRIES):
        sents.append(_sentence(rng, 1))
    text = " ".join(sents)
    if len(sents) >= 2 and rng.random() < 0.3:
        # hard-wrap inside the paragraph: newline without a blank line
        text = sents[0] + "\n" + " ".join(sents[1:])
    return text


NON_EXCLUDED_ENTRIES = [(p, c) for p, c in ENTRIES if p not in EXCLUSIONS]


def make_short(rng: random.Random) -> str:
    n = rng.randint(1, 3)
    words = [rng.choice(FILLER) for _ in range(n)]
    if rng.random() < 0.5:
        words.insert(rng.randrange(len(words) + 1), rng.choice(("because", "thus")))
    text = " ".join(words).capitalize() + "."
    assert len(tokens_of(text)) <= 5
    return text


def make_no_indicator(rng: random.Random) -> str:
    words = [rng.choice(FILLER + TRAPS) for _ in range(rng.randint(7, 13))]
    text = " ".join(words).capitalize() + "."
    assert not oracle_match(text, ENTRIES)
    return text


def make_excluded_only(rng: random.Random) -> str:
    words = [rng.choice(FILLER) for _ in range(rng.randint(6, 10))]
    for _ in range(rng.randint(1, 3)):
        words.insert(rng.randrange(len(words) + 1), rng.choice(sorted(EXCLUSIONS)))
    text = " ".join(words).capitalize() + "."
    matches = oracle_match(text, ENTRIES)
    assert matches and all(phrase in EXCLUSIONS for *_, phrase in matches)
    return text


def build_corpus(rng: random.Random) -> str:
    paragraphs = (
        [("kept", make_keepable) for _ in range(180)]
        + [("too_short", make_short) for _ in range(8)]
        + [("too_few_indicators", make_no_indicator) for _ in range(7)]
        + [("too_few_indicators", make_excluded_only) for _ in range(5)]
    )
    rng.shuffle(paragraphs)

    pieces: list[str] = []
    for i, (want, make) in enumerate(paragraphs):
        text = make(rng)
        got = classify(text)
        if got != want:
            raise SystemExit(f"paragraph {i} generated as {want!r} but classifies {got!r}")
        pieces.append(text)
        sep = rng.random()
        if sep < 0.10:
            pieces.append("")  # extra blank line
        elif sep < 0.22:
            pieces.append(rng.choice(MARKUP_LINES))
    body = "\n\n".join(pieces) + "\n"
    return body


def split_blocks(text: str) -> list[str]:
    """Reference paragraph splitter: blank and markup lines separate blocks."""
    markup = ("<", "{{", "}}", "{|", "|")
    blocks: list[str] = []
    current: list[str] = []
    for line in text.split("\n"):
        stripped = line.lstrip()
        if not stripped or stripped.startswith(markup):
            if current:
                blocks.append("\n".join(current))
                current = []
        else:
            current.append(line)
    if current:
        blocks.append("\n".join(current))
    return [b for b in blocks if tokens_of(b)]


def expectations(corpus: str) -> dict:
    blocks = split_blocks(corpus)
    dropped = {"too_short": 0, "too_few_indicators": 0, "low_density": 0}
    kept: list[str] = []
    for block in blocks:
        cls = classify(block)
        if cls == "kept":
            kept.append(block)
        else:
            dropped[cls] += 1

    by_cat = {name: 0 for name in CANON}
    tokens_original = 0
    lui_trials = 0
    histogram: dict[float, int] = {}
    for block in kept:
        toks = tokens_of(block)
        matches = oracle_match(block, ENTRIES)
        tokens_original += len(toks)
        covered = sum(e - s for s, e, *_ in matches)
        lui_trials += len(toks) - covered
        for *_, category, _phrase in matches:
            by_cat[category] += 1
        density = 100.0 * len(matches) / len(toks)
        bucket = math.floor(density)
        histogram[bucket] = histogram.get(bucket, 0) + 1

    total = sum(by_cat.values())
    return {
        "fixture": {
            "paragraphs": len(blocks),
            "bytes": len(corpus.encode("utf-8")),
            "sha256": hashlib.sha256(corpus.encode("utf-8")).hexdigest(),
        },
        "build_seed42_defaults": {
            "documents": 1,
            "kept": len(kept),
            "records": len(kept),
            "dropped": dropped,
        },
        "stats_seed42_defaults": {
            "samples": len(kept),
            "tokens_original": tokens_original,
            "indicators_total": total,
            "indicators_by_category": by_cat,
            "lg_trials": total,
            "lui_trials": lui_trials,
            "density_histogram": sorted(
                [float(b), c] for b, c in histogram.items()
            ),
        },
    }


def cross_check(expected: dict) -> None:
    """Refuse to freeze numbers the library itself disagrees with."""
    import tempfile

    from logicorpus.pipeline import PipelineConfig, run_build
    from logicorpus.stats import report

    with tempfile.TemporaryDirectory() as tmp:
        out = Path(tmp) / "out.jsonl"
        summary = run_build(
            PipelineConfig(
                inputs=(str(CORPUS_PATH),),
                output=str(out),
                seed=42,
                quiet=True,
            )
        )
        want_build = expected["build_seed42_defaults"]
        got_build = {
            "documents": summary.documents,
            "kept": summary.kept,
            "records": summary.records,
            "dropped": dict(summary.dropped),
        }
        if got_build != want_build:
            raise SystemExit(f"build disagrees:\n  {got_build}\n  {want_build}")

        rep = report(out).to_dict()
        want = expected["stats_seed42_defaults"]
        got = {
            "samples": rep["samples"],
            "tokens_original": rep["tokens"]["original"],
            "indicators_total": rep["indicators_before_masking"]["total"],
            "indicators_by_category": rep["indicators_before_masking"]["by_category"],
            "lg_trials": rep["masking_rates"]["lg"]["trials"],
            "lui_trials": rep["masking_rates"]["lui"]["trials"],
            "density_histogram": rep["density"]["histogram"],
        }
        if got != want:
            for key in want:
                if got[key] != want[key]:
                    print(f"  mismatch {key}:\n    got  {got[key]}\n    want {want[key]}")
            raise SystemExit("stats disagree with the frozen expectations")


def main() -> None:
    rng = random.Random(0xF1C7)
    corpus = build_corpus(rng)
    DATA_DIR.mkdir(parents=True, exist_ok=True)
    CORPUS_PATH.write_text(corpus, encoding="utf-8", newline="\n")

    expected = expectations(corpus)
    if expected["fixture"]["paragraphs"] != 200:
        raise SystemExit(f"expected 200 paragraphs, got {expected['fixture']['paragraphs']}")
    EXPECTED_PATH.write_text(
        json.dumps(expected, indent=2, sort_keys=False) + "\n", encoding="utf-8"
    )
    cross_check(expected)
    stats = expected["stats_seed42_defaults"]
    print(
        f"wrote {CORPUS_PATH.name}: 200 paragraphs, "
        f"{expected['fixture']['bytes']} bytes, "
        f"{stats['samples']} kept, {stats['indicators_total']} indicators"
    )
    print("library build + stats cross-check passed")


if __name__ == "__main__":
    main()
