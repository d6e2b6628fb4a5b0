"""Shared fixtures: a learnable corpus built through the corpus CLI.

The corpus is synthetic but category-separable: each indicator category
gets its own sentence templates with a disjoint content vocabulary
(aviation for premise markers, committee finance for conclusion
markers, machinery for negation, sport for adversatives, music for
coordination), so a model that attends to context can identify the
category hidden under every ``[LGMASK]``. The records are produced by
the real ``build`` command in a subprocess — these tests drive the
corpus toolkit only through its CLI and file formats.
"""

from __future__ import annotations

import json
import random
import subprocess
import sys
from pathlib import Path

import pytest

BUILD_SEED = 9017
N_PARAGRAPHS = 1150

# (template, phrase pool, capitalize-first) per category; "{ph}" is the slot.
TEMPLATES: dict[str, list[tuple[str, list[str]]]] = {
    "PMI": [
        ("The flight was delayed {ph} the fog had settled on the runway.",
         ["because", "given that", "seeing that", "considering that",
          "now that", "inasmuch as", "as long as", "on the grounds that",
          "for the reason that"]),
        ("The tower held every departure {ph} the crosswind kept rising.",
         ["because", "given that", "seeing that", "considering that",
          "inasmuch as", "as long as"]),
        ("The pilot trusted the beacon {ph} the chart matched the terrain.",
         ["because", "given that", "seeing that", "now that"]),
        ("The runway stayed closed {ph} the morning fog.",
         ["because of", "due to", "owing to", "thanks to", "on account of",
          "in view of", "by virtue of", "as a result of"]),
        ("The hangar crew rechecked the flaps {ph} the stormy forecast.",
         ["because of", "due to", "owing to", "in view of", "on account of"]),
        ("The departure slipped an hour {ph} the icy tailwind.",
         ["because of", "due to", "owing to", "thanks to"]),
    ],
    "CLI": [
        ("{ph}, the committee approved the revised budget.",
         ["therefore", "thus", "hence", "consequently", "accordingly",
          "as a result", "as a consequence", "for this reason",
          "because of this", "in conclusion", "that is why"]),
        ("{ph}, the treasurer signed the ledger before noon.",
         ["therefore", "thus", "hence", "consequently", "accordingly",
          "for this reason"]),
        ("{ph}, the quorum passed the motion on first reading.",
         ["therefore", "thus", "hence", "consequently", "in conclusion"]),
        ("The audit figures {ph} the ledger balanced.",
         ["show that", "prove that", "suggest that", "imply that",
          "conclude that", "infer that"]),
        ("The minutes {ph} the quorum held firm.",
         ["show that", "suggest that", "imply that", "prove that"]),
        ("The totals align, {ph} the budget clears.",
         ["it follows that"]),
    ],
    "NTI": [
        ("The starter {ph} engaged on the first crank.",
         ["never", "rarely", "seldom", "hardly", "barely", "scarcely"]),
        ("The gasket {ph} seal the manifold.",
         ["didn't", "doesn't", "couldn't", "wouldn't", "won't"]),
        ("The valve {ph} seating cleanly.",
         ["wasn't", "isn't"]),
        ("The piston did {ph} clear the bore.",
         ["not"]),
        ("The crew ran the bench test {ph} the spare manifold.",
         ["without"]),
        ("The fitter was {ph} to free the seized bolt.",
         ["unable"]),
        ("The workshop {ph} stocked the old gaskets.",
         ["no longer"]),
    ],
    "ATI": [
        ("{ph} the rain soaked the turf, the match carried on.",
         ["although", "though", "even though", "even if", "whereas",
          "unless"]),
        ("{ph} the umpire intervened, the innings ran long.",
         ["although", "though", "even though", "whereas"]),
        ("{ph}, the scoreboard stayed frozen at full time.",
         ["however", "nevertheless", "nonetheless", "conversely",
          "in contrast", "on the contrary"]),
        ("The crowd roared on, {ph} the referee waved play forward.",
         ["but", "yet"]),
        ("The match resumed {ph} the flooded turf.",
         ["despite", "in spite of", "regardless of"]),
    ],
    "CNI": [
        ("{ph}, the choir rehearsed the second anthem.",
         ["furthermore", "moreover", "additionally", "likewise",
          "similarly", "meanwhile", "afterward", "besides", "in addition",
          "on the other hand"]),
        ("{ph}, the stagehands lowered the painted curtain.",
         ["furthermore", "moreover", "additionally", "meanwhile",
          "afterward", "in addition"]),
        ("The orchestra tuned for the matinee {ph}.",
         ["as well"]),
    ],
}

CATEGORY_ORDER = ("PMI", "CLI", "NTI", "ATI", "CNI")


def _sentence(rng: random.Random, category: str) -> str:
    tmpl, pool = rng.choice(TEMPLATES[category])
    ph = rng.choice(pool)
    if tmpl.startswith("{ph}"):
        ph = ph[0].upper() + ph[1:]
    return tmpl.format(ph=ph)


def make_corpus(n_paragraphs: int = N_PARAGRAPHS, seed: int = 0x70F1) -> str:
    """Paragraphs of two same-category sentences, categories balanced."""
    rng = random.Random(seed)
    paras = []
    for i in range(n_paragraphs):
        cat = CATEGORY_ORDER[i % len(CATEGORY_ORDER)]
        paras.append(f"{_sentence(rng, cat)} {_sentence(rng, cat)}")
    rng.shuffle(paras)
    return "\n\n".join(paras) + "\n"


def build_records(corpus_path: Path, out_path: Path, seed: int = BUILD_SEED) -> int:
    """Run the corpus builder CLI; returns the record count."""
    proc = subprocess.run(
        [sys.executable, "-m", "logicorpus.cli", "build", str(corpus_path),
         "-o", str(out_path), "--seed", str(seed), "-q"],
        capture_output=True, text=True,
    )
    assert proc.returncode == 0, proc.stderr
    return json.loads(proc.stdout)["records"]


@pytest.fixture(scope="session")
def fixture_dataset(tmp_path_factory) -> Path:
    """~1.1k-record training fixture built by the real pipeline."""
    root = tmp_path_factory.mktemp("corpus")
    corpus = root / "corpus.txt"
    corpus.write_text(make_corpus(), encoding="utf-8")
    records = root / "records.jsonl"
    n = build_records(corpus, records)
    assert n >= 1000, f"fixture built only {n} records"
    return records


def pytest_configure(config):
    config._acceptance_verdicts = []


@pytest.fixture
def verdict(request):
    """Recorder: verdict('name', ok, 'detail') prints in the summary."""
    def record(name: str, ok: bool, detail: str = "") -> None:
        word = "PASS" if ok else "FAIL"
        suffix = f"  ({detail})" if detail else ""
        request.config._acceptance_verdicts.append(
            f"ACCEPTANCE {name}: {word}{suffix}"
        )
        assert ok, f"{name}: {detail}"
    return record


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    lines = getattr(config, "_acceptance_verdicts", [])
    if lines:
        terminalreporter.section("trainer acceptance criteria")
        for line in lines:
            terminalreporter.write_line(line)
