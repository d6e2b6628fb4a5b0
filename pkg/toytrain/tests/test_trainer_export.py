"""Logit export: shape contract and the bridge to the loss CLI."""

from __future__ import annotations

import json
import math
import subprocess
import sys

import pytest
import torch

from toytrain import (
    DataError,
    TinyEncoder,
    build_vocab,
    evaluate,
    encode,
    export_logits,
    read_dataset,
)

THREE_RECORDS = [
    {
        "pid": 1,
        "tokens": ["rain", "[LGMASK]", "play", "[LGMASK]", "on"],
        "lcp": [[1, 3], [3, 4]],
        "mlm": [],
    },
    {
        "pid": 2,
        "tokens": ["engine", "[LGMASK]", "start"],
        "lcp": [[1, 2]],
        "mlm": [],
    },
    {
        "pid": 3,
        "tokens": ["[LGMASK]", "the", "[LGMASK]", "choir"],
        "lcp": [[0, 4], [2, 5]],
        "mlm": [[1, "a"]],
    },
]


def _write(path, records):
    with open(path, "w", encoding="utf-8") as fh:
        for rec in records:
            fh.write(json.dumps(rec) + "\n")
    return path


def _model_for(samples, seq_cap=16):
    torch.manual_seed(0)
    return TinyEncoder(build_vocab(samples), hidden=16, layers=1, heads=2,
                       seq_cap=seq_cap)


class TestExportShape:
    def test_three_samples_five_masks(self, tmp_path):
        data = _write(tmp_path / "d.jsonl", THREE_RECORDS)
        samples = read_dataset(data)
        model = _model_for(samples)
        out = tmp_path / "logits.jsonl"
        count = export_logits(model, data, out)
        assert count == 3
        lines = [json.loads(l) for l in out.read_text().splitlines()]
        assert len(lines) == 3
        vectors = [v for rec in lines for v in rec["logits"]]
        assert len(vectors) == 5
        assert all(len(v) == 6 for v in vectors)
        assert all(all(isinstance(x, float) for x in v) for v in vectors)

    def test_gold_codes_follow_labels(self, tmp_path):
        data = _write(tmp_path / "d.jsonl", THREE_RECORDS)
        model = _model_for(read_dataset(data))
        out = tmp_path / "logits.jsonl"
        export_logits(model, data, out)
        golds = [json.loads(l)["gold"] for l in out.read_text().splitlines()]
        assert golds == [[3, 4], [2], [4, 5]]

    def test_empty_dataset_zero_records(self, tmp_path):
        data = tmp_path / "empty.jsonl"
        data.write_text("")
        model = _model_for([])
        out = tmp_path / "logits.jsonl"
        assert export_logits(model, data, out) == 0
        assert out.read_text() == ""

    def test_mask_free_sample_keeps_a_record(self, tmp_path):
        data = _write(
            tmp_path / "d.jsonl",
            [{"pid": 1, "tokens": ["just", "words"], "lcp": [], "mlm": []}],
        )
        model = _model_for(read_dataset(data))
        out = tmp_path / "logits.jsonl"
        assert export_logits(model, data, out) == 1
        (rec,) = [json.loads(l) for l in out.read_text().splitlines()]
        assert rec["logits"] == [] and rec["gold"] == []

    def test_unknown_token_is_data_error(self, tmp_path):
        data = _write(tmp_path / "d.jsonl", THREE_RECORDS)
        model = _model_for(read_dataset(data))
        other = _write(
            tmp_path / "other.jsonl",
            [{"pid": 9, "tokens": ["unseen"], "lcp": [], "mlm": []}],
        )
        with pytest.raises(DataError, match="vocabulary mismatch"):
            export_logits(model, other, tmp_path / "o.jsonl")


class TestExportFeedsLossCli:
    def test_cli_reads_export_and_agrees(self, tmp_path):
        data = _write(tmp_path / "d.jsonl", THREE_RECORDS)
        samples = read_dataset(data)
        model = _model_for(samples)
        out = tmp_path / "logits.jsonl"
        export_logits(model, data, out)

        encoded = [encode(s, model.vocab, model.seq_cap) for s in samples]
        ours = evaluate(model, encoded, mlm_mode="token-mean")

        proc = subprocess.run(
            [sys.executable, "-m", "logicorpus.cli", "loss", str(out),
             "--lambda", "0.8", "--reduction", "batch-mean"],
            capture_output=True, text=True,
        )
        assert proc.returncode == 0, proc.stderr
        reported = json.loads(proc.stdout)
        assert math.isclose(reported["lcp"], ours.lcp, rel_tol=1e-9)
