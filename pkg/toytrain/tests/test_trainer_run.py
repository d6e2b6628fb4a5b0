"""End-to-end training runs: reproducibility, divergence, report shape."""

from __future__ import annotations

import json
import math

import pytest
import torch

from toytrain import DataError, ToyModelConfig, TrainingError, train

SHORT = dict(hidden=32, layers=1, heads=2, batch_size=8, heldout_frac=0.1)


def _dataset(path, n=40):
    words = ["north", "south", "east", "west", "up", "down"]
    with open(path, "w", encoding="utf-8") as fh:
        for i in range(n):
            tokens = [
                words[i % 6], "[LGMASK]", words[(i + 2) % 6],
                "[MASK]", words[(i + 4) % 6],
            ]
            rec = {
                "pid": i,
                "tokens": tokens,
                "lcp": [[1, i % 6]],
                "mlm": [[3, words[(i + 3) % 6]]],
            }
            fh.write(json.dumps(rec) + "\n")
    return path


class TestReproducibility:
    def test_same_seed_same_final_losses(self, tmp_path):
        data = _dataset(tmp_path / "d.jsonl")
        cfg = ToyModelConfig(steps=8, seed=21, lambda_=0.6, **SHORT)
        a = train(data, cfg)
        b = train(data, cfg)
        for key in ("lcp", "mlm", "idol"):
            assert math.isclose(a["final"][key], b["final"][key],
                                rel_tol=1e-6, abs_tol=0.0), key
        assert a["curves"]["idol"] == b["curves"]["idol"]
        assert a["heldout"]["final_accuracy"] == b["heldout"]["final_accuracy"]

    def test_seed_changes_outcome(self, tmp_path):
        data = _dataset(tmp_path / "d.jsonl")
        a = train(data, ToyModelConfig(steps=8, seed=1, **SHORT))
        b = train(data, ToyModelConfig(steps=8, seed=2, **SHORT))
        assert a["final"]["idol"] != b["final"]["idol"]


class TestFailureModes:
    def test_empty_dataset_is_data_error(self, tmp_path):
        p = tmp_path / "empty.jsonl"
        p.write_text("")
        with pytest.raises(DataError, match="no records"):
            train(p, ToyModelConfig(steps=1, seed=0, **SHORT))

    def test_divergence_names_offending_step(self, tmp_path):
        data = _dataset(tmp_path / "d.jsonl")

        def poison(step, model, losses):
            if step == 1:
                with torch.no_grad():
                    model.lcp_head.weight.fill_(float("nan"))

        cfg = ToyModelConfig(steps=10, seed=4, lambda_=0.5, **SHORT)
        with pytest.raises(TrainingError, match=r"non-finite loss at step 2"):
            train(data, cfg, step_callback=poison)

    def test_training_error_carries_step(self, tmp_path):
        data = _dataset(tmp_path / "d.jsonl")

        def poison(step, model, losses):
            with torch.no_grad():
                model.lcp_head.weight.fill_(float("inf"))

        cfg = ToyModelConfig(steps=4, seed=4, lambda_=1.0, **SHORT)
        with pytest.raises(TrainingError) as exc:
            train(data, cfg, step_callback=poison)
        assert exc.value.step == 1


class TestReport:
    def test_structure_and_agreement_fields(self, tmp_path):
        data = _dataset(tmp_path / "d.jsonl")
        cfg = ToyModelConfig(steps=5, seed=7, lambda_=0.8, **SHORT)
        report = train(data, cfg)

        assert report["config"]["lambda_"] == 0.8
        assert report["dataset"]["records"] == 40
        assert report["dataset"]["train"] + report["dataset"]["heldout"] == 40
        for end in ("initial", "final"):
            block = report[end]
            for key in ("lcp", "mlm", "idol", "cli_lcp", "cli_idol", "lcp_rel_err"):
                assert key in block, (end, key)
            assert block["lcp_rel_err"] <= 1e-4
        for curve in ("lcp", "mlm", "idol"):
            assert len(report["curves"][curve]) == 5
        assert all(math.isfinite(v) for v in report["curves"]["idol"])
        assert report["heldout"]["masks"] > 0
        assert json.dumps(report)  # must be serializable as handed back

    def test_composite_curve_consistent(self, tmp_path):
        data = _dataset(tmp_path / "d.jsonl")
        cfg = ToyModelConfig(steps=5, seed=7, lambda_=0.3, **SHORT)
        report = train(data, cfg)
        for l, m, c in zip(*(report["curves"][k] for k in ("lcp", "mlm", "idol"))):
            assert c == pytest.approx(m + 0.3 * (l - m), rel=1e-9)
