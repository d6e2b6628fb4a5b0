import json
import math
import random

import pytest

import logicorpus as lc
from logicorpus.errors import RecordError
from logicorpus.masker import MaskPolicy, emit_samples, mask_paragraph
from logicorpus.stats import StatsAccumulator, report, wilson_interval


def build_samples(lexicon, n=60, seed=4242):
    rng = random.Random(77)
    words = "river plan garden stone letter evening signal craft".split()
    indicators = ["because of", "no longer", "however", "thus", "both", "in addition"]
    samples = []
    for i in range(n):
        toks = [rng.choice(words) for _ in range(rng.randint(8, 16))]
        toks.insert(rng.randrange(len(toks)), rng.choice(indicators))
        text = " ".join(toks) + "."
        para = lc.split_paragraphs(text, source_id=f"s{i}")[0]
        matches = lc.find_indicators(para, lexicon)
        samples.append((para, matches, mask_paragraph(para, matches, MaskPolicy(seed=seed))))
    return samples


def test_wilson_interval_known_values():
    # frozen from a 50-digit mpmath evaluation of the score interval
    lo, hi = wilson_interval(70, 100)
    assert lo == pytest.approx(0.60415145366653334, rel=1e-12)
    assert hi == pytest.approx(0.78105114705067239, rel=1e-12)
    assert wilson_interval(0, 0) == (0.0, 1.0)
    lo0, hi0 = wilson_interval(0, 50)
    assert lo0 == pytest.approx(0.0, abs=1e-15)
    assert hi0 == pytest.approx(0.071347599133358714, rel=1e-12)
    lo1, hi1 = wilson_interval(50, 50)
    assert lo1 == pytest.approx(0.92865240086664129, rel=1e-12)
    assert hi1 == pytest.approx(1.0, rel=1e-12)


def test_counts_match_direct_reconstruction(lexicon):
    samples = build_samples(lexicon, n=40)
    acc = StatsAccumulator(lexicon=lexicon)
    for _, _, s in samples:
        acc.add(s)
    rep = acc.report()

    want_indicators = sum(len(m) for _, m, _ in samples)
    assert rep.indicators_total == want_indicators
    want_lgmask = sum(len(s.lcp) for _, _, s in samples)
    assert rep.lgmask_total == want_lgmask
    assert rep.samples == len(samples)
    assert rep.tokens_original == sum(p.token_count for p, _, _ in samples)
    assert rep.tokens_final == sum(len(s.tokens) for _, _, s in samples)

    # category split of pre-mask indicators equals the matcher's own view
    from collections import Counter

    want_by_cat = Counter(m.category.name for _, ms, _ in samples for m in ms)
    assert {k: v for k, v in rep.indicators_by_category.items() if v} == dict(
        want_by_cat
    )

    # rate denominators: every pre-mask match is one lg trial; every
    # non-match original token is one lui trial
    assert rep.rates["lg"]["trials"] == want_indicators
    covered = sum(m.end - m.start for _, ms, _ in samples for m in ms)
    assert rep.rates["lui"]["trials"] == rep.tokens_original - covered
    assert rep.rates["mlm"]["trials"] == rep.tokens_final - want_lgmask
    assert rep.rates["mlm"]["events"] == sum(len(s.mlm) for _, _, s in samples)


def test_merge_equals_sequential(lexicon):
    samples = [s for _, _, s in build_samples(lexicon, n=50)]
    seq = StatsAccumulator(lexicon=lexicon)
    for s in samples:
        seq.add(s)

    rng = random.Random(1)
    for _ in range(4):
        cut_a, cut_b = sorted(rng.sample(range(len(samples) + 1), 2))
        parts = [samples[:cut_a], samples[cut_a:cut_b], samples[cut_b:]]
        accs = []
        for part in parts:
            a = StatsAccumulator(lexicon=lexicon)
            for s in part:
                a.add(s)
            accs.append(a)
        merged = accs[0].merge(accs[1]).merge(accs[2])
        assert merged.report().to_dict() == seq.report().to_dict()


def test_merge_rejects_mismatched_buckets(lexicon):
    a = StatsAccumulator(lexicon=lexicon, hist_bucket=1.0)
    b = StatsAccumulator(lexicon=lexicon, hist_bucket=2.0)
    with pytest.raises(ValueError):
        a.merge(b)


def test_report_layout(tmp_path, lexicon):
    samples = [s for _, _, s in build_samples(lexicon, n=8)]
    path = tmp_path / "data.jsonl"
    emit_samples(samples, path)
    rep = report(path, lexicon)
    d = rep.to_dict()
    assert list(d) == [
        "samples", "tokens", "lgmask", "indicators_before_masking",
        "masking_rates", "density",
    ]
    assert list(d["lgmask"]["by_category"]) == [
        "PMI", "CLI", "NTI", "ATI", "CNI", "LUI",
    ]
    assert list(d["indicators_before_masking"]["by_category"]) == [
        "PMI", "CLI", "NTI", "ATI", "CNI",
    ]
    for rate in d["masking_rates"].values():
        assert list(rate) == ["events", "trials", "estimate", "ci95"]
    assert d["density"]["bucket_width"] == 1.0
    assert sum(c for _, c in d["density"]["histogram"]) == d["samples"]
    json.dumps(d)  # serializable as-is


def test_density_histogram_bucketing(lexicon):
    acc = StatsAccumulator(lexicon=lexicon, hist_bucket=2.5)
    para = lc.split_paragraphs(
        "The plan, however, uses ten words exactly here now.", source_id="h"
    )[0]
    matches = lc.find_indicators(para, lexicon)
    sample = mask_paragraph(para, matches, MaskPolicy(seed=1))
    acc.add(sample)
    # 1 match over 12 tokens = 8.33 per 100 -> bucket floor(8.33/2.5)*2.5 = 7.5
    assert acc.histogram == {7.5: 1}


def test_reconstruction_recovers_exact_original(lexicon):
    # heavy masking: every channel fires somewhere
    text = "The crews, however, kept nothing because of the blizzard danger."
    para = lc.split_paragraphs(text, source_id="r")[0]
    matches = lc.find_indicators(para, lexicon)
    sample = mask_paragraph(
        para, matches, MaskPolicy(seed=2, p_lg=1.0, p_lui=0.2, mlm_rate=0.9)
    )
    acc = StatsAccumulator(lexicon=lexicon)
    acc.add(sample)
    assert acc.tokens_original == para.token_count
    assert acc.indicators == {"ATI": 1, "NTI": 1, "PMI": 1}


def test_malformed_record_aborts_scan(tmp_path, lexicon):
    path = tmp_path / "data.jsonl"
    good = '{"pid":1,"tokens":["plain"],"lcp":[],"mlm":[],"prov":[]}'
    path.write_text(good + "\nnot json\n", encoding="utf-8")
    with pytest.raises(RecordError) as ei:
        report(path, lexicon)
    assert "line 2" in str(ei.value)
    assert ei.value.tagged().startswith("error[stats]: ")


def test_accumulator_rejects_bad_bucket(lexicon):
    with pytest.raises(ValueError):
        StatsAccumulator(lexicon=lexicon, hist_bucket=0.0)
