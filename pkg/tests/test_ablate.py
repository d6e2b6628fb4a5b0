from collections import Counter

import pytest

import logicorpus as lc
from logicorpus.ablate import (
    AblationError,
    AblationSpec,
    PLACEHOLDER,
    ablate_text,
    parse_categories,
)
from logicorpus.lexicon import IndicatorCategory
from oracles import fuzz_corpus, ref_fold

ALL = frozenset(
    {c for c in IndicatorCategory if c is not IndicatorCategory.LUI}
)

ATI_PASSAGE = (
    "This advantage accruing to the sentinel does not mean that its watchful "
    "behavior is entirely self-interested. On the contrary, the sentinel's "
    "behavior is an example of animal behavior motivated at least in part by "
    "altruism."
)


def run(text, lexicon, cats, mode="delete"):
    return ablate_text(text, lexicon, AblationSpec(categories=cats, mode=mode))


def test_canonical_negation_example(lexicon):
    res = run("Tom no longer likes hamburgers.", lexicon, frozenset({IndicatorCategory.NTI}))
    assert res.text == "Tom likes hamburgers."
    assert res.deleted == Counter({"NTI": 1})


def test_noop_when_category_absent(lexicon):
    text = "Plain narration with zero connectives of the removed kind."
    res = run(text, lexicon, frozenset({IndicatorCategory.ATI}))
    assert res.text == text
    assert res.deleted == Counter()
    assert res.passes == 0


def test_repairs(lexicon):
    cases = [
        ("However, he left.", {IndicatorCategory.ATI}, "He left."),
        ("He left, however.", {IndicatorCategory.ATI}, "He left."),
        ("It rained; therefore, we left.", {IndicatorCategory.CLI}, "It rained; we left."),
        ("We met because of luck twice.", {IndicatorCategory.PMI}, "We met luck twice."),
        (
            "Both sides agreed, and nothing broke.",
            {IndicatorCategory.CNI},
            "Sides agreed, nothing broke.",
        ),
    ]
    for text, cats, want in cases:
        got = run(text, lexicon, frozenset(cats)).text
        assert got == want, (text, got)


def test_full_passage_ablation_is_complete(lexicon):
    res = run(ATI_PASSAGE, lexicon, ALL)
    assert lc.find_indicators(res.text, lexicon) == []
    assert res.deleted["ATI"] >= 1 and res.deleted["NTI"] >= 1


def test_retained_categories_survive_unchanged(lexicon):
    res = run(ATI_PASSAGE, lexicon, frozenset({IndicatorCategory.ATI}))
    before = Counter(
        (ref_fold(m.phrase), m.category)
        for m in lc.find_indicators(ATI_PASSAGE, lexicon)
        if m.category is not IndicatorCategory.ATI
    )
    after = Counter(
        (ref_fold(m.phrase), m.category)
        for m in lc.find_indicators(res.text, lexicon)
    )
    assert after == before
    assert IndicatorCategory.ATI not in {c for _, c in after}


@pytest.mark.parametrize(
    "cats",
    [
        frozenset({IndicatorCategory.PMI, IndicatorCategory.CLI}),
        frozenset({IndicatorCategory.NTI}),
        frozenset({IndicatorCategory.ATI}),
        frozenset({IndicatorCategory.CNI}),
        ALL,
    ],
)
def test_completeness_and_idempotence_on_fuzz(lexicon, cats):
    phrases = [p for p, _ in lexicon.entries]
    for text in fuzz_corpus(25, phrases, seed=5150):
        res = run(text, lexicon, cats)
        left = [m for m in lc.find_indicators(res.text, lexicon) if m.category in cats]
        assert left == [], (text, res.text, [m.phrase for m in left])
        again = run(res.text, lexicon, cats)
        assert again.text == res.text
        assert again.deleted == Counter()


def test_deletion_can_cascade(lexicon):
    # deleting "well" is impossible, but "as" + deletion + "well" can form
    # "as well"; craft one: "as result in well" — removing CLI "result in"
    # leaves "as  well" -> "as well" (CNI), still present after one pass.
    text = "They played as result in well as anyone."
    res = run(text, lexicon, frozenset({IndicatorCategory.CLI, IndicatorCategory.CNI}))
    left = [
        m
        for m in lc.find_indicators(res.text, lexicon)
        if m.category in (IndicatorCategory.CLI, IndicatorCategory.CNI)
    ]
    assert left == []
    assert res.passes >= 2


def test_placeholder_mode(lexicon):
    res = run(
        "We stayed because of rain.", lexicon,
        frozenset({IndicatorCategory.PMI}), mode="placeholder",
    )
    assert res.text == f"We stayed {PLACEHOLDER} rain."
    assert res.deleted == Counter({"PMI": 1})


def test_paragraph_boundaries_respected(lexicon):
    # "because" at the end of one paragraph and "of" at the start of the
    # next must ablate as "because", not "because of"
    doc = "We stayed because\n\nof rain it's all wet."
    res = run(doc, lexicon, frozenset({IndicatorCategory.PMI}))
    assert res.text.startswith("We stayed")
    assert "\n\nof rain" in res.text or "\n\nOf rain" in res.text


def test_spec_validation():
    with pytest.raises(AblationError):
        AblationSpec(categories=frozenset())
    with pytest.raises(AblationError):
        AblationSpec(categories=frozenset({IndicatorCategory.LUI}))
    with pytest.raises(AblationError):
        AblationSpec(categories=ALL, mode="shred")


def test_parse_categories():
    assert parse_categories("pmi,cli") == frozenset(
        {IndicatorCategory.PMI, IndicatorCategory.CLI}
    )
    assert parse_categories("NTI") == frozenset({IndicatorCategory.NTI})
    assert parse_categories("all") == ALL
    with pytest.raises(AblationError):
        parse_categories("all,nti")
    with pytest.raises(AblationError):
        parse_categories("lui")
    with pytest.raises(AblationError):
        parse_categories("")
    with pytest.raises(AblationError):
        parse_categories("frobnicate")
