import random

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from logicorpus.tokenizer import (
    codepoints,
    fold_text,
    tokenize,
    tokenize_codepoints,
)
from oracles import REF_TOKEN_RE, fuzz_corpus, ref_fold, ref_tokenize


def spans(text, backend=None):
    starts, ends = tokenize_codepoints(codepoints(text), backend=backend)
    return list(zip(starts.tolist(), ends.tolist()))


def test_hand_cases():
    assert tokenize("Tom isn't here.") == ["Tom", "isn't", "here", "."]
    assert tokenize("Tom isn’t here.") == ["Tom", "isn’t", "here", "."]
    assert tokenize("a,b") == ["a", ",", "b"]
    assert tokenize("well-known") == ["well", "-", "known"]
    assert tokenize("rock 'n' roll") == ["rock", "'", "n", "'", "roll"]
    assert tokenize("''") == ["'", "'"]
    assert tokenize("can't,") == ["can't", ","]
    assert tokenize("'tis") == ["'", "tis"]
    assert tokenize("x'") == ["x", "'"]
    assert tokenize("a'b'c") == ["a'b'c"]
    assert tokenize("under_score 42 café") == ["under_score", "42", "café"]
    assert tokenize("") == []
    assert tokenize("   \n\t ") == []


def test_offsets_are_char_slices():
    text = "Ça va?  Isn’t it—fine…"
    got = [(text[s:e]) for s, e in spans(text)]
    assert got == tokenize(text)
    assert got == [m.group() for m in REF_TOKEN_RE.finditer(text)]


def test_matches_reference_regex_on_fuzz(backend):
    texts = fuzz_corpus(200, phrases=["because of", "no longer", "both"], seed=11)
    for text in texts:
        want = [(s, e) for _, s, e in ref_tokenize(text)]
        assert spans(text, backend=backend) == want, repr(text)


@settings(max_examples=300, deadline=None)
@given(st.text(max_size=80))
def test_matches_reference_regex_property(text):
    want = [(s, e) for _, s, e in ref_tokenize(text)]
    assert spans(text) == want


@settings(max_examples=150, deadline=None)
@given(
    st.text(
        alphabet=st.sampled_from(list("ab '’.")),
        max_size=30,
    )
)
def test_apostrophe_joins_only_between_words(text):
    want = [(s, e) for _, s, e in ref_tokenize(text)]
    assert spans(text) == want


def test_fold_text():
    assert fold_text("Don’t SHOUT") == "don't shout"
    assert fold_text("Café") == "café"
    # codepoints whose lowercase would change the character count stay put
    assert fold_text("İstanbul") == "İstanbul"[0] + "stanbul"
    assert len(fold_text("İstanbul")) == len("İstanbul")


@settings(max_examples=200, deadline=None)
@given(st.text(max_size=60))
def test_fold_matches_reference_and_preserves_length(text):
    assert fold_text(text) == ref_fold(text)
    assert len(fold_text(text)) == len(text)


def test_folding_never_moves_token_boundaries():
    rng = random.Random(5)
    for text in fuzz_corpus(60, phrases=["however", "as well"], seed=7):
        mangled = "".join(
            c.upper() if rng.random() < 0.5 and len(c.upper()) == 1 else c
            for c in text
        )
        assert spans(mangled) == spans(fold_text(mangled))


def test_backends_agree(backend):
    for text in fuzz_corpus(50, phrases=["if and only if", "isn't"], seed=3):
        assert spans(text, backend=backend) == spans(text)
