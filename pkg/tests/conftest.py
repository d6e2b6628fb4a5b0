from pathlib import Path

import pytest

import logicorpus as lc
from logicorpus._kernels import available_backends, get_backend

DATA_DIR = Path(__file__).parent / "data"
FIXTURE_CORPUS = DATA_DIR / "fixture_corpus.txt"
FIXTURE_EXPECTED = DATA_DIR / "fixture_expected.json"

# one "ACCEPTANCE <name>: PASS|FAIL|WARN" line per criterion, echoed after
# the run summary so they survive output capture
ACCEPTANCE_VERDICTS: list[str] = []


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    if ACCEPTANCE_VERDICTS:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_VERDICTS:
            terminalreporter.write_line(line)


@pytest.fixture(scope="session")
def lexicon():
    return lc.builtin_lexicon()


@pytest.fixture(scope="session")
def matcher(lexicon):
    return lexicon.compiled()


@pytest.fixture(scope="session", params=available_backends())
def backend(request):
    return get_backend(request.param)


@pytest.fixture(scope="session")
def fixture_corpus_path():
    assert FIXTURE_CORPUS.exists(), "run scripts/make_fixture.py to regenerate"
    return FIXTURE_CORPUS
