from pathlib import Path

import pytest

from absa.classify import train_linear, train_nb
from absa.config import DATA_DIR
from absa.corpus import load_corpus
from absa.lexicon import load_lexicon, load_lexicons
from absa.subword import train_subword
from absa.textprep import normalize


@pytest.fixture(scope="session")
def data_dir() -> Path:
    return DATA_DIR


@pytest.fixture(scope="session")
def hints(data_dir):
    return load_lexicon(data_dir / "singlish_hints.tsv")


@pytest.fixture(scope="session")
def lexicon(data_dir):
    return load_lexicons([data_dir / n for n in ("sinhala.tsv", "singlish.tsv", "codemix.tsv")])


@pytest.fixture(scope="session")
def corpus(data_dir, hints):
    return load_corpus(data_dir / "corpus.jsonl", hints=hints)


@pytest.fixture(scope="session")
def vocab(corpus):
    return train_subword([normalize(r.raw_text).text for r in corpus])


@pytest.fixture(scope="session")
def nb_model(corpus, vocab):
    return train_nb(corpus, vocab)


@pytest.fixture(scope="session")
def linear_model(corpus, vocab):
    return train_linear(corpus, vocab)


@pytest.fixture(scope="session")
def engine():
    from absa.config import load_config
    from absa.pipeline import Engine

    with Engine.from_config(load_config(env={})) as eng:
        yield eng


# -- acceptance summary ------------------------------------------------------

_CRITERION = "test_acceptance.py::test_criterion_"
_titles: dict = {}
_outcomes: dict = {}


def pytest_collection_modifyitems(items):
    for item in items:
        if _CRITERION in item.nodeid:
            _titles[item.nodeid] = (item.function.__doc__ or "").strip()


def pytest_runtest_logreport(report):
    # a setup or teardown failure also fails the criterion
    if _CRITERION in report.nodeid and (report.when == "call" or report.outcome != "passed"):
        if _outcomes.get(report.nodeid, ("passed",))[0] == "passed":
            _outcomes[report.nodeid] = (report.outcome, report.duration)


def pytest_terminal_summary(terminalreporter):
    if not _outcomes:
        return
    terminalreporter.section("acceptance criteria")
    for nodeid in sorted(_outcomes):
        outcome, duration = _outcomes[nodeid]
        num = int(nodeid.split("test_criterion_")[1][:2])
        verdict = "PASS" if outcome == "passed" else "FAIL"
        terminalreporter.write_line(f"criterion {num:2d}: {verdict}  {_titles.get(nodeid, '')} ({duration:.1f}s)")
