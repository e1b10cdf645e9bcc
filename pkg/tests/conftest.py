import pytest

from toriccsm.corpus import Corpus, bundled_corpus


@pytest.fixture(scope="session")
def corpus() -> Corpus:
    return bundled_corpus()


@pytest.fixture(scope="session")
def p1(corpus):
    return corpus.fans["P1"]


@pytest.fixture(scope="session")
def p2(corpus):
    return corpus.fans["P2"]


@pytest.fixture(scope="session")
def p3(corpus):
    return corpus.fans["P3"]


@pytest.fixture(scope="session")
def p1xp1(corpus):
    return corpus.fans["P1xP1"]


@pytest.fixture(scope="session")
def blp2(corpus):
    return corpus.fans["BlpP2"]


@pytest.fixture(scope="session")
def f1(corpus):
    return corpus.fans["F1"]


@pytest.fixture(scope="session")
def pt(corpus):
    return corpus.fans["Pt"]
