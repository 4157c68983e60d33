import pytest

from sidl.corpus import corpus_source
from sidl.model import load_source


@pytest.fixture(scope="session")
def nim():
    return load_source(corpus_source("nim"))


@pytest.fixture(scope="session")
def mcp():
    return load_source(corpus_source("mcp"))


@pytest.fixture(scope="session")
def mcp3():
    return load_source(corpus_source("mcp3"))


@pytest.fixture(scope="session")
def mcp3_leaky():
    return load_source(corpus_source("mcp3_leaky"))


@pytest.fixture(scope="session")
def rps():
    return load_source(corpus_source("rps"))


@pytest.fixture(scope="session")
def price():
    return load_source(corpus_source("price_negotiation"))


@pytest.fixture(scope="session")
def chess():
    return load_source(corpus_source("chess"))
