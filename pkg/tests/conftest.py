from __future__ import annotations

import pytest

from gapchart import load_grammar
from gapchart.data import path as data_path, read_text


def _corpus(name: str) -> list[str]:
    return [
        line.strip()
        for line in read_text(name).splitlines()
        if line.strip() and not line.lstrip().startswith("#")
    ]


@pytest.fixture(scope="session")
def toy_grammar():
    return load_grammar(data_path("toy.gram"))


@pytest.fixture(scope="session")
def sorts_grammar():
    return load_grammar(data_path("sorts.gram"))


@pytest.fixture(scope="session")
def ambig_grammar():
    return load_grammar(data_path("ambig.gram"))


@pytest.fixture(scope="session")
def fragments_grammar():
    return load_grammar(data_path("fragments.gram"))


@pytest.fixture(scope="session")
def toy_corpus():
    return _corpus("toy_corpus.txt")


@pytest.fixture(scope="session")
def sorts_corpus():
    return _corpus("sorts_corpus.txt")


@pytest.fixture(scope="session")
def ambig_corpus():
    return _corpus("ambig_corpus.txt")


@pytest.fixture(scope="session")
def bad_closure_path():
    return data_path("bad_closure.gram")
