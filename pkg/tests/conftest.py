import json
import os

import pytest

from conecrafter.documents import load_document

CORPUS = os.path.join(os.path.dirname(__file__), os.pardir, "corpus")


def corpus_path(name: str) -> str:
    return os.path.normpath(os.path.join(CORPUS, name))


def load_corpus(name: str):
    return load_document(corpus_path(name))


def read_corpus_json(name: str):
    with open(corpus_path(name)) as fh:
        return json.load(fh)


@pytest.fixture(scope="session")
def elliptic_doc():
    return load_corpus("elliptic_gauss.json")


@pytest.fixture(scope="session")
def product_doc():
    return load_corpus("product_gauss_squared.json")


@pytest.fixture(scope="session")
def bielliptic_doc():
    return load_corpus("bielliptic_z4.json")


@pytest.fixture(scope="session")
def hyperbolic_doc():
    return load_corpus("hyperbolic_z8.json")


@pytest.fixture(scope="session")
def p2_doc():
    return load_corpus("p2_minkowski.json")
