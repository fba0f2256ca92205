import random

import pytest

from talentrank.gazetteers import load_default_gazetteers
from talentrank.pipeline import (
    fixture_training_examples,
    load_fixture_corpus,
    train_default_section_model,
)
from talentrank.skillspace import build_cooccurrence, train_embedding

# 6-profile fixture corpus: a and b always co-occur, c never with a
SMALL_CORPUS = [
    {"a", "b"},
    {"a", "b", "d"},
    {"a", "b"},
    {"c", "d"},
    {"c", "d"},
    {"c", "e", "d"},
]


@pytest.fixture(scope="session")
def gaz():
    return load_default_gazetteers()


@pytest.fixture(scope="session")
def fixtures():
    return load_fixture_corpus()


@pytest.fixture(scope="session")
def section_model():
    return train_default_section_model()


@pytest.fixture(scope="session")
def small_embedding():
    _, matrix = build_cooccurrence(SMALL_CORPUS, min_count=1)
    return train_embedding(matrix, d=3, seed=0)


@pytest.fixture()
def rng():
    return random.Random(20240817)
