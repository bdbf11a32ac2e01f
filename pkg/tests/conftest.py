import os

import numpy as np
import pytest
from dotenv import load_dotenv

from ontopred.AnnotationSet import AnnotationSet, propagate_true_path
from ontopred.OntologyGraph import parse_obo
from ontopred.synthetic import random_annotations, random_dag

load_dotenv()

FIXTURES = os.path.join(os.path.dirname(__file__), "fixtures")

# Dense indices of the diamond fixture, lexicographic by accession.
R, A, B, C = 0, 1, 2, 3


def pytest_configure(config):
    config.addinivalue_line("markers", "slow: end-to-end training and scale tests")


@pytest.fixture
def fixture_path():
    def path(name):
        return os.path.join(FIXTURES, name)

    return path


@pytest.fixture
def t1_text():
    with open(os.path.join(FIXTURES, "t1.obo"), encoding="utf-8") as f:
        return f.read()


@pytest.fixture
def t1(t1_text):
    return parse_obo(t1_text, source="t1.obo")


@pytest.fixture
def t1_annotations(t1):
    """p1={C}, p2={A}, p3={B}, propagated."""
    direct = AnnotationSet(proteins=("p1", "p2", "p3"), labels=((C,), (A,), (B,)))
    return propagate_true_path(direct, t1)


@pytest.fixture
def random_corpus():
    """100 random DAGs of up to 200 terms with random propagated annotations."""
    corpus = []
    for seed in range(100):
        rng = np.random.default_rng(seed)
        n_terms = int(rng.integers(1, 201))
        g = random_dag(n_terms, seed=seed, window=int(rng.integers(2, 12)))
        records = random_annotations(g, int(rng.integers(1, 30)), seed=seed)
        a = propagate_true_path(AnnotationSet.from_records(records, g), g)
        corpus.append((g, a))
    return corpus
