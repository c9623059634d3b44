import shutil
from itertools import product
from pathlib import Path

import pytest
from hypothesis import HealthCheck, settings

from paramdes.algebra import DomainSpec, parse_predicate
from paramdes.fixtures import GE5, five_state_example
from paramdes.oracle import py_eval

settings.register_profile(
    "default",
    max_examples=60,
    deadline=None,
    suppress_health_check=[HealthCheck.too_slow],
)
settings.load_profile("default")

CORPUS_SEEDS = range(200)
MODELS = Path(__file__).resolve().parents[1] / "models"

HAS_Z3 = shutil.which("z3") is not None
needs_z3 = pytest.mark.skipif(not HAS_Z3, reason="z3 not on PATH")


def brute_denotation(phi, lo, hi, arity):
    """Reference denotation by direct interpretation over ``[lo:hi]^arity``."""
    elems = list(range(lo, hi + 1))
    return [t for t in product(elems, repeat=arity) if py_eval(phi, dict(enumerate(t, 1)), elems)]


@pytest.fixture
def five_state():
    return five_state_example()


@pytest.fixture
def ge5():
    return parse_predicate(GE5)


@pytest.fixture
def small():
    return DomainSpec.bounded(0, 9)
