import itertools

import pytest
from hypothesis import given, settings

from epikit import fixtures
from epikit.models import enumerate_models, models_up_to
from epikit.structures import Structure, is_isomorphic, is_model
from epikit.syntax import Signature, Theory

from support import random_theory, seeds

UNARY = Signature((("g", 1), ("e", 0)))


def brute_force_classes(th, n):
    """Isomorphism classes of models of size n, by exhaustive table search."""
    sig = th.signature
    shapes = [(op, n**arity) for op, arity in sig.ops]
    reps = []
    for tables in itertools.product(*[itertools.product(range(n), repeat=k) for _, k in shapes]):
        A = Structure(sig, n, {op: t for (op, _), t in zip(shapes, tables)}, {})
        if is_model(A, th.axioms) and not any(is_isomorphic(A, R) for R in reps):
            reps.append(A)
    return reps


@pytest.mark.parametrize(
    "name,counts",
    [
        ("lat", [1, 1, 1, 2, 5]),
        ("dl", [1, 1, 1, 2, 3]),
        ("ba", [1, 1, 0, 1, 0]),
        ("sets", [1, 1, 1, 1, 1]),
    ],
)
def test_known_model_counts(name, counts):
    th = fixtures.theory(name)
    assert [len(enumerate_models(th, n)) for n in range(1, 6)] == counts


def test_models_up_to_respects_bounds(dl):
    assert [M.size for M in models_up_to(dl, 4, min_size=3)] == [3, 4, 4]


@settings(max_examples=40, deadline=None)
@given(seeds)
def test_enumeration_matches_brute_force(rng):
    th = random_theory(rng, UNARY, max_axioms=2, names=("x", "y"))
    for n in (1, 2, 3):
        found = enumerate_models(th, n)
        assert all(is_model(A, th.axioms) for A in found)
        assert not any(is_isomorphic(A, B) for A, B in itertools.combinations(found, 2))
        assert len(found) == len(brute_force_classes(th, n))


def test_empty_theory_over_binary_op():
    # non-isomorphic binary operations (magmas) on 1, 2 and 3 points
    th = Theory(Signature((("f", 2),)), ())
    assert [len(enumerate_models(th, n)) for n in (1, 2, 3)] == [1, 10, 3330]
