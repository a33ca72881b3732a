import pytest
from hypothesis import given, settings

from epikit.chase import ChaseError
from epikit.consequence import (
    counterexample,
    entails_finite_class,
    entails_theory,
    finite_decider,
    shrink_premises,
    theory_decider,
)
from epikit.models import models_up_to
from epikit.structures import StructureError, is_isomorphic
from epikit.syntax import Signature, SignatureError, parse_atom

from support import BIN_SIG, REL_SIG, random_atom, random_theory, seeds


def test_premise_is_conclusion(dl, square):
    p = parse_atom("meet(x,y) = x", dl.signature)
    assert entails_finite_class([square], [p], p)
    cert = entails_theory(dl, [p], p)
    assert cert is not None and len(cert) == 0


def test_symmetry_of_equality(dl, square):
    sig = dl.signature
    assert entails_finite_class([square], [parse_atom("x = y", sig)], parse_atom("y = x", sig))


def test_complements_not_unique_in_lattices(lat, m3, complements):
    goal = parse_atom("z = w", lat.signature)
    ce = counterexample(models_up_to(lat, 5), complements, goal)
    assert ce is not None
    assert is_isomorphic(ce.structure, m3)
    assert ce.assignment["z"] != ce.assignment["w"]
    assert ce.assignment["x"] not in (0, 4)
    assert entails_theory(lat, complements, goal) is None


def test_complements_unique_in_dl(dl, complements):
    cert = entails_theory(dl, complements, parse_atom("z = w", dl.signature), fuel=10000, depth=2)
    assert cert is not None and cert.replay()


def test_deepening_finds_shallow_proof(dl):
    sig = dl.signature
    cert = entails_theory(dl, [], parse_atom("meet(x,x) = x", sig), depth=3, deepen=True)
    assert cert is not None and cert.replay()


def test_universe_cap_means_unknown(dl, complements):
    assert entails_theory(dl, complements, parse_atom("z = w", dl.signature), max_universe=50) is None


def test_signature_mismatch(square):
    other = Signature((("f", 1),))
    with pytest.raises(SignatureError):
        entails_finite_class([square], [], parse_atom("f(x) = x", other))
    from epikit.structures import Structure

    B = Structure(other, 1, {"f": [0]}, {})
    with pytest.raises(StructureError):
        entails_finite_class([square, B], [], parse_atom("x = x", square.signature))


def test_shrink_examples(dl, complements):
    sig = dl.signature
    p, q = parse_atom("x = meet(x,y)", sig), parse_atom("y = y", sig)
    assert shrink_premises(theory_decider(dl), [p, q], p) == [p]
    assert shrink_premises(theory_decider(dl), [p, p, q], p) == [p]
    kept = shrink_premises(theory_decider(dl), complements, parse_atom("z = w", sig))
    assert kept == complements


def test_shrink_rejects_unentailed(dl):
    sig = dl.signature
    with pytest.raises(ChaseError):
        shrink_premises(theory_decider(dl), [], parse_atom("x = y", sig))


def test_dropping_a_complement_premise_is_refuted(dl, complements):
    goal = parse_atom("z = w", dl.signature)
    models = models_up_to(dl, 4)
    for i in range(4):
        rest = complements[:i] + complements[i + 1 :]
        ce = counterexample(models, rest, goal)
        assert ce is not None and ce.structure.size <= 4


@settings(max_examples=100, deadline=None)
@given(seeds)
def test_theory_entailment_sound(rng):
    sig = rng.choice([BIN_SIG, REL_SIG])
    th = random_theory(rng, sig)
    names = ("a", "b")
    prem = [random_atom(rng, sig, names, 1) for _ in range(rng.randint(0, 2))]
    goal = random_atom(rng, sig, names, 1)
    if entails_theory(th, prem, goal, fuel=500, depth=1) is not None:
        assert entails_finite_class(models_up_to(th, 3), prem, goal)


@settings(max_examples=100, deadline=None)
@given(seeds)
def test_finite_entailment_antitone_in_class(rng):
    th = random_theory(rng, REL_SIG)
    K = models_up_to(th, 2)
    names = ("a", "b")
    prem = [random_atom(rng, REL_SIG, names, 1) for _ in range(rng.randint(0, 2))]
    goal = random_atom(rng, REL_SIG, names, 1)
    smaller = [A for A in K if rng.random() < 0.5]
    if entails_finite_class(K, prem, goal):
        assert entails_finite_class(smaller, prem, goal)


@settings(max_examples=60, deadline=None)
@given(seeds)
def test_shrink_output_one_minimal(rng):
    th = random_theory(rng, REL_SIG)
    K = models_up_to(th, 2)
    names = ("a", "b")
    prem = [random_atom(rng, REL_SIG, names, 1) for _ in range(rng.randint(1, 4))]
    goal = prem[0] if rng.random() < 0.3 else random_atom(rng, REL_SIG, names, 1)
    decide = finite_decider(K)
    if not decide(prem, goal):
        return
    kept = shrink_premises(decide, prem, goal)
    assert set(kept) <= set(prem)
    assert decide(kept, goal)
    for s in kept:
        assert not decide([p for p in kept if p != s], goal)
