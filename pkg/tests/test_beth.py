import pytest
from hypothesis import given, settings

from epikit.beth import EXPLICIT, IMPLICIT_ONLY, NOT_IMPLICIT, BethError, beth_check, candidate_terms
from epikit.consequence import entails_finite_class
from epikit.models import models_up_to
from epikit.structures import evaluate
from epikit.syntax import App, Eq, Signature, Theory, Var, parse_atoms, parse_term, substitute

from support import BIN_SIG, REL_SIG, random_atom, random_theory, seeds


def complement_of_x(th):
    return parse_atoms("meet(x,z) = bot(), join(x,z) = top()", th.signature)


def test_dl_complement_is_implicit_only(dl):
    rep = beth_check(dl, complement_of_x(dl), ["x"], ["z"])
    assert rep.verdict == IMPLICIT_ONLY
    assert rep.implicit and rep.implicit_certificates["z"].replay()
    assert rep.definitions == {}
    # every candidate was refuted by a finite distributive lattice
    assert len(rep.refuted["z"]) == len(candidate_terms(dl, ["x"], 3, models_up_to(dl, 4)))


def test_ba_complement_is_explicit(ba):
    rep = beth_check(ba, complement_of_x(ba), ["x"], ["z"])
    assert rep.verdict == EXPLICIT
    assert rep.definitions["z"] == parse_term("not(x)", ba.signature)
    assert rep.certificates["z"].replay()


def test_equation_with_generator_is_explicit(dl):
    rep = beth_check(dl, parse_atoms("z = x", dl.signature), ["x"], ["z"])
    assert rep.verdict == EXPLICIT and rep.definitions["z"] == Var("x")


def test_lower_bound_is_not_implicit(dl):
    rep = beth_check(dl, parse_atoms("meet(x,z) = x", dl.signature), ["x"], ["z"])
    assert rep.verdict == NOT_IMPLICIT and rep.implicit is False
    ce = rep.separation
    assert ce.assignment["z_1"] != ce.assignment["z_2"]


def test_errors(dl):
    with pytest.raises(BethError):
        beth_check(dl, [], ["x"], ["x"])
    lat0 = Theory(Signature((("meet", 2), ("join", 2))), ())
    with pytest.raises(BethError):
        beth_check(lat0, [], [], ["z"])
    with pytest.raises(BethError):
        beth_check(dl, parse_atoms("q = z", dl.signature), ["x"], ["z"])


def test_candidates_distinct_on_models(dl):
    models = models_up_to(dl, 3)
    cands = candidate_terms(dl, ["x"], 2, models)
    profiles = {tuple(evaluate(M, t, {"x": a}) for M in models for a in range(M.size)) for t in cands}
    assert len(profiles) == len(cands)
    assert cands[:3] == [App("bot", ()), App("top", ()), Var("x")]


@settings(max_examples=60, deadline=None)
@given(seeds)
def test_explicit_implies_implicit_on_models(rng):
    sig = rng.choice([BIN_SIG, REL_SIG])
    th = random_theory(rng, sig, max_axioms=2, names=("x", "y"))
    gamma = [random_atom(rng, sig, ("x", "z"), 1) for _ in range(rng.randint(1, 2))]
    rep = beth_check(th, gamma, ["x"], ["z"], depth=1, fuel=300, term_depth=1, model_size=2)
    models = models_up_to(th, 3)
    if rep.verdict == EXPLICIT:
        assert entails_finite_class(models, gamma, Eq(Var("z"), rep.definitions["z"]))
        doubled = [a for g in gamma for a in (substitute(g, {"z": Var("z_1")}), substitute(g, {"z": Var("z_2")}))]
        assert entails_finite_class(models, doubled, Eq(Var("z_1"), Var("z_2")))
    if rep.verdict == NOT_IMPLICIT:
        assert rep.implicit is False and rep.separation is not None
