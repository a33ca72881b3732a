import itertools

import pytest
from hypothesis import given, settings

from epikit import fixtures
from epikit.chase import Certificate
from epikit.consequence import entails_theory
from epikit.epi import (
    EpiError,
    FiniteClass,
    TheoryBounded,
    doubled_query,
    dominion,
    extract_witness,
    is_epic,
    scan_es,
    scan_weak_es,
    shrink_almost_total,
)
from epikit.models import models_up_to
from epikit.structures import is_homomorphism, is_isomorphic, is_subuniverse, subuniverses
from epikit.syntax import Eq, Var, parse_atom

from support import BIN_SIG, REL_SIG, random_theory, seeds

BASE = (0, 1, 3)


@pytest.fixture(scope="module")
def lattices5(lat):
    return FiniteClass(models_up_to(lat, 5))


def test_whole_structure_is_its_own_dominion(square, dl, lattices5):
    for sem in (TheoryBounded(dl), lattices5):
        rep = dominion(square, range(4), sem)
        assert rep.members == (0, 1, 2, 3) and rep.is_total


def test_dl_dominion_is_total(square, dl):
    rep = dominion(square, BASE, TheoryBounded(dl, depth=2))
    assert rep.members == (0, 1, 2, 3)
    cert = rep.evidence[2]
    assert isinstance(cert, Certificate) and cert.replay()
    assert is_epic(square, BASE, TheoryBounded(dl))


def test_lattice_dominion_is_base(square, m3, lattices5):
    rep = dominion(square, BASE, lattices5)
    assert rep.members == BASE and not rep.is_total
    pair = rep.excluded[2]
    assert is_isomorphic(pair.target, m3)
    assert is_homomorphism(square, pair.target, pair.f)
    assert is_homomorphism(square, pair.target, pair.g)
    assert all(pair.f[a] == pair.g[a] for a in BASE)
    assert pair.f[2] != pair.g[2]
    assert not is_epic(square, BASE, lattices5)


def test_base_must_be_subuniverse(square, dl):
    with pytest.raises(EpiError):
        dominion(square, (1, 2), TheoryBounded(dl))


def test_refutation_against_small_models(square, dl, lat):
    rep = dominion(square, BASE, TheoryBounded(lat, depth=1, fuel=500, refute_size=5))
    assert rep.members == BASE
    assert 2 in rep.excluded


def test_complement_witness(square, dl):
    sem = TheoryBounded(dl)
    w = extract_witness(square, BASE, 2, sem)
    sig = dl.signature
    assert parse_atom("meet(v,x1) = x0", sig) in w.sigma or parse_atom("meet(x1,v) = x0", sig) in w.sigma
    assert w.holds_in(square)
    assert w.verify(square, sem)
    assert set(w.a_vec) <= set(BASE) and w.c_vec == ()
    prem, goal = doubled_query(w.sigma)
    assert goal == Eq(Var("v1"), Var("v2"))
    assert entails_theory(dl, prem, goal) is not None


def test_witness_for_base_element(square, dl):
    w = extract_witness(square, BASE, 1, TheoryBounded(dl))
    assert w.sigma == [Eq(Var("v"), Var("x1"))]
    assert w.verify(square, TheoryBounded(dl))


def test_witness_outside_dominion(square, lattices5):
    with pytest.raises(EpiError):
        extract_witness(square, BASE, 2, lattices5)


def test_scan_dl_finds_square(dl, square):
    entries = scan_es(dl, 4)
    assert len(entries) == 1
    e = entries[0]
    assert is_isomorphic(e.structure, square) and len(e.base) == 3 and e.extra == (2,)
    assert e.base == BASE


def test_scan_pure_sets_is_empty():
    sets = fixtures.theory("sets")
    assert scan_es(sets, 3) == []
    assert scan_es(fixtures.theory("dl"), 1) == []


def test_scan_in_parallel_matches(dl):
    one = [(e.structure.key(), e.base) for e in scan_es(dl, 4)]
    two = [(e.structure.key(), e.base) for e in scan_es(dl, 4, workers=2)]
    assert one == two


def test_weak_scan(dl):
    assert [e.base for e in scan_weak_es(dl, 4, max_extra=1)] == [BASE]
    assert scan_weak_es(dl, 4, max_extra=0) == []


def test_shrink_complement_example(square, dl):
    res = shrink_almost_total(square, BASE, {2}, semantics=TheoryBounded(dl))
    assert res.ok
    assert res.base == BASE and res.ambient == (0, 1, 2, 3)


def test_shrink_errors(square, dl):
    sem = TheoryBounded(dl)
    with pytest.raises(EpiError):
        shrink_almost_total(square, BASE, set(), semantics=sem)
    with pytest.raises(EpiError):
        shrink_almost_total(square, (0, 3), {1}, semantics=sem)
    w = extract_witness(square, BASE, 2, sem)
    w.a_vec = (2,)
    with pytest.raises(EpiError):
        shrink_almost_total(square, BASE, {2}, {2: w}, semantics=sem)


def test_scan_entries_reverify(dl):
    for e in scan_es(dl, 4):
        B, A = e.structure, e.base
        assert len(A) < B.size and is_subuniverse(B, A)
        assert is_epic(B, A, TheoryBounded(dl))


# -- properties ----------------------------------------------------------------


def _random_pair(rng):
    sig = rng.choice([BIN_SIG, REL_SIG])
    th = random_theory(rng, sig, max_axioms=2, names=("x", "y"))
    models = models_up_to(th, 3)
    B = rng.choice(models)
    A = rng.choice(subuniverses(B))
    return th, models, B, A


@settings(max_examples=100, deadline=None)
@given(seeds)
def test_dominion_antitone_in_class(rng):
    th, models, B, A = _random_pair(rng)
    small = [C for C in models if rng.random() < 0.5]
    big = dominion(B, A, FiniteClass(models))
    sub = dominion(B, A, FiniteClass(small))
    assert set(big.members) <= set(sub.members)
    chased = dominion(B, A, TheoryBounded(th, depth=1, fuel=300))
    assert set(chased.members) <= set(big.members)


@settings(max_examples=100, deadline=None)
@given(seeds)
def test_dominion_is_subuniverse_over_base(rng):
    th, models, B, A = _random_pair(rng)
    for sem in (FiniteClass(models), TheoryBounded(th, depth=1, fuel=300)):
        rep = dominion(B, A, sem)
        assert set(A) <= set(rep.members)
        assert is_subuniverse(B, rep.members)


@settings(max_examples=100, deadline=None)
@given(seeds)
def test_self_epicity_matches_double_hom_oracle(rng):
    th, models, B, A = _random_pair(rng)
    homs = [h for h in itertools.product(range(B.size), repeat=B.size) if is_homomorphism(B, B, h)]
    oracle = all(f == g for f, g in itertools.combinations(homs, 2) if all(f[a] == g[a] for a in A))
    assert is_epic(B, A, FiniteClass([B])) == oracle


@settings(max_examples=40, deadline=None)
@given(seeds)
def test_witnesses_verify(rng):
    th, models, B, A = _random_pair(rng)
    sem = TheoryBounded(th, depth=1, fuel=300)
    rep = dominion(B, A, sem)
    for b in rep.members:
        w = extract_witness(B, A, b, sem)
        assert w.holds_in(B)
        assert w.verify(B, sem)
