"""End-to-end acceptance checks, one test per criterion.

Each test prints a single ``criterion N: PASS|FAIL`` line next to the pytest
report, then asserts.
"""

import contextlib
import json
import random
import time

import pytest

from epikit import fixtures
from epikit.beth import EXPLICIT, IMPLICIT_ONLY, beth_check
from epikit.chase import Certificate, chase_query
from epikit.cli import main
from epikit.consequence import counterexample, entails_finite_class, entails_theory, shrink_premises, theory_decider
from epikit.epi import FiniteClass, TheoryBounded, dominion, is_epic, scan_es, shrink_almost_total
from epikit.logic import check_equivalential, filter_of, is_reduced, leibniz, reduce_matrix
from epikit.models import models_up_to
from epikit.structures import (
    FilterSpec,
    Structure,
    all_congruences,
    closure,
    direct_product,
    is_homomorphism,
    is_isomorphic,
    is_model,
    reduced_product,
    subuniverses,
)
from epikit.syntax import Signature, compose, parse_atom, parse_atoms, substitute

from support import BIN_SIG, REL_SIG, SMALL_SIG, random_atom, random_term, random_theory

BASE = (0, 1, 3)
COMPLEMENT_QUERY = "z = w <= meet(x,z)=bot(), join(x,z)=top(), meet(x,w)=bot(), join(x,w)=top()"


@pytest.fixture
def report(capsys):
    @contextlib.contextmanager
    def criterion(n, title):
        notes = []
        try:
            yield notes
        except BaseException:
            with capsys.disabled():
                print(f"\ncriterion {n}: FAIL  {title}")
            raise
        with capsys.disabled():
            extra = f"  ({'; '.join(notes)})" if notes else ""
            print(f"\ncriterion {n}: PASS  {title}{extra}")

    return criterion


def cli(capsys, *argv):
    code = main(list(argv))
    return code, capsys.readouterr().out


def test_criterion_1_complement_uniqueness(report, capsys, dl, complements):
    with report(1, "complement uniqueness in DL") as notes:
        t0 = time.perf_counter()
        code, out = cli(capsys, "entail", "--theory", "dl.ua", "--query", COMPLEMENT_QUERY, "--fuel", "10000", "--depth", "2", "--json")
        elapsed = time.perf_counter() - t0
        assert code == 0 and elapsed < 5
        payload = json.loads(out)
        cert = Certificate.from_json(payload["certificate"], dl)
        assert payload["verdict"] == "proved" and cert.replay()
        notes.append(f"{len(cert)} steps in {elapsed:.2f}s")
        goal = parse_atom("z = w", dl.signature)
        models = models_up_to(dl, 4)
        for i in range(4):
            rest = complements[:i] + complements[i + 1 :]
            assert entails_theory(dl, rest, goal, 10000, 2) is None
            ce = counterexample(models, rest, goal)
            assert ce is not None and ce.structure.size <= 4
        assert shrink_premises(theory_decider(dl), complements, goal) == complements


def test_criterion_2_dominion_dichotomy(report, square, dl, lat, m3):
    with report(2, "dominion dichotomy on the four-element Boolean lattice") as notes:
        t0 = time.perf_counter()
        chased = dominion(square, BASE, TheoryBounded(dl, depth=2, fuel=10000))
        t1 = time.perf_counter()
        finite = dominion(square, BASE, FiniteClass(models_up_to(lat, 5)))
        t2 = time.perf_counter()
        assert t1 - t0 < 30 and t2 - t1 < 30
        assert chased.members == (0, 1, 2, 3) and chased.evidence[2].replay()
        assert finite.members == BASE
        pair = finite.excluded[2]
        assert is_isomorphic(pair.target, m3)
        assert is_homomorphism(square, pair.target, pair.f) and is_homomorphism(square, pair.target, pair.g)
        assert all(pair.f[a] == pair.g[a] for a in BASE) and pair.f[2] != pair.g[2]
        notes.append(f"chase {t1 - t0:.2f}s, finite class {t2 - t1:.2f}s")


def test_criterion_3_es_scan(report, capsys, square):
    with report(3, "epic-surjectivity scan") as notes:
        code, out = cli(capsys, "scan-es", "--theory", "dl.ua", "--max-size", "4", "--json")
        pairs = json.loads(out)["pairs"]
        assert code == 0 and len(pairs) == 1
        entry = scan_es(fixtures.theory("dl"), 4)[0]
        assert is_isomorphic(entry.structure, square) and entry.base == BASE
        code, out = cli(capsys, "scan-es", "--theory", "sets.ua", "--max-size", "3", "--json")
        assert code == 0 and json.loads(out)["pairs"] == []
        notes.append("DL: 1 pair, pure sets: none")


def _random_matrix(rng, n):
    sig = Signature((("imp", 2),), (("r", 1),))
    F = {a for a in range(n) if rng.random() < 0.5}
    return Structure(sig, n, {"imp": [rng.randrange(n) for _ in range(n * n)]}, {"r": {(a,) for a in F}})


def test_criterion_4_leibniz_oracle(report):
    with report(4, "Leibniz congruence against brute force") as notes:
        rng = random.Random(4)
        t0 = time.perf_counter()
        for _ in range(200):
            M = _random_matrix(rng, rng.randint(1, 4))
            F = filter_of(M)
            compatible = [c for c in all_congruences(M) if all(set(k) <= F or not set(k) & F for k in c.classes())]
            top = [c for c in compatible if all(d <= c for d in compatible)]
            assert len(top) == 1 and leibniz(M) == top[0]
            assert is_reduced(reduce_matrix(M)[0])
        elapsed = time.perf_counter() - t0
        assert elapsed < 60
        notes.append(f"200 matrices in {elapsed:.2f}s")


def test_criterion_5_chase_soundness(report):
    with report(5, "chase soundness on random theories") as notes:
        proved = 0
        for seed in range(100):
            rng = random.Random(5000 + seed)
            sig = rng.choice([BIN_SIG, REL_SIG])
            th = random_theory(rng, sig, max_axioms=3, names=("x", "y", "z"))
            gens = ("a", "b")
            prem = [random_atom(rng, sig, gens, 1) for _ in range(rng.randint(0, 2))]
            goal = random_atom(rng, sig, gens, 1)
            if entails_theory(th, prem, goal, fuel=500, depth=1) is not None:
                proved += 1
                assert entails_finite_class(models_up_to(th, 3), prem, goal)
        assert proved > 0
        notes.append(f"{proved} of 100 proved, 0 violations")


def test_criterion_6_beth(report, dl, ba):
    with report(6, "Beth definability case study"):
        text = fixtures.read("complement_gamma.txt")
        rep = beth_check(dl, parse_atoms(text, dl.signature), ["x"], ["z"], term_depth=3)
        assert rep.verdict == IMPLICIT_ONLY
        rep = beth_check(ba, parse_atoms(text, ba.signature), ["x"], ["z"], term_depth=3)
        assert rep.verdict == EXPLICIT and str(rep.definitions["z"]) == "not(x)"


def test_criterion_7_shrinker(report, square, dl):
    with report(7, "almost-total shrinker"):
        sem = TheoryBounded(dl)
        res = shrink_almost_total(square, BASE, {2}, semantics=sem)
        assert res.ok
        assert tuple(closure(square, res.generators)) == res.ambient
        assert tuple(closure(square, res.base)) == res.base and len(res.base) < len(res.ambient)
        assert is_epic(res.structure, res.sub_base, TheoryBounded(dl, depth=2, fuel=10000))


def test_criterion_8_equivalential(report, imp):
    with report(8, "equivalentiality checker on implicational logic") as notes:
        t0 = time.perf_counter()
        rep = check_equivalential(imp, fixtures.terms("imp_delta.txt", imp.signature), fuel=50000)
        assert rep.verdict == "verified"
        notes.append(f"verified in {time.perf_counter() - t0:.1f}s")
        for name, where in (("broken_delta.txt", "reflexivity"), ("imp_half_delta.txt", "congruence:imp")):
            bad = check_equivalential(imp, fixtures.terms(name, imp.signature), fuel=50000)
            assert bad.verdict == "failed" and bad.failed_at == where
            assert bad.conditions[-1].countermodel is not None


def _monotone_chase(rng):
    sig = rng.choice([SMALL_SIG, REL_SIG])
    th = random_theory(rng, sig)
    gens = ("a", "b")
    facts = [random_atom(rng, sig, gens, 1) for _ in range(rng.randint(0, 2))]
    goal = random_atom(rng, sig, gens, 1)
    fuel = rng.randint(0, 20)
    if chase_query(th, facts, goal, 1, fuel).holds(goal):
        assert chase_query(th, facts, goal, 1, fuel + rng.randint(1, 50)).holds(goal)
    shallow, deep = chase_query(th, facts, goal, 0, 2000), chase_query(th, facts, goal, 1, 2000)
    if shallow.holds(goal):
        assert deep.holds(goal) or deep.fuel_exhausted


def _antitone_dominion(rng):
    th = random_theory(rng, rng.choice([BIN_SIG, REL_SIG]), max_axioms=2, names=("x", "y"))
    models = models_up_to(th, 3)
    B = rng.choice(models)
    A = rng.choice(subuniverses(B))
    small = [C for C in models if rng.random() < 0.5]
    assert set(dominion(B, A, FiniteClass(models)).members) <= set(dominion(B, A, FiniteClass(small)).members)


def _composition(rng):
    names = ("x", "y", "z")
    t = random_term(rng, SMALL_SIG, names, 4)
    h = {x: random_term(rng, SMALL_SIG, names, 2) for x in names if rng.random() < 0.7}
    g = {x: random_term(rng, SMALL_SIG, names, 2) for x in names if rng.random() < 0.7}
    assert substitute(substitute(t, h), g) == substitute(t, compose(g, h))


def _reduced_product(rng):
    th = random_theory(rng, SMALL_SIG, max_axioms=2, names=("x", "y"))
    models = models_up_to(th, 2)
    if not models:
        return
    m = rng.randint(1, 3)
    factors = [rng.choice(models) for _ in range(m)]
    J = {i for i in range(m) if rng.random() < 0.6} or {rng.randrange(m)}
    D = FilterSpec.principal(m, J)
    assert D.is_proper
    for S in D.member_sets:
        assert all(S | {i} in D for i in range(m))
        assert all(S & T in D for T in D.member_sets)
    R = reduced_product(factors, D)
    assert is_model(R, th.axioms)
    if len(J) == 1:
        assert is_isomorphic(R, factors[next(iter(J))])
    if len(J) == m:
        assert is_isomorphic(R, direct_product(factors))


def test_criterion_9_invariants(report):
    with report(9, "invariant suites") as notes:
        for k, prop in enumerate((_monotone_chase, _antitone_dominion, _composition, _reduced_product)):
            for seed in range(100):
                prop(random.Random(9000 * (k + 1) + seed))
            notes.append(f"{prop.__name__.lstrip('_')}: 100")
