"""Dominions, epic substructures and their syntactic witnesses.

The dominion of a subuniverse A of B collects the elements b at which any two
homomorphisms out of B, agreeing on A, must agree.  Over a finite class this
is decided by enumerating homomorphism pairs.  Over a theory it is
approximated from below by chasing two copies of B's positive diagram glued
along A: b is in the dominion when the copies of b are forced equal.
"""

from __future__ import annotations

import itertools
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from typing import Sequence

from .chase import Certificate, ChaseState
from .consequence import entails_finite_class, entails_theory, shrink_premises
from .models import enumerate_models, models_up_to
from .structures import (
    Structure,
    StructureError,
    closure,
    homomorphisms,
    induced_substructure,
    is_subuniverse,
    isomorphisms,
    satisfies,
    subuniverses,
)
from .syntax import App, Atom, Eq, Rel, Theory, Var, substitute


class EpiError(ValueError):
    pass


@dataclass(frozen=True)
class FiniteClass:
    """Exact semantics: the class is this finite list of finite structures."""

    structures: tuple

    def __post_init__(self):
        object.__setattr__(self, "structures", tuple(self.structures))


@dataclass(frozen=True)
class TheoryBounded:
    """Sound semantics: models of ``theory``, explored by a bounded chase.

    When ``refute_size`` is positive, elements the chase cannot place in the
    dominion are checked against homomorphisms into models of that size or
    less, so they may be shown outside it.
    """

    theory: Theory
    depth: int = 2
    fuel: int = 10000
    refute_size: int = 0


@dataclass(frozen=True)
class HomPair:
    """Two homomorphisms into ``target`` agreeing on the base but not at ``element``."""

    target: Structure
    f: tuple
    g: tuple
    element: int

    def to_json(self) -> dict:
        return {"target_size": self.target.size, "f": list(self.f), "g": list(self.g), "element": self.element}


@dataclass
class DominionReport:
    ambient: Structure
    base: tuple
    semantics: object = field(repr=False)
    members: tuple
    evidence: dict = field(default_factory=dict, repr=False)  # b -> Certificate | str
    excluded: dict = field(default_factory=dict)  # b -> HomPair
    unknown: tuple = ()

    @property
    def is_total(self) -> bool:
        return len(self.members) == self.ambient.size

    def to_json(self) -> dict:
        ev = {}
        for b, e in sorted(self.evidence.items()):
            ev[str(b)] = e.to_json() if isinstance(e, Certificate) else e
        return {
            "ambient_size": self.ambient.size,
            "base": list(self.base),
            "members": list(self.members),
            "epic": self.is_total,
            "evidence": ev,
            "excluded": {str(b): p.to_json() for b, p in sorted(self.excluded.items())},
            "unknown": list(self.unknown),
        }


def _check_base(B: Structure, A) -> tuple:
    A = tuple(sorted(set(A)))
    if any(not 0 <= a < B.size for a in A):
        raise EpiError("base contains elements outside the structure")
    if not is_subuniverse(B, A):
        raise EpiError(f"{list(A)} is not a subuniverse")
    return A


# -- finite-class dominions ----------------------------------------------------


def _separations(B: Structure, A: tuple, targets: Sequence[Structure]) -> dict:
    """First separating hom pair found for each element of B."""
    found: dict[int, HomPair] = {}
    for C in targets:
        if C.signature != B.signature:
            raise StructureError("signature mismatch")
        groups: dict[tuple, list] = {}
        for h in homomorphisms(B, C):
            groups.setdefault(tuple(h[a] for a in A), []).append(h)
        for homs in groups.values():
            for f, g in itertools.combinations(homs, 2):
                for b in range(B.size):
                    if f[b] != g[b] and b not in found:
                        found[b] = HomPair(C, f, g, b)
        if len(found) + len(A) == B.size:
            break
    return found


def _finite_dominion(B: Structure, A: tuple, sem: FiniteClass) -> DominionReport:
    sep = _separations(B, A, sem.structures)
    members = tuple(b for b in range(B.size) if b not in sep)
    note = f"all homomorphism pairs into {len(sem.structures)} structures agree here"
    return DominionReport(B, A, sem, members, {b: note for b in members}, sep)


# -- theory dominions -------------------------------------------------------------


def _gen(b: int, copy: int) -> str:
    return f"e{b}_{copy}"


def diagram(B: Structure, name) -> list:
    """Positive diagram of B: op equations and relation facts, elements named by ``name``."""
    out: list = []
    for op, arity in B.signature.ops:
        for args in itertools.product(range(B.size), repeat=arity):
            out.append(Eq(App(op, tuple(Var(name(a)) for a in args)), Var(name(B.apply(op, args)))))
    for rel, _ in B.signature.rels:
        for t in sorted(B.rels[rel]):
            out.append(Rel(rel, tuple(Var(name(a)) for a in t)))
    return out


def amalgam_state(B: Structure, A: tuple, sem: TheoryBounded) -> ChaseState:
    """Two copies of B's diagram glued along A, saturated under the theory."""
    facts = diagram(B, lambda b: _gen(b, 1)) + diagram(B, lambda b: _gen(b, 2))
    facts += [Eq(Var(_gen(a, 1)), Var(_gen(a, 2))) for a in A]
    gens = [_gen(b, c) for c in (1, 2) for b in range(B.size)]
    st = ChaseState.init(B.signature, gens, facts, sem.depth)
    return st.saturate(sem.theory, sem.fuel)


def _theory_dominion(B: Structure, A: tuple, sem: TheoryBounded) -> DominionReport:
    st = amalgam_state(B, A, sem)
    members, evidence = [], {}
    for b in range(B.size):
        goal = Eq(Var(_gen(b, 1)), Var(_gen(b, 2)))
        if st.proves(goal):
            members.append(b)
            evidence[b] = st.certificate(goal)
    rest = [b for b in range(B.size) if b not in members]
    excluded = {}
    if rest and sem.refute_size > 0:
        sep = _separations(B, A, models_up_to(sem.theory, sem.refute_size))
        excluded = {b: sep[b] for b in rest if b in sep}
    unknown = tuple(b for b in rest if b not in excluded)
    return DominionReport(B, A, sem, tuple(members), evidence, excluded, unknown)


def dominion(B: Structure, A, semantics) -> DominionReport:
    A = _check_base(B, A)
    if isinstance(semantics, FiniteClass):
        return _finite_dominion(B, A, semantics)
    if isinstance(semantics, TheoryBounded):
        return _theory_dominion(B, A, semantics)
    raise TypeError(f"unknown semantics {semantics!r}")


def is_epic(B: Structure, A, semantics) -> bool:
    return dominion(B, A, semantics).is_total


# -- witnesses -------------------------------------------------------------------


@dataclass
class EpiWitness:
    """Premises Σ(x̄, z̄, v) pinning b down over A.

    Variables ``x<a>`` name elements of A, ``z<c>`` further elements of B and
    ``v`` the element b itself.
    """

    b: int
    sigma: list
    a_vec: tuple
    c_vec: tuple
    certificate: Certificate | str | None = None

    def assignment(self) -> dict:
        env = {f"x{a}": a for a in self.a_vec}
        env.update({f"z{c}": c for c in self.c_vec})
        env["v"] = self.b
        return env

    def doubled(self) -> tuple[list, Atom]:
        return doubled_query(self.sigma)

    def holds_in(self, B: Structure) -> bool:
        env = self.assignment()
        return all(satisfies(B, s, env) for s in self.sigma)

    def verify(self, B: Structure, semantics) -> bool:
        """Both witness conditions: B satisfies Σ at (ā, c̄, b), and the doubled entailment holds."""
        return self.holds_in(B) and _doubled_decider(semantics)(self.sigma, None)


def doubled_query(sigma: Sequence[Atom]) -> tuple[list, Atom]:
    """Σ(x̄,z̄,v1) ∪ Σ(x̄,ȳ,v2) and the goal v1 = v2."""
    first = {x: Var("v1") if x == "v" else Var(x) for x in _names(sigma)}
    second = {x: Var("v2") if x == "v" else Var("y" + x[1:]) if x.startswith("z") else Var(x) for x in _names(sigma)}
    prem = [substitute(s, first) for s in sigma] + [substitute(s, second) for s in sigma]
    return list(dict.fromkeys(prem)), Eq(Var("v1"), Var("v2"))


def _names(sigma) -> set:
    from .syntax import vars_of

    out: set = {"v"}
    for s in sigma:
        out |= vars_of(s)
    return out


def _doubled_decider(semantics):
    def decide(sigma, _goal) -> bool:
        prem, goal = doubled_query(sigma)
        if isinstance(semantics, FiniteClass):
            return entails_finite_class(list(semantics.structures), prem, goal)
        return entails_theory(semantics.theory, prem, goal, semantics.fuel, semantics.depth) is not None

    return decide


def extract_witness(B: Structure, A, b: int, semantics) -> EpiWitness:
    A = _check_base(B, A)
    if b in A:
        return EpiWitness(b, [Eq(Var("v"), Var(f"x{b}"))], (b,), (), "b lies in the base")

    def name(c: int) -> str:
        return "v" if c == b else f"x{c}" if c in A else f"z{c}"

    full = list(dict.fromkeys(diagram(B, name)))
    decide = _doubled_decider(semantics)
    if not decide(full, None):
        raise EpiError(f"element {b} is not shown to be in the dominion")
    sigma = shrink_premises(decide, full, Eq(Var("v1"), Var("v2")))
    used = _names(sigma)
    a_vec = tuple(a for a in A if f"x{a}" in used)
    c_vec = tuple(c for c in range(B.size) if f"z{c}" in used)
    if isinstance(semantics, TheoryBounded):
        prem, goal = doubled_query(sigma)
        cert = entails_theory(semantics.theory, prem, goal, semantics.fuel, semantics.depth)
    else:
        cert = f"checked against {len(semantics.structures)} structures"
    return EpiWitness(b, sigma, a_vec, c_vec, cert)


# -- scanning for proper epic substructures ------------------------------------------


@dataclass
class ScanEntry:
    structure: Structure
    base: tuple
    report: DominionReport = field(repr=False)
    extra: tuple = ()  # a smallest Z with B = Sg(A ∪ Z)

    def to_json(self) -> dict:
        from .structures import render_structure

        return {
            "structure": render_structure(self.structure),
            "size": self.structure.size,
            "base": list(self.base),
            "extra": list(self.extra),
            "report": self.report.to_json(),
        }


def _orbit_representatives(B: Structure, subs: list) -> list:
    autos = list(isomorphisms(B, B))
    keep, seen = [], set()
    for U in subs:
        if U in seen:
            continue
        keep.append(U)
        for h in autos:
            seen.add(tuple(sorted(h[u] for u in U)))
    return keep


def _smallest_extra(B: Structure, A: tuple) -> tuple:
    rest = [b for b in range(B.size) if b not in A]
    for k in range(1, len(rest) + 1):
        for Z in itertools.combinations(rest, k):
            if len(closure(B, A + Z)) == B.size:
                return Z
    return tuple(rest)


def _scan_one(args) -> list:
    B, semantics = args
    out = []
    for A in _orbit_representatives(B, [U for U in subuniverses(B) if len(U) < B.size]):
        sem = semantics
        rep = dominion(B, A, sem)
        if rep.is_total:
            out.append(ScanEntry(B, A, rep, _smallest_extra(B, A)))
    return out


def scan_es(T: Theory, max_size: int = 6, semantics=None, *, min_size: int = 1, workers: int = 1) -> list:
    """Models of T up to ``max_size`` with a proper epic subuniverse.

    Models are taken up to isomorphism, and subuniverses up to automorphisms
    of the model.  The default semantics is the theory chase at depth 2.
    """
    if semantics is None:
        semantics = TheoryBounded(T, 2, 10000)
    jobs = [(B, semantics) for n in range(min_size, max_size + 1) for B in enumerate_models(T, n)]
    if workers > 1:
        with ProcessPoolExecutor(workers) as pool:
            chunks = list(pool.map(_scan_one, jobs))
    else:
        chunks = [_scan_one(j) for j in jobs]
    entries = [e for chunk in chunks for e in chunk]
    entries.sort(key=lambda e: (e.structure.key(), e.base))
    return entries


def scan_weak_es(T: Theory, max_size: int = 6, semantics=None, *, max_extra: int = 1, workers: int = 1) -> list:
    """Proper epic pairs where B is generated by A and at most ``max_extra`` further elements."""
    return [e for e in scan_es(T, max_size, semantics, workers=workers) if len(e.extra) <= max_extra]


# -- shrinking almost total pairs ---------------------------------------------------


@dataclass
class ShrinkResult:
    ambient: tuple  # universe of B' inside B
    base: tuple  # universe of A' inside B
    generators: tuple  # Y ∪ Z, generating B'
    structure: Structure
    sub_base: tuple  # A' as indices of ``structure``
    finitely_generated: bool
    proper: bool
    epic: bool

    @property
    def ok(self) -> bool:
        return self.finitely_generated and self.proper and self.epic


def shrink_almost_total(B: Structure, A, Z, witnesses: dict | None = None, semantics=None) -> ShrinkResult:
    """Cut a proper epic pair down to one generated by the witness data.

    Y collects the base elements the witnesses of the elements of Z mention;
    the result is A' = Sg(Y) inside B' = Sg(Y ∪ Z).
    """
    A = _check_base(B, A)
    Z = tuple(sorted(set(Z)))
    if not Z:
        raise EpiError("Z must be nonempty: A has to be a proper almost total substructure")
    if set(Z) & set(A):
        raise EpiError("Z must lie outside A")
    if len(closure(B, A + Z)) != B.size:
        raise EpiError("A together with Z does not generate B")
    if semantics is None:
        raise EpiError("semantics required")
    witnesses = dict(witnesses or {})
    for b in Z:
        if b not in witnesses:
            witnesses[b] = extract_witness(B, A, b, semantics)
    Y: set = set()
    for b in Z:
        w = witnesses[b]
        if not set(w.a_vec) <= set(A) or not set(w.c_vec) <= set(Z):
            raise EpiError(f"witness for {b} is not over A and Z")
        Y |= set(w.a_vec)
    base = tuple(closure(B, sorted(Y)))
    if not base:
        raise EpiError("witnesses name no base elements and there are no constants")
    amb = tuple(closure(B, sorted(Y | set(Z))))
    sub, emb = induced_substructure(B, amb)
    back = {x: i for i, x in enumerate(emb)}
    sub_base = tuple(back[a] for a in base)
    proper = len(base) < len(amb)
    epic = proper and is_epic(sub, sub_base, semantics)
    return ShrinkResult(amb, base, tuple(sorted(Y | set(Z))), sub, sub_base, True, proper, epic)
