"""Deductive systems over finite variable sets, and their matrix semantics.

A system is a finite list of rules ``Γ / φ`` over terms.  ``Γ ⊢ φ`` holds when
φ ends a finite sequence whose items are members of Γ or substitution
instances of rule conclusions whose premises appeared earlier.

``derives`` searches for such sequences by condensed detachment: facts are
terms with schematic variables, a rule is fired by unifying its premises
with facts, and the members of Γ are facts whose variables are held fixed.
A success is expanded into an explicit, replayable sequence.
"""

from __future__ import annotations

import heapq
import itertools
from dataclasses import dataclass, field
from typing import Iterable, Sequence

import numpy as np

from .consequence import entails_finite_class
from .models import enumerate_models
from .structures import Congruence, Structure, StructureError, quotient
from .syntax import (
    App,
    Eq,
    Implication,
    Rel,
    Signature,
    Term,
    Theory,
    Var,
    _Parser,
    check_term,
    ordered_vars,
    substitute,
    vars_of,
)


class LogicError(ValueError):
    pass


@dataclass(frozen=True)
class Rule:
    premises: tuple
    conclusion: Term

    def __str__(self):
        if not self.premises:
            return str(self.conclusion)
        return f"{self.conclusion} <- " + ", ".join(map(str, self.premises))


@dataclass(frozen=True)
class DeductiveSystem:
    signature: Signature
    variables: tuple
    rules: tuple

    def __post_init__(self):
        if not self.signature.is_algebraic:
            raise LogicError("a deductive system needs an algebraic signature")
        names = list(self.variables)
        for r in self.rules:
            for t in r.premises + (r.conclusion,):
                check_term(self.signature, t)
                names += ordered_vars(t)
        object.__setattr__(self, "variables", tuple(dict.fromkeys(names)))
        object.__setattr__(self, "rules", tuple(self.rules))


def parse_system(text: str) -> DeductiveSystem:
    """``sig`` block, optional ``vars ... end``, then ``rules`` with ``CONCL <- P1, P2``."""
    p = _Parser(text)
    sig = p.signature_block()
    p.sig = sig
    variables = []
    if p.peek().text == "vars":
        p.next()
        while p.peek().text != "end":
            t = p.next()
            if t.kind != "ident":
                p.error(f"expected a variable name, found {t.text!r}", t)
            variables.append(t.text)
        p.next()
    rules = []
    if p.peek().text == "rules":
        p.next()
        while p.peek().text != "end":
            if p.peek().kind == "eof":
                p.error("missing 'end' of rules block", p.peek())
            concl = p.term()
            prem = []
            if p.peek(skip_nl=False).text == "<-":
                p.next(skip_nl=False)
                prem.append(p.term())
                while p.peek(skip_nl=False).text == ",":
                    p.next(skip_nl=False)
                    prem.append(p.term())
            rules.append(Rule(tuple(dict.fromkeys(prem)), concl))
            p.end_of_item()
        p.next()
    p.expect_eof()
    return DeductiveSystem(sig, tuple(variables), tuple(rules))


def render_system(S: DeductiveSystem) -> str:
    from .syntax import render_signature

    lines = [render_signature(S.signature), "vars " + " ".join(S.variables) + " end", "rules"]
    lines += [f"  {r}" for r in S.rules]
    lines.append("end")
    return "\n".join(lines) + "\n"


# -- condensed detachment --------------------------------------------------------
#
# Internal terms: int = schematic variable, str = fixed variable,
# tuple (op, arg, ...) = application.


def _internal(t: Term, slot: dict | None):
    if isinstance(t, Var):
        return slot[t.name] if slot is not None else t.name
    return (t.op,) + tuple(_internal(a, slot) for a in t.args)


def _external(t, default: str) -> Term:
    if isinstance(t, int):
        return Var(default)
    if isinstance(t, str):
        return Var(t)
    return App(t[0], tuple(_external(a, default) for a in t[1:]))


def _walk(t, s: dict):
    while isinstance(t, int) and t in s:
        t = s[t]
    return t


def _occurs(v: int, t, s: dict) -> bool:
    t = _walk(t, s)
    if t == v:
        return True
    return isinstance(t, tuple) and any(_occurs(v, a, s) for a in t[1:])


def _unify(a, b, s: dict) -> bool:
    stack = [(a, b)]
    while stack:
        a, b = stack.pop()
        a, b = _walk(a, s), _walk(b, s)
        if a == b:
            continue
        if isinstance(a, int):
            if _occurs(a, b, s):
                return False
            s[a] = b
        elif isinstance(b, int):
            if _occurs(b, a, s):
                return False
            s[b] = a
        elif isinstance(a, tuple) and isinstance(b, tuple) and a[0] == b[0] and len(a) == len(b):
            stack.extend(zip(a[1:], b[1:]))
        else:
            return False
    return True


def _resolve(t, s: dict):
    t = _walk(t, s)
    if isinstance(t, tuple):
        return (t[0],) + tuple(_resolve(a, s) for a in t[1:])
    return t


def _shift(t, k: int):
    if isinstance(t, int):
        return t + k
    if isinstance(t, tuple):
        return (t[0],) + tuple(_shift(a, k) for a in t[1:])
    return t


def _canon(t) -> tuple:
    """Rename schematic variables to 0, 1, ... by first occurrence."""
    ren: dict[int, int] = {}

    def go(x):
        if isinstance(x, int):
            if x not in ren:
                ren[x] = len(ren)
            return ren[x]
        if isinstance(x, tuple):
            return (x[0],) + tuple(go(a) for a in x[1:])
        return x

    return go(t), ren


def _tdepth(t) -> int:
    if isinstance(t, tuple):
        return 1 + max((_tdepth(a) for a in t[1:]), default=-1)
    return 0


def _rigid(t) -> bool:
    if isinstance(t, tuple):
        return any(_rigid(a) for a in t[1:])
    return isinstance(t, str)


def _tsize(t) -> int:
    if isinstance(t, tuple):
        return 1 + sum(_tsize(a) for a in t[1:])
    return 1


def _match(pat, t, s: dict) -> bool:
    """One-way: bind schematic variables of pat so that it equals t."""
    if isinstance(pat, int):
        if pat in s:
            return s[pat] == t
        s[pat] = t
        return True
    if isinstance(pat, str):
        return pat == t
    if not isinstance(t, tuple) or t[0] != pat[0] or len(t) != len(pat):
        return False
    return all(_match(p, x, s) for p, x in zip(pat[1:], t[1:]))


def _top(t):
    return "*" if isinstance(t, int) else t if isinstance(t, str) else t[0]


def _shape(t) -> tuple:
    if not isinstance(t, tuple):
        return (_top(t),)
    return (t[0],) + tuple(_top(a) for a in t[1:])


def _shapes_matching(t):
    """Shapes of the terms that could match t, most specific first."""
    yield ("*",)
    if not isinstance(t, tuple):
        if isinstance(t, str):
            yield (t,)
        return
    for combo in itertools.product(*[(_top(a), "*") if _top(a) != "*" else ("*",) for a in t[1:]]):
        yield (t[0],) + combo


@dataclass
class _Fact:
    term: tuple
    nvars: int
    rule: int  # -1 for a member of Γ
    parents: tuple = ()
    offsets: tuple = ()
    sigma: dict = field(default_factory=dict)
    ren: dict = field(default_factory=dict)


@dataclass(frozen=True)
class Line:
    term: Term
    rule: int | None  # None: a member of Γ
    subst: dict
    uses: tuple  # indices of earlier lines matching the rule's premises

    def render(self, k: int) -> str:
        if self.rule is None:
            return f"[{k}] {self.term}    premise"
        s = ",".join(f"{x}↦{t}" for x, t in sorted(self.subst.items()))
        refs = "".join(f" [{u + 1}]" for u in self.uses)
        return f"[{k}] {self.term}    rule#{self.rule} {{{s}}}{refs}"


@dataclass
class Derivation:
    goal: Term
    lines: list

    @property
    def steps(self) -> int:
        return sum(1 for ln in self.lines if ln.rule is not None)

    def render(self) -> str:
        return "\n".join(ln.render(k) for k, ln in enumerate(self.lines, start=1))

    def to_json(self) -> list:
        return [
            {"term": str(ln.term), "rule": ln.rule, "subst": {x: str(t) for x, t in sorted(ln.subst.items())}, "uses": list(ln.uses)}
            for ln in self.lines
        ]


def check_derivation(S: DeductiveSystem, gamma: Sequence[Term], d: Derivation) -> bool:
    """Replay: every line is in Γ or a rule instance over earlier lines; the last is the goal."""
    gamma = set(gamma)
    for k, ln in enumerate(d.lines):
        if ln.rule is None:
            if ln.term not in gamma:
                return False
            continue
        r = S.rules[ln.rule]
        if substitute(r.conclusion, ln.subst) != ln.term or len(ln.uses) != len(r.premises):
            return False
        for p, u in zip(r.premises, ln.uses):
            if not 0 <= u < k or d.lines[u].term != substitute(p, ln.subst):
                return False
    return bool(d.lines) and d.lines[-1].term == d.goal


class _Prover:
    """Given-clause search with condensed detachment.

    Schematic formulas (no variables of Γ or the goal) and formulas mentioning
    those variables wait in separate queues, each ordered by size, and are
    selected alternately.  Formulas mentioning the fixed variables are held to
    a tighter depth bound; ones beyond it are deferred and released one level
    at a time whenever both queues run dry.
    """

    def __init__(self, S: DeductiveSystem, gamma: Sequence[Term], max_depth: int, rigid_depth: int | None = None):
        self.S = S
        self.max_depth = max_depth
        self.rigid_depth = max_depth if rigid_depth is None else rigid_depth
        self.generated = 0
        self.facts: list[_Fact] = []
        self.seen: set = set()
        self.queues: tuple = ([], [])  # schematic, rigid
        self.deferred: list[_Fact] = []
        self.active: list[int] = []
        self.general: dict = {}  # shape key -> schematic facts, for subsumption
        self.rules = []
        for r in S.rules:
            names = ordered_vars(list(r.premises) + [r.conclusion])
            slot = {x: i for i, x in enumerate(names)}
            self.rules.append(([_internal(p, slot) for p in r.premises], _internal(r.conclusion, slot), len(names)))
        for g in gamma:
            self._add(_Fact(_internal(g, None), 0, -1))
        for i, (prem, concl, n) in enumerate(self.rules):
            if not prem:
                term, ren = _canon(concl)
                self._add(_Fact(term, len(ren), i, ren=ren))

    def _add(self, f: _Fact) -> int | None:
        if f.term in self.seen:
            return None
        d = _tdepth(f.term)
        rigid = _rigid(f.term)
        if d > self.max_depth:
            return None
        if rigid and d > self.rigid_depth:
            self.deferred.append(f)
            return None
        if self._subsumed(f.term):
            return None
        self.seen.add(f.term)
        self.facts.append(f)
        k = len(self.facts) - 1
        if f.nvars:
            self.general.setdefault(_shape(f.term), []).append(f.term)
        heapq.heappush(self.queues[rigid], (_tsize(f.term), k))
        return k

    def _subsumed(self, t) -> bool:
        for key in _shapes_matching(t):
            for g in self.general.get(key, ()):
                if _match(g, t, {}):
                    return True
        return False

    def _next(self) -> int | None:
        while not any(self.queues):
            if not self.deferred or self.rigid_depth >= self.max_depth:
                return None
            self.rigid_depth += 1
            waiting, self.deferred = self.deferred, []
            for f in waiting:
                self._add(f)
        turn = len(self.active) % 2
        q = self.queues[turn] or self.queues[1 - turn]
        return heapq.heappop(q)[1]

    def run(self, goal, fuel: int) -> int | None:
        for k, f in enumerate(self.facts):
            if _match(f.term, goal, {}):
                return k
        while (g := self._next()) is not None:
            self.active.append(g)
            for ri, (prem, concl, nv) in enumerate(self.rules):
                if not prem:
                    continue
                for pos in range(len(prem)):
                    for choice in self._choices(len(prem), pos, g):
                        new = self._fire(ri, prem, concl, nv, choice)
                        if new is None:
                            continue
                        self.generated += 1
                        k = self._add(new)
                        if k is not None and _match(new.term, goal, {}):
                            return k
                        if self.generated >= fuel:
                            return None
        return None

    def _choices(self, n: int, pos: int, g: int):
        pools = [[g] if j == pos else self.active for j in range(n)]
        return itertools.product(*pools)

    def _fire(self, ri, prem, concl, nv, choice) -> _Fact | None:
        s: dict = {}
        offsets = []
        base = nv
        for p, fid in zip(prem, choice):
            f = self.facts[fid]
            offsets.append(base)
            if not _unify(p, _shift(f.term, base), s):
                return None
            base += f.nvars
        term, ren = _canon(_resolve(concl, s))
        return _Fact(term, len(ren), ri, tuple(choice), tuple(offsets), s, ren)

    def expand(self, k: int, goal) -> list[Line]:
        theta: dict = {}
        _match(self.facts[k].term, goal, theta)
        default = self.S.variables[0] if self.S.variables else "x"
        lines: list[Line] = []
        index: dict = {}

        def concrete(t, f: _Fact, theta):
            t = _resolve(t, f.sigma)
            inv = {v: theta.get(i, default) for v, i in f.ren.items()}

            def go(x):
                if isinstance(x, int):
                    return inv.get(x, default)
                if isinstance(x, tuple):
                    return (x[0],) + tuple(go(a) for a in x[1:])
                return x

            return go(t)

        def emit(fid: int, theta: dict) -> int:
            f = self.facts[fid]
            if f.rule == -1:
                term = f.term
                if term not in index:
                    index[term] = len(lines)
                    lines.append(Line(_external(term, default), None, {}, ()))
                return index[term]
            prem, concl, nv = self.rules[f.rule]
            term = concrete(concl, f, theta)
            if term in index:
                return index[term]
            uses = []
            for p, pid, off in zip(prem, f.parents, f.offsets):
                parent = self.facts[pid]
                sub = {i: concrete(off + i, f, theta) for i in range(parent.nvars)}
                uses.append(emit(pid, sub))
            r = self.S.rules[f.rule]
            names = ordered_vars(list(r.premises) + [r.conclusion])
            subst = {x: _external(concrete(i, f, theta), default) for i, x in enumerate(names)}
            index[term] = len(lines)
            lines.append(Line(_external(term, default), f.rule, subst, tuple(uses)))
            return index[term]

        emit(k, {i: v for i, v in theta.items()})
        return lines


def derives(
    S: DeductiveSystem, gamma: Iterable[Term], phi: Term, fuel: int = 50000, depth: int = 4
) -> Derivation | None:
    """A derivation of phi from gamma, or None when the search gives up.

    ``fuel`` bounds the number of generated inferences; ``depth`` bounds the
    term depth of every intermediate formula.  Formulas mentioning the
    variables of gamma and phi start with a bound one above the deepest of
    those formulas, raised towards ``depth`` whenever the search runs dry.
    """
    gamma = list(dict.fromkeys(gamma))
    for t in gamma + [phi]:
        check_term(S.signature, t)
    if phi in gamma:
        return Derivation(phi, [Line(phi, None, {}, ())])
    goal = _internal(phi, None)
    base = max(_tdepth(_internal(t, None)) for t in gamma + [phi])
    top = max(depth, base)
    prover = _Prover(S, gamma, top, min(base + 1, top))
    k = prover.run(goal, fuel)
    if k is None:
        return None
    d = Derivation(phi, prover.expand(k, goal))
    if not check_derivation(S, gamma, d):
        raise LogicError("internal error: derivation failed to replay")
    return d


# -- matrices ------------------------------------------------------------------


def matrix_signature(sig: Signature, rel: str = "r") -> Signature:
    return sig.extend(rels=[(rel, 1)])


def translate_rule(rule: Rule, rel: str = "r") -> Implication:
    return Implication(tuple(Rel(rel, (p,)) for p in rule.premises), Rel(rel, (rule.conclusion,)))


def matrix_theory(S: DeductiveSystem, rel: str = "r") -> Theory:
    """Matrix models of S: the filter is closed under every rule."""
    return Theory(matrix_signature(S.signature, rel), tuple(translate_rule(r, rel) for r in S.rules))


def matrix_models(S: DeductiveSystem, max_size: int = 3) -> list[Structure]:
    th = matrix_theory(S)
    return [M for n in range(1, max_size + 1) for M in enumerate_models(th, n)]


def filter_of(M: Structure, rel: str | None = None) -> frozenset:
    return frozenset(t[0] for t in M.rels[_rel_name(M, rel)])


def _rel_name(M: Structure, rel: str | None) -> str:
    if rel is not None:
        return rel
    unary = [n for n, a in M.signature.rels if a == 1]
    if len(M.signature.rels) != 1 or len(unary) != 1:
        raise StructureError("a matrix has exactly one unary relation")
    return unary[0]


@dataclass(frozen=True)
class RuleCounterexample:
    matrix: Structure
    assignment: dict

    def render(self) -> str:
        env = ", ".join(f"{x}↦{v}" for x, v in sorted(self.assignment.items()))
        F = sorted(filter_of(self.matrix))
        return f"matrix of size {self.matrix.size} with filter {F}: {env}"


def rule_countermodel(matrices: Sequence[Structure], gamma: Sequence[Term], phi: Term) -> RuleCounterexample | None:
    """A matrix and assignment putting Γ inside the filter and phi outside."""
    if not matrices:
        return None
    rel = _rel_name(matrices[0], None)
    prem = [Rel(rel, (g,)) for g in gamma]
    from .consequence import counterexample

    ce = counterexample(list(matrices), prem, Rel(rel, (phi,)))
    return None if ce is None else RuleCounterexample(ce.structure, ce.assignment)


# -- equivalential systems ------------------------------------------------------------


@dataclass
class ConditionResult:
    name: str
    status: str  # "proved" | "refuted" | "unknown"
    derivations: list = field(default_factory=list)
    countermodel: RuleCounterexample | None = None
    failed_goal: Term | None = None


@dataclass
class EquivalentialReport:
    verdict: str  # "verified" | "failed" | "unknown"
    failed_at: str | None
    conditions: list

    def to_json(self) -> dict:
        out = {"verdict": self.verdict, "failed_at": self.failed_at, "conditions": []}
        for c in self.conditions:
            item = {"name": c.name, "status": c.status}
            if c.countermodel is not None:
                item["countermodel"] = c.countermodel.render()
                item["goal"] = str(c.failed_goal)
            if c.derivations:
                item["derivations"] = [d.to_json() for d in c.derivations]
            out["conditions"].append(item)
        return out


def _delta(delta: Sequence[Term], a: Term, b: Term) -> list[Term]:
    return [substitute(d, {"x": a, "y": b}) for d in delta]


def equivalential_conditions(S: DeductiveSystem, delta: Sequence[Term]) -> list[tuple[str, list, list]]:
    """(name, Γ, goals) for reflexivity, detachment, and one congruence rule per operation."""
    for d in delta:
        if not vars_of(d) <= {"x", "y"}:
            raise LogicError(f"{d} is not a term in x and y")
    x, y = Var("x"), Var("y")
    conds = [
        ("reflexivity", [], _delta(delta, x, x)),
        ("detachment", [x] + _delta(delta, x, y), [y]),
    ]
    for op, arity in S.signature.ops:
        if arity == 0:
            continue
        xs = [Var(f"x{i}") for i in range(1, arity + 1)]
        ys = [Var(f"y{i}") for i in range(1, arity + 1)]
        gamma = [t for a, b in zip(xs, ys) for t in _delta(delta, a, b)]
        conds.append((f"congruence:{op}", gamma, _delta(delta, App(op, tuple(xs)), App(op, tuple(ys)))))
    return conds


def check_equivalential(
    S: DeductiveSystem,
    delta: Sequence[Term],
    fuel: int = 50000,
    depth: int = 4,
    model_size: int = 3,
) -> EquivalentialReport:
    """Check the equivalence conditions for Δ; refute with small matrices, prove by derivation."""
    delta = list(delta)
    matrices = matrix_models(S, model_size) if model_size > 0 else []
    results = []
    for name, gamma, goals in equivalential_conditions(S, delta):
        res = ConditionResult(name, "proved")
        for goal in goals:
            ce = rule_countermodel(matrices, gamma, goal)
            if ce is not None:
                res.status, res.countermodel, res.failed_goal = "refuted", ce, goal
                break
            d = derives(S, gamma, goal, fuel, depth)
            if d is None:
                res.status, res.failed_goal = "unknown", goal
                break
            res.derivations.append(d)
        results.append(res)
        if res.status == "refuted":
            return EquivalentialReport("failed", name, results)
    unknown = [r for r in results if r.status == "unknown"]
    if unknown:
        return EquivalentialReport("unknown", unknown[0].name, results)
    return EquivalentialReport("verified", None, results)


# -- Leibniz congruence ------------------------------------------------------------------


def _translations(A: Structure) -> np.ndarray:
    """All unary polynomials built from the identity by basic translations, as rows."""
    n = A.size
    steps = []
    for name, arity in A.signature.ops:
        if arity == 0:
            continue
        table = np.array(A.ops[name], dtype=np.int64).reshape((n,) * arity)
        for pos in range(arity):
            for consts in itertools.product(range(n), repeat=arity - 1):
                idx = list(consts[:pos]) + [slice(None)] + list(consts[pos:])
                steps.append(table[tuple(idx)])
    ident = np.arange(n, dtype=np.int64)
    polys = {tuple(ident)}
    frontier = [ident]
    while frontier:
        cur = np.array(frontier)
        frontier = []
        for t in steps:
            for row in t[cur]:
                key = tuple(row)
                if key not in polys:
                    polys.add(key)
                    frontier.append(row)
    return np.array(sorted(polys), dtype=np.int64)


def leibniz(M: Structure, rel: str | None = None) -> Congruence:
    """Largest congruence of M's algebra under which the filter is a union of classes."""
    rel = _rel_name(M, rel)
    F = np.zeros(M.size, dtype=bool)
    for (a,) in M.rels[rel]:
        F[a] = True
    P = _translations(M)
    profile = F[P]  # profile[:, a] says which translations send a into F
    classes: dict[bytes, list[int]] = {}
    for a in range(M.size):
        classes.setdefault(profile[:, a].tobytes(), []).append(a)
    return Congruence.from_classes(M.size, classes.values())


def is_reduced(M: Structure, rel: str | None = None) -> bool:
    return leibniz(M, rel).is_identity


def reduce_matrix(M: Structure, rel: str | None = None) -> tuple[Structure, list[int]]:
    return quotient(M, leibniz(M, rel))


# -- Mod* and algebraizability ------------------------------------------------------------


def mod_star_theory(S: DeductiveSystem, delta: Sequence[Term], rel: str = "r") -> Theory:
    """Translated rules plus the postulate x = y <= r(δ(x,y)) for δ in Δ."""
    sig = matrix_signature(S.signature, rel)
    axioms = [translate_rule(r, rel) for r in S.rules]
    if delta:
        axioms.append(Implication(tuple(Rel(rel, (d,)) for d in delta), Eq(Var("x"), Var("y"))))
    return Theory(sig, tuple(axioms))


@dataclass(frozen=True)
class AlgebraizerData:
    pairs: tuple  # ((δ, ε), ...) unary terms in x
    delta: tuple  # binary terms in x, y

    def translate(self, t: Term) -> list[Eq]:
        return [Eq(substitute(d, {"x": t}), substitute(e, {"x": t})) for d, e in self.pairs]


@dataclass
class AlgebraizerReport:
    rules: list  # (rule, status) with status "pass" | "fail" | "unknown"
    condition1: str
    condition2: str
    detail: list = field(default_factory=list)

    @property
    def passed(self) -> bool:
        return self.condition1 == "pass" and self.condition2 == "pass"


def check_algebraizer(
    S: DeductiveSystem,
    data: AlgebraizerData,
    algebras: Sequence[Structure],
    sample: Sequence[Rule] | None = None,
    fuel: int = 50000,
    depth: int = 4,
) -> AlgebraizerReport:
    """Check both translation conditions on a sample of rules and finitely many algebras.

    Condition 1: each derivable sampled rule Γ/φ translates into a consequence
    of the translated premises over the algebras.  Condition 2: x = y and the
    translated Δ(x, y) entail each other over the algebras.
    """
    sample = list(S.rules if sample is None else sample)
    algebras = list(algebras)
    statuses, detail = [], []
    for rule in sample:
        prem = [e for g in rule.premises for e in data.translate(g)]
        concl = data.translate(rule.conclusion)
        if derives(S, rule.premises, rule.conclusion, fuel, depth) is None:
            statuses.append((rule, "unknown"))
            continue
        ok = all(entails_finite_class(algebras, prem, c) for c in concl)
        statuses.append((rule, "pass" if ok else "fail"))
        if not ok:
            detail.append(f"translation of {rule} fails")
    kinds = {s for _, s in statuses}
    cond1 = "fail" if "fail" in kinds else "unknown" if "unknown" in kinds else "pass"
    x, y = Var("x"), Var("y")
    back = [e for d in data.delta for e in data.translate(d)]
    forward_ok = all(entails_finite_class(algebras, [Eq(x, y)], e) for e in back)
    backward_ok = entails_finite_class(algebras, back, Eq(x, y))
    if not forward_ok:
        detail.append("x = y does not entail the translated equivalence terms")
    if not backward_ok:
        detail.append("the translated equivalence terms do not entail x = y")
    cond2 = "pass" if forward_ok and backward_ok else "fail"
    return AlgebraizerReport(statuses, cond1, cond2, detail)
