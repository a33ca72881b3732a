"""Bounded saturation of ground facts modulo equality.

A ``ChaseState`` holds a fixed, depth-bounded universe of ground terms over a
set of generator names (an e-graph: terms are nodes, equal terms share a
union-find class, the class structure is kept congruence closed).  Horn
axioms are applied by e-matching their atoms against the current classes;
an equation conclusion merges two classes, a relational conclusion adds a
fact.  No term is created after ``init``.

Every merge is recorded in a proof forest, so any derived equality or fact
can be traced back to the rule firings it depends on; ``certificate``
returns that backward slice, and ``Certificate.replay`` re-checks it with an
independent congruence closure (``epikit.checker``).
"""

from __future__ import annotations

import itertools
import os
from dataclasses import dataclass, field
from typing import Iterable, Iterator, Sequence

from .syntax import (
    App,
    Atom,
    Eq,
    Implication,
    Rel,
    Signature,
    Term,
    Theory,
    Var,
    atom_terms,
    depth as term_depth,
    ordered_vars,
    substitute,
    vars_of,
)

DEFAULT_MAX_UNIVERSE = 20000


class ChaseError(Exception):
    pass


class UniverseTooLarge(ChaseError):
    pass


class OutsideUniverse(ChaseError):
    """A term that is not represented in the state's universe."""


class NotProved(ChaseError):
    pass


def max_universe_from_env() -> int:
    try:
        return int(os.environ.get("EPIKIT_MAX_UNIVERSE", DEFAULT_MAX_UNIVERSE))
    except ValueError:
        return DEFAULT_MAX_UNIVERSE


@dataclass(frozen=True)
class Step:
    axiom: int
    subst: dict
    conclusion: Atom

    def render(self, k: int) -> str:
        s = ",".join(f"{x}↦{t}" for x, t in sorted(self.subst.items()))
        return f"[{k}] RULE axiom#{self.axiom} WITH {{{s}}} ⇒ {self.conclusion}"

    def to_json(self) -> dict:
        return {
            "axiom": self.axiom,
            "subst": {x: str(t) for x, t in sorted(self.subst.items())},
            "conclusion": str(self.conclusion),
        }


@dataclass
class Certificate:
    """A replayable derivation of ``goal`` from ``facts`` under ``axioms``."""

    signature: Signature
    axioms: tuple
    generators: tuple
    facts: tuple
    goal: Atom
    steps: list = field(default_factory=list)

    def __len__(self):
        return len(self.steps)

    def replay(self) -> bool:
        from .checker import replay

        return replay(self)

    def render(self) -> str:
        if not self.steps:
            return f"(goal {self.goal} holds by the initial facts)"
        return "\n".join(s.render(k) for k, s in enumerate(self.steps, start=1))

    def to_json(self) -> dict:
        return {
            "generators": list(self.generators),
            "facts": [str(f) for f in self.facts],
            "goal": str(self.goal),
            "steps": [s.to_json() for s in self.steps],
        }

    @classmethod
    def from_json(cls, data: dict, theory: Theory) -> "Certificate":
        from .syntax import parse_atom, parse_term

        sig = theory.signature
        steps = [
            Step(
                s["axiom"],
                {x: parse_term(t, sig) for x, t in s["subst"].items()},
                parse_atom(s["conclusion"], sig),
            )
            for s in data["steps"]
        ]
        return cls(
            sig,
            tuple(theory.axioms),
            tuple(data["generators"]),
            tuple(parse_atom(f, sig) for f in data["facts"]),
            parse_atom(data["goal"], sig),
            steps,
        )


@dataclass
class _Firing:
    axiom: int
    env: dict  # var -> node id
    just: list  # ("eq", a, b) | ("why", reason)
    concl: tuple  # ("eq", a, b) | ("rel", name, nodes)


class ChaseState:
    def __init__(self, signature: Signature, generators: Iterable[str], max_universe: int | None = None):
        self.signature = signature
        self.generators = tuple(dict.fromkeys(generators))
        clash = set(self.generators) & {n for n, _ in signature.ops + signature.rels}
        if clash:
            raise ChaseError(f"generator names clash with symbols: {sorted(clash)}")
        self.max_universe = max_universe if max_universe is not None else max_universe_from_env()
        self.sym: list[str] = []
        self.args: list[tuple | None] = []
        self.level: list[int] = []
        self.parent: list[int] = []
        self.pf_parent: list[int] = []
        self.pf_reason: list = []
        self.members: dict[int, list[int]] = {}
        self.uses: dict[int, list[int]] = {}
        self.sigtable: dict[tuple, int] = {}
        self.gen_node: dict[str, int] = {}
        self.facts: dict[str, dict[tuple, tuple]] = {name: {} for name, _ in signature.rels}
        self.fact_uses: dict[int, set] = {}
        self.initial_facts: list[Atom] = []
        self.firings: list[_Firing] = []
        self.depth = 0
        self.complete = False
        self.fuel_exhausted = False
        self.rounds = 0
        self._terms: dict[int, Term] = {}
        for g in self.generators:
            self.gen_node[g] = self._new_node(g, None, 0)

    # -- construction ------------------------------------------------------

    @classmethod
    def init(
        cls,
        signature: Signature,
        generators: Iterable[str],
        facts: Iterable[Atom] = (),
        depth: int = 1,
        *,
        extra_terms: Iterable[Term] = (),
        max_universe: int | None = None,
    ) -> "ChaseState":
        """Build the universe and assert the facts.

        Level 0 holds the generators, the constants, and every term mentioned
        by a fact or in ``extra_terms``.  Level k adds one operation applied
        to classes of lower level, for k up to ``depth``; classes are taken
        after the facts are merged, so equal terms are expanded only once.
        """
        facts = list(facts)
        gens = list(generators)
        st = cls(signature, gens, max_universe)
        st.depth = depth
        allowed = set(st.generators)
        for f in facts:
            if not vars_of(f) <= allowed:
                raise ChaseError(f"fact {f} is not ground over the generators")
        for name, arity in signature.ops:
            if arity == 0:
                st.add_term(App(name, ()))
        for t in extra_terms:
            if not vars_of(t) <= allowed:
                raise ChaseError(f"term {t} is not ground over the generators")
            st.add_term(t, 0)
        for i, f in enumerate(facts):
            st._assert_initial(i, f)
        for lvl in range(1, depth + 1):
            st._grow(lvl)
        return st

    def _new_node(self, sym: str, args: tuple | None, level: int) -> int:
        if len(self.sym) >= self.max_universe:
            raise UniverseTooLarge(f"universe exceeds {self.max_universe} terms")
        n = len(self.sym)
        self.sym.append(sym)
        self.args.append(args)
        self.level.append(level)
        self.parent.append(n)
        self.pf_parent.append(-1)
        self.pf_reason.append(None)
        self.members[n] = [n]
        self.uses[n] = []
        if args is not None:
            self.sigtable[(sym, tuple(self.find(a) for a in args))] = n
            for a in set(self.find(a) for a in args):
                self.uses[a].append(n)
        return n

    def add_term(self, t: Term, level: int | None = None) -> int:
        """Node for t, creating it (and its subterms) if needed.

        New nodes get ``level`` if given, else their term depth.
        """
        if isinstance(t, Var):
            try:
                return self.gen_node[t.name]
            except KeyError:
                raise ChaseError(f"{t.name!r} is not a generator") from None
        kids = tuple(self.add_term(a, level) for a in t.args)
        key = (t.op, tuple(self.find(k) for k in kids))
        node = self.sigtable.get(key)
        if node is None:
            node = self._new_node(t.op, kids, term_depth(t) if level is None else level)
        return node

    def _assert_initial(self, i: int, f: Atom) -> None:
        self.initial_facts.append(f)
        if isinstance(f, Eq):
            a, b = self.add_term(f.lhs, 0), self.add_term(f.rhs, 0)
            self.merge(a, b, ("init", i))
        else:
            nodes = tuple(self.add_term(t, 0) for t in f.args)
            self._add_fact(f.rel, nodes, ("init", i))

    def _grow(self, lvl: int) -> None:
        classes = sorted({self.find(n) for n in range(len(self.sym)) if self.level[n] < lvl})
        for name, arity in self.signature.ops:
            if arity == 0:
                continue
            for combo in itertools.product(classes, repeat=arity):
                key = (name, tuple(self.find(c) for c in combo))
                if key not in self.sigtable:
                    self._new_node(name, tuple(combo), lvl)

    # -- union-find with congruence closure ------------------------------------

    def find(self, a: int) -> int:
        p = self.parent
        root = a
        while p[root] != root:
            root = p[root]
        while p[a] != root:
            p[a], a = root, p[a]
        return root

    def _pf_add(self, a: int, b: int, reason) -> None:
        # reroot a's proof tree at a, then hang it below b
        prev, prev_reason, cur = -1, None, a
        while cur != -1:
            nxt, nxt_reason = self.pf_parent[cur], self.pf_reason[cur]
            self.pf_parent[cur], self.pf_reason[cur] = prev, prev_reason
            prev, prev_reason, cur = cur, nxt_reason, nxt
        self.pf_parent[a], self.pf_reason[a] = b, reason

    def merge(self, a: int, b: int, reason) -> bool:
        pending = [(a, b, reason)]
        changed = False
        while pending:
            a, b, reason = pending.pop()
            ra, rb = self.find(a), self.find(b)
            if ra == rb:
                continue
            changed = True
            self._pf_add(a, b, reason)
            win, lose = (ra, rb) if ra < rb else (rb, ra)
            moved = self.uses.pop(lose)
            for p in moved:
                key = (self.sym[p], tuple(self.find(x) for x in self.args[p]))
                if self.sigtable.get(key) == p:
                    del self.sigtable[key]
            self.parent[lose] = win
            self.members[win].extend(self.members.pop(lose))
            for p in moved:
                key = (self.sym[p], tuple(self.find(x) for x in self.args[p]))
                q = self.sigtable.get(key)
                if q is None:
                    self.sigtable[key] = p
                elif self.find(q) != self.find(p):
                    pending.append((p, q, ("cong", p, q)))
            self.uses[win].extend(moved)
            for rel, key in self.fact_uses.pop(lose, ()):
                entry = self.facts[rel].pop(key, None)
                if entry is None:
                    continue
                new = tuple(self.find(x) for x in key)
                if new not in self.facts[rel]:
                    self.facts[rel][new] = entry
                    for c in new:
                        self.fact_uses.setdefault(c, set()).add((rel, new))
        return changed

    def _add_fact(self, rel: str, nodes: tuple, reason) -> bool:
        key = tuple(self.find(x) for x in nodes)
        if key in self.facts[rel]:
            return False
        self.facts[rel][key] = (nodes, reason)
        for c in key:
            self.fact_uses.setdefault(c, set()).add((rel, key))
        return True

    # -- queries -------------------------------------------------------------

    @property
    def universe_size(self) -> int:
        return len(self.sym)

    @property
    def class_count(self) -> int:
        return len(self.members)

    def lookup(self, t: Term) -> int | None:
        """Node representing t (up to the current equalities), or None."""
        if isinstance(t, Var):
            return self.gen_node.get(t.name)
        kids = []
        for a in t.args:
            k = self.lookup(a)
            if k is None:
                return None
            kids.append(self.find(k))
        return self.sigtable.get((t.op, tuple(kids)))

    def _node(self, t: Term) -> int:
        n = self.lookup(t)
        if n is None:
            raise OutsideUniverse(f"term {t} is outside the universe")
        return n

    def proves_equal(self, t1: Term, t2: Term) -> bool:
        return self.find(self._node(t1)) == self.find(self._node(t2))

    def proves_fact(self, atom: Rel) -> bool:
        key = tuple(self.find(self._node(t)) for t in atom.args)
        return key in self.facts[atom.rel]

    def proves(self, atom: Atom) -> bool:
        if isinstance(atom, Eq):
            return self.proves_equal(atom.lhs, atom.rhs)
        return self.proves_fact(atom)

    def term_of(self, node: int) -> Term:
        t = self._terms.get(node)
        if t is None:
            if self.args[node] is None:
                t = Var(self.sym[node])
            else:
                t = App(self.sym[node], tuple(self.term_of(a) for a in self.args[node]))
            self._terms[node] = t
        return t

    def classes(self) -> list[list[Term]]:
        return [[self.term_of(n) for n in sorted(ms)] for _, ms in sorted(self.members.items())]

    # -- saturation --------------------------------------------------------------

    def saturate(self, theory: Theory, fuel: int = 10000, goal: Atom | None = None) -> "ChaseState":
        """Apply the theory's axioms until fixpoint, fuel exhaustion, or ``goal`` is proved.

        ``fuel`` bounds the number of rule firings that change the state.
        """
        self.theory = theory
        self.complete = False
        self.fuel_exhausted = False
        rules = [_compile_rule(ax) for ax in theory.axioms]
        if goal is not None and self.holds(goal):
            return self
        while True:
            self.rounds += 1
            index = _Index(self)
            changed = False
            for i, rule in enumerate(rules):
                seen = set()
                for env, just, concl in _matches(self, index, rule):
                    key = tuple(self.find(env[x]) for x in rule.vars)
                    if key in seen:
                        continue
                    seen.add(key)
                    if self._holds(concl):
                        continue
                    if len(self.firings) >= fuel:
                        self.fuel_exhausted = True
                        return self
                    k = len(self.firings)
                    self.firings.append(_Firing(i, env, just, concl))
                    self._fire(k, concl)
                    changed = True
                    if goal is not None and self.holds(goal):
                        return self
            if not changed:
                self.complete = True
                return self

    def _holds(self, concl) -> bool:
        if concl[0] == "eq":
            return self.find(concl[1]) == self.find(concl[2])
        return tuple(self.find(x) for x in concl[2]) in self.facts[concl[1]]

    def _fire(self, k: int, concl) -> None:
        if concl[0] == "eq":
            self.merge(concl[1], concl[2], ("step", k))
        else:
            self._add_fact(concl[1], concl[2], ("step", k))

    def holds(self, goal: Atom) -> bool:
        try:
            return self.proves(goal)
        except OutsideUniverse:
            return False

    # -- explanations and certificates -------------------------------------------

    def _explain(self, a: int, b: int, out: set, done: set) -> None:
        work = [(a, b)]
        while work:
            a, b = work.pop()
            if a == b or (a, b) in done:
                continue
            done.add((a, b))
            done.add((b, a))
            anc = {}
            x, d = a, 0
            while x != -1:
                anc[x] = d
                x, d = self.pf_parent[x], d + 1
            y = b
            while y not in anc:
                y = self.pf_parent[y]
                if y == -1:
                    raise NotProved("nodes are not equal")
            lca = y
            for start in (a, b):
                x = start
                while x != lca:
                    r = self.pf_reason[x]
                    if r[0] == "cong":
                        p, q = r[1], r[2]
                        work.extend(zip(self.args[p], self.args[q]))
                    else:
                        out.add(r)
                    x = self.pf_parent[x]

    def _reasons_for(self, items: Iterable, out: set, done: set) -> None:
        for it in items:
            if it[0] == "eq":
                self._explain(it[1], it[2], out, done)
            else:
                out.add(it[1])

    def _goal_items(self, goal: Atom) -> list:
        if isinstance(goal, Eq):
            a, b = self._node(goal.lhs), self._node(goal.rhs)
            if self.find(a) != self.find(b):
                raise NotProved(f"{goal} is not proved")
            return [("eq", a, b)]
        nodes = [self._node(t) for t in goal.args]
        key = tuple(self.find(x) for x in nodes)
        entry = self.facts[goal.rel].get(key)
        if entry is None:
            raise NotProved(f"{goal} is not proved")
        orig, reason = entry
        return [("why", reason)] + [("eq", x, y) for x, y in zip(nodes, orig)]

    def certificate(self, goal: Atom, minimize: bool = True) -> Certificate:
        """Backward slice of the firings needed for ``goal``.

        With ``minimize`` the slice is further pruned, latest step first, by
        dropping every step whose removal still lets the certificate replay.
        The result is 1-minimal: no single step can be left out.
        """
        done: set = set()
        reasons: set = set()
        self._reasons_for(self._goal_items(goal), reasons, done)
        needed: set[int] = set()
        work = [r[1] for r in reasons if r[0] == "step"]
        while work:
            k = work.pop()
            if k in needed:
                continue
            needed.add(k)
            sub: set = set()
            self._reasons_for(self.firings[k].just, sub, done)
            work.extend(r[1] for r in sub if r[0] == "step")
        steps = []
        for k in sorted(needed):
            f = self.firings[k]
            ax = self.theory.axioms[f.axiom]
            subst = {x: self.term_of(n) for x, n in f.env.items()}
            steps.append(Step(f.axiom, subst, substitute(ax.conclusion, subst)))
        cert = Certificate(
            self.signature,
            tuple(self.theory.axioms) if hasattr(self, "theory") else (),
            self.generators,
            tuple(self.initial_facts),
            goal,
            steps,
        )
        if minimize:
            _prune(cert)
        return cert


def _prune(cert: Certificate) -> None:
    from .checker import ReplayError, replay

    steps = list(cert.steps)
    for i in reversed(range(len(steps))):
        cert.steps = steps[:i] + steps[i + 1 :]
        try:
            replay(cert)
        except ReplayError:
            continue
        steps = cert.steps
    cert.steps = steps


# -- compiled rules and e-matching ----------------------------------------------------


@dataclass
class _Rule:
    vars: tuple
    plan: list  # sequence of ("rel", Rel) | ("eq", l, r) | ("side", term)
    conclusion: Atom


def _compile_rule(ax: Implication) -> _Rule:
    rels = [p for p in ax.premises if isinstance(p, Rel)]
    eqs = [p for p in ax.premises if isinstance(p, Eq)]
    eqs_app = [p for p in eqs if isinstance(p.lhs, App) or isinstance(p.rhs, App)]
    eqs_var = [p for p in eqs if isinstance(p.lhs, Var) and isinstance(p.rhs, Var)]
    plan = [("rel", p) for p in rels]
    for p in eqs_app:
        l, r = (p.lhs, p.rhs) if isinstance(p.lhs, App) else (p.rhs, p.lhs)
        plan.append(("eq", l, r))
    plan += [("eq", p.lhs, p.rhs) for p in eqs_var]
    return _Rule(tuple(ordered_vars(ax)), plan, ax.conclusion)


class _Index:
    """Snapshot of the canonical e-nodes, grouped by class and by operation."""

    def __init__(self, st: ChaseState):
        find = st.find
        by_class: dict[int, dict[str, dict[tuple, int]]] = {}
        by_op: dict[str, dict[tuple, tuple[int, int]]] = {}
        for n in range(len(st.sym)):
            kids = st.args[n]
            if kids is None:
                continue
            root = find(n)
            cargs = tuple(find(k) for k in kids)
            slot = by_class.setdefault(root, {}).setdefault(st.sym[n], {})
            if cargs not in slot:
                slot[cargs] = n
                by_op.setdefault(st.sym[n], {})[cargs] = (root, n)
        self.by_class = by_class
        self.by_op = by_op
        self.roots = sorted(st.members)
        self.facts = {rel: list(tab.items()) for rel, tab in st.facts.items()}


def _match_at(st: ChaseState, ix: _Index, pat: Term, cls: int, anchor: int, env: dict, just: list) -> Iterator[tuple]:
    """Match pat against class cls; anchor is a node of cls standing at pat's position."""
    if isinstance(pat, Var):
        bound = env.get(pat.name)
        if bound is None:
            env2 = dict(env)
            env2[pat.name] = anchor
            yield env2, just
        elif st.find(bound) == cls:
            yield env, just + [("eq", bound, anchor)]
        return
    for cargs, w in ix.by_class.get(cls, {}).get(pat.op, {}).items():
        yield from _match_args(st, ix, pat.args, cargs, st.args[w], 0, env, just + [("eq", anchor, w)])


def _match_args(st, ix, pats, cargs, anchors, i, env, just):
    if i == len(pats):
        yield env, just
        return
    for env2, just2 in _match_at(st, ix, pats[i], cargs[i], anchors[i], env, just):
        yield from _match_args(st, ix, pats, cargs, anchors, i + 1, env2, just2)


def _match_free(st: ChaseState, ix: _Index, pat: Term, env: dict, just: list) -> Iterator[tuple]:
    """Match pat anywhere; yields (env, just, node standing for the instance)."""
    if isinstance(pat, Var):
        bound = env.get(pat.name)
        if bound is not None:
            yield env, just, bound
            return
        for root in ix.roots:
            env2 = dict(env)
            env2[pat.name] = root
            yield env2, just, root
        return
    if all(x in env for x in _pattern_vars(pat)):
        found = _lookup(st, ix, pat, env)
        if found is not None:
            node, extra = found
            yield env, just + extra, node
        return
    for cargs, (root, w) in ix.by_op.get(pat.op, {}).items():
        for env2, just2 in _match_args(st, ix, pat.args, cargs, st.args[w], 0, env, just):
            yield env2, just2, w


def _lookup(st: ChaseState, ix: _Index, pat: Term, env: dict):
    if isinstance(pat, Var):
        return env[pat.name], []
    kids, extra = [], []
    for a in pat.args:
        got = _lookup(st, ix, a, env)
        if got is None:
            return None
        kids.append(got[0])
        extra += got[1]
    hit = ix.by_op.get(pat.op, {}).get(tuple(st.find(k) for k in kids))
    if hit is None:
        # classes may have merged since the snapshot; fall back to the live table
        w = st.sigtable.get((pat.op, tuple(st.find(k) for k in kids)))
        if w is None:
            return None
    else:
        w = hit[1]
    extra += [("eq", a, k) for a, k in zip(st.args[w], kids)]
    return w, extra


_PVARS: dict = {}


def _pattern_vars(pat: Term) -> frozenset:
    got = _PVARS.get(pat)
    if got is None:
        got = _PVARS[pat] = frozenset(vars_of(pat))
    return got


def _matches(st: ChaseState, ix: _Index, rule: _Rule) -> Iterator[tuple]:
    def go(i, env, just):
        if i == len(rule.plan):
            yield from conclude(env, just)
            return
        item = rule.plan[i]
        if item[0] == "rel":
            p = item[1]
            for key, (nodes, reason) in ix.facts[p.rel]:
                for env2, just2 in _match_args(st, ix, p.args, key, nodes, 0, env, just + [("why", reason)]):
                    yield from go(i + 1, env2, just2)
        else:
            _, l, r = item
            for env2, just2, node in _match_free(st, ix, l, env, just):
                yield from (
                    (e, j, c)
                    for e3, j3 in _match_at(st, ix, r, st.find(node), node, env2, just2)
                    for e, j, c in go(i + 1, e3, j3)
                )

    def conclude(env, just):
        c = rule.conclusion
        if isinstance(c, Eq):
            for env2, just2, a in _match_free(st, ix, c.lhs, env, just):
                for env3, just3, b in _match_free(st, ix, c.rhs, env2, just2):
                    yield from complete(env3, just3, ("eq", a, b))
        else:
            yield from rel_args(c, 0, env, just, [])

    def rel_args(c, i, env, just, nodes):
        if i == len(c.args):
            yield from complete(env, just, ("rel", c.rel, tuple(nodes)))
            return
        for env2, just2, n in _match_free(st, ix, c.args[i], env, just):
            yield from rel_args(c, i + 1, env2, just2, nodes + [n])

    def complete(env, just, concl):
        # variables occurring nowhere else range over every class
        missing = [x for x in rule.vars if x not in env]
        if not missing:
            yield env, just, concl
            return
        for combo in itertools.product(ix.roots, repeat=len(missing)):
            env2 = dict(env)
            env2.update(zip(missing, combo))
            yield env2, just, concl

    yield from go(0, {}, [])


# -- convenience ---------------------------------------------------------------


def chase_query(
    theory: Theory,
    premises: Sequence[Atom],
    goal: Atom,
    depth: int = 2,
    fuel: int = 10000,
    max_universe: int | None = None,
) -> ChaseState:
    """Freeze the variables of the query as generators, then saturate towards ``goal``."""
    gens = ordered_vars(list(premises) + [goal])
    st = ChaseState.init(
        theory.signature,
        gens,
        premises,
        depth,
        extra_terms=atom_terms(goal),
        max_universe=max_universe,
    )
    return st.saturate(theory, fuel, goal)
