"""Independent replay of chase certificates.

Deliberately shares no code with the chase engine: a plain ground congruence
closure over hash-consed terms.  Replay asserts the initial facts, then for
each step checks that the cited axiom instance has all its premises already
established, and asserts its conclusion.  Finally the goal must hold.
"""

from __future__ import annotations

from .syntax import Eq, Term, Var, substitute


class ReplayError(Exception):
    pass


class GroundClosure:
    def __init__(self):
        self.ids: dict[tuple, int] = {}
        self.node: list[tuple] = []
        self.rep: list[int] = []
        self.parents: list[list[int]] = []
        self.rels: set = set()

    def intern(self, t: Term) -> int:
        if isinstance(t, Var):
            key = ("var", t.name)
        else:
            key = (t.op,) + tuple(self.intern(a) for a in t.args)
        got = self.ids.get(key)
        if got is not None:
            return got
        n = len(self.node)
        self.ids[key] = n
        self.node.append(key)
        self.rep.append(n)
        self.parents.append([])
        if not isinstance(t, Var):
            for a in key[1:]:
                self.parents[self.root(a)].append(n)
            # a fresh application may already be congruent to an older one
            sig = self._sig(n)
            for m in range(n):
                if self.node[m][0] == key[0] and len(self.node[m]) == len(key) and self._sig(m) == sig:
                    self.union(m, n)
                    break
        return n

    def root(self, a: int) -> int:
        while self.rep[a] != a:
            self.rep[a] = self.rep[self.rep[a]]
            a = self.rep[a]
        return a

    def _sig(self, n: int) -> tuple:
        key = self.node[n]
        return (key[0],) + tuple(self.root(a) for a in key[1:])

    def union(self, a: int, b: int) -> None:
        todo = [(a, b)]
        while todo:
            a, b = todo.pop()
            ra, rb = self.root(a), self.root(b)
            if ra == rb:
                continue
            pa, pb = self.parents[ra], self.parents[rb]
            self.rep[rb] = ra
            self.parents[ra] = pa + pb
            self.parents[rb] = []
            for p in pa:
                for q in pb:
                    if self.root(p) != self.root(q) and self._sig(p) == self._sig(q):
                        todo.append((p, q))

    def holds(self, atom) -> bool:
        if isinstance(atom, Eq):
            return self.root(self.intern(atom.lhs)) == self.root(self.intern(atom.rhs))
        args = tuple(self.root(self.intern(t)) for t in atom.args)
        return any(r == atom.rel and tuple(self.root(x) for x in xs) == args for r, xs in self.rels)

    def assert_atom(self, atom) -> None:
        if isinstance(atom, Eq):
            self.union(self.intern(atom.lhs), self.intern(atom.rhs))
        else:
            self.rels.add((atom.rel, tuple(self.intern(t) for t in atom.args)))


def replay(cert) -> bool:
    """Re-check a certificate; raises ReplayError on the first bad step."""
    cc = GroundClosure()
    for f in cert.facts:
        cc.assert_atom(f)
    for k, step in enumerate(cert.steps, start=1):
        if not 0 <= step.axiom < len(cert.axioms):
            raise ReplayError(f"step {k}: no axiom #{step.axiom}")
        ax = cert.axioms[step.axiom]
        for p in ax.premises:
            inst = substitute(p, step.subst)
            if not cc.holds(inst):
                raise ReplayError(f"step {k}: premise {inst} not established")
        concl = substitute(ax.conclusion, step.subst)
        if concl != step.conclusion:
            raise ReplayError(f"step {k}: conclusion mismatch {concl} vs {step.conclusion}")
        cc.assert_atom(concl)
    if not cc.holds(cert.goal):
        raise ReplayError(f"goal {cert.goal} not reached")
    return True
