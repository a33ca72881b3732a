"""Finite model enumeration up to isomorphism.

Backtracking over table cells.  Every ground instance of every axiom is
watched on the first undefined cell its evaluation gets stuck on, so an
instance is re-examined only when that cell is filled in.  Values for a cell
are restricted by the least-number heuristic (elements never mentioned so far
are interchangeable), and complete models are deduplicated through
``canonical_form``.
"""

from __future__ import annotations

import itertools
from functools import lru_cache
from typing import Iterable, Iterator

from .structures import Structure, canonical_form
from .syntax import Eq, Implication, Theory, Var, ordered_vars


class _Search:
    def __init__(self, theory: Theory, n: int):
        self.n = n
        self.sig = theory.signature
        self.offset: dict[str, int] = {}
        cells = []
        for name, arity in self.sig.ops:
            self.offset[name] = len(cells)
            cells += [("op", name, args) for args in itertools.product(range(n), repeat=arity)]
        for name, arity in self.sig.rels:
            self.offset[name] = len(cells)
            cells += [("rel", name, args) for args in itertools.product(range(n), repeat=arity)]
        self.cells = cells
        sym_index = {name: i for i, (name, _) in enumerate(self.sig.ops + self.sig.rels)}
        self.order = sorted(
            range(len(cells)),
            key=lambda c: (max(cells[c][2], default=-1), cells[c][0] == "rel", sym_index[cells[c][1]], cells[c][2]),
        )
        self.values = [-1] * len(cells)
        self.instances = []
        for ax in theory.axioms:
            names = ordered_vars(ax)
            slot = {x: i for i, x in enumerate(names)}
            code = ([self._compile_atom(p, slot) for p in ax.premises], self._compile_atom(ax.conclusion, slot))
            for env in itertools.product(range(n), repeat=len(names)):
                self.instances.append((code, env))

    def _compile_term(self, t, slot):
        if isinstance(t, Var):
            return (0, slot[t.name])
        return (1, self.offset[t.op], tuple(self._compile_term(a, slot) for a in t.args))

    def _compile_atom(self, a, slot):
        if isinstance(a, Eq):
            return (0, self._compile_term(a.lhs, slot), self._compile_term(a.rhs, slot))
        return (1, self.offset[a.rel], tuple(self._compile_term(x, slot) for x in a.args))

    def _ev(self, code, env):
        # value >= 0, or -1 - cell when stuck on an undefined cell
        if code[0] == 0:
            return env[code[1]]
        idx = 0
        n = self.n
        for sub in code[2]:
            x = self._ev(sub, env)
            if x < 0:
                return x
            idx = idx * n + x
        cell = code[1] + idx
        v = self.values[cell]
        return v if v >= 0 else -1 - cell

    def _atom(self, code, env):
        # 1 true, 0 false, negative = stuck
        if code[0] == 0:
            a = self._ev(code[1], env)
            if a < 0:
                return a
            b = self._ev(code[2], env)
            if b < 0:
                return b
            return 1 if a == b else 0
        idx = 0
        for sub in code[2]:
            x = self._ev(sub, env)
            if x < 0:
                return x
            idx = idx * self.n + x
        cell = code[1] + idx
        v = self.values[cell]
        return v if v >= 0 else -1 - cell

    def _instance(self, inst):
        """1 satisfied, 0 violated, negative = stuck on a cell."""
        (prem, concl), env = inst
        stuck = 0
        for p in prem:
            r = self._atom(p, env)
            if r == 0:
                return 1
            if r < 0 and stuck == 0:
                stuck = r
        if stuck:
            return stuck
        return self._atom(concl, env)

    def run(self) -> Iterator[list[int]]:
        watch: dict[int, list] = {}
        for inst in self.instances:
            r = self._instance(inst)
            if r == 0:
                return
            if r < 0:
                watch.setdefault(-1 - r, []).append(inst)
        self.watch = watch
        yield from self._rec(0, -1)

    def _rec(self, pos: int, mx: int) -> Iterator[list[int]]:
        if pos == len(self.order):
            yield list(self.values)
            return
        c = self.order[pos]
        kind, _, args = self.cells[c]
        top = max(mx, max(args, default=-1))
        cands = range(min(self.n, top + 2)) if kind == "op" else (0, 1)
        watched = self.watch.pop(c, [])
        for v in cands:
            self.values[c] = v
            moved = []
            ok = True
            for inst in watched:
                r = self._instance(inst)
                if r == 0:
                    ok = False
                    break
                if r < 0:
                    lst = self.watch.setdefault(-1 - r, [])
                    lst.append(inst)
                    moved.append(lst)
            if ok:
                yield from self._rec(pos + 1, max(top, v) if kind == "op" else top)
            for lst in reversed(moved):
                lst.pop()
        self.values[c] = -1
        if watched:
            self.watch[c] = watched


def _to_structure(search: _Search, values: list[int]) -> Structure:
    n, sig = search.n, search.sig
    ops = {name: values[search.offset[name] : search.offset[name] + n**arity] for name, arity in sig.ops}
    rels = {}
    for name, arity in sig.rels:
        base = search.offset[name]
        rels[name] = {args for i, args in enumerate(itertools.product(range(n), repeat=arity)) if values[base + i] == 1}
    return Structure(sig, n, ops, rels)


def enumerate_models(theory: Theory, size: int) -> list[Structure]:
    """All models of the given size, one canonical representative per isomorphism type."""
    return list(_models_cached(theory, size))


@lru_cache(maxsize=256)
def _models_cached(theory: Theory, size: int) -> tuple:
    search = _Search(theory, size)
    found: dict[tuple, Structure] = {}
    for values in search.run():
        A, _ = canonical_form(_to_structure(search, values))
        found.setdefault(A.key(), A)
    return tuple(found[k] for k in sorted(found))


def models_up_to(theory: Theory, max_size: int, min_size: int = 1) -> list[Structure]:
    out: list[Structure] = []
    for n in range(min_size, max_size + 1):
        out.extend(enumerate_models(theory, n))
    return out


def theory_of(axioms: Iterable[Implication], signature) -> Theory:
    return Theory(signature, tuple(axioms))
