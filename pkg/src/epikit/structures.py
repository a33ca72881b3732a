"""Finite first-order structures over the universe ``0..n-1``.

Operation tables are flat tuples in row-major order (first argument most
significant); relations are frozensets of tuples.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from typing import Iterable, Iterator, Mapping, Sequence

from .syntax import Atom, Eq, Implication, Signature, Term, Var, ordered_vars


class StructureError(ValueError):
    pass


@dataclass(frozen=True, eq=False)
class Structure:
    signature: Signature
    size: int
    ops: Mapping[str, tuple]
    rels: Mapping[str, frozenset]

    def __post_init__(self):
        n = self.size
        if n < 1:
            raise StructureError("universe must be nonempty")
        ops = {}
        for name, arity in self.signature.ops:
            if name not in self.ops:
                raise StructureError(f"missing table for operation {name!r}")
            table = tuple(int(v) for v in self.ops[name])
            if len(table) != n**arity:
                raise StructureError(f"table for {name!r} has {len(table)} entries, expected {n**arity}")
            if any(not 0 <= v < n for v in table):
                raise StructureError(f"table for {name!r} has values outside 0..{n - 1}")
            ops[name] = table
        rels = {}
        for name, arity in self.signature.rels:
            tuples = frozenset(tuple(int(v) for v in t) for t in self.rels.get(name, ()))
            for t in tuples:
                if len(t) != arity or any(not 0 <= v < n for v in t):
                    raise StructureError(f"bad tuple {t} for relation {name!r}")
            rels[name] = tuples
        extra = (set(self.ops) - set(ops)) | (set(self.rels) - set(rels))
        if extra:
            raise StructureError(f"tables for unknown symbols: {sorted(extra)}")
        object.__setattr__(self, "ops", ops)
        object.__setattr__(self, "rels", rels)

    @property
    def universe(self) -> range:
        return range(self.size)

    def apply(self, op: str, args: Sequence[int]) -> int:
        idx = 0
        for a in args:
            idx = idx * self.size + a
        return self.ops[op][idx]

    def key(self) -> tuple:
        return (
            self.size,
            tuple(self.ops[n] for n, _ in self.signature.ops),
            tuple(tuple(sorted(self.rels[n])) for n, _ in self.signature.rels),
        )

    def __eq__(self, other):
        return isinstance(other, Structure) and self.signature == other.signature and self.key() == other.key()

    def __hash__(self):
        return hash(self.key())

    def __repr__(self):
        return f"Structure(size={self.size}, ops={sorted(self.ops)}, rels={sorted(self.rels)})"


def make_structure(signature: Signature, size: int, ops=None, rels=None) -> Structure:
    """Build a structure; op tables may be given as callables ``f(*args) -> int``."""
    tables = {}
    for name, arity in signature.ops:
        given = (ops or {})[name]
        if callable(given):
            given = [given(*args) for args in itertools.product(range(size), repeat=arity)]
        tables[name] = given
    return Structure(signature, size, tables, dict(rels or {}))


# -- evaluation ---------------------------------------------------------------

def evaluate(A: Structure, t: Term, v: Mapping[str, int]) -> int:
    if isinstance(t, Var):
        try:
            return v[t.name]
        except KeyError:
            raise StructureError(f"unbound variable {t.name!r}") from None
    return A.apply(t.op, [evaluate(A, a, v) for a in t.args])


def satisfies(A: Structure, s: Atom, v: Mapping[str, int]) -> bool:
    if isinstance(s, Eq):
        return evaluate(A, s.lhs, v) == evaluate(A, s.rhs, v)
    return tuple(evaluate(A, a, v) for a in s.args) in A.rels[s.rel]


def _compile_term(A: Structure, t: Term, slot: Mapping[str, int]):
    """Return a function env(list) -> element."""
    if isinstance(t, Var):
        i = slot[t.name]
        return lambda env: env[i]
    table, n = A.ops[t.op], A.size
    if not t.args:
        c = table[0]
        return lambda env: c
    fs = [_compile_term(A, a, slot) for a in t.args]
    if len(fs) == 1:
        (f,) = fs
        return lambda env: table[f(env)]
    if len(fs) == 2:
        f, g = fs
        return lambda env: table[f(env) * n + g(env)]

    def run(env):
        idx = 0
        for f in fs:
            idx = idx * n + f(env)
        return table[idx]

    return run


def _compile_atom(A: Structure, s: Atom, slot):
    if isinstance(s, Eq):
        f, g = _compile_term(A, s.lhs, slot), _compile_term(A, s.rhs, slot)
        return lambda env: f(env) == g(env)
    fs = [_compile_term(A, a, slot) for a in s.args]
    rel = A.rels[s.rel]
    return lambda env: tuple(f(env) for f in fs) in rel


def violations(A: Structure, premises: Sequence[Atom], conclusion: Atom) -> Iterator[dict]:
    """Assignments satisfying every premise but not the conclusion."""
    names = ordered_vars(list(premises) + [conclusion])
    slot = {x: i for i, x in enumerate(names)}
    prem = [_compile_atom(A, p, slot) for p in premises]
    concl = _compile_atom(A, conclusion, slot)
    for env in itertools.product(range(A.size), repeat=len(names)):
        if all(p(env) for p in prem) and not concl(env):
            yield dict(zip(names, env))


def validates(A: Structure, imp: Implication) -> bool:
    return next(violations(A, imp.premises, imp.conclusion), None) is None


def is_model(A: Structure, axioms: Iterable[Implication]) -> bool:
    return all(validates(A, ax) for ax in axioms)


# -- substructures ------------------------------------------------------------

def closure(A: Structure, X: Iterable[int]) -> list[int]:
    """Sorted universe of the substructure generated by X."""
    S = set(X)
    for name, arity in A.signature.ops:
        if arity == 0:
            S.add(A.ops[name][0])
    frontier = True
    while frontier:
        frontier = False
        cur = sorted(S)
        for name, arity in A.signature.ops:
            if arity == 0:
                continue
            for args in itertools.product(cur, repeat=arity):
                v = A.apply(name, args)
                if v not in S:
                    S.add(v)
                    frontier = True
    return sorted(S)


def is_subuniverse(A: Structure, X: Iterable[int]) -> bool:
    X = set(X)
    return bool(X) and set(closure(A, X)) == X


def induced_substructure(A: Structure, universe: Sequence[int]) -> tuple[Structure, list[int]]:
    """Substructure on a closed subset; returns it with its inclusion map (new index -> old)."""
    emb = sorted(universe)
    back = {a: i for i, a in enumerate(emb)}
    ops = {}
    for name, arity in A.signature.ops:
        ops[name] = [back[A.apply(name, args)] for args in itertools.product(emb, repeat=arity)]
    rels = {
        name: {tuple(back[x] for x in t) for t in tuples if all(x in back for x in t)}
        for name, tuples in A.rels.items()
    }
    return Structure(A.signature, len(emb), ops, rels), emb


def generated_substructure(A: Structure, X: Iterable[int]) -> tuple[Structure, list[int]]:
    U = closure(A, X)
    if not U:
        raise StructureError("generated substructure would be empty (no generators, no constants)")
    return induced_substructure(A, U)


def subuniverses(A: Structure) -> list[tuple[int, ...]]:
    """All nonempty subuniverses, sorted by size then lexicographically."""
    found = set()
    for k in range(A.size + 1):
        for X in itertools.combinations(range(A.size), k):
            U = closure(A, X)
            if U:
                found.add(tuple(U))
    return sorted(found, key=lambda u: (len(u), u))


def generating_set(A: Structure, within: Iterable[int] | None = None) -> list[int]:
    """Greedy small generating set (largest closure first, ties to smaller index)."""
    target = set(within) if within is not None else set(A.universe)
    gens: list[int] = []
    have = set(closure(A, gens))
    while not target <= have:
        best, best_size = None, -1
        for b in sorted(target - have):
            s = len(closure(A, gens + [b]))
            if s > best_size:
                best, best_size = b, s
        gens.append(best)
        have = set(closure(A, gens))
    return gens


# -- homomorphisms --------------------------------------------------------------

class _HomPlan:
    """Stage-wise derivation plan of B from a generating set."""

    def __init__(self, B: Structure, gens: list[int]):
        self.gens = gens
        stage = {}
        derivs: list[list] = [[] for _ in range(len(gens) + 1)]
        have: list[int] = []

        def saturate(s: int):
            changed = True
            while changed:
                changed = False
                for name, arity in B.signature.ops:
                    for args in itertools.product(list(have), repeat=arity):
                        v = B.apply(name, args)
                        if v not in stage:
                            stage[v] = s
                            have.append(v)
                            derivs[s].append((v, name, args))
                            changed = True

        saturate(0)
        for i, g in enumerate(gens, start=1):
            if g not in stage:
                stage[g] = i
                have.append(g)
            saturate(i)
        self.stage = stage
        self.derivs = derivs
        # equation checks and relation checks, each at the stage where it first becomes decidable
        checks: list[list] = [[] for _ in range(len(gens) + 1)]
        for name, arity in B.signature.ops:
            for args in itertools.product(range(B.size), repeat=arity):
                s = max((stage[a] for a in args), default=0)
                checks[s].append(("op", name, args, B.apply(name, args)))
        for name, tuples in B.rels.items():
            for t in sorted(tuples):
                checks[max(stage[a] for a in t)].append(("rel", name, t, None))
        self.checks = checks


def homomorphisms(B: Structure, C: Structure, fixed: Mapping[int, int] | None = None) -> Iterator[tuple[int, ...]]:
    """Enumerate homomorphisms B -> C extending ``fixed``, as tuples h[b]."""
    if B.signature != C.signature:
        raise StructureError("signature mismatch")
    fixed = dict(fixed or {})
    plan = _HomPlan(B, generating_set(B))
    h = [-1] * B.size

    def stage_ok(s: int) -> bool:
        for v, name, args in plan.derivs[s]:
            h[v] = C.apply(name, [h[a] for a in args])
            if v in fixed and fixed[v] != h[v]:
                return False
        for kind, name, args, val in plan.checks[s]:
            if kind == "op":
                if C.apply(name, [h[a] for a in args]) != h[val]:
                    return False
            elif tuple(h[a] for a in args) not in C.rels[name]:
                return False
        return True

    def rec(i: int) -> Iterator[tuple[int, ...]]:
        if i > len(plan.gens):
            yield tuple(h)
            return
        g = plan.gens[i - 1]
        cands = [fixed[g]] if g in fixed else range(C.size)
        for c in cands:
            h[g] = c
            if stage_ok(i):
                yield from rec(i + 1)

    if stage_ok(0):
        yield from rec(1)


def is_homomorphism(B: Structure, C: Structure, h: Sequence[int]) -> bool:
    for name, arity in B.signature.ops:
        for args in itertools.product(range(B.size), repeat=arity):
            if h[B.apply(name, args)] != C.apply(name, [h[a] for a in args]):
                return False
    return all(tuple(h[a] for a in t) in C.rels[name] for name, ts in B.rels.items() for t in ts)


def isomorphisms(A: Structure, B: Structure) -> Iterator[tuple[int, ...]]:
    if A.size != B.size or A.signature != B.signature:
        return
    if any(len(A.rels[r]) != len(B.rels[r]) for r in A.rels):
        return
    if _invariants(A) != _invariants(B):
        return
    for h in homomorphisms(A, B):
        if len(set(h)) == A.size:
            yield h


def is_isomorphic(A: Structure, B: Structure) -> bool:
    return next(isomorphisms(A, B), None) is not None


def _invariants(A: Structure) -> tuple:
    # degree-style invariants: per element, how often it occurs as a value and in relations
    out = []
    for name, arity in A.signature.ops:
        counts = [0] * A.size
        for v in A.ops[name]:
            counts[v] += 1
        idem = sum(1 for a in A.universe if arity > 0 and A.apply(name, [a] * arity) == a)
        out.append((sorted(counts), idem))
    for name, _ in A.signature.rels:
        counts = [0] * A.size
        for t in A.rels[name]:
            for a in t:
                counts[a] += 1
        out.append((sorted(counts),))
    return tuple(out)


def relabel(A: Structure, perm: Sequence[int]) -> Structure:
    """Isomorphic copy in which element a is renamed perm[a]."""
    n = A.size
    inv = [0] * n
    for a, b in enumerate(perm):
        inv[b] = a
    ops = {}
    for name, arity in A.signature.ops:
        ops[name] = [perm[A.apply(name, [inv[x] for x in args])] for args in itertools.product(range(n), repeat=arity)]
    rels = {name: {tuple(perm[x] for x in t) for t in ts} for name, ts in A.rels.items()}
    return Structure(A.signature, n, ops, rels)


def canonical_form(A: Structure) -> tuple[Structure, tuple[int, ...]]:
    """Lexicographically least relabelling of A (op tables first, then relations)."""
    n = A.size
    enc_cells = []
    for name, arity in A.signature.ops:
        enc_cells.append(("op", name, list(itertools.product(range(n), repeat=arity))))
    best, best_perm = None, None
    for perm in itertools.permutations(range(n)):
        inv = [0] * n
        for a, b in enumerate(perm):
            inv[b] = a
        code = []
        worse = False
        for _, name, argss in enc_cells:
            for args in argss:
                code.append(perm[A.apply(name, [inv[x] for x in args])])
            if best is not None and code > best[: len(code)]:
                worse = True
                break
        if worse:
            continue
        for name, _ in A.signature.rels:
            code.extend(x for t in sorted(tuple(perm[x] for x in t) for t in A.rels[name]) for x in (*t, -1))
            code.append(-2)
        if best is None or code < best:
            best, best_perm = code, perm
    return relabel(A, best_perm), tuple(best_perm)


# -- products -----------------------------------------------------------------

def direct_product(factors: Sequence[Structure]) -> Structure:
    if not factors:
        raise StructureError("empty product")
    sig = factors[0].signature
    if any(F.signature != sig for F in factors):
        raise StructureError("signature mismatch")
    elems = list(itertools.product(*[range(F.size) for F in factors]))
    index = {e: i for i, e in enumerate(elems)}
    ops = {}
    for name, arity in sig.ops:
        ops[name] = [
            index[tuple(F.apply(name, [a[k] for a in args]) for k, F in enumerate(factors))]
            for args in itertools.product(elems, repeat=arity)
        ]
    rels = {}
    for name, arity in sig.rels:
        rels[name] = {
            tuple(index[e] for e in t)
            for t in itertools.product(elems, repeat=arity)
            if all(tuple(e[k] for e in t) in F.rels[name] for k, F in enumerate(factors))
        }
    return Structure(sig, len(elems), ops, rels)


@dataclass(frozen=True)
class FilterSpec:
    index_count: int
    member_sets: frozenset

    def __post_init__(self):
        m = self.index_count
        members = frozenset(frozenset(J) for J in self.member_sets)
        object.__setattr__(self, "member_sets", members)
        full = frozenset(range(m))
        if not members:
            raise StructureError("a filter is nonempty")
        for J in members:
            if not J <= full:
                raise StructureError(f"{set(J)} is not a set of indices below {m}")
            for K in members:
                if J & K not in members:
                    raise StructureError("filter not closed under intersection")
        for J in members:
            for i in full - J:
                if J | {i} not in members:
                    raise StructureError("filter not upward closed")

    @classmethod
    def principal(cls, m: int, generator: Iterable[int]) -> "FilterSpec":
        J = frozenset(generator)
        rest = sorted(set(range(m)) - J)
        members = {J | frozenset(extra) for k in range(len(rest) + 1) for extra in itertools.combinations(rest, k)}
        return cls(m, frozenset(members))

    @property
    def is_proper(self) -> bool:
        return frozenset() not in self.member_sets

    def __contains__(self, J) -> bool:
        return frozenset(J) in self.member_sets


def reduced_product(factors: Sequence[Structure], D: FilterSpec) -> Structure:
    if D.index_count != len(factors):
        raise StructureError("filter index set does not match the number of factors")
    if not D.is_proper:
        raise StructureError("improper filter: the empty set belongs to it")
    sig = factors[0].signature
    if any(F.signature != sig for F in factors):
        raise StructureError("signature mismatch")
    m = len(factors)
    elems = list(itertools.product(*[range(F.size) for F in factors]))

    def agree(e, f):
        return frozenset(i for i in range(m) if e[i] == f[i])

    # classes of "agree on a member of D"
    reps: list[tuple] = []
    cls_of: dict[tuple, int] = {}
    for e in elems:
        for ci, r in enumerate(reps):
            if agree(e, r) in D:
                cls_of[e] = ci
                break
        else:
            cls_of[e] = len(reps)
            reps.append(e)
    ops = {}
    for name, arity in sig.ops:
        ops[name] = [
            cls_of[tuple(F.apply(name, [a[k] for a in args]) for k, F in enumerate(factors))]
            for args in itertools.product(reps, repeat=arity)
        ]
    rels = {}
    for name, arity in sig.rels:
        rels[name] = {
            tuple(cls_of[e] for e in t)
            for t in itertools.product(reps, repeat=arity)
            if frozenset(k for k, F in enumerate(factors) if tuple(e[k] for e in t) in F.rels[name]) in D
        }
    return Structure(sig, len(reps), ops, rels)


# -- congruences ----------------------------------------------------------------

@dataclass(frozen=True)
class Congruence:
    """A partition of 0..n-1, stored as the least element of each element's class."""

    rep: tuple

    @classmethod
    def from_classes(cls, n: int, classes: Iterable[Iterable[int]]) -> "Congruence":
        rep = list(range(n))
        for c in classes:
            c = sorted(c)
            for a in c:
                rep[a] = c[0]
        return cls(tuple(rep))

    @classmethod
    def identity(cls, n: int) -> "Congruence":
        return cls(tuple(range(n)))

    @classmethod
    def total(cls, n: int) -> "Congruence":
        return cls((0,) * n)

    @property
    def size(self) -> int:
        return len(self.rep)

    def classes(self) -> list[list[int]]:
        out: dict[int, list[int]] = {}
        for a, r in enumerate(self.rep):
            out.setdefault(r, []).append(a)
        return [out[r] for r in sorted(out)]

    def related(self, a: int, b: int) -> bool:
        return self.rep[a] == self.rep[b]

    def pairs(self) -> set[tuple[int, int]]:
        return {(a, b) for c in self.classes() for a in c for b in c}

    def __le__(self, other: "Congruence") -> bool:
        return all(other.rep[a] == other.rep[r] for a, r in enumerate(self.rep))

    @property
    def is_identity(self) -> bool:
        return self.rep == tuple(range(len(self.rep)))

    def compatible_with(self, A: Structure) -> bool:
        for name, arity in A.signature.ops:
            seen: dict[tuple, int] = {}
            for args in itertools.product(range(A.size), repeat=arity):
                key = tuple(self.rep[a] for a in args)
                v = self.rep[A.apply(name, args)]
                if seen.setdefault(key, v) != v:
                    return False
        return True


def congruence_closure_of_pairs(A: Structure, pairs: Iterable[tuple[int, int]]) -> Congruence:
    parent = list(range(A.size))

    def find(a):
        while parent[a] != a:
            parent[a] = parent[parent[a]]
            a = parent[a]
        return a

    def union(a, b):
        a, b = find(a), find(b)
        if a == b:
            return False
        if b < a:
            a, b = b, a
        parent[b] = a
        return True

    for a, b in pairs:
        union(a, b)
    changed = True
    while changed:
        changed = False
        for name, arity in A.signature.ops:
            if arity == 0:
                continue
            seen: dict[tuple, int] = {}
            for args in itertools.product(range(A.size), repeat=arity):
                key = tuple(find(a) for a in args)
                v = A.apply(name, args)
                w = seen.setdefault(key, v)
                if union(v, w):
                    changed = True
    return Congruence(tuple(find(a) for a in range(A.size)))


def quotient(A: Structure, theta: Congruence) -> tuple[Structure, list[int]]:
    """Quotient structure and the projection map (element -> class index)."""
    if theta.size != A.size:
        raise StructureError("partition size does not match the structure")
    if not theta.compatible_with(A):
        raise StructureError("partition is not compatible with the operations")
    classes = theta.classes()
    proj = [0] * A.size
    for i, c in enumerate(classes):
        for a in c:
            proj[a] = i
    reps = [c[0] for c in classes]
    ops = {
        name: [proj[A.apply(name, args)] for args in itertools.product(reps, repeat=arity)]
        for name, arity in A.signature.ops
    }
    rels = {name: {tuple(proj[x] for x in t) for t in ts} for name, ts in A.rels.items()}
    return Structure(A.signature, len(classes), ops, rels), proj


def all_congruences(A: Structure) -> list[Congruence]:
    """Brute force over all partitions; only sensible for tiny structures."""
    out = []
    for rep in _partitions(A.size):
        theta = Congruence(rep)
        if theta.compatible_with(A):
            out.append(theta)
    return out


def _partitions(n: int) -> Iterator[tuple]:
    def rec(i, rep, blocks):
        if i == n:
            yield tuple(rep)
            return
        for b in blocks:
            rep.append(b)
            yield from rec(i + 1, rep, blocks)
            rep.pop()
        rep.append(i)
        yield from rec(i + 1, rep, blocks + [i])
        rep.pop()

    yield from rec(0, [], [])


# -- text format ------------------------------------------------------------------

def parse_structure(text: str, signature: Signature | None = None) -> Structure:
    """Parse the ``structure N`` / ``op NAME`` / ``rel NAME`` / ``end`` format.

    Arities may be given after the symbol name; otherwise they come from
    ``signature`` or are inferred from the table shape.
    """
    lines = []
    for no, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if line:
            lines.append((no, line.split()))
    if not lines or lines[0][1][0] != "structure":
        raise StructureError("expected 'structure' header")
    head = lines[0][1]
    nums = [w for w in head[1:] if w.lower() != "size"]
    if len(nums) != 1 or not nums[0].isdigit():
        raise StructureError("header must be 'structure N' or 'structure SIZE N'")
    n = int(nums[0])
    known_ops = dict(signature.ops) if signature else {}
    known_rels = dict(signature.rels) if signature else {}
    blocks: list[tuple[str, str, int | None, list]] = []
    ended = False
    for no, words in lines[1:]:
        if ended:
            raise StructureError(f"line {no}: content after 'end'")
        if words[0] in ("op", "rel"):
            if len(words) not in (2, 3):
                raise StructureError(f"line {no}: expected '{words[0]} NAME [ARITY]'")
            blocks.append((words[0], words[1], int(words[2]) if len(words) == 3 else None, []))
        elif words[0] == "end":
            ended = True
        else:
            if not blocks:
                raise StructureError(f"line {no}: table row outside a block")
            try:
                blocks[-1][3].append([int(w) for w in words])
            except ValueError:
                raise StructureError(f"line {no}: expected integers") from None
    if not ended:
        raise StructureError("missing 'end'")
    ops, rels, op_sig, rel_sig = {}, {}, [], []
    for kind, name, arity, rows in blocks:
        if kind == "op":
            flat = [v for r in rows for v in r]
            if arity is None:
                arity = known_ops.get(name)
            if arity is None:
                arity = 0 if len(flat) == 1 and n > 1 else _infer_arity(len(flat), n, name)
            ops[name] = flat
            op_sig.append((name, arity))
        else:
            if arity is None:
                arity = known_rels.get(name) or (len(rows[0]) if rows else None)
            if arity is None:
                raise StructureError(f"cannot infer arity of empty relation {name!r}")
            rels[name] = [tuple(r) for r in rows]
            rel_sig.append((name, arity))
    sig = signature or Signature(tuple(op_sig), tuple(rel_sig))
    return Structure(sig, n, ops, rels)


def _infer_arity(count: int, n: int, name: str) -> int:
    k, m = 0, 1
    while m < count:
        m *= n
        k += 1
    if m != count or n == 1:
        raise StructureError(f"cannot infer arity of {name!r} from {count} entries")
    return k


def render_structure(A: Structure) -> str:
    n = A.size
    lines = [f"structure {n}"]
    for name, arity in A.signature.ops:
        lines.append(f"op {name} {arity}")
        table = A.ops[name]
        if arity == 0:
            lines.append(str(table[0]))
        else:
            for i in range(0, len(table), n):
                lines.append(" ".join(map(str, table[i : i + n])))
    for name, arity in A.signature.rels:
        lines.append(f"rel {name} {arity}")
        for t in sorted(A.rels[name]):
            lines.append(" ".join(map(str, t)))
    lines.append("end")
    return "\n".join(lines) + "\n"
