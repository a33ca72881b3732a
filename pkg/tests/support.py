"""Random terms, structures and theories for the property tests."""

from __future__ import annotations

import itertools
import random

from hypothesis import strategies as st

from epikit.structures import Structure
from epikit.syntax import App, Eq, Implication, Rel, Signature, Theory, Var

SMALL_SIG = Signature((("f", 2), ("g", 1), ("e", 0)))
REL_SIG = Signature((("g", 1), ("h", 1), ("e", 0)), (("p", 1),))
BIN_SIG = Signature((("f", 2), ("e", 0)))


def random_term(rng: random.Random, sig: Signature, names, depth: int):
    leaves = [Var(x) for x in names] + [App(c, ()) for c in sig.constants]
    ops = [(o, a) for o, a in sig.ops if a > 0]
    if depth == 0 or not ops or rng.random() < 0.3:
        return rng.choice(leaves)
    op, arity = rng.choice(ops)
    return App(op, tuple(random_term(rng, sig, names, depth - 1) for _ in range(arity)))


def random_atom(rng: random.Random, sig: Signature, names, depth: int):
    if sig.rels and rng.random() < 0.4:
        rel, arity = rng.choice(sig.rels)
        return Rel(rel, tuple(random_term(rng, sig, names, depth) for _ in range(arity)))
    return Eq(random_term(rng, sig, names, depth), random_term(rng, sig, names, depth))


def random_implication(rng: random.Random, sig: Signature, names, depth: int = 2, max_premises: int = 1):
    prem = tuple(random_atom(rng, sig, names, depth) for _ in range(rng.randint(0, max_premises)))
    return Implication(prem, random_atom(rng, sig, names, depth))


def random_theory(rng: random.Random, sig: Signature, max_axioms: int = 3, names=("x", "y", "z")) -> Theory:
    return Theory(sig, tuple(random_implication(rng, sig, names) for _ in range(rng.randint(1, max_axioms))))


def random_structure(rng: random.Random, sig: Signature, n: int) -> Structure:
    ops = {o: [rng.randrange(n) for _ in range(n**a)] for o, a in sig.ops}
    rels = {
        r: {t for t in itertools.product(range(n), repeat=a) if rng.random() < 0.5}
        for r, a in sig.rels
    }
    return Structure(sig, n, ops, rels)


seeds = st.integers(0, 2**32 - 1).map(random.Random)
