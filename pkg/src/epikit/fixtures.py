"""Bundled example theories, structures and deductive systems."""

from __future__ import annotations

import itertools
from importlib.resources import files

from .logic import DeductiveSystem, parse_system
from .models import enumerate_models
from .structures import Structure, evaluate, parse_structure
from .syntax import Signature, Term, Theory, parse_term, parse_terms, parse_theory


def data_path(name: str):
    return files("epikit") / "data" / name


def read(name: str) -> str:
    return data_path(name).read_text(encoding="utf-8")


def theory(name: str) -> Theory:
    """``dl``, ``lat``, ``lat0``, ``ba`` or ``sets``."""
    return parse_theory(read(f"{name}.ua"))


def structure(name: str, signature: Signature | None = None) -> Structure:
    return parse_structure(read(f"{name}.fs"), signature)


def system(name: str) -> DeductiveSystem:
    return parse_system(read(f"{name}.ds"))


def terms(name: str, signature: Signature) -> list[Term]:
    return parse_terms(read(name), signature)


def term_reduct(A: Structure, signature: Signature, definitions: dict[str, Term]) -> Structure:
    """Structure over ``signature`` whose operations are the given terms evaluated in A.

    Term variables are ``x0, x1, ...`` in argument order.
    """
    ops = {}
    for name, arity in signature.ops:
        t = definitions[name]
        ops[name] = [
            evaluate(A, t, {f"x{i}": a for i, a in enumerate(args)})
            for args in itertools.product(range(A.size), repeat=arity)
        ]
    return Structure(signature, A.size, ops, {})


def boolean_implication_algebras(max_size: int = 4) -> list[Structure]:
    """{imp, top}-reducts of the Boolean algebras with at most ``max_size`` elements."""
    ba = theory("ba")
    sig = system("boolimp").signature
    defs = {
        "imp": parse_term("join(not(x0), x1)", ba.signature),
        "top": parse_term("top()", ba.signature),
    }
    return [term_reduct(B, sig, defs) for n in range(1, max_size + 1) for B in enumerate_models(ba, n)]
