"""Implicit versus explicit definability of variables Z over variables X.

Γ defines Z implicitly over X when any two solutions of Γ agreeing on X agree
on Z; it defines z explicitly when Γ entails z = φ for a term φ over X.  The
check combines three bounded searches: defining terms, a two-copy chase for
the implicit condition, and finite models separating two solutions.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from typing import Sequence

from .consequence import Counterexample, counterexample, entails_theory
from .models import models_up_to
from .structures import Structure, evaluate
from .syntax import App, Atom, Eq, Term, Theory, Var, check_atom, substitute, vars_of

EXPLICIT = "ExplicitlyDefined"
IMPLICIT_ONLY = "ImplicitNotExplicit"
NOT_IMPLICIT = "NotImplicit"
UNKNOWN = "Unknown"


class BethError(ValueError):
    pass


@dataclass
class BethReport:
    verdict: str
    definitions: dict = field(default_factory=dict)  # z -> term
    certificates: dict = field(default_factory=dict)  # z -> Certificate (explicit) or implicit proof
    implicit: bool | None = None
    implicit_certificates: dict = field(default_factory=dict)
    refuted: dict = field(default_factory=dict)  # z -> [(term, Counterexample)]
    separation: Counterexample | None = None
    notes: list = field(default_factory=list)

    def to_json(self) -> dict:
        return {
            "verdict": self.verdict,
            "definitions": {z: str(t) for z, t in sorted(self.definitions.items())},
            "certificates": {z: c.to_json() for z, c in sorted(self.certificates.items())},
            "implicit": self.implicit,
            "implicit_certificates": {z: c.to_json() for z, c in sorted(self.implicit_certificates.items())},
            "refuted": {z: [str(t) for t, _ in rs] for z, rs in sorted(self.refuted.items())},
            "separation": self.separation.render() if self.separation else None,
            "notes": list(self.notes),
        }


def candidate_terms(T: Theory, X: Sequence[str], term_depth: int, models: Sequence[Structure]) -> list[Term]:
    """Terms over X up to ``term_depth``, one per behaviour on the given models.

    Terms are built level by level from the representatives kept so far and
    ordered by depth, then by their printed form.  Two terms with the same
    values under every assignment into every model are interchangeable for
    finite refutation, so only the first is kept.
    """
    envs = [(i, dict(zip(X, vals))) for i, M in enumerate(models) for vals in itertools.product(range(M.size), repeat=len(X))]

    def profile(t: Term) -> tuple:
        return tuple(evaluate(models[i], t, env) for i, env in envs)

    reps: dict[tuple, Term] = {}
    order: list[Term] = []
    level = sorted([Var(x) for x in X] + [App(c, ()) for c in T.signature.constants], key=str)
    for d in range(term_depth + 1):
        fresh = []
        for t in sorted(level, key=str):
            p = profile(t)
            if p not in reps:
                reps[p] = t
                fresh.append(t)
        order += fresh
        if d == term_depth:
            break
        pool = list(reps.values())
        level = [
            App(op, args)
            for op, arity in T.signature.ops
            if arity > 0
            for args in itertools.product(pool, repeat=arity)
        ]
    return order


def _doubled(gamma: Sequence[Atom], Z: Sequence[str]) -> tuple[list, list]:
    one = {z: Var(f"{z}_1") for z in Z}
    two = {z: Var(f"{z}_2") for z in Z}
    prem = list(dict.fromkeys([substitute(g, one) for g in gamma] + [substitute(g, two) for g in gamma]))
    goals = [Eq(one[z], two[z]) for z in Z]
    return prem, goals


def beth_check(
    T: Theory,
    gamma: Sequence[Atom],
    X: Sequence[str],
    Z: Sequence[str],
    depth: int = 2,
    fuel: int = 10000,
    term_depth: int = 3,
    model_size: int = 4,
) -> BethReport:
    X, Z, gamma = list(X), list(Z), list(gamma)
    if set(X) & set(Z):
        raise BethError("X and Z must be disjoint")
    if not X and not T.signature.constants:
        raise BethError("no terms over X: X is empty and there are no constants")
    for g in gamma:
        check_atom(T.signature, g)
        if not vars_of(g) <= set(X) | set(Z):
            raise BethError(f"{g} uses variables outside X and Z")
    models = models_up_to(T, model_size) if model_size > 0 else []
    report = BethReport(UNKNOWN)

    # explicit definitions
    cands = candidate_terms(T, X, term_depth, models) if models else _plain_terms(T, X, term_depth)
    all_refuted = True
    for z in Z:
        report.refuted[z] = []
        for phi in cands:
            goal = Eq(Var(z), phi)
            ce = counterexample(models, gamma, goal) if models else None
            if ce is not None:
                report.refuted[z].append((phi, ce))
                continue
            cert = entails_theory(T, gamma, goal, fuel, depth)
            if cert is not None:
                report.definitions[z] = phi
                report.certificates[z] = cert
                break
            all_refuted = False
    explicit = len(report.definitions) == len(Z)

    # implicit definability via two copies of Z
    prem, goals = _doubled(gamma, Z)
    implicit = True
    for z, goal in zip(Z, goals):
        cert = entails_theory(T, prem, goal, fuel, depth)
        if cert is None:
            implicit = False
            break
        report.implicit_certificates[z] = cert
    report.implicit = implicit

    if explicit:
        report.verdict = EXPLICIT
        if not implicit:
            report.notes.append("explicit definitions found but the bounded implicit test did not close")
        return report
    if implicit:
        if all_refuted:
            report.verdict = IMPLICIT_ONLY
            report.notes.append(f"every term over X of depth <= {term_depth} is refuted in a model of size <= {model_size}")
        else:
            report.notes.append("implicit, but some candidate terms were neither proved nor refuted")
        return report
    for goal in goals:
        ce = counterexample(models, prem, goal) if models else None
        if ce is not None:
            report.verdict = NOT_IMPLICIT
            report.separation = ce
            return report
    return report


def _plain_terms(T: Theory, X: Sequence[str], term_depth: int) -> list[Term]:
    level = [Var(x) for x in X] + [App(c, ()) for c in T.signature.constants]
    seen = list(level)
    for _ in range(term_depth):
        level = [App(op, args) for op, a in T.signature.ops if a > 0 for args in itertools.product(seen, repeat=a)]
        seen = list(dict.fromkeys(seen + level))
    return sorted(seen, key=lambda t: (_depth(t), str(t)))


def _depth(t: Term) -> int:
    return 0 if isinstance(t, Var) or not t.args else 1 + max(_depth(a) for a in t.args)
