"""Atomic consequence: exact over finite classes, sound over theories."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Iterable, Sequence

from .chase import Certificate, ChaseError, UniverseTooLarge, chase_query
from .structures import Structure, StructureError, violations
from .syntax import Atom, Theory, check_atom


@dataclass(frozen=True)
class Counterexample:
    structure: Structure
    assignment: dict
    index: int = 0

    def render(self) -> str:
        env = ", ".join(f"{x}↦{v}" for x, v in sorted(self.assignment.items()))
        return f"model #{self.index} (size {self.structure.size}): {env}"


def _check_class(K: Sequence[Structure], formulas: Iterable[Atom]) -> None:
    if not K:
        return
    sig = K[0].signature
    if any(A.signature != sig for A in K):
        raise StructureError("structures in the class have different signatures")
    for f in formulas:
        check_atom(sig, f)


def counterexample(K: Sequence[Structure], premises: Sequence[Atom], conclusion: Atom) -> Counterexample | None:
    """First (structure, assignment) satisfying the premises but not the conclusion."""
    premises = list(premises)
    _check_class(K, premises + [conclusion])
    for i, A in enumerate(K):
        bad = next(violations(A, premises, conclusion), None)
        if bad is not None:
            return Counterexample(A, bad, i)
    return None


def entails_finite_class(K: Sequence[Structure], premises: Sequence[Atom], conclusion: Atom) -> bool:
    return counterexample(K, premises, conclusion) is None


def entails_theory(
    T: Theory,
    premises: Sequence[Atom],
    conclusion: Atom,
    fuel: int = 10000,
    depth: int = 2,
    *,
    deepen: bool = False,
    max_universe: int | None = None,
) -> Certificate | None:
    """A certificate if the chase derives the conclusion, else None (unknown).

    With ``deepen`` the depths 0, 1, ..., ``depth`` are tried in turn, each
    with the full fuel.  A universe over the size cap counts as unknown.
    """
    premises = list(premises)
    for f in premises + [conclusion]:
        check_atom(T.signature, f)
    for d in range(0 if deepen else depth, depth + 1):
        try:
            st = chase_query(T, premises, conclusion, d, fuel, max_universe)
        except UniverseTooLarge:
            return None
        if st.holds(conclusion):
            return st.certificate(conclusion)
    return None


def shrink_premises(
    decider: Callable[[list, Atom], bool], premises: Sequence[Atom], conclusion: Atom
) -> list:
    """Greedy 1-minimal subset of the premises still accepted by ``decider``.

    Passes are repeated until no single premise can be dropped, so the result
    is 1-minimal even when the decider is not monotone.
    """
    kept = list(dict.fromkeys(premises))
    if not decider(kept, conclusion):
        raise ChaseError("decider rejects the full premise set")
    dropped = True
    while dropped:
        dropped = False
        for s in list(kept):
            trial = [p for p in kept if p != s]
            if decider(trial, conclusion):
                kept = trial
                dropped = True
    return kept


def theory_decider(T: Theory, fuel: int = 10000, depth: int = 2) -> Callable[[list, Atom], bool]:
    return lambda prem, concl: entails_theory(T, prem, concl, fuel, depth) is not None


def finite_decider(K: Sequence[Structure]) -> Callable[[list, Atom], bool]:
    return lambda prem, concl: entails_finite_class(K, prem, concl)
