"""Atomic consequence, epimorphisms, dominions and definability for finite structures."""

from .chase import Certificate, ChaseState
from .consequence import counterexample, entails_finite_class, entails_theory, shrink_premises
from .epi import FiniteClass, TheoryBounded, dominion, extract_witness, is_epic, scan_es, scan_weak_es, shrink_almost_total
from .structures import Structure, parse_structure
from .syntax import Implication, Signature, Theory, parse_theory

__all__ = [
    "Certificate",
    "ChaseState",
    "FiniteClass",
    "Implication",
    "Signature",
    "Structure",
    "Theory",
    "TheoryBounded",
    "counterexample",
    "dominion",
    "entails_finite_class",
    "entails_theory",
    "extract_witness",
    "is_epic",
    "parse_structure",
    "parse_theory",
    "scan_es",
    "scan_weak_es",
    "shrink_almost_total",
    "shrink_premises",
]
