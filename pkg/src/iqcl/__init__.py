"""Irreversible quantum computational logic toolkit."""

from .algebra import SConstant, s_above_q5_bound, s_approximate
from .syntax import Formula, parse, print_formula
from .semantics import ReducedModel, Theory, relevance_degree, check_tautology
from .calculus import check_proof, match_axiom, parse_proof

__all__ = [
    "SConstant",
    "s_above_q5_bound",
    "s_approximate",
    "Formula",
    "parse",
    "print_formula",
    "ReducedModel",
    "Theory",
    "relevance_degree",
    "check_tautology",
    "check_proof",
    "match_axiom",
    "parse_proof",
]
