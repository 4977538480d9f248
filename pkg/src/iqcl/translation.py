"""The PMV-translation and the finite bridging theory.

The translation rewrites every square root over anything compound away:
roots of negations and double roots unfold, roots of binaries and of
constants collapse to the constant 1/2, and the map is homomorphic
elsewhere.  Its image lies in the fragment where roots apply only to
propositional variables, and it preserves the probability value of every
formula under every reduced model.

The bridging theory is infinite in the paper (one bound per admissible
constant); the finite instantiation defaults to the least 8-bit dyadic
above the exact bound, 55/128, and to 3/8 for the mixed group.  Any one
admissible constant dominates the larger ones, so a single value per
group suffices for desk-scale checks.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

from .algebra import SConstant, s_above_q5_bound
from .semantics import Theory
from .syntax import (
    IMPLIES,
    OPLUS,
    PRODUCT,
    Atom,
    Bin,
    CHALF,
    Const,
    Formula,
    Neg,
    Sqrt,
)

# Least dyadic with 8-bit denominator exceeding (2 + sqrt 2)/8.
DEFAULT_Q5_CONSTANT = SConstant(55, 7)
DEFAULT_T5_CONSTANT = SConstant(3, 3)

_QUARTER = Const(SConstant(1, 2))
_EIGHTH = Const(SConstant(1, 3))


def pmv_translate(f: Formula) -> Formula:
    """Rewrite into the root-only-on-variables fragment, value-preserving."""
    if isinstance(f, (Atom, Const)):
        return f
    if isinstance(f, Neg):
        return Neg(pmv_translate(f.arg))
    if isinstance(f, Bin):
        return Bin(f.op, pmv_translate(f.left), pmv_translate(f.right))
    arg = f.arg
    if isinstance(arg, Atom):
        return f
    if isinstance(arg, Const):
        # Roots of constants always carry value 1/2; the paper's
        # definition leaves this case implicit.
        return CHALF
    if isinstance(arg, Neg):
        return Neg(pmv_translate(Sqrt(arg.arg)))
    if isinstance(arg, Sqrt):
        return Neg(pmv_translate(arg.arg))
    return CHALF  # root of a binary compound


def translate_theory(theory: Theory) -> Theory:
    return Theory(pmv_translate(m) for m in theory)


@dataclass(frozen=True)
class Tq5Config:
    """Finite instantiation of the bridging theory.

    ``s_values`` must each pass the exact bound test; ``t5_s_values``
    must each be at least 3/8.  ``t5_formulas`` lists the formulas the
    mixed group is instantiated over.
    """

    atoms: tuple[str, ...]
    s_values: tuple[SConstant, ...] = (DEFAULT_Q5_CONSTANT,)
    t5_formulas: tuple[Formula, ...] = ()
    t5_s_values: tuple[SConstant, ...] = (DEFAULT_T5_CONSTANT,)

    def __post_init__(self):
        for s in self.s_values:
            if not s_above_q5_bound(s):
                raise ValueError(f"{s} fails the exact (2+sqrt 2)/8 bound test")
        for s in self.t5_s_values:
            if s.value < Fraction(3, 8):
                raise ValueError(f"{s} is below 3/8")


def _quarter_of(f: Formula) -> Formula:
    return Bin(PRODUCT, _QUARTER, f)


def generate_tq5(cfg: Tq5Config) -> Theory:
    """The four polarity groups per atom and bound, plus the mixed group."""
    members: list[Formula] = []
    for name in cfg.atoms:
        p = Atom(name)
        root = Sqrt(p)
        variants = (
            (p, root),
            (Neg(p), Neg(root)),
            (Neg(p), root),
            (p, Neg(root)),
        )
        for s in cfg.s_values:
            for left, right in variants:
                body = Bin(OPLUS, _quarter_of(left), _quarter_of(right))
                members.append(Bin(IMPLIES, body, Const(s)))
    for alpha in cfg.t5_formulas:
        for s in cfg.t5_s_values:
            body = Bin(OPLUS, _quarter_of(alpha), _EIGHTH)
            members.append(Bin(IMPLIES, body, Const(s)))
    return Theory(members)
