"""Shared generators for the test suite."""

import random
from fractions import Fraction

from hypothesis import strategies as st

from iqcl.algebra import SConstant
from iqcl.semantics import ReducedModel, random_rational_model
from iqcl.syntax import (
    BINARY_OPS,
    Atom,
    Bin,
    Const,
    Formula,
    Neg,
    Sqrt,
)

_CONST_POOL = (
    SConstant(0, 0),
    SConstant(1, 0),
    SConstant(1, 1),
    SConstant(1, 2),
    SConstant(3, 3),
    SConstant(3, 2),
    SConstant(7, 4),
)


def random_formula(
    rng: random.Random,
    atom_names=("p", "q"),
    depth: int = 4,
    allow_sqrt: bool = True,
) -> Formula:
    if depth <= 0 or rng.random() < 0.25:
        if rng.random() < 0.75:
            return Atom(rng.choice(atom_names))
        return Const(rng.choice(_CONST_POOL))
    roll = rng.random()
    if roll < 0.15:
        return Neg(random_formula(rng, atom_names, depth - 1, allow_sqrt))
    if allow_sqrt and roll < 0.3:
        return Sqrt(random_formula(rng, atom_names, depth - 1, allow_sqrt))
    op = rng.choice(BINARY_OPS)
    return Bin(
        op,
        random_formula(rng, atom_names, depth - 1, allow_sqrt),
        random_formula(rng, atom_names, depth - 1, allow_sqrt),
    )


def random_model(rng: random.Random, atom_names, denominator: int = 64) -> ReducedModel:
    return random_rational_model(atom_names, rng, denominator)


def unit_fraction(rng: random.Random, max_den: int = 64) -> Fraction:
    den = rng.randint(1, max_den)
    return Fraction(rng.randint(0, den), den)


def formulas(atom_names=("p", "q"), max_leaves: int = 24) -> st.SearchStrategy:
    """Hypothesis strategy over formula trees."""
    leaves = st.one_of(
        st.sampled_from([Atom(n) for n in atom_names]),
        st.sampled_from([Const(c) for c in _CONST_POOL]),
    )
    return st.recursive(
        leaves,
        lambda inner: st.one_of(
            inner.map(Neg),
            inner.map(Sqrt),
            st.tuples(st.sampled_from(BINARY_OPS), inner, inner).map(
                lambda t: Bin(*t)
            ),
        ),
        max_leaves=max_leaves,
    )
