import random
from fractions import Fraction

import pytest

from iqcl.qmix import BlochQmix, P1
from iqcl.semantics import (
    RelevanceOptions,
    ReducedModel,
    Theory,
    UnassignedAtomError,
    check_tautology,
    consequence,
    eval_bloch,
    eval_prob,
    format_model,
    is_model_of,
    parse_model_text,
    random_rational_model,
    reduce_model,
    relevance_degree,
    sample_models,
)
from iqcl.syntax import parse
from util import random_formula, random_model

H = Fraction(1, 2)


def model(**pairs):
    return ReducedModel({k: (Fraction(u), Fraction(w)) for k, (u, w) in pairs.items()})


def test_disk_constraint_enforced():
    with pytest.raises(ValueError):
        model(p=(1, 1))  # (1-2u)^2 + (1-2w)^2 = 2
    with pytest.raises(ValueError):
        model(p=(Fraction(3, 2), H))
    model(p=(1, H))


def test_eval_examples():
    m = model(p=(1, H))
    assert eval_prob(m, parse("?p")) == (H, 0)
    assert eval_prob(m, parse("3/8")) == (Fraction(3, 8), H)
    m2 = model(p=(Fraction(1, 4), Fraction(5, 8)), q=(Fraction(2, 3), H))
    assert eval_prob(m2, parse("?(p + q)"))[0] == H
    assert eval_prob(m2, parse("p + q"))[0] == min(
        Fraction(1), Fraction(1, 4) + Fraction(2, 3)
    )
    assert eval_prob(m2, parse("!p")) == (Fraction(3, 4), Fraction(3, 8))


def test_sqrt_pair_recursion():
    m = model(p=(Fraction(1, 4), Fraction(5, 8)))
    u, w = eval_prob(m, parse("?p"))
    assert (u, w) == (Fraction(5, 8), Fraction(3, 4))
    # double root equals negation
    assert eval_prob(m, parse("??p")) == eval_prob(m, parse("!p"))


def test_unassigned_atom():
    with pytest.raises(UnassignedAtomError):
        eval_prob(model(p=(1, H)), parse("q"))


def test_reduce_model():
    full = {"p": BlochQmix(0.5, 0.3, 0.4)}
    reduced = reduce_model(full)
    dropped = reduce_model({"p": BlochQmix(0.0, 0.3, 0.4)})
    assert reduced == dropped
    assert reduce_model({"p": P1}).pair("p") == (1, H)
    f = parse("p + !p * ?p")
    assert eval_prob(reduced, f) == eval_prob(dropped, f)


def test_is_model_of():
    T = Theory([parse("p")])
    assert is_model_of(model(p=(1, H)), T)
    assert not is_model_of(model(p=(Fraction(9, 10), H)), T)
    assert is_model_of(model(p=(Fraction(9, 10), H)), Theory())


def test_theory_dedup_and_text():
    T = Theory([parse("p"), parse("p"), parse("q")])
    assert len(T) == 2
    T2 = Theory.from_text("p\n# c\nq\n")
    assert T2.members == T.members


def test_tautology_examples():
    assert check_tautology(parse("p -> (q -> p)")).is_tautology
    report = check_tautology(parse("p"))
    assert not report.is_tautology
    assert report.counterexample == model(p=(0, H))
    assert check_tautology(parse("p -> p + p")).is_tautology


def test_constants_are_model_independent():
    for m in (model(), model(p=(1, H)), model(p=(Fraction(1, 3), H))):
        assert eval_prob(m, parse("3/8"))[0] == Fraction(3, 8)


def test_eval_exact_with_awkward_denominators():
    m = model(p=(Fraction(1, 3), H))
    assert eval_prob(m, parse("p . p . p"))[0] == Fraction(1, 27)
    assert eval_prob(m, parse("p + p + p"))[0] == 1


def test_tautology_two_atoms_counterexample_exact():
    report = check_tautology(parse("p -> q"))
    assert not report.is_tautology
    m = report.counterexample
    u_p = eval_prob(m, parse("p"))[0]
    u_q = eval_prob(m, parse("q"))[0]
    assert u_p > u_q


def test_consequence_examples():
    assert consequence(parse("p"), parse("p + q")).is_tautology
    assert consequence(parse("p * q"), parse("p")).is_tautology
    report = consequence(parse("p"), parse("p . p"))
    assert not report.is_tautology
    u = eval_prob(report.counterexample, parse("p"))[0]
    assert 0 < u < 1


def test_pair_agreement_with_physical_circuit():
    # a third evaluation route: atoms as 2x2 density matrices, unaries by
    # matrix conjugation, products through the Toffoli circuit plus the
    # partial trace, everything else rebuilt from Born probabilities
    import numpy as np

    from iqcl import nqubit_sim
    from iqcl.algebra import mv_implies, mv_join, mv_meet, mv_oplus
    from iqcl.syntax import Atom, Bin, Const, Neg, Sqrt

    ops = {
        "+": lambda a, b: float(min(1.0, a + b)),
        "*": lambda a, b: float(max(0.0, a + b - 1.0)),
        "->": lambda a, b: float(min(1.0, 1.0 - a + b)),
        "&": min,
        "|": max,
    }

    def eval_matrix(mats, f):
        if isinstance(f, Atom):
            return mats[f.name]
        if isinstance(f, Const):
            return nqubit_sim.diagonal_density(float(f.value.value))
        if isinstance(f, Neg):
            gate = nqubit_sim.not_j(1, 1)
            return gate @ eval_matrix(mats, f.arg) @ gate.conj().T
        if isinstance(f, Sqrt):
            gate = nqubit_sim.sqrt_not_j(1, 1)
            return gate @ eval_matrix(mats, f.arg) @ gate.conj().T
        left = eval_matrix(mats, f.left)
        right = eval_matrix(mats, f.right)
        if f.op == ".":
            return nqubit_sim.partial_trace(nqubit_sim.and_gate(left, right), 1)
        value = ops[f.op](nqubit_sim.prob_n(left), nqubit_sim.prob_n(right))
        return nqubit_sim.diagonal_density(value)

    rng = random.Random(203)
    for _ in range(60):
        f = random_formula(rng, ("p", "q"), depth=4)
        m = random_model(rng, ("p", "q"), denominator=32)
        mats = {
            name: nqubit_sim.bloch_embed(
                BlochQmix(0.0, float(1 - 2 * w), float(1 - 2 * u))
            )
            for name, (u, w) in m.assignment.items()
        }
        physical = nqubit_sim.prob_n(eval_matrix(mats, f))
        exact = float(eval_prob(m, f)[0])
        assert abs(physical - exact) < 1e-10


def test_pair_bloch_agreement():
    rng = random.Random(200)
    for _ in range(200):
        f = random_formula(rng, ("p", "q"), depth=4)
        m = random_model(rng, ("p", "q"))
        bloch = {
            name: BlochQmix(0.0, float(1 - 2 * w), float(1 - 2 * u))
            for name, (u, w) in m.assignment.items()
        }
        exact = float(eval_prob(m, f)[0])
        folded = eval_bloch(bloch, f)
        assert abs(exact - folded) < 1e-12


def test_relevance_examples():
    r = relevance_degree(Theory([parse("p")]), parse("?p"))
    assert r.status == "feasible"
    assert abs(float(r.value) - 0.5) < 1e-6
    assert r.witness is not None
    u, _ = eval_prob(r.witness, parse("p"))
    assert u >= Fraction(999999, 1000000)

    r2 = relevance_degree(Theory([parse("3/4 -> p")]), parse("p"))
    assert abs(float(r2.value) - 0.75) < 1e-3

    r3 = relevance_degree(Theory(), parse("p + !p"))
    assert abs(float(r3.value) - 1.0) < 1e-9


def test_relevance_infeasible():
    r = relevance_degree(Theory([parse("p"), parse("!p")]), parse("q"))
    assert r.status == "infeasible"
    assert r.value == 1


def test_relevance_atom_free():
    r = relevance_degree(Theory([parse("top")]), parse("3/8"))
    assert r.status == "feasible"
    assert r.value == Fraction(3, 8)
    r2 = relevance_degree(Theory([parse("3/8")]), parse("p"))
    assert r2.status == "infeasible"
    assert r2.value == 1


def test_relevance_budget_limited():
    opts = RelevanceOptions(budget=40)
    r = relevance_degree(Theory([parse("p")]), parse("?p"), opts)
    assert r.status == "tolerance-limited"
    assert r.evaluations <= 40


def test_relevance_monotone_in_theory():
    base = Theory([parse("1/4 -> p")])
    larger = Theory([parse("1/4 -> p"), parse("3/4 -> p")])
    r1 = relevance_degree(base, parse("p"))
    r2 = relevance_degree(larger, parse("p"))
    assert float(r1.value) <= float(r2.value) + 1e-6


def _disk_grid(steps):
    points = []
    for i in range(steps + 1):
        for j in range(steps + 1):
            u, w = Fraction(i, steps), Fraction(j, steps)
            if (1 - 2 * u) ** 2 + (1 - 2 * w) ** 2 <= 1:
                points.append((u, w))
    return points


def test_relevance_empty_theory_matches_grid_oracle_one_atom():
    rng = random.Random(201)
    steps = 64
    points = _disk_grid(steps)
    for _ in range(6):
        f = random_formula(rng, ("p",), depth=3)
        grid_best = min(eval_prob(ReducedModel({"p": pt}), f)[0] for pt in points)
        r = relevance_degree(Theory(), f)
        assert float(r.value) <= float(grid_best) + 1e-9
        assert float(r.value) >= float(grid_best) - 2 / steps


def test_relevance_empty_theory_matches_grid_oracle_two_atoms():
    rng = random.Random(202)
    steps = 12
    points = _disk_grid(steps)
    for _ in range(4):
        f = random_formula(rng, ("p", "q"), depth=3)
        grid_best = min(
            eval_prob(ReducedModel({"p": pu, "q": qu}), f)[0]
            for pu in points
            for qu in points
        )
        r = relevance_degree(Theory(), f)
        assert float(r.value) <= float(grid_best) + 1e-9
        assert float(r.value) >= float(grid_best) - 2 * 2 / steps


def test_sample_models_exact():
    T = Theory([parse("p"), parse("p -> q")])
    models = sample_models(T, 10, seed=3, extra_atoms={"r"})
    assert len(models) == 10
    for m in models:
        assert is_model_of(m, T)
        assert "r" in m.assignment


def test_model_file_round_trip():
    m = parse_model_text("p 1 1/2\nq 0.25 0.625\n")
    assert m.pair("p") == (1, H)
    assert m.pair("q") == (Fraction(1, 4), Fraction(5, 8))
    again = parse_model_text(format_model(m))
    assert again == m
    with pytest.raises(ValueError):
        parse_model_text("p 1 1")  # disk violation
    with pytest.raises(ValueError):
        parse_model_text("p 1")


def test_random_rational_model_in_disk():
    rng = random.Random(202)
    for _ in range(50):
        m = random_rational_model(("p", "q"), rng)
        for u, w in m.assignment.values():
            assert (1 - 2 * u) ** 2 + (1 - 2 * w) ** 2 <= 1
