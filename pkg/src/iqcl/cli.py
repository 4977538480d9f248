"""Command-line front end for parsing, evaluation, translation, relevance,
proof checking and the gate simulator.

Exit codes: 0 success, 1 semantic rejection (counterexample found, proof
rejected, oracle deviation), 2 usage or parse error.  With
``--format machine`` every command emits deterministic ``key=value``
lines, byte-identical for identical configuration and seed.
"""

from __future__ import annotations

import argparse
import random
import sys
from fractions import Fraction
from pathlib import Path

from . import calculus, nqubit_sim, qmix, semantics, translation
from .algebra import SConstant
from .syntax import ParseError, parse, parse_theory_text, print_formula


def _read(path: str) -> str:
    return Path(path).read_text(encoding="utf-8")


def _emit(fields: list[tuple[str, object]], fmt: str):
    if fmt == "machine":
        for key, value in fields:
            print(f"{key}={value}")
    else:
        for key, value in fields:
            print(f"{key}: {value}")


def _model_fields(model: semantics.ReducedModel) -> list[tuple[str, object]]:
    fields = []
    for name in sorted(model.assignment):
        u, w = model.assignment[name]
        fields.append((f"model.{name}.u", u))
        fields.append((f"model.{name}.w", w))
    return fields


def _add_common(parser: argparse.ArgumentParser):
    parser.add_argument("--format", choices=("plain", "machine"), default="plain")
    parser.add_argument("--seed", type=int, default=0)
    parser.add_argument("--grid", type=Fraction, default=Fraction(1, 32))
    parser.add_argument("--tol", type=float, default=1e-6)
    parser.add_argument("--budget", type=int, default=100_000)


def _cmd_fmt(args) -> int:
    _emit([("formula", print_formula(parse(args.formula)))], args.format)
    return 0


def _cmd_eval(args) -> int:
    f = parse(args.formula)
    model = semantics.parse_model_text(_read(args.model))
    u, w = semantics.eval_prob(model, f)
    _emit([("value", u), ("root_value", w)], args.format)
    return 0


def _cmd_taut(args) -> int:
    f = parse(args.formula)
    report = semantics.check_tautology(f, budget=args.budget, seed=args.seed)
    fields: list[tuple[str, object]] = [("verdict", report.verdict)]
    if report.counterexample is not None:
        fields += _model_fields(report.counterexample)
    _emit(fields, args.format)
    return 0 if report.is_tautology else 1


def _cmd_relevance(args) -> int:
    theory = semantics.Theory(parse_theory_text(_read(args.theory)))
    f = parse(args.formula)
    options = semantics.RelevanceOptions(
        grid=args.grid, tol=args.tol, budget=args.budget, seed=args.seed
    )
    result = semantics.relevance_degree(theory, f, options)
    fields: list[tuple[str, object]] = [
        ("value", result.value if isinstance(result.value, Fraction) else repr(result.value)),
        ("status", result.status),
        ("evaluations", result.evaluations),
    ]
    if result.witness is not None:
        fields += _model_fields(result.witness)
    _emit(fields, args.format)
    return 0


def _cmd_translate(args) -> int:
    if args.theory:
        theory = semantics.Theory(parse_theory_text(_read(args.theory)))
        for member in translation.translate_theory(theory):
            print(print_formula(member))
        return 0
    if args.formula is None:
        raise ValueError("provide a formula or --theory")
    _emit([("formula", print_formula(translation.pmv_translate(parse(args.formula))))], args.format)
    return 0


def _parse_s(text: str) -> SConstant:
    return SConstant.from_fraction(Fraction(text))


def _cmd_tq5(args) -> int:
    cfg = translation.Tq5Config(
        atoms=tuple(a for a in args.atoms.split(",") if a),
        s_values=tuple(_parse_s(s) for s in args.s.split(",") if s)
        if args.s
        else (translation.DEFAULT_Q5_CONSTANT,),
        t5_formulas=tuple(parse(t) for t in args.t5),
        t5_s_values=tuple(_parse_s(s) for s in args.t5_s.split(",") if s)
        if args.t5_s
        else (translation.DEFAULT_T5_CONSTANT,),
    )
    for member in translation.generate_tq5(cfg):
        print(print_formula(member))
    return 0


def _cmd_proof(args) -> int:
    theory = semantics.Theory(parse_theory_text(_read(args.theory)))
    proof = calculus.parse_proof(_read(args.proof))
    goal = parse(args.goal)
    try:
        calculus.check_proof(theory, proof, goal)
    except calculus.ProofError as exc:
        _emit([("verdict", "rejected"), ("reason", exc)], args.format)
        return 1
    _emit([("verdict", "ok"), ("steps", len(proof))], args.format)
    return 0


def _random_ball_point(rng: random.Random) -> qmix.BlochQmix:
    while True:
        r1, r2, r3 = (rng.uniform(-1, 1) for _ in range(3))
        if r1 * r1 + r2 * r2 + r3 * r3 <= 1.0:
            return qmix.BlochQmix(r1, r2, r3)


def _cmd_sim(args) -> int:
    fmt = args.format
    if args.gate == "prop34":
        rng = random.Random(args.seed)
        worst = 0.0
        for _ in range(args.trials):
            tau, nu = _random_ball_point(rng), _random_ball_point(rng)
            product = nqubit_sim.and_gate(
                nqubit_sim.bloch_embed(tau), nqubit_sim.bloch_embed(nu)
            )
            reduced = nqubit_sim.bloch_extract(nqubit_sim.partial_trace(product, 1))
            direct = qmix.iand(tau, nu).bloch
            worst = max(
                worst,
                abs(reduced.r1 - direct.r1),
                abs(reduced.r2 - direct.r2),
                abs(reduced.r3 - direct.r3),
            )
        _emit([("trials", args.trials), ("max_deviation", repr(worst))], fmt)
        return 0 if worst < 1e-10 else 1

    operands = [qmix.parse_qmix(text) for text in args.operands]
    if args.gate in ("not", "sqrt_not"):
        if len(operands) != 1:
            raise ValueError(f"gate {args.gate} takes one operand")
        rho = nqubit_sim.bloch_embed(
            operands[0].bloch if isinstance(operands[0], qmix.DiagonalQmix) else operands[0]
        )
        gate = nqubit_sim.not_j(1, 1) if args.gate == "not" else nqubit_sim.sqrt_not_j(1, 1)
        out = gate @ rho @ gate.conj().T
        b = nqubit_sim.bloch_extract(out)
        _emit(
            [
                ("probability", repr(nqubit_sim.prob_n(out))),
                ("bloch", qmix.format_qmix(b)),
            ],
            fmt,
        )
        return 0
    if args.gate in ("and", "iand", "oplus"):
        if len(operands) != 2:
            raise ValueError(f"gate {args.gate} takes two operands")
        blochs = [
            op.bloch if isinstance(op, qmix.DiagonalQmix) else op for op in operands
        ]
        if args.gate == "and":
            out = nqubit_sim.and_gate(
                nqubit_sim.bloch_embed(blochs[0]), nqubit_sim.bloch_embed(blochs[1])
            )
            _emit([("probability", repr(nqubit_sim.prob_n(out)))], fmt)
            return 0
        result = (
            qmix.iand(blochs[0], blochs[1])
            if args.gate == "iand"
            else qmix.luk_oplus(blochs[0], blochs[1])
        )
        _emit(
            [
                ("probability", repr(qmix.prob(result))),
                ("bloch", qmix.format_qmix(result.bloch)),
            ],
            fmt,
        )
        return 0
    raise ValueError(f"unknown gate {args.gate!r}")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="iqcl")
    sub = parser.add_subparsers(dest="command", required=True)

    p_fmt = sub.add_parser("fmt", help="parse and reprint a formula")
    p_fmt.add_argument("formula")
    _add_common(p_fmt)
    p_fmt.set_defaults(run=_cmd_fmt)

    p_eval = sub.add_parser("eval", help="evaluate a formula under a model file")
    p_eval.add_argument("formula")
    p_eval.add_argument("--model", required=True)
    _add_common(p_eval)
    p_eval.set_defaults(run=_cmd_eval)

    p_taut = sub.add_parser("taut", help="search for a countermodel")
    p_taut.add_argument("formula")
    _add_common(p_taut)
    p_taut.set_defaults(run=_cmd_taut)

    p_rel = sub.add_parser("relevance", help="relevance degree of a theory over a formula")
    p_rel.add_argument("theory")
    p_rel.add_argument("formula")
    _add_common(p_rel)
    p_rel.set_defaults(run=_cmd_relevance)

    p_tr = sub.add_parser("translate", help="PMV-translate a formula or theory")
    p_tr.add_argument("formula", nargs="?")
    p_tr.add_argument("--theory")
    _add_common(p_tr)
    p_tr.set_defaults(run=_cmd_translate)

    p_tq5 = sub.add_parser("tq5", help="emit a finite bridging theory")
    p_tq5.add_argument("--atoms", required=True)
    p_tq5.add_argument("--s", default="")
    p_tq5.add_argument("--t5", action="append", default=[])
    p_tq5.add_argument("--t5-s", dest="t5_s", default="")
    _add_common(p_tq5)
    p_tq5.set_defaults(run=_cmd_tq5)

    p_proof = sub.add_parser("proof", help="proof utilities")
    proof_sub = p_proof.add_subparsers(dest="proof_command", required=True)
    p_check = proof_sub.add_parser("check")
    p_check.add_argument("theory")
    p_check.add_argument("proof")
    p_check.add_argument("goal")
    _add_common(p_check)
    p_check.set_defaults(run=_cmd_proof)

    p_sim = sub.add_parser("sim", help="dense-matrix gate simulator")
    p_sim.add_argument("gate", help="prop34, not, sqrt_not, and, iand, oplus")
    p_sim.add_argument("operands", nargs="*")
    p_sim.add_argument("--trials", type=int, default=100)
    _add_common(p_sim)
    p_sim.set_defaults(run=_cmd_sim)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return 2 if exc.code not in (0, None) else 0
    try:
        return args.run(args)
    except ParseError as exc:
        print(f"parse error: {exc}", file=sys.stderr)
        return 2
    except calculus.ProofError as exc:
        if exc.step is None:
            print(f"proof format error: {exc}", file=sys.stderr)
            return 2
        print(f"rejected: {exc}", file=sys.stderr)
        return 1
    except (OSError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
