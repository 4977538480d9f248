"""Reduced-model semantics: exact evaluation, tautology search, relevance.

A reduced model assigns each atom a pair (u, w) of rationals — the
probability value of the atom and of its square root — subject to the
disk constraint (1-2u)^2 + (1-2w)^2 <= 1 (the Bloch ball with r1 = 0).
Evaluation of a formula produces the pair (value of f, value of sqrt f)
by structural recursion and is exact whenever the model is rational.

The relevance degree of a theory T over a formula f is the infimum of
f's value over models giving every member of T value 1.  It is computed
by multi-start penalised local search: seeds from a per-atom grid plus
disk-boundary samples, refinement by coordinate descent, feasibility
kept honest by only reporting values measured at points whose constraint
residual is essentially zero.
"""

from __future__ import annotations

import math
import random
from dataclasses import dataclass
from fractions import Fraction

from .algebra import (
    mv_implies,
    mv_join,
    mv_meet,
    mv_odot,
    mv_oplus,
    pmv_product,
)
from .qmix import DiagonalQmix, Qmix, gate_not, gate_sqrt_not, iand
from .qmix import luk_oplus as q_luk_oplus
from .qmix import prob as q_prob
from .qmix import q_implies, q_join, q_meet, q_odot
from .syntax import (
    IMPLIES,
    JOIN,
    MEET,
    ODOT,
    OPLUS,
    PRODUCT,
    Atom,
    Bin,
    Const,
    Formula,
    Neg,
    Sqrt,
    atoms as formula_atoms,
    parse_theory_text,
)

DISK_TOL = Fraction(1, 10**9)

_PAIR_OPS = {
    OPLUS: mv_oplus,
    ODOT: mv_odot,
    IMPLIES: mv_implies,
    PRODUCT: pmv_product,
    MEET: mv_meet,
    JOIN: mv_join,
}

_GATE_OPS = {
    OPLUS: q_luk_oplus,
    ODOT: q_odot,
    IMPLIES: q_implies,
    PRODUCT: iand,
    MEET: q_meet,
    JOIN: q_join,
}


class UnassignedAtomError(KeyError):
    pass


def _in_disk(u: Fraction, w: Fraction, tol: Fraction = DISK_TOL) -> bool:
    return (1 - 2 * u) ** 2 + (1 - 2 * w) ** 2 <= 1 + tol


@dataclass(frozen=True)
class ReducedModel:
    """Map atom -> (u, w); u = value of the atom, w = value of its root."""

    assignment: dict[str, tuple[Fraction, Fraction]]

    def __post_init__(self):
        checked = {}
        for name, (u, w) in self.assignment.items():
            u, w = Fraction(u), Fraction(w)
            if not (0 <= u <= 1 and 0 <= w <= 1):
                raise ValueError(f"atom {name}: pair ({u}, {w}) outside the unit square")
            if not _in_disk(u, w):
                raise ValueError(f"atom {name}: pair ({u}, {w}) violates the disk constraint")
            checked[name] = (u, w)
        object.__setattr__(self, "assignment", checked)

    def pair(self, name: str) -> tuple[Fraction, Fraction]:
        try:
            return self.assignment[name]
        except KeyError:
            raise UnassignedAtomError(name) from None

    def atoms(self) -> set[str]:
        return set(self.assignment)


def reduce_model(bloch_assignment: dict[str, Qmix]) -> ReducedModel:
    """Drop r1, keep the probability pair ((1-r3)/2, (1-r2)/2) per atom."""
    pairs = {}
    for name, rho in bloch_assignment.items():
        if isinstance(rho, DiagonalQmix):
            rho = rho.bloch
        pairs[name] = (Fraction((1.0 - rho.r3) / 2.0), Fraction((1.0 - rho.r2) / 2.0))
    return ReducedModel(pairs)


def eval_prob(model: ReducedModel, f: Formula) -> tuple[Fraction, Fraction]:
    """The pair (value of f, value of sqrt f), by exact recursion."""
    if isinstance(f, Atom):
        return model.pair(f.name)
    if isinstance(f, Const):
        return (f.value.value, Fraction(1, 2))
    if isinstance(f, Neg):
        u, w = eval_prob(model, f.arg)
        return (1 - u, 1 - w)
    if isinstance(f, Sqrt):
        u, w = eval_prob(model, f.arg)
        return (w, 1 - u)
    u1, _ = eval_prob(model, f.left)
    u2, _ = eval_prob(model, f.right)
    return (_PAIR_OPS[f.op](u1, u2), Fraction(1, 2))


def eval_bloch(assignment: dict[str, Qmix], f: Formula) -> float:
    """Fold the gate semantics over the formula and read the probability.

    Independent route used to cross-check the pair recursion: each atom
    is a Bloch-ball state and every connective acts through ``qmix``.
    """

    def fold(g: Formula) -> Qmix:
        if isinstance(g, Atom):
            try:
                return assignment[g.name]
            except KeyError:
                raise UnassignedAtomError(g.name) from None
        if isinstance(g, Const):
            return DiagonalQmix(float(g.value.value))
        if isinstance(g, Neg):
            return gate_not(fold(g.arg))
        if isinstance(g, Sqrt):
            return gate_sqrt_not(fold(g.arg))
        return _GATE_OPS[g.op](fold(g.left), fold(g.right))

    return q_prob(fold(f))


@dataclass(frozen=True)
class Theory:
    """A finite ordered set of formulas; structural duplicates removed."""

    members: tuple[Formula, ...]

    def __init__(self, members=()):
        seen = []
        for m in members:
            if m not in seen:
                seen.append(m)
        object.__setattr__(self, "members", tuple(seen))

    @classmethod
    def from_text(cls, text: str) -> "Theory":
        return cls(parse_theory_text(text))

    def atoms(self) -> set[str]:
        result: set[str] = set()
        for m in self.members:
            result |= formula_atoms(m)
        return result

    def __iter__(self):
        return iter(self.members)

    def __len__(self):
        return len(self.members)

    def __contains__(self, f: Formula) -> bool:
        return f in self.members


def is_model_of(model: ReducedModel, theory: Theory, tol: Fraction = Fraction(0)) -> bool:
    """True iff every member evaluates to at least 1 - tol (exactly 1 when tol=0)."""
    threshold = 1 - Fraction(tol)
    return all(eval_prob(model, beta)[0] >= threshold for beta in theory)


# ---------------------------------------------------------------------------
# Tautology search


@dataclass(frozen=True)
class TautologyReport:
    counterexample: ReducedModel | None
    evaluations: int

    @property
    def is_tautology(self) -> bool:
        return self.counterexample is None

    @property
    def verdict(self) -> str:
        if self.counterexample is None:
            return "tautology-no-counterexample"
        return "counterexample"


def _rational_disk_pool() -> list[tuple[Fraction, Fraction]]:
    pool: list[tuple[Fraction, Fraction]] = []
    specials = [
        (Fraction(1), Fraction(1, 2)),
        (Fraction(0), Fraction(1, 2)),
        (Fraction(1, 2), Fraction(1, 2)),
        (Fraction(1, 2), Fraction(0)),
        (Fraction(1, 2), Fraction(1)),
    ]
    pool.extend(specials)
    step = Fraction(1, 8)
    for i in range(9):
        for j in range(9):
            u, w = i * step, j * step
            if _in_disk(u, w, Fraction(0)) and (u, w) not in pool:
                pool.append((u, w))
    # Rational points on the boundary circle via the tangent half-angle map.
    for t in (Fraction(0), 1, -1, 2, -2, Fraction(1, 2), Fraction(-1, 2),
              3, -3, Fraction(1, 3), Fraction(-1, 3), 4, -4):
        t = Fraction(t)
        c = (1 - t * t) / (1 + t * t)
        s = 2 * t / (1 + t * t)
        for r3, r2 in ((c, s), (s, c)):
            u, w = (1 - r3) / 2, (1 - r2) / 2
            if (u, w) not in pool:
                pool.append((u, w))
    return pool


def check_tautology(f: Formula, budget: int = 100_000, seed: int = 0) -> TautologyReport:
    """Search the per-atom disk for a model giving f a value below 1.

    Exact rational candidate points (grid, boundary, special states) are
    swept first, then random combinations; a returned counterexample is
    exact, a no-counterexample verdict is only as strong as the budget.
    """
    names = sorted(formula_atoms(f))
    pool = _rational_disk_pool()
    evaluations = 0

    def trial(model: ReducedModel) -> ReducedModel | None:
        u, _ = eval_prob(model, f)
        return model if u < 1 else None

    if not names:
        model = ReducedModel({})
        hit = trial(model)
        return TautologyReport(hit, 1)

    def candidates():
        if len(names) == 1 or len(pool) ** len(names) <= budget:
            indices = [0] * len(names)
            while True:
                yield {name: pool[indices[k]] for k, name in enumerate(names)}
                for k in range(len(names)):
                    indices[k] += 1
                    if indices[k] < len(pool):
                        break
                    indices[k] = 0
                else:
                    return
        else:
            for point in pool:
                yield {name: point for name in names}
            rng = random.Random(seed)
            while True:
                yield {name: pool[rng.randrange(len(pool))] for name in names}

    for assignment in candidates():
        if evaluations >= budget:
            break
        evaluations += 1
        hit = trial(ReducedModel(assignment))
        if hit is not None:
            return TautologyReport(hit, evaluations)
    return TautologyReport(None, evaluations)


def consequence(alpha: Formula, beta: Formula, budget: int = 100_000, seed: int = 0) -> TautologyReport:
    """Semantic consequence check: alpha entails beta iff alpha -> beta is a tautology."""
    return check_tautology(Bin(IMPLIES, alpha, beta), budget=budget, seed=seed)


# ---------------------------------------------------------------------------
# Relevance degree


@dataclass
class RelevanceOptions:
    grid: Fraction = Fraction(1, 32)
    tol: float = 1e-6
    budget: int = 100_000
    seed: int = 0


@dataclass
class RelevanceResult:
    value: Fraction | float
    status: str  # "feasible" | "infeasible" | "tolerance-limited"
    witness: ReducedModel | None
    evaluations: int

    def bracket(self, tol: float = 1e-6) -> tuple[float, float]:
        v = float(self.value)
        return (v, v + tol)


class _BudgetExhausted(Exception):
    pass


# Residual below this is treated as exact feasibility; values are only
# reported from such points, limiting constraint-slack undershoot to
# sqrt(1e-13) ~ 3e-7 even where the disk couples the coordinates.
_STRICT_RESIDUAL = 1e-13


def _compile(f: Formula, pos: dict[str, int]):
    """Closure computing the (u, w) pair of f over a flat float vector."""
    if isinstance(f, Atom):
        i = pos[f.name]
        return lambda x: (x[i], x[i + 1])
    if isinstance(f, Const):
        v = float(f.value.value)
        return lambda x: (v, 0.5)
    if isinstance(f, Neg):
        sub = _compile(f.arg, pos)

        def neg(x):
            u, w = sub(x)
            return (1.0 - u, 1.0 - w)

        return neg
    if isinstance(f, Sqrt):
        sub = _compile(f.arg, pos)

        def root(x):
            u, w = sub(x)
            return (w, 1.0 - u)

        return root
    left = _compile(f.left, pos)
    right = _compile(f.right, pos)
    op = f.op
    if op == OPLUS:
        return lambda x: (min(1.0, left(x)[0] + right(x)[0]), 0.5)
    if op == ODOT:
        return lambda x: (max(0.0, left(x)[0] + right(x)[0] - 1.0), 0.5)
    if op == IMPLIES:
        return lambda x: (min(1.0, 1.0 - left(x)[0] + right(x)[0]), 0.5)
    if op == PRODUCT:
        return lambda x: (left(x)[0] * right(x)[0], 0.5)
    if op == MEET:
        return lambda x: (min(left(x)[0], right(x)[0]), 0.5)
    return lambda x: (max(left(x)[0], right(x)[0]), 0.5)


def _float_pool(grid: Fraction) -> list[tuple[float, float]]:
    pool = [(1.0, 0.5), (0.0, 0.5), (0.5, 0.5), (0.5, 0.0), (0.5, 1.0)]
    steps = max(2, round(1 / float(grid)))
    g = 1.0 / steps
    for i in range(steps + 1):
        for j in range(steps + 1):
            u, w = i * g, j * g
            if (1 - 2 * u) ** 2 + (1 - 2 * w) ** 2 <= 1.0 + 1e-12:
                pool.append((u, w))
    for k in range(64):
        theta = 2.0 * math.pi * k / 64.0
        pool.append(((1.0 - math.cos(theta)) / 2.0, (1.0 - math.sin(theta)) / 2.0))
    seen = set()
    unique = []
    for p in pool:
        if p not in seen:
            seen.add(p)
            unique.append(p)
    return unique


def _disk_interval(partner: float) -> tuple[float, float]:
    rad_sq = 1.0 - (1.0 - 2.0 * partner) ** 2
    c = math.sqrt(max(0.0, rad_sq))
    return ((1.0 - c) / 2.0, (1.0 + c) / 2.0)


def relevance_degree(
    theory: Theory, alpha: Formula, options: RelevanceOptions | None = None
) -> RelevanceResult:
    """Minimise the value of alpha over models of the theory.

    Seeds from a per-atom grid (pitch ``options.grid``) plus boundary
    samples, coordinate-descent refinement to ``options.tol``, penalty on
    the constraint residual 1 - min over members.  Infeasibility (no seed
    reaches residual below tol) reports the ``infeasible`` status and the
    exact value 1; an exhausted budget reports ``tolerance-limited`` with
    the best bound found.
    """
    opts = options or RelevanceOptions()
    names = sorted(formula_atoms(alpha) | theory.atoms())

    if not names:
        empty = ReducedModel({})
        feasible = all(eval_prob(empty, beta)[0] == 1 for beta in theory)
        if feasible:
            return RelevanceResult(eval_prob(empty, alpha)[0], "feasible", empty, len(theory) + 1)
        return RelevanceResult(Fraction(1), "infeasible", None, len(theory) + 1)

    pos = {name: 2 * k for k, name in enumerate(names)}
    objective_fn = _compile(alpha, pos)
    constraint_fns = [_compile(beta, pos) for beta in theory]

    state = {"evals": 0}
    best_strict: list = [None]  # (objective, x)
    best_loose: list = [None]  # (residual, objective, x)

    def evaluate(x: list[float]) -> tuple[float, float]:
        if state["evals"] >= opts.budget:
            raise _BudgetExhausted
        state["evals"] += 1
        residual = 0.0
        for fn in constraint_fns:
            residual = max(residual, 1.0 - fn(x)[0])
        obj = objective_fn(x)[0]
        if residual <= _STRICT_RESIDUAL:
            if best_strict[0] is None or obj < best_strict[0][0]:
                best_strict[0] = (obj, list(x))
        if residual < opts.tol:
            if best_loose[0] is None or (residual, obj) < best_loose[0][:2]:
                best_loose[0] = (residual, obj, list(x))
        return residual, obj

    def line_search(x: list[float], ci: int, phase_a: bool, guard: float):
        partner = x[ci + 1] if ci % 2 == 0 else x[ci - 1]
        lo, hi = _disk_interval(partner)
        width = hi - lo

        def score(v: float):
            x[ci] = v
            residual, obj = evaluate(x)
            if phase_a:
                # Centring tie-break: where the residual is flat, move
                # toward 1/2 so the disk leaves the partner full room.
                return (residual, obj, abs(v - 0.5))
            if residual <= guard:
                return (0.0, obj, abs(v - 0.5))
            return (1.0, residual, 0.0)

        best_v = min(max(x[ci], lo), hi)
        best_s = score(best_v)
        while width > opts.tol / 4.0:
            step = width / 8.0
            candidates = [lo + k * step for k in range(9)]
            candidates.append(min(max(round(best_v * 64.0) / 64.0, lo), hi))
            for v in candidates:
                s = score(v)
                if s < best_s:
                    best_s, best_v = s, v
            lo = max(lo, best_v - step)
            hi = min(hi, best_v + step)
            width = hi - lo
        x[ci] = best_v
        score(best_v)

    def residual_of(x) -> float:
        residual = 0.0
        for fn in constraint_fns:
            residual = max(residual, 1.0 - fn(x)[0])
        return residual

    def descend(x: list[float]):
        # Phase A: drive the constraint residual to (float) zero.
        for _ in range(12):
            if not constraint_fns or residual_of(x) <= 1e-15:
                break
            before = residual_of(x)
            for ci in range(len(x)):
                line_search(x, ci, phase_a=True, guard=0.0)
            if before - residual_of(x) <= 1e-16:
                break
        guard = max(_STRICT_RESIDUAL, residual_of(x))
        if guard >= opts.tol:
            return
        # Phase B: improve the objective without leaving feasibility.
        for _ in range(12):
            before = objective_fn(x)[0]
            for ci in range(len(x)):
                line_search(x, ci, phase_a=False, guard=guard)
            if before - objective_fn(x)[0] <= opts.tol / 10.0:
                break

    pool = _float_pool(opts.grid)
    seeds: list[list[float]] = []
    for point in pool:
        seeds.append([c for _ in names for c in point])
    if len(names) > 1:
        rng = random.Random(opts.seed)
        for _ in range(128):
            seed_x: list[float] = []
            for _ in names:
                seed_x.extend(pool[rng.randrange(len(pool))])
            seeds.append(seed_x)

    exhausted = False
    try:
        scored = []
        for idx, x in enumerate(seeds):
            residual, obj = evaluate(x)
            scored.append((residual, obj, idx))
        by_residual = sorted(scored)[:12]
        by_objective = sorted(
            ((obj, residual, idx) for residual, obj, idx in scored if residual <= 0.5)
        )[:12]
        start_ids: list[int] = []
        for _, _, idx in by_residual:
            if idx not in start_ids:
                start_ids.append(idx)
        for _, _, idx in by_objective:
            if idx not in start_ids:
                start_ids.append(idx)
        for idx in start_ids:
            descend(list(seeds[idx]))
    except _BudgetExhausted:
        exhausted = True

    def to_model(x: list[float]) -> ReducedModel:
        return ReducedModel(
            {name: (Fraction(x[pos[name]]), Fraction(x[pos[name] + 1])) for name in names}
        )

    if best_strict[0] is not None:
        obj, x = best_strict[0]
        status = "tolerance-limited" if exhausted else "feasible"
        return RelevanceResult(obj, status, to_model(x), state["evals"])
    if best_loose[0] is not None:
        _, obj, x = best_loose[0]
        status = "tolerance-limited" if exhausted else "feasible"
        return RelevanceResult(obj, status, to_model(x), state["evals"])
    if exhausted:
        return RelevanceResult(Fraction(1), "tolerance-limited", None, state["evals"])
    return RelevanceResult(Fraction(1), "infeasible", None, state["evals"])


# ---------------------------------------------------------------------------
# Model sampling and file formats


def random_rational_model(
    names, rng: random.Random, denominator: int = 64
) -> ReducedModel:
    """A uniform-ish exact rational model: each atom gets a disk point."""
    pairs = {}
    for name in names:
        while True:
            u = Fraction(rng.randint(0, denominator), denominator)
            w = Fraction(rng.randint(0, denominator), denominator)
            if _in_disk(u, w, Fraction(0)):
                pairs[name] = (u, w)
                break
    return ReducedModel(pairs)


def sample_models(
    theory: Theory,
    count: int,
    seed: int = 0,
    extra_atoms=(),
    max_attempts_per_model: int = 60,
) -> list[ReducedModel]:
    """Exact models of the theory, found by seeded search plus snapping.

    Every returned model satisfies the theory exactly (value 1 under
    rational arithmetic); the sampler raises if the theory resists the
    search, so callers should supply desk-scale theories.
    """
    names = sorted(theory.atoms() | set(extra_atoms))
    rng = random.Random(seed)
    models: list[ReducedModel] = []
    if not names:
        empty = ReducedModel({})
        if not is_model_of(empty, theory):
            raise ValueError("theory has no (atom-free) model")
        return [empty] * count

    pos = {name: 2 * k for k, name in enumerate(names)}
    constraint_fns = [_compile(beta, pos) for beta in theory]
    constrained = theory.atoms()
    moveable = [
        ci for name in names if name in constrained
        for ci in (pos[name], pos[name] + 1)
    ]

    def residual_of(x) -> float:
        r = 0.0
        for fn in constraint_fns:
            r = max(r, 1.0 - fn(x)[0])
        return r

    def random_start() -> list[float]:
        # Dyadic points are exact as floats, so free atoms need no repair.
        x = []
        for _ in names:
            while True:
                u = Fraction(rng.randint(0, 1024), 1024)
                w = Fraction(rng.randint(0, 1024), 1024)
                if _in_disk(u, w, Fraction(0)):
                    x.extend([float(u), float(w)])
                    break
        return x

    def snap(value: float) -> list[Fraction]:
        candidates = [Fraction(round(value * (1 << 12)), 1 << 12),
                      Fraction(round(value * (1 << 20)), 1 << 20),
                      Fraction(value)]
        for special in (Fraction(0), Fraction(1), Fraction(1, 2)):
            if abs(value - float(special)) < 1e-9:
                candidates.insert(0, special)
        return candidates

    # Canonical settings of the constrained atoms; most desk theories are
    # satisfied outright by one of them, sparing the descent the zigzag
    # that coupled max-residuals cause coordinate methods.
    overrides: list[tuple[float, float] | None] = [None, (1.0, 0.5), (0.5, 0.5), (0.0, 0.5)]

    while len(models) < count:
        found = None
        for attempt in range(max_attempts_per_model):
            x = random_start()
            override = overrides[attempt % len(overrides)]
            if override is not None:
                for name in names:
                    if name in constrained:
                        x[pos[name]], x[pos[name] + 1] = override
            for _ in range(12):
                if residual_of(x) <= 1e-15:
                    break
                for ci in moveable:
                    partner = x[ci + 1] if ci % 2 == 0 else x[ci - 1]
                    lo, hi = _disk_interval(partner)
                    best_v = x[ci]
                    best_s = (residual_of(x), abs(best_v - 0.5))
                    width = hi - lo
                    while width > 1e-12:
                        step = width / 8.0
                        for k in range(9):
                            v = lo + k * step
                            x[ci] = v
                            s = (residual_of(x), abs(v - 0.5))
                            if s < best_s:
                                best_s, best_v = s, v
                        lo = max(lo, best_v - step)
                        hi = min(hi, best_v + step)
                        width = hi - lo
                    x[ci] = best_v
            if residual_of(x) > 1e-12:
                continue
            pairs = {}
            ok = True
            for name in names:
                u_opts = snap(x[pos[name]])
                w_opts = snap(x[pos[name] + 1])
                chosen = None
                for u in u_opts:
                    for w in w_opts:
                        if 0 <= u <= 1 and 0 <= w <= 1 and _in_disk(u, w, Fraction(0)):
                            trial_pairs = dict(pairs)
                            trial_pairs[name] = (u, w)
                            rest = {
                                n: (Fraction(x[pos[n]]), Fraction(x[pos[n] + 1]))
                                for n in names
                                if n not in trial_pairs
                            }
                            probe = {**trial_pairs, **rest}
                            try:
                                model = ReducedModel(probe)
                            except ValueError:
                                continue
                            if is_model_of(model, theory):
                                chosen = (u, w)
                                break
                    if chosen:
                        break
                if chosen is None:
                    ok = False
                    break
                pairs[name] = chosen
            if ok:
                found = ReducedModel(pairs)
                break
        if found is None:
            raise RuntimeError(
                f"could not sample an exact model of the theory after "
                f"{max_attempts_per_model} attempts"
            )
        models.append(found)
    return models


def parse_model_text(text: str) -> ReducedModel:
    """Model file: lines ``atom u w`` with fractions or decimals."""
    pairs = {}
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        parts = line.split()
        if len(parts) != 3:
            raise ValueError(f"model line {lineno}: expected 'atom u w'")
        name, u_text, w_text = parts
        pairs[name] = (Fraction(u_text), Fraction(w_text))
    return ReducedModel(pairs)


def format_model(model: ReducedModel) -> str:
    lines = []
    for name in sorted(model.assignment):
        u, w = model.assignment[name]
        lines.append(f"{name} {u} {w}")
    return "\n".join(lines) + ("\n" if lines else "")
