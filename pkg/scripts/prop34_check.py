#!/usr/bin/env python3
"""Sweep the reduced-AND oracle: the algebraic irreversible conjunction
against the partial trace of the Toffoli-based reversible one.

Prints the worst coordinate deviation over random state pairs and a small
table of probability values along the diagonal mixtures.
"""

import argparse
import random

from iqcl import nqubit_sim, qmix


def random_ball_point(rng):
    while True:
        r = [rng.uniform(-1, 1) for _ in range(3)]
        if sum(c * c for c in r) <= 1.0:
            return qmix.BlochQmix(*r)


def main():
    parser = argparse.ArgumentParser()
    parser.add_argument("--trials", type=int, default=500)
    parser.add_argument("--seed", type=int, default=0)
    args = parser.parse_args()

    rng = random.Random(args.seed)
    worst = 0.0
    for _ in range(args.trials):
        tau, nu = random_ball_point(rng), random_ball_point(rng)
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
    print(f"trials={args.trials} worst_coordinate_deviation={worst:.3e}")

    print("\nlam1  lam2  p(reduced AND)  lam1*lam2")
    for i in range(0, 11, 2):
        for j in range(0, 11, 2):
            l1, l2 = i / 10, j / 10
            product = nqubit_sim.and_gate(
                nqubit_sim.diagonal_density(l1), nqubit_sim.diagonal_density(l2)
            )
            p = nqubit_sim.prob_n(nqubit_sim.partial_trace(product, 1))
            print(f"{l1:4.1f}  {l2:4.1f}  {p:14.10f}  {l1 * l2:9.2f}")


if __name__ == "__main__":
    main()
