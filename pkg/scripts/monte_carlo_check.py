#!/usr/bin/env python3
"""Monte Carlo estimates next to exact oracle values on small classes."""

import argparse

from hyperenum.oracle import Structure, expectation_exact, prob_avoid_exact
from hyperenum.sampler import estimate_avoid_probability, estimate_expectation

CASES = [
    ("avoid", (1,) * 9, [(0, 1, 2)]),
    ("avoid", (2,) * 6, [(0, 1, 2)]),
    ("avoid", (2,) * 9, [(0, 1, 2), (3, 4, 5)]),
    ("pm", (2,) * 6, None),
    ("hc", (2,) * 6, None),
    ("pm", (2,) * 9, None),
]


def main(argv=None):
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--samples", type=int, default=20_000)
    parser.add_argument("--seed", type=int, default=0)
    parser.add_argument("--workers", type=int, default=1)
    args = parser.parse_args(argv)

    print(f"{'case':28s} {'exact':>10s} {'estimate':>10s} {'stderr':>9s} {'z':>6s} {'accept':>7s}")
    for kind, k, X in CASES:
        if kind == "avoid":
            exact = prob_avoid_exact(k, 3, X)
            rep = estimate_avoid_probability(k, 3, X, args.samples, args.seed, workers=args.workers)
            label = f"P(avoid {len(X)}) n={len(k)} k={k[0]}"
        else:
            exact = expectation_exact(k, 3, Structure(kind))
            rep = estimate_expectation(k, 3, kind, args.samples, args.seed, workers=args.workers)
            label = f"E[{kind}] n={len(k)} k={k[0]}"
        z = (rep.estimate - float(exact)) / rep.stderr if rep.stderr else 0.0
        print(f"{label:28s} {float(exact):10.5f} {rep.estimate:10.5f} {rep.stderr:9.5f} {z:+6.2f} "
              f"{rep.acceptance_rate:7.3f}")


if __name__ == "__main__":
    main()
