#!/usr/bin/env python3
"""Reproduce the cyclic-Jacobian proportion grid: n in {15,30,45,60} x
q in {.3,.5,.7}.  Desk scale by default (10^4 trials per cell); pass
--trials 1000000 for the published scale (hours of CPU)."""

import argparse
import sys
import time

from graphjac.experiments import ExperimentConfig, run_experiment
from graphjac.theory import cyclic_probability_global


def main() -> int:
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--trials", type=int, default=10**4)
    ap.add_argument("--seed", type=int, default=1)
    ap.add_argument("--threads", type=int, default=1)
    ap.add_argument("--n", type=int, nargs="*", default=[15, 30, 45, 60])
    ap.add_argument("--q", type=float, nargs="*", default=[0.3, 0.5, 0.7])
    args = ap.parse_args()

    pred = cyclic_probability_global()
    print(f"predicted limit: {pred.decimal_str(10)}")
    print("n\\q " + "".join(f"{q:>12}" for q in args.q))
    for n in args.n:
        cells = []
        for q in args.q:
            cfg = ExperimentConfig(
                kind="graph-cyclic", trials=args.trials, seed=args.seed, n=n, q=q
            )
            t0 = time.time()
            rep = run_experiment(cfg, threads=args.threads)
            prop = rep.frequency["counts"].get("cyclic", 0) / rep.frequency["total_trials"]
            cells.append(f"{prop:>12.6f}")
            print(f"  [n={n} q={q}: {time.time()-t0:.1f}s]", file=sys.stderr)
        print(f"{n:<4}" + "".join(cells))
    return 0


if __name__ == "__main__":
    sys.exit(main())
