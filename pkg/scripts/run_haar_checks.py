#!/usr/bin/env python3
"""Empirical checks of the Haar-matrix predictions: class frequencies against
the exact finite-size formula (plain and zero-sum ensembles) and surjection
moments against their closed forms."""

import argparse
import sys

from graphjac.experiments import ExperimentConfig, run_experiment


def main() -> int:
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--trials", type=int, default=2 * 10**4)
    ap.add_argument("--seed", type=int, default=4)
    ap.add_argument("--threads", type=int, default=1)
    ap.add_argument("--p", type=int, default=3)
    args = ap.parse_args()

    for n, zerosum in ((2, False), (4, False), (3, True), (5, True)):
        cfg = ExperimentConfig(
            kind="haar-mu",
            trials=args.trials,
            seed=args.seed,
            n=n,
            primes=(args.p,),
            max_order=args.p**2,
            zerosum=zerosum,
        )
        rep = run_experiment(cfg, threads=args.threads)
        tag = "Sym^0" if zerosum else "Sym"
        print(f"\n{tag}_{n}(Z_{args.p}), {args.trials} samples "
              f"(precision_exceeded={rep.frequency['precision_exceeded']})")
        print(f"{'class':<10}{'observed':>12}{'predicted':>12}{'z':>8}")
        preds = rep.extras.get("predictions", {})
        for row in rep.rows:
            pred = preds.get(row.class_key)
            if pred is None:
                continue
            z = "" if row.z_score is None else f"{row.z_score:+.2f}"
            print(f"{row.class_key:<10}{row.proportion:>12.6f}{pred:>12.6f}{z:>8}")

    cfg = ExperimentConfig(
        kind="haar-moments",
        trials=args.trials,
        seed=args.seed,
        n=8,
        primes=(args.p,),
        targets=((args.p,), (args.p, args.p), (args.p**2,)),
    )
    rep = run_experiment(cfg, threads=args.threads)
    print(f"\nsurjection moments, Sym_8(Z_{args.p}), {args.trials} samples")
    for key, entry in sorted(rep.extras.items()):
        print(
            f"{key:<18} mean={entry['mean']:.4f}  expected={entry['expected']}"
            f"  z={entry['z_score']:+.2f}"
        )
    return 0


if __name__ == "__main__":
    sys.exit(main())
