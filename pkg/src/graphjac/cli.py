"""Command line interface.

Subcommands: simulate-graphs, simulate-haar, predict, classify.
Exit codes: 0 success, 2 configuration error, 3 statistical flags escalated
to errors via --fail-on-flags.
"""

from __future__ import annotations

import argparse
import json
import sys
from fractions import Fraction

from . import __version__
from .classify import classify_pairing, count_aut_pairing
from .experiments import (
    ConfigError,
    ExperimentConfig,
    config_from_mapping,
    emit_report,
    read_config_mapping,
    run_experiment,
)
from .graphs import graph_from_edge_list
from .pairings import FiniteAbelianGroup, PairingGram, jacobian_with_pairing
from . import theory

EXIT_OK = 0
EXIT_CONFIG = 2
EXIT_FLAGGED = 3


def _add_common(sub):
    sub.add_argument("--config", help="JSON or TOML experiment file (flags override it)")
    sub.add_argument("--seed", type=int, help="base seed (u64)")
    sub.add_argument("--trials", type=int, help="number of Monte Carlo trials")
    sub.add_argument("--threads", type=int, default=1, help="worker processes")
    sub.add_argument("--out", help="report path (stdout when omitted)")
    sub.add_argument("--format", choices=("csv", "json"))
    sub.add_argument(
        "--fail-on-flags",
        action="store_true",
        help="exit 3 when any comparison exceeds 3 sigma",
    )


def _build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="graphjac", description=__doc__)
    ap.add_argument("--version", action="version", version=f"graphjac {__version__}")
    subs = ap.add_subparsers(dest="command", required=True)

    g = subs.add_parser("simulate-graphs", help="random-graph Jacobian experiments")
    g.add_argument("--kind", choices=("cyclic", "pairing-freq", "two-primes"))
    g.add_argument("--n", type=int, help="vertex count")
    g.add_argument("--q", type=float, help="edge probability in (0,1)")
    g.add_argument("--p", dest="primes", type=int, action="append", help="prime (repeatable)")
    g.add_argument("--max-order", type=int, help="largest tracked group order")
    g.add_argument("--catalog-bound", type=int, help="p=2 classification catalog bound")
    _add_common(g)

    h = subs.add_parser("simulate-haar", help="Haar symmetric p-adic matrix experiments")
    h.add_argument("--kind", choices=("mu", "moments"))
    h.add_argument("--n", type=int, help="matrix size")
    h.add_argument("--p", dest="primes", type=int, action="append", help="prime")
    h.add_argument("--precision", type=int, help="digits N for the truncated sample")
    h.add_argument("--guard", type=int, help="precision guard digits")
    h.add_argument("--zerosum", action="store_true", help="zero row/column-sum ensemble")
    h.add_argument("--max-order", type=int, help="largest tracked group order")
    h.add_argument("--catalog-bound", type=int)
    h.add_argument(
        "--target",
        action="append",
        dest="targets",
        help="moment target as comma-separated invariant factors, e.g. 3,3",
    )
    _add_common(h)

    pr = subs.add_parser("predict", help="closed-form predictions")
    pr.add_argument(
        "what",
        choices=(
            "cp",
            "trivial-p",
            "cyclic-p",
            "cyclic-global",
            "odd-cyclic",
            "mu",
            "mu-n",
            "sur-moment",
            "rank-moment",
            "gaussian-binomial",
        ),
    )
    pr.add_argument("--p", type=int, help="prime")
    pr.add_argument("--terms", type=int, default=theory.DEFAULT_TERMS)
    pr.add_argument("--prime-bound", type=int, help="literal prime product (cyclic-global)")
    pr.add_argument("--n", type=int, help="matrix size (mu-n)")
    pr.add_argument("--zerosum", action="store_true", help="zero-sum ensemble (mu-n)")
    pr.add_argument("--class", dest="class_name", help='pairing class name, e.g. "E4", "A2+A4"')
    pr.add_argument("--gram", help="JSON file with {group, gram} (alternative to --class)")
    pr.add_argument("--target", help="target factors for sur-moment, e.g. 3,3")
    pr.add_argument("--k", type=int, help="moment order / dimension")
    pr.add_argument("--j", type=int, help="subspace dimension (gaussian-binomial)")

    cl = subs.add_parser("classify", help="classify a pairing from a file")
    cl.add_argument("--edges", help="JSON file {n, edges: [[u,v],...]}")
    cl.add_argument("--gram", help='JSON file {group: [d,...], gram: [["a/b",...],...]}')
    cl.add_argument("--catalog-bound", type=int, default=64)
    return ap


def _config_from_args(args, kind_map) -> ExperimentConfig:
    data: dict = {}
    if args.config:
        data.update(read_config_mapping(args.config))
    overrides = {
        "kind": kind_map.get(getattr(args, "kind", None)),
        "n": getattr(args, "n", None),
        "q": getattr(args, "q", None),
        "trials": args.trials,
        "seed": args.seed,
        "max_order": getattr(args, "max_order", None),
        "catalog_bound": getattr(args, "catalog_bound", None),
        "precision": getattr(args, "precision", None),
        "guard": getattr(args, "guard", None),
        "out": args.out,
        "format": args.format,
    }
    primes = getattr(args, "primes", None)
    if primes:
        overrides["primes"] = tuple(primes)
    targets = getattr(args, "targets", None)
    if targets:
        overrides["targets"] = tuple(tuple(int(x) for x in t.split(",")) for t in targets)
    if getattr(args, "zerosum", False):
        overrides["zerosum"] = True
    for k, v in overrides.items():
        if v is not None:
            data[k] = v
    return config_from_mapping(data)


def _load_gram(path: str) -> PairingGram:
    with open(path, "r", encoding="utf-8") as fh:
        data = json.load(fh)
    group = FiniteAbelianGroup(tuple(int(d) for d in data["group"]))
    gram = tuple(tuple(Fraction(str(e)) for e in row) for row in data["gram"])
    return PairingGram(group=group, gram=gram)


def _print_prediction(label: str, pred: theory.Prediction) -> None:
    print(f"{label} = {pred.decimal_str()}  (tail bound {float(pred.truncation_bound):.3e}, {pred.terms_used} terms)")


def _cmd_predict(args) -> int:
    what = args.what
    if what in ("cp", "trivial-p"):
        _print_prediction(f"trivial-{args.p}-part probability C_p", theory.c_p(args.p, args.terms))
    elif what == "cyclic-p":
        _print_prediction(f"cyclic-{args.p}-part probability", theory.cyclic_p_probability(args.p, args.terms))
    elif what == "cyclic-global":
        _print_prediction(
            "cyclic probability", theory.cyclic_probability_global(args.terms, args.prime_bound)
        )
    elif what == "odd-cyclic":
        _print_prediction("odd-part cyclic probability", theory.odd_cyclic_probability(args.terms))
    elif what in ("mu", "mu-n"):
        if args.gram:
            pairing = _load_gram(args.gram)
        elif args.class_name:
            from .classify import parse_class_name

            pairing = parse_class_name(args.class_name)
        else:
            raise ConfigError("mu predictions need --class or --gram")
        if what == "mu":
            _print_prediction("mu", theory.mu_measure(pairing, p=args.p, terms=args.terms))
        else:
            if args.n is None:
                raise ConfigError("mu-n needs --n")
            fn = theory.mu_n_zerosum if args.zerosum else theory.mu_n_finite
            _print_prediction(f"mu_{args.n}", fn(pairing, args.n, p=args.p))
    elif what == "sur-moment":
        if not args.target or args.p is None:
            raise ConfigError("sur-moment needs --p and --target")
        target = theory.PartitionType.from_factors(
            tuple(int(x) for x in args.target.split(",")), args.p
        )
        print(f"expected surjections = {theory.expected_surjections(target, args.p)}")
    elif what == "rank-moment":
        if args.k is None or args.p is None:
            raise ConfigError("rank-moment needs --p and --k")
        print(f"rank moment = {theory.rank_moment(args.k, args.p)}")
    elif what == "gaussian-binomial":
        if args.k is None or args.j is None or args.p is None:
            raise ConfigError("gaussian-binomial needs --k, --j, --p")
        print(f"[{args.k} choose {args.j}]_{args.p} = {theory.gaussian_binomial(args.k, args.j, args.p)}")
    return EXIT_OK


def _cmd_classify(args) -> int:
    if bool(args.edges) == bool(args.gram):
        raise ConfigError("classify needs exactly one of --edges / --gram")
    if args.edges:
        with open(args.edges, "r", encoding="utf-8") as fh:
            data = json.load(fh)
        g = graph_from_edge_list(int(data["n"]), data["edges"])
        pairing = jacobian_with_pairing(g)
    else:
        pairing = _load_gram(args.gram)
    cls = classify_pairing(pairing, args.catalog_bound)
    aut = count_aut_pairing(pairing, bound=max(pairing.order, 2))
    print(f"group: {list(pairing.group.invariant_factors)}")
    print(f"class: {cls.name}")
    print(f"aut: {aut}")
    print(f"expected_ratio: {pairing.order * aut}")
    return EXIT_OK


def _cmd_simulate(args, kind_map) -> int:
    cfg = _config_from_args(args, kind_map)
    report = run_experiment(cfg, threads=args.threads)
    text = emit_report(report, cfg.format, cfg.out)
    if cfg.out is None:
        sys.stdout.write(text)
    flags = report.flagged()
    if flags:
        print(f"flagged (>3 sigma): {', '.join(flags)}", file=sys.stderr)
        if args.fail_on_flags:
            return EXIT_FLAGGED
    return EXIT_OK


def main(argv=None) -> int:
    args = _build_parser().parse_args(argv)
    try:
        if args.command == "simulate-graphs":
            return _cmd_simulate(
                args,
                {"cyclic": "graph-cyclic", "pairing-freq": "graph-pairing-freq", "two-primes": "graph-two-primes"},
            )
        if args.command == "simulate-haar":
            return _cmd_simulate(args, {"mu": "haar-mu", "moments": "haar-moments"})
        if args.command == "predict":
            return _cmd_predict(args)
        if args.command == "classify":
            return _cmd_classify(args)
        raise ConfigError(f"unknown command {args.command!r}")
    except (ConfigError, FileNotFoundError, KeyError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONFIG


if __name__ == "__main__":
    sys.exit(main())
