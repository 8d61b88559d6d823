"""Command-line entry point.

Usage:
    dynembed <mode> [--graph F] [--n N] [--w W] [--q Q] [--seed S] [--p P]
             [--out DIR] [--normalize-4] [--pairs-sample K] ...

Modes: static-eval, dynamic-eval, lower-bound-demo, audit.
"""

from __future__ import annotations

import argparse
import math
import sys

from .harness import ExperimentConfig, run
from .kernels import BACKEND


def _parse_p(text: str) -> float:
    if text.lower() in ("inf", "infinity"):
        return math.inf
    return float(text)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="dynembed",
        description="Decremental multi-scale lp-embedding experiments",
    )
    parser.add_argument(
        "mode",
        choices=["static-eval", "dynamic-eval", "lower-bound-demo", "audit"],
    )
    parser.add_argument("--graph", help="edge-list file (u v w per line, # comments)")
    parser.add_argument("--updates", help="update-stream file (t u v w_new per line)")
    parser.add_argument("--one-indexed", action="store_true",
                        help="treat edge-list vertex ids as 1-based")
    parser.add_argument("--n", type=int, default=150, help="synthetic vertex count")
    parser.add_argument("--w", type=int, default=100, help="maximum admissible weight W")
    parser.add_argument("--q", type=int, default=0, help="number of weight increases")
    parser.add_argument("--seed", type=int, default=0)
    parser.add_argument("--p", type=_parse_p, default=2.0, help="lp parameter (>= 1, or inf)")
    parser.add_argument("--out", default=".", help="output directory")
    parser.add_argument("--normalize-4", action="store_true",
                        help="report embedded distances multiplied by 4")
    parser.add_argument("--pairs-sample", type=int,
                        help="evaluate averages over K sampled pairs instead of all")
    parser.add_argument("--c0", type=float, default=2.0,
                        help="separation-rate constant in beta = c0 ln(n)/R")
    parser.add_argument("--extra-edges", type=int,
                        help="synthetic extra edges beyond the spanning tree (default 2n)")
    parser.add_argument("--init-w-upper", type=int,
                        help="synthetic initial weights are uniform on [1, this]")
    parser.add_argument("--increment-k", type=int,
                        help="update increments are uniform on [1, 1+floor(K t/Q)]")
    parser.add_argument("--clique-size", type=int, default=50,
                        help="lower-bound demo: vertices per clique")
    parser.add_argument("--toggles", type=int, default=4,
                        help="lower-bound demo: bridge toggle cycles")
    parser.add_argument("--target", type=float,
                        help="lower-bound demo: distortion target (default W/8)")
    parser.add_argument("--backend", action="store_true",
                        help="print the active kernel backend and exit")
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    if args.backend:
        print(f"kernel backend: {BACKEND}")
        return 0
    cfg = ExperimentConfig(
        mode=args.mode,
        n=args.n,
        w_max=args.w,
        seed=args.seed,
        q=args.q,
        p=args.p,
        graph_path=args.graph,
        updates_path=args.updates,
        one_indexed=args.one_indexed,
        out_dir=args.out,
        normalize4=args.normalize_4,
        pairs_sample=args.pairs_sample,
        c0=args.c0,
        extra_edges=args.extra_edges,
        init_w_upper=args.init_w_upper,
        increment_k=args.increment_k,
        clique_size=args.clique_size,
        toggles=args.toggles,
        distortion_target=args.target,
    )
    try:
        return run(cfg)
    except (ValueError, OSError) as exc:
        print(f"dynembed: error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
