"""Command line: ``kaczrank {rank,baseline,theory,experiment}``.

Examples::

    kaczrank rank comparisons.txt --iters 20000 --seed 3
    kaczrank baseline comparisons.txt --one-per-line
    kaczrank theory --n 4 --p 0.25 --k 100
    kaczrank experiment alpha-sweep --n 20 --p 0.05,0.1 --trials 20 --out results/
    kaczrank experiment --spec fig6.spec --workers 4 --out results/
"""

from __future__ import annotations

import argparse
import math
import sys
from pathlib import Path

from . import theory
from .baselines import accumulate, rank_centrality
from .core import DEFAULT_EPSILON
from .experiments import KINDS, ExperimentSpec, parse_spec_text, run_experiment, write_experiment
from .io import format_ranking, read_comparisons
from .sampling import MODES, WITH_REPLACEMENT, SamplerSpec, random_stream
from .solvers import CAUTIOUS, KACZ, VARIANTS, SolverConfig, run


def _alpha_arg(text: str) -> int | None:
    if text in ("inf", "none"):
        return None
    value = int(text)
    if value < 1:
        raise argparse.ArgumentTypeError("alpha must be a positive integer or 'inf'")
    return value


def _add_output_flag(p: argparse.ArgumentParser) -> None:
    p.add_argument("--one-per-line", action="store_true", help="print one item per line instead of space-separated")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="kaczrank", description="Rankings from pairwise comparisons by Kaczmarz projections.")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("rank", help="rank the items of a comparison file")
    p.add_argument("file", type=Path)
    p.add_argument("--epsilon", type=float, default=DEFAULT_EPSILON)
    p.add_argument("--iters", type=int, default=10_000)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--variant", choices=VARIANTS, default=KACZ)
    p.add_argument("--alpha", type=_alpha_arg, default=None, help="cautiousness; implies --variant cautious")
    p.add_argument("--omega", type=float, default=1.0)
    p.add_argument("--p", type=float, default=0.0, help="flip probability applied to drawn comparisons")
    p.add_argument("--mode", choices=MODES, default=WITH_REPLACEMENT)
    p.add_argument("--init", choices=("zero", "uniform"), default="zero")
    _add_output_flag(p)

    p = sub.add_parser("baseline", help="rank a comparison file with Rank Centrality")
    p.add_argument("file", type=Path)
    p.add_argument("--regularization", type=float, default=0.01)
    p.add_argument("--tol", type=float, default=1e-12)
    _add_output_flag(p)

    p = sub.add_parser("theory", help="print closed-form rates, bounds and counts")
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--p", type=float, default=None)
    p.add_argument("--k", type=int, default=None)

    p = sub.add_parser("experiment", help="run a seeded experiment grid and write result tables")
    p.add_argument("kind", nargs="?", choices=KINDS)
    p.add_argument("--spec", type=Path, help="file of key=value lines mirroring these flags")
    p.add_argument("--out", type=Path, default=Path("results"))
    p.add_argument("--workers", type=int, default=1)
    p.add_argument("--n", type=int)
    p.add_argument("--n-grid")
    p.add_argument("--trials", type=int)
    p.add_argument("--iters")
    p.add_argument("--epsilon")
    p.add_argument("--k-list")
    p.add_argument("--variant", choices=VARIANTS)
    p.add_argument("--alpha")
    p.add_argument("--alpha-grid")
    p.add_argument("--q", help="comma-separated grid of sampled fractions")
    p.add_argument("--p", help="comma-separated grid of flip probabilities")
    p.add_argument("--seed", help="base seed; trial i uses seed + i")
    p.add_argument("--mode", choices=MODES)
    p.add_argument("--omega")
    p.add_argument("--init", choices=("zero", "uniform"))
    p.add_argument("--record-every")
    p.add_argument("--regularization")
    return parser


def _cmd_rank(args) -> int:
    n, comps = read_comparisons(args.file)
    variant = CAUTIOUS if args.alpha is not None else args.variant
    config = SolverConfig(
        epsilon=args.epsilon,
        max_iterations=args.iters,
        alpha=args.alpha,
        omega=args.omega,
        init=args.init,
    )
    state, _ = run(n, comps, SamplerSpec(args.mode, 1.0, args.p), random_stream(args.seed), config, variant=variant)
    print(format_ranking(state.ranking, args.one_per_line))
    return 0


def _cmd_baseline(args) -> int:
    n, comps = read_comparisons(args.file)
    if not comps:
        raise ValueError("no comparisons in file")
    _, ranking = rank_centrality(accumulate(comps, n), args.regularization, args.tol)
    print(format_ranking(ranking, args.one_per_line))
    return 0


def _bound_text(b: theory.Bound) -> str:
    if math.isfinite(b.value):
        return f"{b.value:.6g} (log {b.log:.6g})"
    return f"exp({b.log:.6g})"


def theory_lines(n: int, p: float | None = None, k: int | None = None) -> list[tuple[str, str]]:
    lines = [
        ("n", str(n)),
        ("pairs", str(theory.n_pairs(n))),
        ("contraction rate", f"{theory.contraction_rate(n):.6g}"),
        ("hoffman bound", f"{theory.hoffman_bound(n):.6g}"),
    ]
    if n <= 200:
        lines.append(("connectivity", f"{theory.complete_graph_connectivity(n):.6g}"))
    lines.append(("expected hit bound", _bound_text(theory.expected_hit_bound(n))))
    if p is not None:
        lines.append((f"expected hit bound (p={p:g})", _bound_text(theory.expected_hit_bound_noisy(n, p))))
    if k is not None:
        lines.append((f"tail bound P(tau >= {k})", f"{theory.tail_bound(n, k, p or 0.0):.6g}"))
    lines.append(("coupon with replacement", f"{theory.coupon_with_replacement(n):.6g}"))
    lines.append(("coupon without replacement", f"{theory.coupon_without_replacement(n):.6g}"))
    return lines


def _cmd_theory(args) -> int:
    lines = theory_lines(args.n, args.p, args.k)
    width = max(len(label) for label, _ in lines)
    for label, value in lines:
        print(f"{label:<{width}}  {value}")
    return 0


_EXPERIMENT_FLAGS = (
    "n", "n_grid", "trials", "iters", "epsilon", "k_list", "variant", "alpha", "alpha_grid",
    "q", "p", "seed", "mode", "omega", "init", "record_every", "regularization",
)


def _cmd_experiment(args) -> int:
    items = parse_spec_text(args.spec.read_text()) if args.spec else {}
    if args.kind:
        items["kind"] = args.kind
    for name in _EXPERIMENT_FLAGS:
        value = getattr(args, name)
        if value is not None:
            items[name.replace("_", "-")] = str(value)
    spec = ExperimentSpec.from_items(items)
    table = run_experiment(spec, workers=args.workers)
    for path in write_experiment(spec, table, args.out):
        print(path)
    return 0


_COMMANDS = {
    "rank": _cmd_rank,
    "baseline": _cmd_baseline,
    "theory": _cmd_theory,
    "experiment": _cmd_experiment,
}


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return _COMMANDS[args.command](args)
    except (ValueError, OSError, RuntimeError, IndexError) as exc:
        print(f"kaczrank {args.command}: error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
