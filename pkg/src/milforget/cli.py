"""Command-line interface.

Subcommands:
  gen     generate a task corpus file
  run     run one strategy over a corpus and write a CSV row
  bench   full strategy comparison over generated corpora
  bounds  print the closed-form hypothesis-space and sample bounds

`run` and `bench` accept --plot to render figures next to the CSV.
Exit status is 0 on success and nonzero on configuration or I/O errors.
"""

from __future__ import annotations

import argparse
import sys
from pathlib import Path

from .bounds import hspace_size, reduction_factor, sample_complexity, sample_reduction
from .domains import gen_tasks
from .harness import (
    STRATEGIES,
    ExperimentConfig,
    emit_csv,
    parse_corpus,
    run_corpus,
    run_experiment,
    write_corpus,
)


def _add_gen(sub) -> None:
    p = sub.add_parser("gen", help="generate a task corpus file")
    p.add_argument("--domain", required=True, choices=("robot", "lego"))
    p.add_argument("--tasks", required=True, type=int)
    p.add_argument("--seed", required=True, type=int)
    p.add_argument("--out", required=True)


def _add_run(sub) -> None:
    p = sub.add_parser("run", help="run one strategy over a corpus")
    p.add_argument("--corpus", required=True)
    p.add_argument("--strategy", required=True, choices=STRATEGIES)
    p.add_argument("--timeout", type=float, default=5.0, help="seconds per task per search depth")
    p.add_argument("--max-size", type=int, default=6, dest="max_size")
    p.add_argument("--parallelism", type=int, default=1)
    p.add_argument("--out", required=True, help="CSV output path")
    p.add_argument("--plot", action="store_true", help="render figures next to the CSV")


def _add_bench(sub) -> None:
    p = sub.add_parser("bench", help="strategy comparison over generated corpora")
    p.add_argument("--domain", required=True, choices=("robot", "lego"))
    p.add_argument("--counts", default="50,100,200,400", help="comma-separated task counts")
    p.add_argument("--reps", type=int, default=3)
    p.add_argument("--seed", required=True, type=int)
    p.add_argument("--strategies", default=",".join(STRATEGIES))
    p.add_argument("--timeout", type=float, default=5.0)
    p.add_argument("--max-size", type=int, default=6, dest="max_size")
    p.add_argument("--parallelism", type=int, default=1)
    p.add_argument("--out", required=True, help="CSV output path")
    p.add_argument("--plot", action="store_true", help="render figures next to the CSV")


def _add_bounds(sub) -> None:
    p = sub.add_parser("bounds", help="closed-form bound calculators")
    p.add_argument("--m", required=True, type=int)
    p.add_argument("--p", required=True, type=int)
    p.add_argument("--j", required=True, type=int)
    p.add_argument("--n", required=True, type=int)
    p.add_argument("--eps", type=float)
    p.add_argument("--delta", type=float)
    p.add_argument("--r", type=float)


def _cmd_gen(args) -> int:
    corpus = gen_tasks(args.domain, args.tasks, args.seed)
    write_corpus(corpus, args.out)
    print(f"wrote {len(corpus)} {args.domain} tasks to {args.out}")
    return 0


def _cmd_run(args) -> int:
    corpus = parse_corpus(args.corpus)
    run = run_corpus(
        corpus,
        args.strategy,
        timeout=args.timeout,
        max_d=args.max_size,
        parallelism=args.parallelism,
    )
    emit_csv([run.row], args.out)
    print(
        f"{corpus.domain}/{args.strategy}: {run.row.pct_solved:.1f}% solved, "
        f"mean {run.row.mean_learn_time_s:.3f}s"
    )
    if args.plot and run.result is not None:
        from .plots import plot_depth_profile

        out = Path(args.out)
        fig_path = out.with_name(out.stem + "_depths.png")
        plot_depth_profile(run.result.reports, len(corpus), fig_path)
        print(f"wrote {fig_path}")
    return 0


def _cmd_bench(args) -> int:
    counts = tuple(int(c) for c in args.counts.split(",") if c)
    strategies = tuple(s for s in args.strategies.split(",") if s)
    cfg = ExperimentConfig(
        domain=args.domain,
        counts=counts,
        reps=args.reps,
        seed=args.seed,
        strategies=strategies,
        timeout=args.timeout,
        max_d=args.max_size,
        parallelism=args.parallelism,
    )
    rows = run_experiment(cfg)
    emit_csv(rows, args.out)
    print(f"wrote {len(rows)} rows to {args.out}")
    if args.plot:
        from .plots import plot_solved, plot_times

        out = Path(args.out)
        solved_path = out.with_name(out.stem + "_solved.png")
        times_path = out.with_name(out.stem + "_times.png")
        plot_solved(rows, solved_path)
        plot_times(rows, times_path)
        print(f"wrote {solved_path} and {times_path}")
    return 0


def _cmd_bounds(args) -> int:
    size = hspace_size(args.m, args.p, args.j, args.n)
    print(f"{'hypothesis space':<24} {size}")
    if args.eps is not None and args.delta is not None:
        s = sample_complexity(args.m, args.p, args.j, args.n, args.eps, args.delta)
        print(f"{'sample complexity':<24} {s:.6g}")
    if args.r is not None:
        print(f"{'reduction factor':<24} {reduction_factor(args.r, args.j, args.n):.6g}")
        print(f"{'sample delta':<24} {sample_reduction(args.r, args.j, args.n):.6g}")
        reduced = hspace_size(args.m, max(1, round(args.r * args.p)), args.j, args.n)
        print(f"{'reduced space':<24} {reduced}")
    return 0


_COMMANDS = {
    "gen": _cmd_gen,
    "run": _cmd_run,
    "bench": _cmd_bench,
    "bounds": _cmd_bounds,
}


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(prog="milforget")
    sub = parser.add_subparsers(dest="command", required=True)
    _add_gen(sub)
    _add_run(sub)
    _add_bench(sub)
    _add_bounds(sub)
    args = parser.parse_args(argv)
    try:
        return _COMMANDS[args.command](args)
    except (ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
