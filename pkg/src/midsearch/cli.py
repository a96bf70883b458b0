"""Command-line interface: inspect instances, run identifiers, benchmark.

Exit codes: 0 success, 1 user/config error, 2 internal error.  Reports are
1-based (the library API is 0-based).
"""

from __future__ import annotations

import argparse
import json
import sys
import traceback

import numpy as np

from .baselines import BASELINES
from .errors import MidsearchError, NoStrictPSNE
from .game import SamplingOracle, hardness_stats, psne_exact, save_instance
from .harness import (
    ExperimentConfig,
    build_instance,
    checkpoint_grid,
    emit_results,
    resolve_budget,
    run_experiment,
)
from .verify import meta_find_psne
from .search import find_psne_with_gap

ALGORITHMS = sorted(BASELINES) + ["meta", "gap"]


class CliError(Exception):
    pass


def _parse_a_hard(text: str) -> dict:
    parts = text.split(",")
    if len(parts) != 3:
        raise CliError("--a-hard expects d,delta_min,beta (e.g. 32,0.05,0.1)")
    return {"a_hard": {"d": int(parts[0]), "delta_min": float(parts[1]), "beta": float(parts[2])}}


def _instance_spec(args) -> dict:
    if getattr(args, "a_hard", None):
        return _parse_a_hard(args.a_hard)
    if getattr(args, "file", None):
        return {"file": args.file}
    if getattr(args, "random_strict", None):
        parts = args.random_strict.split(",")
        if len(parts) not in (2, 3):
            raise CliError("--random-strict expects n,m[,seed]")
        return {
            "random_strict": {
                "n": int(parts[0]),
                "m": int(parts[1]),
                "seed": int(parts[2]) if len(parts) == 3 else 0,
            }
        }
    raise CliError("specify an instance: --a-hard, --file, or --random-strict")


def cmd_instance(args) -> int:
    spec = _instance_spec(args)
    matrix, h1_ref = build_instance(spec)
    print(f"n = {matrix.n}")
    print(f"m = {matrix.m}")
    print(f"noise = {matrix.noise.kind}" + (f" sigma={matrix.noise.sigma:g}" if matrix.noise.kind == "gaussian" else ""))
    if matrix.tags:
        print("tags = " + ",".join(matrix.tags))
    p = psne_exact(matrix)
    if args.emit:
        save_instance(matrix, args.emit)
        print(f"wrote {args.emit}")
    if p is None:
        print("PSNE: none")
        raise CliError("instance has no pure-strategy saddle point")
    print(f"PSNE: ({p.row + 1}, {p.col + 1})" + ("" if p.strict else " (non-strict)"))
    if not p.strict:
        raise CliError("saddle point is non-strict; hardness undefined")
    stats = hardness_stats(matrix)
    print(f"H1 = {h1_ref:g}")
    if h1_ref != stats.h1:
        print(f"H1_row_col_sum = {stats.h1:g}")
    print(f"Delta_g = {stats.delta_g:g}")
    print(f"Delta_min = {stats.delta_min:g}")
    return 0


def cmd_run(args) -> int:
    spec = _instance_spec(args)
    matrix, h1_ref = build_instance(spec)
    truth = psne_exact(matrix)
    oracle = SamplingOracle(matrix, seed=np.random.SeedSequence(args.seed, spawn_key=(0, 0, 0)))
    rng = np.random.default_rng(np.random.SeedSequence(args.seed, spawn_key=(0, 0, 1)))
    trace: list | None = [] if args.verbose else None

    print(f"algorithm = {args.alg}")
    print(f"seed = {args.seed}")
    print(f"instance = {matrix.n}x{matrix.m} ({matrix.noise.kind} noise)")

    degraded = False
    if args.alg == "meta":
        res = meta_find_psne(oracle, args.delta, rng=rng, trace=trace)
        guess, samples, run = res.pair, res.run.samples_used, res.run
    elif args.alg == "gap":
        if args.delta_guess is None:
            raise CliError("--alg gap requires --delta-guess")
        res = find_psne_with_gap(oracle, args.delta_guess, args.delta, rng=rng, trace=trace)
        guess, samples, run = res.pair, res.samples_used, None
        degraded = res.degraded
    else:
        if args.budget is not None:
            budget = args.budget
        elif args.h1_multiple is not None:
            budget = resolve_budget({"h1_multiple": args.h1_multiple}, h1_ref)
        else:
            raise CliError(f"--alg {args.alg} requires --budget or --h1-multiple")
        kwargs = {}
        if args.alg in ("lucb_g", "midsearch"):
            kwargs["delta"] = args.delta
        if args.alg == "midsearch":
            kwargs["trace"] = trace
        cps = checkpoint_grid(budget, args.checkpoints) if budget > 0 else None
        run = BASELINES[args.alg](oracle, budget, checkpoints=cps, rng=rng, **kwargs)
        guess, samples = run.final_guess, run.samples_used
        degraded = run.degraded

    if trace:
        for line in trace:
            print(f"  stage: {line}")
    if guess is None:
        print("guess: none")
    else:
        print(f"guess: ({guess[0] + 1}, {guess[1] + 1})" + (" (degraded)" if degraded else ""))
    print(f"samples used: {samples}")
    print(f"oracle total: {oracle.total_count}")
    if truth is None:
        print("correct: unknown (instance has no saddle)")
    else:
        ok = guess is not None and tuple(guess) == (truth.row, truth.col)
        print(f"correct: {'true' if ok else 'false'}")
    if run is not None and len(run.checkpoints) > 1:
        print("trajectory:")
        for cp, g in zip(run.checkpoints, run.guesses):
            where = "-" if g is None else f"({g[0] + 1}, {g[1] + 1})"
            print(f"  {int(cp):>12d}  {where}")
    return 0


def cmd_bench(args) -> int:
    with open(args.config) as f:
        cfg_dict = json.load(f)
    config = ExperimentConfig.from_dict(cfg_dict)
    if args.trials is not None:
        config.trials = args.trials
    if args.workers is not None:
        config.workers = args.workers
    result = run_experiment(config)
    out = config.output
    written = emit_results(
        result,
        csv_path=out.get("csv"),
        json_path=out.get("json"),
        svg_path=out.get("svg"),
    )
    print(f"instance: {config.instance}")
    print(f"budget: {result.budget}   trials: {config.trials}   base_seed: {config.base_seed}")
    if result.truth is not None:
        print(f"PSNE: ({result.truth[0] + 1}, {result.truth[1] + 1})")
    print(f"{'algorithm':<12} {'success':>12} {'rate':>7} {'wilson 95%':>17} {'mean samples':>13} {'wall s':>8}")
    for c in result.curves:
        k = len(c.checkpoints) - 1
        print(
            f"{c.algorithm:<12} {int(c.successes[k]):>5d}/{c.trials:<6d} "
            f"{c.rate[k]:>7.3f} [{c.wilson_lo[k]:.3f}, {c.wilson_hi[k]:.3f}] "
            f"{c.mean_samples_used[k]:>13.1f} {c.wall_time:>8.1f}"
            + (f"  ({c.errors} errored)" if c.errors else "")
        )
    for path in written:
        print(f"wrote {path}")
    return 0


def cmd_plot(args) -> int:
    from .plotting import read_results_csv, render_svg

    series = read_results_csv(args.csv)
    render_svg(series, args.out)
    print(f"wrote {args.out}")
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="midsearch",
        description="Saddle-point identification in noisy matrix games: "
        "instances, single runs, and benchmark experiments.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    def add_instance_flags(p):
        p.add_argument("--a-hard", metavar="d,dmin,beta", help="adversarial block instance")
        p.add_argument("--file", help="instance JSON file")
        p.add_argument("--random-strict", metavar="n,m[,seed]", help="random strict-saddle instance")

    p_inst = sub.add_parser("instance", help="inspect an instance and its hardness")
    add_instance_flags(p_inst)
    p_inst.add_argument("--emit", metavar="PATH", help="write the instance JSON here")
    p_inst.set_defaults(fn=cmd_instance)

    p_run = sub.add_parser("run", help="one seeded run of one algorithm")
    add_instance_flags(p_run)
    p_run.add_argument("--alg", required=True, choices=ALGORITHMS)
    p_run.add_argument("--budget", type=int, help="sample budget for fixed-budget algorithms")
    p_run.add_argument("--h1-multiple", type=float, help="budget as multiple of reference H1")
    p_run.add_argument("--delta", type=float, default=0.1, help="failure probability (default 0.1)")
    p_run.add_argument("--delta-guess", type=float, help="gap guess for --alg gap")
    p_run.add_argument("--seed", type=int, default=0)
    p_run.add_argument("--checkpoints", type=int, default=20)
    p_run.add_argument("--verbose", action="store_true", help="print per-stage eliminations")
    p_run.set_defaults(fn=cmd_run)

    p_bench = sub.add_parser("bench", help="run a batch experiment from a config file")
    p_bench.add_argument("config", help="experiment config JSON")
    p_bench.add_argument("--trials", type=int, help="override the configured trial count")
    p_bench.add_argument("--workers", type=int, help="override the worker count")
    p_bench.set_defaults(fn=cmd_bench)

    p_plot = sub.add_parser("plot", help="render success curves from a results CSV")
    p_plot.add_argument("csv")
    p_plot.add_argument("out")
    p_plot.set_defaults(fn=cmd_plot)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.fn(args)
    except (CliError, MidsearchError, NoStrictPSNE, FileNotFoundError, json.JSONDecodeError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except Exception:
        traceback.print_exc()
        return 2


if __name__ == "__main__":
    sys.exit(main())
