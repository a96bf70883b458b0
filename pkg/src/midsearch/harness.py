"""Multi-trial fixed-budget experiment runner with Wilson success intervals.

A config names an instance, a list of algorithms, a budget (absolute or as
a multiple of the instance's reference hardness), a trial count, and a
checkpoint grid.  Every (trial, algorithm) pair gets a fresh oracle and a
fresh algorithm stream, both derived from (base_seed, trial, algorithm), so
results are reproducible and independent of execution order.  Trials run
across a process pool when MIDSEARCH_THREADS (or the config) asks for more
than one worker.
"""

from __future__ import annotations

import json
import math
import os
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from statistics import NormalDist

import numpy as np

from .baselines import BASELINES
from .errors import InvalidCounts, InvalidParams
from .game import (
    GameMatrix,
    SamplingOracle,
    hardness_stats,
    load_instance,
    matrix_from_dict,
    psne_exact,
)
from .instances import (
    AHardParams,
    DuelingInstance,
    dueling_to_game,
    mab_to_game,
    make_a_hard,
    make_random_strict,
)


def wilson_ci(successes: int, trials: int, confidence: float = 0.95) -> tuple[float, float]:
    """Wilson score interval for a binomial proportion, clamped to [0, 1]."""
    if trials < 1 or not 0 <= successes <= trials:
        raise InvalidCounts(f"bad counts: {successes}/{trials}")
    if not 0 < confidence < 1:
        raise InvalidCounts("confidence must lie in (0, 1)")
    z = NormalDist().inv_cdf(0.5 + confidence / 2.0)
    n = trials
    p = successes / n
    center = p + z * z / (2 * n)
    half = z * math.sqrt(p * (1 - p) / n + z * z / (4 * n * n))
    denom = 1 + z * z / n
    # at the boundary the closed form is exactly 0 (or 1); keep it exact
    lo = 0.0 if successes == 0 else max(0.0, (center - half) / denom)
    hi = 1.0 if successes == trials else min(1.0, (center + half) / denom)
    return lo, hi


def build_instance(spec: dict) -> tuple[GameMatrix, float | None]:
    """Materialize an instance spec; returns the matrix and its reference
    hardness used for budget resolution (None when undefined)."""
    if "a_hard" in spec:
        d = spec["a_hard"]
        params = AHardParams(d=int(d["d"]), delta_min=float(d["delta_min"]), beta=float(d["beta"]))
        return make_a_hard(params), params.h1()
    if "file" in spec:
        matrix = load_instance(spec["file"])
    elif "matrix" in spec:
        matrix = matrix_from_dict(spec["matrix"])
    elif "random_strict" in spec:
        d = spec["random_strict"]
        matrix = make_random_strict(int(d["n"]), int(d["m"]), seed=int(d.get("seed", 0)))
    elif "mab" in spec:
        matrix = mab_to_game(spec["mab"]["means"])
    elif "dueling" in spec:
        matrix = dueling_to_game(DuelingInstance(p=np.asarray(spec["dueling"]["p"])))
    else:
        raise InvalidParams(f"unrecognized instance spec: {sorted(spec)}")
    p = psne_exact(matrix)
    if p is not None and p.strict:
        return matrix, hardness_stats(matrix).h1
    return matrix, None


def resolve_budget(budget, h1_ref: float | None) -> int:
    if isinstance(budget, dict):
        if "h1_multiple" not in budget:
            raise InvalidParams("budget dict must carry h1_multiple")
        if h1_ref is None:
            raise InvalidParams("h1-relative budget needs an instance with a strict saddle")
        return int(round(float(budget["h1_multiple"]) * h1_ref))
    t = int(budget)
    if t < 0:
        raise InvalidParams("budget must be nonnegative")
    return t


def checkpoint_grid(budget: int, checkpoints) -> np.ndarray:
    """Strictly increasing sample counts ending exactly at the budget."""
    if isinstance(checkpoints, (list, tuple, np.ndarray)):
        cps = np.unique(np.asarray(checkpoints, dtype=np.int64))
        if cps.size == 0 or cps[0] < 1 or cps[-1] != budget:
            raise InvalidParams("explicit checkpoints must be in [1, T] with last == T")
        return cps
    count = int(checkpoints)
    if count < 1:
        raise InvalidParams("checkpoint count must be positive")
    grid = np.unique(np.round(np.arange(1, count + 1) / count * budget).astype(np.int64))
    return grid[grid >= 1]


@dataclass
class ExperimentConfig:
    instance: dict
    algorithms: list
    budget: object
    trials: int
    checkpoints: object = 20
    base_seed: int = 0
    confidence: float = 0.95
    output: dict = field(default_factory=dict)
    workers: int | None = None

    def __post_init__(self):
        if self.trials < 1:
            raise InvalidParams("trials must be >= 1")
        if not self.algorithms:
            raise InvalidParams("need at least one algorithm")

    @classmethod
    def from_dict(cls, d: dict):
        return cls(
            instance=d["instance"],
            algorithms=[
                {"name": a} if isinstance(a, str) else dict(a) for a in d["algorithms"]
            ],
            budget=d["budget"],
            trials=int(d["trials"]),
            checkpoints=d.get("checkpoints", 20),
            base_seed=int(d.get("base_seed", 0)),
            confidence=float(d.get("confidence", 0.95)),
            output=dict(d.get("output", {})),
            workers=d.get("workers"),
        )

    def to_dict(self) -> dict:
        return {
            "instance": self.instance,
            "algorithms": self.algorithms,
            "budget": self.budget,
            "trials": self.trials,
            "checkpoints": self.checkpoints
            if not isinstance(self.checkpoints, np.ndarray)
            else self.checkpoints.tolist(),
            "base_seed": self.base_seed,
            "confidence": self.confidence,
            "output": self.output,
        }


@dataclass
class AlgoCurve:
    algorithm: str
    checkpoints: np.ndarray
    successes: np.ndarray
    trials: int
    rate: np.ndarray
    wilson_lo: np.ndarray
    wilson_hi: np.ndarray
    mean_samples_used: np.ndarray
    wall_time: float
    errors: int


@dataclass
class ExperimentResult:
    curves: list
    truth: tuple | None
    h1_ref: float | None
    budget: int
    config: dict


def _trial(config_dict: dict, trial: int):
    """Run every configured algorithm once; pure function of (config, trial)."""
    cfg = ExperimentConfig.from_dict(config_dict)
    matrix, h1_ref = build_instance(cfg.instance)
    truth = psne_exact(matrix)
    truth_pair = (truth.row, truth.col) if truth is not None else None
    budget = resolve_budget(cfg.budget, h1_ref)
    cps = checkpoint_grid(budget, cfg.checkpoints)
    out = []
    for ai, alg in enumerate(cfg.algorithms):
        params = {k: v for k, v in alg.items() if k != "name"}
        runner = BASELINES.get(alg["name"])
        if runner is None:
            raise InvalidParams(f"unknown algorithm {alg['name']!r}")
        oracle = SamplingOracle(
            matrix, seed=np.random.SeedSequence(cfg.base_seed, spawn_key=(trial, ai, 0))
        )
        rng = np.random.default_rng(
            np.random.SeedSequence(cfg.base_seed, spawn_key=(trial, ai, 1))
        )
        t0 = time.perf_counter()
        try:
            run = runner(oracle, budget, checkpoints=cps, rng=rng, **params)
        except Exception as exc:  # scored separately, not as a failure
            out.append(
                {"ok": False, "error": f"{type(exc).__name__}: {exc}", "wall": time.perf_counter() - t0}
            )
            continue
        wall = time.perf_counter() - t0
        succ = [
            (g is not None and truth_pair is not None and tuple(g) == truth_pair)
            for g in run.guesses
        ]
        out.append(
            {"ok": True, "success": succ, "samples": run.samples_used, "wall": wall}
        )
    return out


def _workers_from_env() -> int:
    env = os.environ.get("MIDSEARCH_THREADS", "").strip()
    if env:
        return max(1, int(env))
    return 1


def run_experiment(config: ExperimentConfig) -> ExperimentResult:
    matrix, h1_ref = build_instance(config.instance)
    truth = psne_exact(matrix)
    budget = resolve_budget(config.budget, h1_ref)
    cps = checkpoint_grid(budget, config.checkpoints)
    cfg_dict = config.to_dict()
    n_trials = config.trials
    workers = config.workers if config.workers is not None else _workers_from_env()

    if workers > 1 and n_trials > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            per_trial = list(
                pool.map(_trial, [cfg_dict] * n_trials, range(n_trials), chunksize=1)
            )
    else:
        per_trial = [_trial(cfg_dict, t) for t in range(n_trials)]

    curves = []
    for ai, alg in enumerate(config.algorithms):
        succ = np.zeros(len(cps), dtype=np.int64)
        n_ok = 0
        errors = 0
        wall = 0.0
        samples = []
        for res in per_trial:
            r = res[ai]
            wall += r["wall"]
            if not r["ok"]:
                errors += 1
                continue
            n_ok += 1
            succ += np.asarray(r["success"], dtype=np.int64)
            samples.append(r["samples"])
        if n_ok == 0:
            rate = np.zeros(len(cps))
            lo = np.zeros(len(cps))
            hi = np.ones(len(cps))
            mean_samples = np.zeros(len(cps))
        else:
            rate = succ / n_ok
            bounds = [wilson_ci(int(s), n_ok, config.confidence) for s in succ]
            lo = np.array([b[0] for b in bounds])
            hi = np.array([b[1] for b in bounds])
            samples_arr = np.asarray(samples, dtype=np.float64)
            mean_samples = np.array(
                [float(np.mean(np.minimum(samples_arr, cp))) for cp in cps]
            )
        curves.append(
            AlgoCurve(
                algorithm=alg["name"],
                checkpoints=cps.copy(),
                successes=succ,
                trials=n_ok,
                rate=rate,
                wilson_lo=lo,
                wilson_hi=hi,
                mean_samples_used=mean_samples,
                wall_time=wall,
                errors=errors,
            )
        )
    truth_pair = (truth.row, truth.col) if truth is not None else None
    return ExperimentResult(
        curves=curves, truth=truth_pair, h1_ref=h1_ref, budget=budget, config=cfg_dict
    )


CSV_HEADER = "algorithm,checkpoint_samples,successes,trials,rate,wilson_lo,wilson_hi,mean_samples_used"


def result_to_csv(result: ExperimentResult) -> str:
    lines = [CSV_HEADER]
    for c in result.curves:
        for k, cp in enumerate(c.checkpoints):
            # repr of a python float is the shortest exact round-trip form
            lines.append(
                f"{c.algorithm},{int(cp)},{int(c.successes[k])},{c.trials},"
                f"{float(c.rate[k])!r},{float(c.wilson_lo[k])!r},"
                f"{float(c.wilson_hi[k])!r},{float(c.mean_samples_used[k])!r}"
            )
    return "\n".join(lines) + "\n"


def result_to_json_dict(result: ExperimentResult) -> dict:
    return {
        "config": result.config,
        "budget": result.budget,
        "h1_ref": result.h1_ref,
        "psne_1based": [result.truth[0] + 1, result.truth[1] + 1]
        if result.truth is not None
        else None,
        "algorithms": [
            {
                "name": c.algorithm,
                "trials": c.trials,
                "errors": c.errors,
                "wall_time_s": c.wall_time,
                "checkpoints": [int(x) for x in c.checkpoints],
                "successes": [int(x) for x in c.successes],
                "rate": list(map(float, c.rate)),
                "wilson_lo": list(map(float, c.wilson_lo)),
                "wilson_hi": list(map(float, c.wilson_hi)),
                "mean_samples_used": list(map(float, c.mean_samples_used)),
            }
            for c in result.curves
        ],
    }


def emit_results(result: ExperimentResult, csv_path=None, json_path=None, svg_path=None):
    """Write result files; wall time appears only in the JSON report."""
    written = []
    if csv_path:
        with open(csv_path, "w") as f:
            f.write(result_to_csv(result))
        written.append(str(csv_path))
    if json_path:
        with open(json_path, "w") as f:
            json.dump(result_to_json_dict(result), f, indent=1)
            f.write("\n")
        written.append(str(json_path))
    if svg_path:
        from .plotting import render_result_svg

        render_result_svg(result, svg_path)
        written.append(str(svg_path))
    return written
