"""Candidate verification and the gap-free doubling meta-algorithm.

A proposed saddle (i, j) is checked by running a capped best-arm
identification twice: once over the rows of column j (the winner must be i)
and once over the negated entries of row i (the winner must be j).  If
either run disagrees or fails to finish within its sample cap, the
candidate is rejected.  The meta-algorithm guesses the gap scale by halving
it each round, searches, verifies, and returns the first accepted pair.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import EmptyArmSet, MaxRoundsExceeded
from .game import SamplingOracle
from .search import find_psne_heuristic, find_psne_with_gap, stage_schedule
from .trajectory import AlgorithmRun

BAI_METHODS = ("adaptive", "ege", "sh")


class OracleArms:
    """A bandit view of oracle entries: arm a is entry (rows[a], cols[a]).

    ``sign=-1`` negates observations, turning a row minimization into a
    best-arm problem.  ``variance_proxy`` bounds each arm's observation
    variance using the known noise model; Bernoulli arms get the plug-in
    p(1-p) estimate.
    """

    def __init__(self, oracle: SamplingOracle, rows, cols, sign: float = 1.0):
        self.oracle = oracle
        self.rows = np.asarray(rows, dtype=np.intp)
        self.cols = np.asarray(cols, dtype=np.intp)
        if self.rows.size == 0:
            raise EmptyArmSet("arm set is empty")
        self.sign = sign
        self.k = int(self.rows.size)

    def pull_means(self, arm_idx, count: int) -> np.ndarray:
        arm_idx = np.asarray(arm_idx, dtype=np.intp)
        return self.sign * self.oracle.sample_mean_many(
            self.rows[arm_idx], self.cols[arm_idx], count
        )

    def variance_proxy(self, means: np.ndarray) -> np.ndarray:
        kind = self.oracle.matrix.noise.kind
        if kind == "zero":
            return np.zeros_like(means)
        if kind == "gaussian":
            return np.full_like(means, self.oracle.matrix.noise.sigma ** 2)
        mu = np.clip(np.abs(means), 0.0, 1.0)
        return mu * (1.0 - mu)


def column_arms(oracle: SamplingOracle, j: int) -> OracleArms:
    return OracleArms(oracle, np.arange(oracle.n), np.full(oracle.n, j))


def row_arms_negated(oracle: SamplingOracle, i: int) -> OracleArms:
    return OracleArms(oracle, np.full(oracle.m, i), np.arange(oracle.m), sign=-1.0)


def mab_arms(oracle: SamplingOracle) -> OracleArms:
    """All arms of an n x 1 bandit embedding."""
    return column_arms(oracle, 0)


# ---------------------------------------------------------------------------
# best-arm identification


def _bai_adaptive(arms: OracleArms, cap: int, delta: float, rng) -> int | None:
    """Successive elimination with variance-adaptive pairwise margins.

    Active arms are pulled in geometrically growing rounds; arm i is dropped
    once the leader beats it by sqrt((v_lead + v_i) L / s) + 1.5 L / s.  The
    margin protects the true best arm, which enters every comparison with
    its gap as a head start, so half the usual variance padding suffices.
    Ties never separate, so a non-unique best arm runs the cap out and
    returns None.
    """
    k = arms.k
    if k == 1:
        return 0
    active = np.arange(k)
    means = np.zeros(k)
    s = 0
    used = 0
    r = 0
    target = 8
    final_round = False
    while True:
        r += 1
        inc = target - s
        if used + inc * len(active) > cap:
            # spend whatever still fits, then stop
            inc = (cap - used) // len(active)
            if inc <= 0:
                return None
            final_round = True
        batch = arms.pull_means(active, inc)
        means[active] = (means[active] * s + batch * inc) / (s + inc)
        used += inc * len(active)
        s = s + inc
        target = max(s + 1, int(math.ceil(s * 1.3)))
        ln_term = math.log(2.0 * r * r / delta)
        v = arms.variance_proxy(means[active])
        lead = int(np.argmax(means[active]))
        # 0.75: tuned protection constant; the true best enters every
        # comparison with its gap as a head start, so sub-unit padding
        # keeps wrong eliminations rare while halving the sample bill
        margin = (
            np.sqrt(0.75 * (v[lead] + v) * ln_term / s) + 1.5 * ln_term / s
        )
        keep = means[active] >= means[active][lead] - margin
        keep[lead] = True
        active = active[keep]
        if len(active) == 1:
            return int(active[0])
        if final_round:
            return None


def _bai_ege(arms: OracleArms, cap: int, delta: float, rng) -> int | None:
    """Exponential-gap elimination with a median-elimination inner call.

    Textbook constants; far hungrier than the adaptive method, kept for
    comparison and available through ``method="ege"``.
    """
    k = arms.k
    if k == 1:
        return 0
    used = 0

    def median_elim(active, eps, dlt):
        nonlocal used
        act = active.copy()
        e_l, d_l = eps / 4.0, dlt / 2.0
        while True:
            pulls = math.ceil(4.0 / e_l**2 * math.log(3.0 / d_l))
            if used + pulls * len(act) > cap:
                return None
            mu = arms.pull_means(act, pulls)
            used += pulls * len(act)
            if len(act) == 1:
                return int(act[0])
            med = np.median(mu)
            keep = mu >= med
            if not keep.any():
                keep[int(np.argmax(mu))] = True
            act = act[keep]
            if len(act) == 1:
                return int(act[0])
            e_l *= 0.75
            d_l /= 2.0

    active = np.arange(k)
    r = 1
    while len(active) > 1:
        eps_r = 2.0 ** (-r) / 4.0
        delta_r = delta / (50.0 * r**3)
        pulls = math.ceil(2.0 / (eps_r / 2.0) ** 2 * math.log(2.0 / delta_r))
        if used + pulls * len(active) > cap:
            return None
        mu = arms.pull_means(active, pulls)
        used += pulls * len(active)
        champ = median_elim(active, eps_r / 2.0, delta_r)
        if champ is None:
            return None
        champ_mu = mu[int(np.where(active == champ)[0][0])]
        keep = mu >= champ_mu - eps_r
        active = active[keep]
        r += 1
    return int(active[0])


def _bai_sh_doubling(arms: OracleArms, cap: int, delta: float, rng) -> int | None:
    """Halving runs under doubling budgets plus a two-arm confirmation test."""
    k = arms.k
    if k == 1:
        return 0
    used = 0
    budget = 16 * k
    r = 0
    while True:
        r += 1
        if used + budget > cap:
            return None
        # halving phase on half the round budget
        sh_budget = budget // 2
        active = np.arange(k)
        rounds = max(1, math.ceil(math.log2(k)))
        runner = 1 % k
        for _ in range(rounds):
            pulls = max(1, sh_budget // (rounds * len(active)))
            mu = arms.pull_means(active, pulls)
            used += pulls * len(active)
            order = np.argsort(-mu, kind="stable")
            keep = max(1, (len(active) + 1) // 2)
            if keep < len(active):
                runner = int(active[order[keep]])  # best arm dropped this round
            active = np.sort(active[order[:keep]])
            if len(active) == 1:
                break
        winner = int(active[0])
        # confirmation phase on the other half
        conf = budget - (budget // 2)
        s_c = conf // 2
        if s_c > 0:
            mu2 = arms.pull_means(np.array([winner, runner]), s_c)
            used += 2 * s_c
            ln_term = math.log(2.0 * r * r / delta)
            v = arms.variance_proxy(mu2)
            margin = math.sqrt(2.0 * (v[0] + v[1]) * ln_term / s_c) + 3.0 * ln_term / s_c
            if mu2[0] - mu2[1] > margin:
                return winner
        budget *= 2


_BAI = {"adaptive": _bai_adaptive, "ege": _bai_ege, "sh": _bai_sh_doubling}


def best_arm_identify(
    arms: OracleArms,
    sample_cap: int,
    delta: float,
    rng=None,
    method: str = "adaptive",
) -> int | None:
    """Identify the unique best arm within ``sample_cap`` samples.

    Returns the arm index, or None when the cap runs out first (which is
    the expected outcome when the best arm is not unique).  Never consumes
    more than ``sample_cap`` samples.
    """
    if method not in _BAI:
        raise ValueError(f"unknown method {method!r}; expected one of {BAI_METHODS}")
    if rng is None:
        rng = arms.oracle.spawn_rng()
    return _BAI[method](arms, sample_cap, delta, rng)


# ---------------------------------------------------------------------------
# verification


@dataclass(frozen=True)
class VerifyConfig:
    """Budget scale for one verification call."""

    h_star: float
    c1: float
    delta: float
    method: str = "adaptive"

    @classmethod
    def for_guess(cls, n, m, delta_guess, delta, c1=16.0, method="adaptive"):
        return cls(
            h_star=(n + m - 2) / delta_guess**2, c1=c1, delta=delta, method=method
        )

    def bandit_cap(self) -> int:
        """Per-bandit-instance sample cap; the log-log factor is floored at
        one so tiny instances still get a positive budget."""
        if self.h_star <= 0:
            return 1
        ln_ln = math.log(max(math.e, math.log(self.h_star)) / self.delta)
        return max(1, math.ceil(self.c1 * self.h_star * ln_ln))


def verify(
    oracle: SamplingOracle,
    i_hat: int,
    j_hat: int,
    delta: float,
    delta_guess: float,
    c1: float = 16.0,
    method: str = "adaptive",
    rng=None,
) -> bool:
    """Accept (i_hat, j_hat) only if it wins both derived bandit instances.

    Completeness holds when the gap guess is valid and the candidate is the
    true saddle; soundness needs no gap assumption, since a wrong candidate
    loses at least one of the two instances.  Consumes at most twice the
    per-instance cap.
    """
    if rng is None:
        rng = oracle.spawn_rng()
    cfg = VerifyConfig.for_guess(oracle.n, oracle.m, delta_guess, delta, c1, method)
    cap = cfg.bandit_cap()
    best_row = best_arm_identify(
        column_arms(oracle, j_hat), cap, delta / 2.0, rng, method
    )
    if best_row != i_hat:
        return False
    best_col = best_arm_identify(
        row_arms_negated(oracle, i_hat), cap, delta / 2.0, rng, method
    )
    return best_col == j_hat


@dataclass(frozen=True)
class MetaSchedule:
    """Round-t parameters of the doubling search."""

    round: int
    gap_t: float
    delta_t: float

    @classmethod
    def at(cls, t: int, delta: float):
        return cls(round=t, gap_t=2.0 ** (1 - t), delta_t=delta / (4.0 * t * t))


@dataclass
class MetaResult:
    row: int
    col: int
    rounds: int
    run: AlgorithmRun

    @property
    def pair(self) -> tuple[int, int]:
        return (self.row, self.col)


def meta_find_psne(
    oracle: SamplingOracle,
    delta: float,
    rng=None,
    max_rounds: int = 40,
    c1: float = 16.0,
    method: str = "adaptive",
    finder: str = "tuned",
    budget_scale: float = 100.0,
    trace: list | None = None,
) -> MetaResult:
    """Saddle identification without a gap guess: halve, search, verify.

    Correctness rests on the verifier: a wrong proposal survives round t
    with probability at most delta_t, whatever the finder does, and the
    round-t failure probabilities sum below delta.  The finder only decides
    how soon the true pair gets proposed.  ``finder="tuned"`` (default)
    runs the budgeted search with budget_scale * (n+m) / gap_t^2 samples,
    keeping the total cost proportional to the inverse squared gap;
    ``finder="exact"`` runs the guarantee-form staged search at
    (gap_t, delta_t), whose subsample constants are orders of magnitude
    hungrier.

    Raises MaxRoundsExceeded once the guessed gap drops below ~1e-11 (or
    earlier, if a further round would overflow the oracle's 64-bit sample
    ledger), which in practice means the instance has no strict saddle to
    find.
    """
    if finder not in ("tuned", "exact"):
        raise ValueError(f"unknown finder {finder!r}")
    if rng is None:
        rng = oracle.spawn_rng()
    n, m = oracle.n, oracle.m
    heuristic_floor = max(
        sum(x * y for _, x, y in stage_schedule(n, m)), n * m
    )
    start = oracle.total_count
    cps: list[int] = []
    guesses: list = []
    for t in range(1, max_rounds + 1):
        sched = MetaSchedule.at(t, delta)
        if (n + m) / sched.gap_t**2 > 2.0**58:
            raise MaxRoundsExceeded(
                f"round {t} would overflow the sample ledger; "
                "the matrix likely has no strict saddle point"
            )
        if finder == "exact":
            res = find_psne_with_gap(oracle, sched.gap_t, sched.delta_t, rng)
            pair, degraded = res.pair, res.degraded
        else:
            budget_t = max(
                math.ceil(budget_scale * (n + m) / sched.gap_t**2), heuristic_floor
            )
            run_t = find_psne_heuristic(
                oracle, budget_t, delta=sched.delta_t, rng=rng
            )
            pair, degraded = run_t.final_guess, run_t.degraded
        accepted = verify(
            oracle, pair[0], pair[1], sched.delta_t, sched.gap_t, c1, method, rng
        )
        cps.append(oracle.total_count - start)
        guesses.append(pair)
        if trace is not None:
            trace.append(
                f"round {t}: gap guess {sched.gap_t:g}, proposed "
                f"({pair[0] + 1}, {pair[1] + 1}), "
                + ("accepted" if accepted else "rejected")
            )
        if accepted:
            run = AlgorithmRun(
                checkpoints=np.asarray(cps, dtype=np.int64),
                guesses=guesses,
                samples_used=oracle.total_count - start,
                final_guess=pair,
                degraded=degraded,
            )
            return MetaResult(row=pair[0], col=pair[1], rounds=t, run=run)
    raise MaxRoundsExceeded(
        f"no verified saddle in {max_rounds} rounds; "
        "the matrix may have no strict saddle point"
    )
