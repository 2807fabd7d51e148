"""Martingale reconstruction and empirical checks for exploration traces.

With a = |A(0)| seeds fixed and pi(t) the realized success probability
(pi_hat(t) while the process runs, frozen at pi_hat(T) afterwards), the
centered, variance-normalized infection count

    M(t) = (|A(t)| - a - (n - a) * pi(t)) / (1 - pi(t))

is a martingale started at 0.  This module rebuilds M from a trace,
verifies the inversion identity |A(t)| = a + M(t)(1 - pi(t)) + (n-a) pi(t),
enumerates the realized one-round differences together with their ceiling
1 / (1 - pi_hat(t-1)), and measures mean/variance of M across independent
trials against the theory.
"""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass

import numpy as np

from ._parallel import run_indexed
from .critical import binom_tail_geq, compute_t0, pi_hat_table, window_floor
from .graphs import GraphParams, sample_gnp
from .process import ExplorationTrace, ProcessParams, SelectionRule, run_exploration
from .rng import derive_seed

DIFF_FLIP, DIFF_SETTLED, DIFF_DRIFT = 0, 1, 2
DIFF_KIND_NAMES = {DIFF_FLIP: "flip", DIFF_SETTLED: "settled", DIFF_DRIFT: "drift"}


@dataclass(frozen=True)
class PiProcess:
    """pi(t) and pi_hat(t) on t = 0..t_max for one realized run.

    pi equals pi_hat up to the stopping time and stays frozen afterwards,
    so pi(t) <= pi_hat(t) pointwise.
    """

    values: np.ndarray
    hat_values: np.ndarray
    stopping_time: int | None

    @property
    def t_max(self) -> int:
        return int(self.values.size - 1)

    @classmethod
    def from_trace(
        cls, trace: ExplorationTrace, p: float, t_max: int | None = None
    ) -> "PiProcess":
        """Build the realized pi process for a trace of a run with edge
        probability p.  Defaults to tracing min(floor(t0) + 1, n) steps;
        truncated traces cannot be extended past their last step.
        """
        if t_max is None:
            if 0.0 < p < 1.0:
                import warnings

                from .critical import RegimeWarning

                with warnings.catch_warnings():
                    warnings.simplefilter("ignore", RegimeWarning)
                    t_max = min(window_floor(compute_t0(trace.n, p, trace.r)) + 1, trace.n)
            else:
                t_max = trace.last_step
            if trace.truncated:
                t_max = min(t_max, trace.last_step)
        t_max = int(t_max)
        if trace.truncated and t_max > trace.last_step:
            raise ValueError(
                f"trace truncated at step {trace.last_step}; cannot extend pi to {t_max}"
            )
        hat = pi_hat_table(t_max, p, trace.r)
        values = hat.copy()
        T = trace.stopping_time
        if T is not None and T < t_max:
            values[T + 1 :] = hat[T]
        return cls(values=values, hat_values=hat, stopping_time=T)


@dataclass(frozen=True)
class MartingaleTrace:
    """M(t, n-a) per step, the stopping time recovered from it, and the
    largest realized one-round difference."""

    step_values: np.ndarray
    t_prime: int | None
    max_abs_step_diff: float
    pi: PiProcess
    infected_size: np.ndarray
    n: int
    a: int


@dataclass(frozen=True)
class RoundDifferences:
    """Realized one-round differences, compressed per step.

    Within step tau the rounds split into: indicator flips (one row each,
    value 1/(1 - pi(tau-1))), already-infected rounds (value 0), and
    still-uninfected rounds carrying the pi-drift value; the latter two are
    emitted once per step with their multiplicity.
    """

    tau: np.ndarray
    value: np.ndarray
    count: np.ndarray
    kind: np.ndarray
    hat_prev: np.ndarray  # pi_hat(tau - 1) per row

    def bound_values(self) -> np.ndarray:
        """Per-row ceiling 1 / (1 - pi_hat(tau - 1))."""
        return 1.0 / (1.0 - self.hat_prev)

    def max_abs(self) -> float:
        return float(np.abs(self.value).max()) if self.value.size else 0.0

    def within_bounds(self) -> bool:
        return bool(np.all(np.abs(self.value) <= self.bound_values()))


def _extended_infected_size(trace: ExplorationTrace, t_max: int) -> np.ndarray:
    sizes = np.empty(t_max + 1, dtype=np.float64)
    upto = min(trace.last_step, t_max)
    sizes[: upto + 1] = trace.infected_size[: upto + 1]
    if t_max > trace.last_step:
        if trace.truncated:
            raise ValueError("trace truncated before requested horizon")
        sizes[upto + 1 :] = trace.infected_size[-1]  # indicators frozen past T
    return sizes


def round_differences(trace: ExplorationTrace, pi: PiProcess) -> RoundDifferences:
    """Enumerate the realized one-round differences up to pi.t_max."""
    t_max = pi.t_max
    sizes = _extended_infected_size(trace, t_max)
    a = trace.a
    n = trace.n
    taus, vals, counts, kinds, hats = [], [], [], [], []
    for tau in range(1, t_max + 1):
        p_prev = pi.values[tau - 1]
        p_cur = pi.values[tau]
        hat_prev = pi.hat_values[tau - 1]
        flips = int(trace.per_step_new[tau]) if tau <= trace.last_step else 0
        settled = int(sizes[tau - 1]) - a
        still = n - int(sizes[tau])
        if flips:
            # (1 - pi(tau))/(1 - pi(tau)) - (0 - pi(tau-1))/(1 - pi(tau-1))
            # simplifies exactly to 1/(1 - pi(tau-1)) for a 0 -> 1 flip.
            taus.append(tau)
            vals.append(1.0 / (1.0 - p_prev))
            counts.append(flips)
            kinds.append(DIFF_FLIP)
            hats.append(hat_prev)
        if settled:
            taus.append(tau)
            vals.append(0.0)
            counts.append(settled)
            kinds.append(DIFF_SETTLED)
            hats.append(hat_prev)
        if still:
            drift = p_prev / (1.0 - p_prev) - p_cur / (1.0 - p_cur)
            taus.append(tau)
            vals.append(drift)
            counts.append(still)
            kinds.append(DIFF_DRIFT)
            hats.append(hat_prev)
    return RoundDifferences(
        tau=np.asarray(taus, dtype=np.int64),
        value=np.asarray(vals, dtype=np.float64),
        count=np.asarray(counts, dtype=np.int64),
        kind=np.asarray(kinds, dtype=np.int8),
        hat_prev=np.asarray(hats, dtype=np.float64),
    )


def martingale_from_trace(trace: ExplorationTrace, pi: PiProcess) -> MartingaleTrace:
    """Invert the infection-count identity to recover M(t, n-a) per step.

    O(1) per step.  Raises ZeroDivisionError if pi(t) = 1 anywhere (only
    possible for p = 1).
    """
    if np.any(pi.values >= 1.0):
        raise ZeroDivisionError("pi(t) = 1 makes the normalization singular (p = 1)")
    t_max = pi.t_max
    sizes = _extended_infected_size(trace, t_max)
    n, a = trace.n, trace.a
    m = (sizes - a - (n - a) * pi.values) / (1.0 - pi.values)
    if abs(m[0]) > 1e-12:
        raise AssertionError(f"M(0) = {m[0]!r}, expected 0")
    recon = a + m * (1.0 - pi.hat_values) + (n - a) * pi.hat_values
    hits = np.flatnonzero(np.abs(recon - np.arange(t_max + 1)) < 0.5)
    t_prime = int(hits[0]) if hits.size else None
    diffs = round_differences(trace, pi)
    return MartingaleTrace(
        step_values=m,
        t_prime=t_prime,
        max_abs_step_diff=diffs.max_abs(),
        pi=pi,
        infected_size=sizes,
        n=n,
        a=a,
    )


def reconstruct_infected_size(mt: MartingaleTrace) -> np.ndarray:
    """|A(t)| rebuilt from M(t): a + M(t)(1 - pi(t)) + (n - a) pi(t)."""
    return (
        mt.a
        + mt.step_values * (1.0 - mt.pi.values)
        + (mt.n - mt.a) * mt.pi.values
    )


def export_martingale_csv(mt: MartingaleTrace, path) -> None:
    """CSV with columns t, pi_t, M_t, infected_size."""
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["t", "pi_t", "M_t", "infected_size"])
        for t in range(mt.pi.t_max + 1):
            writer.writerow(
                [t, repr(float(mt.pi.values[t])), repr(float(mt.step_values[t])),
                 int(mt.infected_size[t])]
            )


# ---------------------------------------------------------------------------
# empirical checks across independent trials
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class MartingaleSamples:
    """Per-trial M(min(t_probe, T)) values plus difference-bound audits."""

    values: np.ndarray
    t_probe: int
    diff_within_bounds: bool
    max_diff_ratio: float


def _trial_args(n, p, r, a, t_probe, seed, trials):
    return [
        (n, p, r, a, t_probe, derive_seed(seed, "martingale-trial", i))
        for i in range(trials)
    ]


def _martingale_trial(args) -> tuple[float, bool, float]:
    n, p, r, a, t_probe, trial_seed = args
    graph = sample_gnp(GraphParams(n, p, derive_seed(trial_seed, "graph")))
    # A(0) = {1..a}: by vertex exchangeability of G(n, p) this has the same
    # law as a uniformly random a-subset.
    seeds = np.arange(1, a + 1, dtype=np.int32)
    trace = run_exploration(
        ProcessParams(graph, r, seeds), SelectionRule(), max_steps=t_probe
    )
    t_eff = trace.stopping_time if not trace.truncated else t_probe
    t_eff = min(t_eff, t_probe)
    pi = PiProcess.from_trace(trace, p, t_max=t_eff)
    mt = martingale_from_trace(trace, pi)
    diffs = round_differences(trace, pi)
    bounds = diffs.bound_values()
    ratio = float(np.max(np.abs(diffs.value) / bounds)) if diffs.value.size else 0.0
    return float(mt.step_values[t_eff]), bool(diffs.within_bounds()), ratio


def collect_martingale_samples(
    n: int,
    p: float,
    r: int,
    a: int,
    t_probe: int,
    trials: int,
    seed: int,
    workers: int | None = None,
) -> MartingaleSamples:
    """Run independent trials (fresh graph each, A(0) fixed) and record
    M(min(t_probe, T), n-a) plus the one-round difference audit."""
    if trials < 1:
        raise ValueError("trials must be >= 1")
    out = run_indexed(_martingale_trial, _trial_args(n, p, r, a, t_probe, seed, trials), workers)
    values = np.array([v for v, _, _ in out])
    ok = all(flag for _, flag, _ in out)
    ratio = max(rt for _, _, rt in out)
    return MartingaleSamples(
        values=values, t_probe=int(t_probe), diff_within_bounds=ok, max_diff_ratio=ratio
    )


def _mean_stderr(values: np.ndarray) -> tuple[float, float, float]:
    k = values.size
    mean = math.fsum(values.tolist()) / k
    if k < 2:
        return mean, 0.0, 0.0
    var = math.fsum(((v - mean) ** 2 for v in values.tolist())) / (k - 1)
    stderr = math.sqrt(var / k)
    if stderr == 0.0:
        z = 0.0 if mean == 0.0 else math.inf
    else:
        z = mean / stderr
    return mean, stderr, z


@dataclass(frozen=True)
class MartingaleCheckReport:
    mean: float
    stderr: float
    z: float
    trials: int
    t_probe: int

    def to_json_dict(self) -> dict:
        return {"mean": self.mean, "stderr": self.stderr, "z": self.z,
                "trials": self.trials, "t_probe": self.t_probe}


@dataclass(frozen=True)
class VarianceCheckReport:
    var: float
    ceiling: float
    exceeds_noise: bool
    trials: int
    t_probe: int

    def to_json_dict(self) -> dict:
        return {"var": self.var, "ceiling": self.ceiling,
                "exceeds_noise": self.exceeds_noise,
                "trials": self.trials, "t_probe": self.t_probe}


def empirical_martingale_check(
    n: int, p: float, r: int, a: int, t_probe: int, trials: int, seed: int,
    workers: int | None = None, samples: MartingaleSamples | None = None,
) -> MartingaleCheckReport:
    """Sample mean of M(min(t_probe, T)) across trials with its standard
    error and z-score; the martingale property makes the true mean 0."""
    if samples is None:
        samples = collect_martingale_samples(n, p, r, a, t_probe, trials, seed, workers)
    mean, stderr, z = _mean_stderr(samples.values)
    return MartingaleCheckReport(
        mean=mean, stderr=stderr, z=z, trials=int(samples.values.size), t_probe=int(t_probe)
    )


def variance_ceiling(n: int, p: float, r: int, t_probe: int) -> float:
    """Closed-form ceiling n pi_hat(t) / (1 - pi_hat(t))^3 for Var M(t)."""
    pi = binom_tail_geq(t_probe, p, r)
    if pi >= 1.0:
        return math.inf
    return n * pi / (1.0 - pi) ** 3


def empirical_variance_check(
    n: int, p: float, r: int, a: int, t_probe: int, trials: int, seed: int,
    workers: int | None = None, samples: MartingaleSamples | None = None,
) -> VarianceCheckReport:
    """Sample variance of M(min(t_probe, T)) against the theoretical
    ceiling.  Flags (does not fail) when the sample variance exceeds the
    ceiling by more than three standard errors of a variance estimate."""
    if samples is None:
        samples = collect_martingale_samples(n, p, r, a, t_probe, trials, seed, workers)
    values = samples.values
    k = values.size
    mean = math.fsum(values.tolist()) / k
    var = math.fsum(((v - mean) ** 2 for v in values.tolist())) / max(k - 1, 1)
    ceiling = variance_ceiling(n, p, r, t_probe)
    allowance = 3.0 * var * math.sqrt(2.0 / max(k - 1, 1))
    return VarianceCheckReport(
        var=var,
        ceiling=ceiling,
        exceeds_noise=bool(var > ceiling + allowance),
        trials=int(k),
        t_probe=int(t_probe),
    )
