"""Monte Carlo harness: phase-transition sweeps and structural checks.

A trial samples a fresh graph and a uniformly random seed set of size a,
runs the exploration to completion, and classifies the outcome:
subcritical when the final infected count stays below tc, supercritical
when it exceeds n/2 (a finite-n proxy sitting deep inside the bimodal
gap), ambiguous otherwise.

Beyond the sweep, this module reproduces the structural steps of the
supercritical picture on finite instances: early growth past the
bottleneck window, the set of nearly-infected vertices around the checked
set, the giant component inside it, and the two counting stages that
finish the infection off.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from functools import lru_cache

import numpy as np
from numba import njit

from ._parallel import run_indexed
from .critical import (
    CriticalQuantities,
    critical_quantities,
    rho_giant,
    subcritical_failure_bound,
    supercritical_failure_bound,
    window_floor,
)
from .graphs import Graph, GraphParams, sample_gnp
from .process import (
    ProcessParams,
    SelectionRule,
    random_seed_set,
    run_exploration,
)
from .rng import derive_seed

SUBCRITICAL = "subcritical"
SUPERCRITICAL = "supercritical"
AMBIGUOUS = "ambiguous"


@lru_cache(maxsize=64)
def _crit_cached(n: int, p: float, r: int) -> CriticalQuantities:
    return critical_quantities(n, p, r)


@dataclass(frozen=True)
class TrialOutcome:
    seed: int
    final_size: int
    stopping_time: int
    classification: str
    t0_reached: bool
    infected_at_t0: int | None

    def to_json_dict(self) -> dict:
        return {
            "seed": self.seed,
            "final_size": self.final_size,
            "stopping_time": self.stopping_time,
            "classification": self.classification,
            "t0_reached": self.t0_reached,
            "infected_at_t0": self.infected_at_t0,
        }


def classify_final_size(final_size: int, n: int, tc: int) -> str:
    if final_size < tc:
        return SUBCRITICAL
    if final_size > n // 2:
        return SUPERCRITICAL
    return AMBIGUOUS


def run_trial(n: int, p: float, r: int, a: int, seed: int) -> TrialOutcome:
    """One end-to-end trial: fresh graph, uniform random A(0) of size a,
    full exploration, classification against tc and n/2."""
    if not 0 <= a <= n:
        raise ValueError(f"initial seed size {a} out of range 0..{n}")
    crit = _crit_cached(n, p, r)
    graph = sample_gnp(GraphParams(n, p, derive_seed(seed, "graph")))
    seeds = random_seed_set(n, a, seed)
    trace = run_exploration(ProcessParams(graph, r, seeds), SelectionRule())
    final_size = int(trace.final_set.size)
    t0_floor = window_floor(crit.t0)
    t0_reached = trace.stopping_time > t0_floor
    infected_at_t0 = int(trace.infected_size[t0_floor]) if t0_reached else None
    return TrialOutcome(
        seed=seed,
        final_size=final_size,
        stopping_time=trace.stopping_time,
        classification=classify_final_size(final_size, n, crit.tc),
        t0_reached=t0_reached,
        infected_at_t0=infected_at_t0,
    )


def _trial_worker(args) -> TrialOutcome:
    n, p, r, a, seed = args
    return run_trial(n, p, r, a, seed)


@dataclass(frozen=True)
class SweepCell:
    omega0: float
    a: int
    trials: int
    frac_sub: float
    frac_super: float
    frac_ambig: float
    mean_final: float
    bound: float | None
    bound_exempt: bool
    failure_fraction: float | None
    final_sizes: list[int]
    outcomes: list[TrialOutcome] = field(repr=False)

    def to_json_dict(self) -> dict:
        return {
            "omega0": self.omega0,
            "a": self.a,
            "trials": self.trials,
            "frac_sub": self.frac_sub,
            "frac_super": self.frac_super,
            "frac_ambig": self.frac_ambig,
            "mean_final": self.mean_final,
            "bound": self.bound,
            "bound_exempt": self.bound_exempt,
            "failure_fraction": self.failure_fraction,
            "final_sizes": self.final_sizes,
        }


@dataclass(frozen=True)
class SweepReport:
    n: int
    p: float
    r: int
    master_seed: int
    t0: float
    tc: int
    ac: float
    cells: list[SweepCell]

    def to_json_dict(self) -> dict:
        return {
            "n": self.n,
            "p": self.p,
            "r": self.r,
            "master_seed": self.master_seed,
            "t0": self.t0,
            "tc": self.tc,
            "ac": self.ac,
            "cells": [c.to_json_dict() for c in self.cells],
        }

    def to_csv_text(self) -> str:
        lines = ["omega0,a,trials,frac_sub,frac_super,frac_ambig,mean_final,bound"]
        for c in self.cells:
            bound = "nan" if c.bound is None else repr(c.bound)
            lines.append(
                f"{c.omega0!r},{c.a},{c.trials},{c.frac_sub!r},{c.frac_super!r},"
                f"{c.frac_ambig!r},{c.mean_final!r},{bound}"
            )
        return "\n".join(lines) + "\n"


def seed_size_for_offset(ac: float, omega0: float, n: int) -> int:
    """a = round(ac + omega0), clamped to 0..n (the process needs an
    integer seed count; the offset grid is real-valued)."""
    return int(min(max(round(ac + omega0), 0), n))


def sweep_omega0(
    n: int,
    p: float,
    r: int,
    omega0_grid,
    trials_per_cell: int,
    seed: int,
    workers: int | None = None,
) -> SweepReport:
    """Seeded sweep over seed-size offsets omega0 around ac.

    Every trial derives its stream from (seed, cell index, trial index),
    so the report is bit-identical for any worker count.  Cells whose
    omega0 violates the bound hypotheses (0 < omega0 <= ac - r below,
    omega0 <= t0 - ac above) still run but are marked bound-exempt.
    """
    omega0_grid = [float(w) for w in omega0_grid]
    if not omega0_grid:
        raise ValueError("omega0 grid must be non-empty")
    if trials_per_cell < 1:
        raise ValueError("trials_per_cell must be >= 1")
    crit = _crit_cached(n, p, r)
    payloads = []
    for ci, omega0 in enumerate(omega0_grid):
        a = seed_size_for_offset(crit.ac, omega0, n)
        for ti in range(trials_per_cell):
            payloads.append((n, p, r, a, derive_seed(seed, "sweep", ci, ti)))
    outcomes = run_indexed(_trial_worker, payloads, workers)
    cells = []
    for ci, omega0 in enumerate(omega0_grid):
        cell_out = outcomes[ci * trials_per_cell : (ci + 1) * trials_per_cell]
        a = seed_size_for_offset(crit.ac, omega0, n)
        k = len(cell_out)
        n_sub = sum(1 for o in cell_out if o.classification == SUBCRITICAL)
        n_sup = sum(1 for o in cell_out if o.classification == SUPERCRITICAL)
        n_amb = k - n_sub - n_sup
        if omega0 < 0:
            exempt = not (0.0 < -omega0 <= crit.ac - r)
            bound = subcritical_failure_bound(-omega0, crit.t0)
            failure = 1.0 - n_sub / k
        elif omega0 > 0:
            exempt = not (omega0 <= crit.t0 - crit.ac)
            bound = supercritical_failure_bound(omega0, crit.t0, crit.ac)
            failure = 1.0 - n_sup / k
        else:
            exempt, bound, failure = True, None, None
        cells.append(
            SweepCell(
                omega0=omega0,
                a=a,
                trials=k,
                frac_sub=n_sub / k,
                frac_super=n_sup / k,
                frac_ambig=n_amb / k,
                mean_final=float(np.mean([o.final_size for o in cell_out])),
                bound=bound,
                bound_exempt=exempt,
                failure_fraction=failure,
                final_sizes=sorted(o.final_size for o in cell_out),
                outcomes=cell_out,
            )
        )
    return SweepReport(
        n=n, p=p, r=r, master_seed=int(seed),
        t0=crit.t0, tc=crit.tc, ac=crit.ac, cells=cells,
    )


# ---------------------------------------------------------------------------
# structural checks around the checked set
# ---------------------------------------------------------------------------

def _degrees_into(graph: Graph, members: np.ndarray) -> np.ndarray:
    """Count, for every vertex, its neighbors inside ``members``."""
    counts = np.zeros(graph.n + 1, dtype=np.int64)
    for v in np.asarray(members, dtype=np.int64):
        counts[graph.indices[graph.indptr[v] : graph.indptr[v + 1]]] += 1
    return counts


def near_infected_set(graph: Graph, checked, r: int, exclude=()) -> np.ndarray:
    """Vertices outside checked (and exclude) with >= r-1 neighbors in
    checked: one more checked neighbor away from infection."""
    checked = np.asarray(list(checked) if not isinstance(checked, np.ndarray) else checked,
                         dtype=np.int64)
    counts = _degrees_into(graph, checked)
    mask = counts >= (r - 1)
    mask[0] = False
    mask[checked] = False
    ex = np.asarray(list(exclude) if not isinstance(exclude, np.ndarray) else exclude,
                    dtype=np.int64)
    if ex.size:
        mask[ex] = False
    return np.flatnonzero(mask).astype(np.int32)


@njit(cache=True)
def _components_kernel(indptr, indices, members):
    # members sorted ascending; DSU over their compacted ids with
    # neighbor membership resolved by binary search.
    w = members.size
    parent = np.arange(w, dtype=np.int64)

    def find(parent, x):
        root = x
        while parent[root] != root:
            root = parent[root]
        while parent[x] != root:
            nxt = parent[x]
            parent[x] = root
            x = nxt
        return root

    for i in range(w):
        v = members[i]
        for j in range(indptr[v], indptr[v + 1]):
            nb = indices[j]
            if nb <= v:
                continue
            lo, hi = i + 1, w - 1
            pos = -1
            while lo <= hi:
                mid = (lo + hi) >> 1
                mv = members[mid]
                if mv == nb:
                    pos = mid
                    break
                elif mv < nb:
                    lo = mid + 1
                else:
                    hi = mid - 1
            if pos < 0:
                continue
            ra = find(parent, i)
            rb = find(parent, pos)
            if ra != rb:
                if ra < rb:
                    parent[rb] = ra
                else:
                    parent[ra] = rb
    roots = np.empty(w, dtype=np.int64)
    for i in range(w):
        roots[i] = find(parent, i)
    return roots


def giant_component(graph: Graph, members) -> tuple[np.ndarray, int]:
    """Largest connected component of the subgraph induced on ``members``,
    found by disjoint-set union.  Returns (sorted vertices, size)."""
    members = np.unique(np.asarray(list(members) if not isinstance(members, np.ndarray)
                                   else members, dtype=np.int32))
    if members.size == 0:
        return members, 0
    roots = _components_kernel(graph.indptr, graph.indices, members.astype(np.int64))
    uniq, counts = np.unique(roots, return_counts=True)
    best = uniq[np.argmax(counts)]
    comp = members[roots == best]
    return comp, int(comp.size)


@dataclass(frozen=True)
class CompletionReport:
    """Two counting stages that finish the infection from a connected core.

    Stage 1: vertices (outside the excluded sets) with >= r neighbors in
    U' -- all of them get infected next; their count is compared with the
    floor n / (2^r r! sqrt(e)).  Stage 2 keeps exactly that many of them
    (B', lowest labels) and counts vertices with fewer than r neighbors in
    B'; everything else is infected one step later, so the count is the
    uninfected remainder, compared with 1/p.
    """

    stage1_count: int
    stage1_threshold: float
    stage1_pass: bool
    stage2_count: int | None
    stage2_threshold: float
    stage2_pass: bool

    def to_json_dict(self) -> dict:
        return {
            "stage1_count": self.stage1_count,
            "stage1_threshold": self.stage1_threshold,
            "stage1_pass": self.stage1_pass,
            "stage2_count": self.stage2_count,
            "stage2_threshold": self.stage2_threshold,
            "stage2_pass": self.stage2_pass,
        }


def completion_check(
    graph: Graph,
    u_prime,
    checked,
    r: int,
    p: float | None = None,
    exclude=(),
) -> CompletionReport:
    """Run both counting stages from the core set ``u_prime``.

    ``u_prime`` must hold at least floor(1/(2p)) vertices (its intended
    size).  ``exclude`` lists further vertices (e.g. the candidate pool W
    and the reserved infected set) outside every count.
    """
    if p is None:
        if graph.params is None:
            raise ValueError("edge probability p required (graph carries no params)")
        p = graph.params.p
    u_prime = np.unique(np.asarray(list(u_prime) if not isinstance(u_prime, np.ndarray)
                                   else u_prime, dtype=np.int64))
    need = math.floor(0.5 / p)
    if u_prime.size < need:
        raise ValueError(f"u_prime has {u_prime.size} vertices; needs at least {need}")
    checked = np.asarray(list(checked) if not isinstance(checked, np.ndarray) else checked,
                         dtype=np.int64)
    ex = np.asarray(list(exclude) if not isinstance(exclude, np.ndarray) else exclude,
                    dtype=np.int64)
    n = graph.n

    base_mask = np.ones(n + 1, dtype=bool)
    base_mask[0] = False
    base_mask[u_prime] = False
    if checked.size:
        base_mask[checked] = False
    if ex.size:
        base_mask[ex] = False

    counts1 = _degrees_into(graph, u_prime)
    stage1_threshold = n / (2**r * math.factorial(r) * math.sqrt(math.e))
    b_all = np.flatnonzero(base_mask & (counts1 >= r)).astype(np.int64)
    stage1_count = int(b_all.size)
    stage1_pass = stage1_count >= stage1_threshold

    b_size = math.floor(stage1_threshold)
    stage2_threshold = 1.0 / p
    if stage1_count < b_size:
        return CompletionReport(
            stage1_count=stage1_count,
            stage1_threshold=stage1_threshold,
            stage1_pass=stage1_pass,
            stage2_count=None,
            stage2_threshold=stage2_threshold,
            stage2_pass=False,
        )
    b_prime = b_all[:b_size]  # lowest labels, for determinism
    counts2 = _degrees_into(graph, b_prime)
    mask2 = base_mask.copy()
    mask2[b_all] = False
    stage2_count = int(np.count_nonzero(mask2 & (counts2 < r)))
    return CompletionReport(
        stage1_count=stage1_count,
        stage1_threshold=stage1_threshold,
        stage1_pass=stage1_pass,
        stage2_count=stage2_count,
        stage2_threshold=stage2_threshold,
        stage2_pass=stage2_count <= stage2_threshold,
    )


# ---------------------------------------------------------------------------
# early growth (bottleneck window) check
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class EarlyGrowthReport:
    trials: int
    success_fraction: float
    failure_fraction: float
    bound: float
    size_threshold: float
    within_bound: bool

    def to_json_dict(self) -> dict:
        return {
            "trials": self.trials,
            "success_fraction": self.success_fraction,
            "failure_fraction": self.failure_fraction,
            "bound": self.bound,
            "size_threshold": self.size_threshold,
            "within_bound": self.within_bound,
        }


def _early_growth_trial(args) -> bool:
    n, p, r, a, t0_floor, threshold, seed = args
    graph = sample_gnp(GraphParams(n, p, derive_seed(seed, "graph")))
    seeds = random_seed_set(n, a, seed)
    trace = run_exploration(ProcessParams(graph, r, seeds), SelectionRule(),
                            max_steps=t0_floor)
    if not trace.truncated:  # stopped within the window: T <= floor(t0)
        return False
    return bool(trace.infected_size[t0_floor] >= threshold)


def early_growth_check(
    n: int,
    p: float,
    r: int,
    omega0: float,
    trials: int,
    seed: int,
    workers: int | None = None,
) -> EarlyGrowthReport:
    """Fraction of trials (a = ac + omega0) that survive past the
    bottleneck window with |A(floor(t0))| >= t0 + ac/2 + omega0/2,
    compared against the ceiling exp(-omega0^2 / (9.5 t0)) on failure."""
    if omega0 <= 0:
        raise ValueError("omega0 must be positive for the early-growth check")
    crit = _crit_cached(n, p, r)
    if omega0 > crit.t0 - crit.ac:
        raise ValueError("omega0 exceeds t0 - ac; hypothesis violated")
    a = seed_size_for_offset(crit.ac, omega0, n)
    t0_floor = window_floor(crit.t0)
    threshold = crit.t0 + crit.ac / 2.0 + omega0 / 2.0
    payloads = [
        (n, p, r, a, t0_floor, threshold, derive_seed(seed, "early-growth", i))
        for i in range(trials)
    ]
    hits = run_indexed(_early_growth_trial, payloads, workers)
    success = sum(hits) / trials
    failure = 1.0 - success
    bound = math.exp(-(omega0 * omega0) / (9.5 * crit.t0))
    se = math.sqrt(bound * (1.0 - bound) / trials)
    return EarlyGrowthReport(
        trials=trials,
        success_fraction=success,
        failure_fraction=failure,
        bound=bound,
        size_threshold=threshold,
        within_bound=failure <= bound + 5.0 * se,
    )


# ---------------------------------------------------------------------------
# giant + completion pipeline on one truncated run
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class GiantTrialReport:
    seed: int
    t0_reached: bool
    near_size: int | None = None
    near_threshold: float | None = None
    near_pass: bool = False
    w_size: int | None = None
    giant_size: int | None = None
    giant_threshold: float | None = None
    giant_pass: bool = False
    completion: CompletionReport | None = None

    def to_json_dict(self) -> dict:
        return {
            "seed": self.seed,
            "t0_reached": self.t0_reached,
            "near_size": self.near_size,
            "near_threshold": self.near_threshold,
            "near_pass": self.near_pass,
            "w_size": self.w_size,
            "giant_size": self.giant_size,
            "giant_threshold": self.giant_threshold,
            "giant_pass": self.giant_pass,
            "completion": None if self.completion is None else self.completion.to_json_dict(),
        }


def _giant_trial(args) -> GiantTrialReport:
    n, p, r, a, reserved_size, seed = args
    crit = _crit_cached(n, p, r)
    t0_floor = window_floor(crit.t0)
    graph = sample_gnp(GraphParams(n, p, derive_seed(seed, "graph")))
    seeds = random_seed_set(n, a, seed)
    trace = run_exploration(ProcessParams(graph, r, seeds), SelectionRule(),
                            max_steps=t0_floor)
    if not trace.truncated:
        return GiantTrialReport(seed=seed, t0_reached=False)
    checked = trace.checked_at(t0_floor)
    infected = trace.infected_at(t0_floor)
    unchecked_infected = np.setdiff1d(infected, checked, assume_unique=True)
    if unchecked_infected.size < reserved_size:
        return GiantTrialReport(seed=seed, t0_reached=False)
    reserved = unchecked_infected[:reserved_size]  # lowest labels
    near = near_infected_set(graph, checked, r, exclude=reserved)
    near_threshold = 3.0 * r / (4.0 * p)
    near_pass = near.size >= near_threshold
    w_size = math.floor(near_threshold)
    if near.size < w_size:
        return GiantTrialReport(
            seed=seed, t0_reached=True, near_size=int(near.size),
            near_threshold=near_threshold, near_pass=False,
        )
    w = near[:w_size]
    comp, giant_size = giant_component(graph, w)
    giant_threshold = 0.9 * rho_giant(3.0 * r / 4.0) * w_size
    giant_pass = giant_size >= giant_threshold
    u_need = math.floor(0.5 / p)
    if giant_size < u_need:
        return GiantTrialReport(
            seed=seed, t0_reached=True, near_size=int(near.size),
            near_threshold=near_threshold, near_pass=near_pass,
            w_size=w_size, giant_size=giant_size,
            giant_threshold=giant_threshold, giant_pass=giant_pass,
        )
    u_prime = comp[:u_need]
    completion = completion_check(
        graph, u_prime, checked, r, p=p,
        exclude=np.concatenate([w.astype(np.int64), reserved.astype(np.int64)]),
    )
    return GiantTrialReport(
        seed=seed, t0_reached=True, near_size=int(near.size),
        near_threshold=near_threshold, near_pass=near_pass,
        w_size=w_size, giant_size=giant_size,
        giant_threshold=giant_threshold, giant_pass=giant_pass,
        completion=completion,
    )


def giant_completion_trials(
    n: int,
    p: float,
    r: int,
    omega0: float,
    trials: int,
    seed: int,
    workers: int | None = None,
    max_attempts: int | None = None,
) -> list[GiantTrialReport]:
    """Collect ``trials`` runs that reach the bottleneck window and push
    each through the near-set / giant / completion pipeline.

    Runs are generated in deterministic seed order; ones stopping inside
    the window are skipped (they carry no checked set of size floor(t0)).
    """
    crit = _crit_cached(n, p, r)
    a = seed_size_for_offset(crit.ac, omega0, n)
    reserved_size = math.floor((crit.ac + omega0) / 2.0)
    if max_attempts is None:
        max_attempts = 2 * trials
    reports: list[GiantTrialReport] = []
    attempt = 0
    batch = max(trials, 8)
    while len(reports) < trials and attempt < max_attempts:
        todo = min(batch, max_attempts - attempt)
        payloads = [
            (n, p, r, a, reserved_size, derive_seed(seed, "giant", attempt + i))
            for i in range(todo)
        ]
        out = run_indexed(_giant_trial, payloads, workers)
        attempt += todo
        reports.extend(rep for rep in out if rep.t0_reached)
        batch = max(8, trials - len(reports))
    return reports[:trials]
