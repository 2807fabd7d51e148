"""Bootstrap percolation, run two ways.

``run_synchronous`` is the round-parallel definition: every uninfected
vertex with at least r infected neighbors becomes infected simultaneously,
round after round, until nothing changes.

``run_exploration`` is the sequential reformulation: checked vertices are
revealed one per step, and a non-seed vertex becomes infected as soon as it
has at least r neighbors among the checked set Z(t) (inclusive of the
vertex checked at step t).  The process stops at the first step T with
A(T) = Z(T), equivalently |A(T)| = T, and A(T) is the final infected set.

Both produce the same final set; the exploration additionally yields the
step-indexed trace that the martingale diagnostics consume.
"""

from __future__ import annotations

import csv
from dataclasses import dataclass

import numpy as np
from numba import njit

from .graphs import Graph, edge_pairs, graph_from_pairs
from .rng import derive_seed

SELECTION_POLICIES = ("lowest-index", "fifo-by-infection-time", "seeded-random")
_POLICY_CODES = {name: i for i, name in enumerate(SELECTION_POLICIES)}


@dataclass(frozen=True)
class SelectionRule:
    """How the next checked vertex is drawn from the infected-but-unchecked
    pool.  Any policy yields the same final set; only the trace differs.
    """

    policy: str = "lowest-index"
    seed: int = 0

    def __post_init__(self):
        if self.policy not in _POLICY_CODES:
            raise ValueError(
                f"unknown policy {self.policy!r}; expected one of {SELECTION_POLICIES}"
            )

    @property
    def code(self) -> int:
        return _POLICY_CODES[self.policy]


@dataclass(frozen=True)
class ProcessParams:
    """One percolation instance: a graph, threshold r >= 2, and seed set A(0)."""

    graph: Graph
    r: int
    initially_infected: np.ndarray

    def __post_init__(self):
        if not isinstance(self.r, (int, np.integer)) or self.r < 2:
            raise ValueError(f"infection threshold must be an integer >= 2, got {self.r!r}")
        seeds = np.unique(np.asarray(self.initially_infected, dtype=np.int32))
        if seeds.size and (seeds[0] < 1 or seeds[-1] > self.graph.n):
            raise ValueError("initially infected vertices out of range 1..n")
        object.__setattr__(self, "initially_infected", seeds)

    @property
    def a(self) -> int:
        return int(self.initially_infected.size)


@dataclass(frozen=True)
class ExplorationTrace:
    """Step-indexed record of one exploration run.

    ``infected_size[t]`` is |A(t)| for t = 0..last_step, ``per_step_new[t]``
    the number of indicator flips at step t, ``check_order[t]`` the vertex
    u_t checked at step t (entry 0 unused), and ``infection_step[v]`` the
    step at which v became infected (0 for seeds, -1 for never).  When the
    run was cut off by ``max_steps`` before stopping, ``stopping_time`` is
    None and ``truncated`` is True.
    """

    n: int
    a: int
    r: int
    infected_size: np.ndarray
    per_step_new: np.ndarray
    check_order: np.ndarray
    infection_step: np.ndarray
    stopping_time: int | None
    final_set: np.ndarray
    truncated: bool = False

    @property
    def last_step(self) -> int:
        return int(self.infected_size.size - 1)

    @property
    def checked_size(self) -> np.ndarray:
        return np.arange(self.infected_size.size, dtype=np.int64)

    def checked_at(self, t: int) -> np.ndarray:
        """Z(t): the first t checked vertices, sorted."""
        if t > self.last_step:
            raise ValueError(f"step {t} beyond traced range {self.last_step}")
        return np.sort(self.check_order[1 : t + 1])

    def infected_at(self, t: int) -> np.ndarray:
        """A(t) as a sorted vertex array."""
        if t > self.last_step and not (self.stopping_time is not None and t >= self.stopping_time):
            raise ValueError(f"step {t} beyond traced range {self.last_step}")
        step = self.infection_step
        return np.flatnonzero((step >= 0) & (step <= t)).astype(np.int32)


@njit(cache=True)
def _heap_push(heap, size, val):
    i = size
    heap[i] = val
    while i > 0:
        parent = (i - 1) >> 1
        if heap[parent] <= heap[i]:
            break
        heap[parent], heap[i] = heap[i], heap[parent]
        i = parent


@njit(cache=True)
def _heap_pop(heap, size):
    top = heap[0]
    last = size - 1
    heap[0] = heap[last]
    i = 0
    while True:
        left = 2 * i + 1
        if left >= last:
            break
        small = left
        right = left + 1
        if right < last and heap[right] < heap[left]:
            small = right
        if heap[i] <= heap[small]:
            break
        heap[i], heap[small] = heap[small], heap[i]
        i = small
    return top


@njit(cache=True)
def _splitmix64(x):
    z = x + np.uint64(0x9E3779B97F4A7C15)
    z = (z ^ (z >> np.uint64(30))) * np.uint64(0xBF58476D1CE4E5B9)
    z = (z ^ (z >> np.uint64(27))) * np.uint64(0x94D049BB133111EB)
    return z ^ (z >> np.uint64(31))


@njit(cache=True)
def _explore_kernel(indptr, indices, n, r, seeds, rule, rule_seed, max_steps):
    # Incremental indicator maintenance: count[w] tracks |adj(w) & Z(t)|;
    # a non-seed w flips exactly when its count first reaches r.
    count = np.zeros(n + 1, dtype=np.int32)
    infected = np.zeros(n + 1, dtype=np.bool_)
    infection_step = np.full(n + 1, -1, dtype=np.int64)
    pend = np.empty(max(n, 1), dtype=np.int32)
    pend_size = 0
    head = 0
    a = seeds.size
    for k in range(a):
        s = seeds[k]
        infected[s] = True
        infection_step[s] = 0
        pend[pend_size] = s
        pend_size += 1
    # seeds arrive ascending, which is already a valid min-heap
    state = _splitmix64(rule_seed) | np.uint64(1)
    infected_size = np.empty(max_steps + 1, dtype=np.int64)
    per_step_new = np.zeros(max_steps + 1, dtype=np.int64)
    check_order = np.zeros(max_steps + 1, dtype=np.int32)
    infected_size[0] = a
    cur = a
    t = 0
    T = np.int64(-1)
    if a == 0:
        T = 0
    while T < 0 and t < max_steps and pend_size - head > 0:
        t += 1
        if rule == 0:
            u = _heap_pop(pend, pend_size)
            pend_size -= 1
        elif rule == 1:
            u = pend[head]
            head += 1
        else:
            state ^= state >> np.uint64(12)
            state ^= state << np.uint64(25)
            state ^= state >> np.uint64(27)
            k = np.int64((state * np.uint64(2685821657736338717)) % np.uint64(pend_size))
            u = pend[k]
            pend[k] = pend[pend_size - 1]
            pend_size -= 1
        check_order[t] = u
        new = np.int64(0)
        for j in range(indptr[u], indptr[u + 1]):
            w = indices[j]
            c = count[w] + 1
            count[w] = c
            if c == r and not infected[w]:
                infected[w] = True
                infection_step[w] = t
                if rule == 0:
                    _heap_push(pend, pend_size, w)
                    pend_size += 1
                else:
                    pend[pend_size] = w
                    pend_size += 1
                new += 1
        per_step_new[t] = new
        cur += new
        infected_size[t] = cur
        if cur == t:
            T = t
    return (
        infected_size[: t + 1],
        per_step_new[: t + 1],
        check_order[: t + 1],
        infection_step,
        T,
    )


def run_exploration(
    params: ProcessParams,
    rule: SelectionRule = SelectionRule(),
    max_steps: int | None = None,
) -> ExplorationTrace:
    """Run the sequential exploration and return its full trace.

    ``max_steps`` cuts the run off after that many checked vertices; the
    returned trace is then marked truncated and has no stopping time (the
    process is known to survive past ``max_steps``).
    """
    g = params.graph
    cap = g.n if max_steps is None else min(int(max_steps), g.n)
    infected_size, per_step_new, check_order, infection_step, T = _explore_kernel(
        g.indptr,
        g.indices,
        g.n,
        params.r,
        params.initially_infected,
        rule.code,
        np.uint64(rule.seed & ((1 << 64) - 1)),
        cap,
    )
    stopped = int(T) >= 0
    final = np.flatnonzero(infection_step >= 0).astype(np.int32)
    return ExplorationTrace(
        n=g.n,
        a=params.a,
        r=int(params.r),
        infected_size=infected_size,
        per_step_new=per_step_new,
        check_order=check_order,
        infection_step=infection_step,
        stopping_time=int(T) if stopped else None,
        final_set=final,
        truncated=not stopped,
    )


def _gather_neighbors(graph: Graph, vs: np.ndarray) -> np.ndarray:
    starts = graph.indptr[vs]
    lens = graph.indptr[vs + 1] - starts
    total = int(lens.sum())
    if total == 0:
        return np.empty(0, dtype=np.int32)
    offsets = np.repeat(np.cumsum(lens) - lens, lens)
    slots = np.arange(total, dtype=np.int64) - offsets + np.repeat(starts, lens)
    return graph.indices[slots]


def run_synchronous(params: ProcessParams) -> tuple[np.ndarray, list[int]]:
    """Round-parallel bootstrap percolation.

    Returns the final infected set (sorted) and the per-round sizes
    [|A(0)|, |A after round 1|, ...], stopping at the first round that
    infects nothing new.  Infection is permanent, so the process is
    monotone by construction.
    """
    g = params.graph
    infected = np.zeros(g.n + 1, dtype=bool)
    seeds = params.initially_infected
    infected[seeds] = True
    counts = np.zeros(g.n + 1, dtype=np.int64)
    sizes = [int(seeds.size)]
    frontier = seeds
    while frontier.size:
        nbrs = _gather_neighbors(g, frontier)
        if nbrs.size:
            counts += np.bincount(nbrs, minlength=g.n + 1)
        newly = np.flatnonzero((counts >= params.r) & ~infected)
        if newly.size == 0:
            break
        infected[newly] = True
        sizes.append(sizes[-1] + int(newly.size))
        frontier = newly.astype(np.int32)
    final = np.flatnonzero(infected).astype(np.int32)
    return final, sizes


@dataclass(frozen=True)
class RelabeledInstance:
    """An isomorphic instance whose seed set is {1..a}, plus the relabeling.

    ``perm[old] = new`` and ``inverse[new] = old`` (entry 0 unused).
    """

    params: ProcessParams
    perm: np.ndarray
    inverse: np.ndarray

    def map_back(self, vertices: np.ndarray) -> np.ndarray:
        return np.sort(self.inverse[np.asarray(vertices, dtype=np.int64)]).astype(np.int32)


def relabel_for_exploration(params: ProcessParams) -> RelabeledInstance:
    """Permute labels so the initially infected vertices become 1..a.

    Seeds map to 1..a in increasing order; the remaining vertices map to
    a+1..n in increasing order.  The final set of the relabeled instance,
    mapped back, equals the final set of the original.
    """
    g = params.graph
    n = g.n
    seeds = params.initially_infected
    others = np.setdiff1d(np.arange(1, n + 1, dtype=np.int32), seeds, assume_unique=True)
    perm = np.zeros(n + 1, dtype=np.int32)
    perm[seeds] = np.arange(1, seeds.size + 1, dtype=np.int32)
    perm[others] = np.arange(seeds.size + 1, n + 1, dtype=np.int32)
    inverse = np.zeros(n + 1, dtype=np.int32)
    inverse[perm[1:]] = np.arange(1, n + 1, dtype=np.int32)
    u, v = edge_pairs(g)
    new_graph = graph_from_pairs(n, perm[u], perm[v])
    new_params = ProcessParams(
        new_graph, params.r, np.arange(1, seeds.size + 1, dtype=np.int32)
    )
    return RelabeledInstance(params=new_params, perm=perm, inverse=inverse)


def random_seed_set(n: int, a: int, seed: int) -> np.ndarray:
    """A(0) drawn uniformly among the a-subsets of 1..n, sorted."""
    if not 0 <= a <= n:
        raise ValueError(f"seed-set size {a} out of range 0..{n}")
    rng = np.random.default_rng(derive_seed(seed, "seed-set"))
    picks = rng.choice(n, size=a, replace=False).astype(np.int32) + 1
    return np.sort(picks)


def export_trace_csv(trace: ExplorationTrace, path) -> None:
    """Trace as CSV with columns t, checked_size, infected_size, new_infections."""
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["t", "checked_size", "infected_size", "new_infections"])
        for t in range(trace.last_step + 1):
            writer.writerow(
                [t, t, int(trace.infected_size[t]), int(trace.per_step_new[t])]
            )
