"""Binomial random graphs G(n, p) with reproducible sampling.

Vertices are labeled 1..n throughout (label 0 is unused padding), matching
the process notation used by the rest of the package.  Adjacency is stored
in CSR form with per-vertex sorted neighbor arrays, which keeps membership
queries binary-searchable and the percolation engines cache-friendly.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
from numba import njit

from .rng import substream

_BATCH_CAP = 1 << 24  # bound per-draw memory while skip-sampling


@dataclass(frozen=True)
class GraphParams:
    """Sampling parameters (n, p, seed) for one G(n, p) instance.

    Identical parameters always reproduce the identical edge set.
    """

    n: int
    p: float
    seed: int

    def __post_init__(self):
        if not isinstance(self.n, (int, np.integer)) or self.n < 1:
            raise ValueError(f"vertex count must be a positive integer, got {self.n!r}")
        if not 0.0 <= self.p <= 1.0:
            raise ValueError(f"edge probability must lie in [0, 1], got {self.p!r}")


@dataclass(frozen=True)
class Graph:
    """Undirected simple graph on vertices 1..n in CSR layout.

    ``indices[indptr[v]:indptr[v+1]]`` is the sorted neighbor array of v.
    Instances are immutable once built and safe to share across workers;
    the underlying arrays must not be written to.
    """

    n: int
    indptr: np.ndarray
    indices: np.ndarray
    edge_count: int
    params: GraphParams | None = field(default=None, compare=False)

    def neighbors(self, v: int) -> np.ndarray:
        if not 1 <= v <= self.n:
            raise ValueError(f"vertex {v} out of range 1..{self.n}")
        return self.indices[self.indptr[v] : self.indptr[v + 1]]

    def degree(self, v: int) -> int:
        if not 1 <= v <= self.n:
            raise ValueError(f"vertex {v} out of range 1..{self.n}")
        return int(self.indptr[v + 1] - self.indptr[v])

    def degrees(self) -> np.ndarray:
        return np.diff(self.indptr)[1:]


@njit(cache=True)
def _decode_pair_positions(pos):
    # Linear pair index k (0-based, ordered by larger endpoint) -> (u, v),
    # 1-based labels with u < v.  v is recovered from the triangular-number
    # inverse; the float sqrt is off by at most one, fixed up exactly.
    m = pos.size
    u = np.empty(m, dtype=np.int32)
    v = np.empty(m, dtype=np.int32)
    for i in range(m):
        k = pos[i]
        w = np.int64((1.0 + math.sqrt(1.0 + 8.0 * k)) * 0.5)
        while w * (w - 1) // 2 > k:
            w -= 1
        while (w + 1) * w // 2 <= k:
            w += 1
        u[i] = np.int32(k - w * (w - 1) // 2 + 1)
        v[i] = np.int32(w + 1)
    return u, v


@njit(cache=True)
def _fill_csr(indptr, src_a, dst_a, src_b, dst_b):
    # Counting-sort scatter of the two directed copies of each edge.
    # Callers arrange the two streams so every segment ends up sorted.
    cursor = indptr[:-1].copy()
    indices = np.empty(src_a.size + src_b.size, dtype=np.int32)
    for i in range(src_a.size):
        s = src_a[i]
        indices[cursor[s]] = dst_a[i]
        cursor[s] += 1
    for i in range(src_b.size):
        s = src_b[i]
        indices[cursor[s]] = dst_b[i]
        cursor[s] += 1
    return indices


def _indptr_from_degrees(n: int, u: np.ndarray, v: np.ndarray) -> np.ndarray:
    deg = np.bincount(u, minlength=n + 1) + np.bincount(v, minlength=n + 1)
    indptr = np.zeros(n + 2, dtype=np.int64)
    np.cumsum(deg, out=indptr[1:])
    return indptr


def graph_from_pairs(
    n: int, u: np.ndarray, v: np.ndarray, params: GraphParams | None = None
) -> Graph:
    """Build a Graph from arbitrary unordered pair arrays (no self-loops).

    Pairs may arrive in any order; segments are sorted via a lexicographic
    pre-sort, so this is the general (slower) construction path.
    """
    u = np.asarray(u, dtype=np.int32)
    v = np.asarray(v, dtype=np.int32)
    if u.size and (u.min() < 1 or v.min() < 1 or max(u.max(), v.max()) > n):
        raise ValueError("edge endpoint out of range")
    if np.any(u == v):
        raise ValueError("self-loops are not allowed")
    src = np.concatenate([u, v])
    dst = np.concatenate([v, u])
    order = np.lexsort((dst, src))
    src, dst = src[order], dst[order]
    if src.size and np.any((src[1:] == src[:-1]) & (dst[1:] == dst[:-1])):
        raise ValueError("duplicate edges are not allowed")
    indptr = _indptr_from_degrees(n, u, v)
    indices = dst.copy()  # already grouped by src and sorted within groups
    return Graph(n=n, indptr=indptr, indices=indices, edge_count=int(u.size), params=params)


def sample_gnp(params: GraphParams) -> Graph:
    """Sample G(n, p): each of the C(n, 2) vertex pairs is an edge
    independently with probability p.

    Uses geometric skip-sampling over the linearized pair index, so the
    cost is O(n + m) rather than C(n, 2) Bernoulli draws.  Deterministic
    given ``params.seed``: the edge stream comes from the dedicated
    (seed, "gnp-edges") substream.

    Parameters
    ----------
    params : GraphParams
        Vertex count, edge probability, and reproducibility seed.

    Returns
    -------
    Graph
        Immutable CSR adjacency with sorted neighbor arrays.
    """
    n, p = params.n, params.p
    total = n * (n - 1) // 2
    if p == 0.0 or total == 0:
        return Graph(
            n=n,
            indptr=np.zeros(n + 2, dtype=np.int64),
            indices=np.empty(0, dtype=np.int32),
            edge_count=0,
            params=params,
        )
    rng = substream(params.seed, "gnp-edges")
    mean = total * p
    batch = min(_BATCH_CAP, max(1024, int(mean + 6.0 * math.sqrt(mean) + 16.0)))
    chunks = []
    cursor = -1  # 0-based position of the last accepted pair
    while cursor < total:
        gaps = rng.geometric(p, size=batch).astype(np.int64)
        pos = np.cumsum(gaps)
        pos += cursor
        cursor = int(pos[-1])
        chunks.append(pos)
        batch = min(_BATCH_CAP, max(1024, int((total - cursor) * p + 64)))
    pos = np.concatenate(chunks) if len(chunks) > 1 else chunks[0]
    pos = pos[pos < total]
    u, v = _decode_pair_positions(pos)
    indptr = _indptr_from_degrees(n, u, v)
    # Scatter the v->u direction first: the pair stream is sorted by
    # (v, u), so each vertex sees its smaller neighbors in increasing
    # order first, then its larger neighbors in increasing order.
    indices = _fill_csr(indptr, v, u, u, v)
    return Graph(n=n, indptr=indptr, indices=indices, edge_count=int(u.size), params=params)


def _count_in_sorted(sorted_arr: np.ndarray, queries: np.ndarray) -> int:
    if sorted_arr.size == 0 or queries.size == 0:
        return 0
    pos = np.searchsorted(sorted_arr, queries)
    inside = pos < sorted_arr.size
    hits = np.zeros(queries.shape, dtype=bool)
    hits[inside] = sorted_arr[pos[inside]] == queries[inside]
    return int(np.count_nonzero(hits))


def degree_into(graph: Graph, v: int, members) -> int:
    """Number of neighbors of v inside the vertex set ``members``.

    Pure query; iterates the smaller of |adj(v)| and |members| and binary
    searches the other side.
    """
    nbrs = graph.neighbors(v)
    if isinstance(members, (set, frozenset)):
        if len(members) <= nbrs.size:
            arr = np.fromiter(members, dtype=np.int64, count=len(members))
            return _count_in_sorted(nbrs, arr)
        return int(sum(1 for w in nbrs.tolist() if w in members))
    arr = np.unique(np.asarray(members, dtype=np.int64))
    if arr.size <= nbrs.size:
        return _count_in_sorted(nbrs, arr)
    return _count_in_sorted(arr, nbrs.astype(np.int64))


def edge_pairs(graph: Graph) -> tuple[np.ndarray, np.ndarray]:
    """All edges as (u, v) arrays with u < v, in lexicographic order."""
    owner = np.repeat(
        np.arange(graph.n + 1, dtype=np.int32), np.diff(graph.indptr)
    )
    mask = graph.indices > owner
    return owner[mask], graph.indices[mask]


def write_edge_list(graph: Graph, path) -> None:
    """Write the graph as text lines "u v" with 1-based labels and u < v."""
    u, v = edge_pairs(graph)
    with open(path, "w") as fh:
        fh.write(f"# n={graph.n}\n")
        for a, b in zip(u.tolist(), v.tolist()):
            fh.write(f"{a} {b}\n")


def read_edge_list(path, n: int | None = None) -> Graph:
    """Read an edge-list file written by :func:`write_edge_list`.

    ``n`` may be omitted when the file carries the "# n=..." header or when
    the largest label equals the vertex count.
    """
    us, vs = [], []
    with open(path) as fh:
        for line in fh:
            line = line.strip()
            if not line:
                continue
            if line.startswith("#"):
                if n is None and "n=" in line:
                    n = int(line.split("n=")[1])
                continue
            a, b = line.split()
            us.append(int(a))
            vs.append(int(b))
    u = np.asarray(us, dtype=np.int32)
    v = np.asarray(vs, dtype=np.int32)
    if n is None:
        n = int(max(u.max(initial=0), v.max(initial=0)))
    return graph_from_pairs(n, u, v)


def validate_graph(graph: Graph) -> None:
    """Full-scan structural check: symmetry, sorted segments, no loops or
    duplicates, and consistent edge count.  Intended for tests (n <= 1e4).
    """
    n = graph.n
    indptr, indices = graph.indptr, graph.indices
    if indptr[0] != 0 or indptr[1] != 0 or indptr[-1] != indices.size:
        raise AssertionError("malformed indptr")
    seen = set()
    for v in range(1, n + 1):
        seg = indices[indptr[v] : indptr[v + 1]]
        if seg.size:
            if seg.min() < 1 or seg.max() > n:
                raise AssertionError(f"neighbor out of range at vertex {v}")
            if np.any(seg == v):
                raise AssertionError(f"self-loop at vertex {v}")
            if np.any(np.diff(seg) <= 0):
                raise AssertionError(f"segment of vertex {v} not strictly sorted")
        for w in seg.tolist():
            seen.add((min(v, w), max(v, w)))
            wseg = indices[indptr[w] : indptr[w + 1]]
            k = np.searchsorted(wseg, v)
            if k >= wseg.size or wseg[k] != v:
                raise AssertionError(f"asymmetric edge ({v}, {w})")
    if len(seen) != graph.edge_count:
        raise AssertionError("edge_count inconsistent with adjacency")
    if indices.size != 2 * graph.edge_count:
        raise AssertionError("directed slot count != 2 * edge_count")
