"""Sampling binomial random graphs.

G(n, p) puts an edge on each of the C(n, 2) vertex pairs independently
with probability p.  The sampler skips between edges geometrically, so the
cost scales with the number of edges actually present, and every graph is
reproducible from its (n, p, seed) triple.
"""

import numpy as np

from bootperc import GraphParams, degree_into, sample_gnp, write_edge_list

n, p, seed = 50_000, 2e-4, 2024
graph = sample_gnp(GraphParams(n, p, seed))

expected_edges = n * (n - 1) / 2 * p
print(f"G(n={n}, p={p}) with seed {seed}")
print(f"  edges: {graph.edge_count} (expected {expected_edges:.0f})")

degrees = graph.degrees()
print(f"  degree: mean {degrees.mean():.2f} (expected {(n - 1) * p:.2f}), "
      f"max {degrees.max()}, isolated {np.sum(degrees == 0)}")

# same triple, same graph -- bit for bit
again = sample_gnp(GraphParams(n, p, seed))
print(f"  resampled identical: {np.array_equal(graph.indices, again.indices)}")

# neighbor queries work against arbitrary vertex sets
v = int(np.argmax(degrees)) + 1
members = set(range(1, 1001))
print(f"  vertex {v} has degree {graph.degree(v)}, "
      f"{degree_into(graph, v, members)} neighbors among the first 1000 labels")

write_edge_list(graph, "/tmp/gnp_edges.txt")
print("  edge list written to /tmp/gnp_edges.txt (one 'u v' line per edge, 1-based)")
