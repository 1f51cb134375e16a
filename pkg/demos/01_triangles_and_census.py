"""
Triangles, balance and the cycle census
=======================================

Build a small planted-partition signed graph, look at one edge's
triangles, then count balanced and unbalanced cycles up to length 6.
"""

from csg.cycle_census import census, edge_difficulties, enumerate_triangles
from csg.evaluation import synth_benchmark
from csg.signed_graph import SignedGraph, common_neighbors, edge_counts

# a hand-made graph: edge (0, 1) sits on three triangles, one of them unbalanced
g = SignedGraph(5, [(0, 1, 1), (0, 2, 1), (1, 2, 1), (0, 3, -1), (1, 3, -1), (0, 4, 1), (1, 4, -1)])
print("common neighbours of 0 and 1 (w, s_0w, s_1w):", common_neighbors(g, 0, 1))
for tri in enumerate_triangles(g):
    print(tri.nodes, tri.signs, "balanced" if tri.balanced else "unbalanced")

d = edge_difficulties(g)[(0, 1)]
print(f"edge (0,1): {d.balanced_triangles}/{d.total_triangles} balanced, difficulty {d.score}")

# a bigger graph with 10% sign noise
big = synth_benchmark(n=300, noise=0.1, seed=0)
total, pos, neg = edge_counts(big)
print(f"\nsynthetic graph: {big.n} nodes, {total} edges ({pos} +, {neg} -)")

# census with two worker processes; counts per cycle length
for n, c in sorted(census(big, 5, workers=2).counts.items()):
    share = c.balanced / c.total if c.total else float("nan")
    print(f"n={n}: {c.total:7d} cycles, {share:.1%} balanced")
