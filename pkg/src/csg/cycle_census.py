"""Triangle and short-cycle census with per-edge difficulty scores.

A cycle is balanced when it carries an even number of negative edges.
Edge difficulty only looks at triangles: the fraction of triangles through
an edge that are balanced is its local balance degree, and the difficulty
is one minus that.  Longer cycles (up to 6 nodes) are counted for the
census but never feed the scores.
"""

from __future__ import annotations

import csv
import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Iterator, Sequence

from .signed_graph import SignedEdge, SignedGraph, common_neighbors

MAX_CYCLE_LENGTH = 6


@dataclass(frozen=True)
class Triangle:
    nodes: tuple[int, int, int]
    signs: tuple[int, int, int]  # (s_ij, s_jk, s_ik)

    @property
    def balanced(self) -> bool:
        a, b, c = self.signs
        return a * b * c > 0

    def edges(self) -> tuple[tuple[int, int], tuple[int, int], tuple[int, int]]:
        i, j, k = self.nodes
        return (i, j), (j, k), (i, k)


@dataclass(frozen=True)
class CycleCount:
    total: int = 0
    balanced: int = 0
    unbalanced: int = 0

    def __add__(self, other: "CycleCount") -> "CycleCount":
        return CycleCount(self.total + other.total, self.balanced + other.balanced,
                          self.unbalanced + other.unbalanced)


@dataclass(frozen=True)
class CycleCensus:
    counts: dict  # length -> CycleCount

    def __getitem__(self, n: int) -> CycleCount:
        return self.counts[n]

    def to_dict(self) -> dict:
        return {str(n): {"total": c.total, "balanced": c.balanced, "unbalanced": c.unbalanced}
                for n, c in sorted(self.counts.items())}


@dataclass(frozen=True)
class EdgeDifficulty:
    edge: SignedEdge
    balanced_triangles: int
    total_triangles: int

    @property
    def d3(self) -> Fraction:
        if self.total_triangles == 0:
            return Fraction(1)
        return Fraction(self.balanced_triangles, self.total_triangles)

    @property
    def score(self) -> Fraction:
        return 1 - self.d3


def enumerate_triangles(g: SignedGraph) -> Iterator[Triangle]:
    """Yield every triangle once, in ``(i, j, k)`` order with ``i < j < k``.

    Each triangle is found at its smallest edge ``(i, j)`` by merging the
    two sorted neighbour lists and keeping common neighbours above ``j``.
    """
    for e in g.edges:
        i, j = e.u, e.v
        for k, s_ik, s_jk in common_neighbors(g, i, j):
            if k > j:
                yield Triangle((i, j, k), (e.sign, s_jk, s_ik))


def edge_difficulties(g: SignedGraph) -> dict[tuple[int, int], EdgeDifficulty]:
    """Triangle counts for every edge, accumulated in one pass over triangles."""
    total = {e.key: 0 for e in g.edges}
    bal = dict.fromkeys(total, 0)
    for tri in enumerate_triangles(g):
        b = tri.balanced
        for key in tri.edges():
            total[key] += 1
            if b:
                bal[key] += 1
    return {e.key: EdgeDifficulty(e, bal[e.key], total[e.key]) for e in g.edges}


def local_balance_degree(g: SignedGraph, e) -> Fraction:
    """Fraction of triangles through ``e`` that are balanced (1 if none)."""
    u, v = (e.u, e.v) if isinstance(e, SignedEdge) else (min(e[:2]), max(e[:2]))
    if not g.has_edge(u, v):
        raise KeyError(f"edge ({u}, {v}) not in graph")
    s = g.sign(u, v)
    tot = bal = 0
    for _, s_uw, s_vw in common_neighbors(g, u, v):
        tot += 1
        bal += s * s_uw * s_vw > 0
    return Fraction(1) if tot == 0 else Fraction(bal, tot)


def difficulty_scores(g: SignedGraph) -> dict[tuple[int, int], Fraction]:
    """Map ``(u, v) -> 1 - D3`` for every edge."""
    return {k: d.score for k, d in edge_difficulties(g).items()}


# ----------------------------------------------------------------------
# simple cycles up to length 6


def _cycles_from(g: SignedGraph, start: int, max_n: int, counts: list[list[int]]) -> None:
    # Paths only visit nodes above ``start`` so the start is the cycle's
    # minimum; requiring path[1] < path[-1] keeps one of the two directions.
    nbrs, sgns = g.neighbors, g.neighbor_signs
    path = [start]
    on_path = {start}

    def dfs(node: int, negs: int) -> None:
        depth = len(path)
        for w, s in zip(nbrs(node), sgns(node)):
            if w == start:
                if depth >= 3 and path[1] < node:
                    parity = (negs + (s < 0)) & 1
                    counts[depth][parity] += 1
                continue
            if w < start or w in on_path or depth == max_n:
                continue
            path.append(w)
            on_path.add(w)
            dfs(w, negs + (s < 0))
            path.pop()
            on_path.discard(w)

    dfs(start, 0)


def _census_partition(args) -> list[list[int]]:
    g, starts, max_n = args
    counts = [[0, 0] for _ in range(max_n + 1)]
    for s in starts:
        _cycles_from(g, s, max_n, counts)
    return counts


def census(g: SignedGraph, max_n: int = MAX_CYCLE_LENGTH, workers: int = 1) -> CycleCensus:
    """Count simple cycles of length 3..``max_n`` split by balance.

    With ``workers > 1`` start nodes are dealt round-robin to processes
    and the per-partition tallies summed, which gives the same result as a
    serial run.
    """
    if not 3 <= max_n <= MAX_CYCLE_LENGTH:
        raise ValueError(f"max_n must be in [3, {MAX_CYCLE_LENGTH}], got {max_n}")
    if workers <= 1:
        parts = [_census_partition((g, range(g.n), max_n))]
    else:
        jobs = [(g, range(w, g.n, workers), max_n) for w in range(workers)]
        with ProcessPoolExecutor(workers) as pool:
            parts = list(pool.map(_census_partition, jobs))
    counts = {}
    for n in range(3, max_n + 1):
        b = sum(p[n][0] for p in parts)
        u = sum(p[n][1] for p in parts)
        counts[n] = CycleCount(b + u, b, u)
    return CycleCensus(counts)


@dataclass(frozen=True)
class BalanceRatio:
    balanced: int
    unbalanced: int

    @property
    def ratio(self) -> float:
        return math.inf if self.unbalanced == 0 else self.balanced / self.unbalanced

    def __str__(self) -> str:
        r = "inf" if self.unbalanced == 0 else f"{self.ratio:.1f}"
        return f"B={self.balanced} U={self.unbalanced} R={r}"

    def __iter__(self):
        return iter((self.balanced, self.unbalanced, self.ratio))


def balance_ratio_report(g: SignedGraph, subset: Iterable[SignedEdge]) -> BalanceRatio:
    """Balanced/unbalanced triangle counts on the subgraph spanned by ``subset``."""
    sub = g.subgraph(subset)
    b = u = 0
    for tri in enumerate_triangles(sub):
        if tri.balanced:
            b += 1
        else:
            u += 1
    return BalanceRatio(b, u)


# ----------------------------------------------------------------------
# output


def write_scores_csv(g: SignedGraph, path) -> None:
    diffs = edge_difficulties(g)
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["u", "v", "sign", "total_triangles", "balanced_triangles", "score"])
        for key in sorted(diffs):
            d = diffs[key]
            w.writerow([d.edge.u, d.edge.v, d.edge.sign, d.total_triangles,
                        d.balanced_triangles, format_score(d.score)])


def format_score(x: Fraction) -> str:
    return repr(float(x))


def read_scores_csv(path) -> dict[tuple[int, int], Fraction]:
    """Load a scores file back; scores are rebuilt exactly from the counts."""
    out = {}
    with open(path, newline="") as fh:
        for row in csv.DictReader(fh):
            tot, bal = int(row["total_triangles"]), int(row["balanced_triangles"])
            out[(int(row["u"]), int(row["v"]))] = Fraction(0) if tot == 0 else 1 - Fraction(bal, tot)
    return out
