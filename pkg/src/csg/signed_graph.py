"""Undirected signed graphs with sorted, sign-labelled adjacency.

Raw datasets (Bitcoin ratings, Wikipedia votes, Slashdot/Epinions tags)
are directed and sometimes weighted.  ``ingest`` reduces them to a simple
undirected signed graph and keeps a report of what it dropped, so edge
counts can be audited against published statistics.
"""

from __future__ import annotations

import gzip
import re
from dataclasses import dataclass
from pathlib import Path
from typing import Iterable, Sequence

import numpy as np


class IngestError(ValueError):
    """A record could not be parsed."""

    def __init__(self, lineno: int, line: str, reason: str):
        super().__init__(f"line {lineno}: {reason}: {line.strip()!r}")
        self.lineno = lineno


class EmptyGraphError(ValueError):
    """Ingestion produced no usable edges."""


@dataclass(frozen=True, order=True)
class SignedEdge:
    u: int
    v: int
    sign: int

    def __post_init__(self):
        if self.u >= self.v:
            raise ValueError(f"edge ({self.u}, {self.v}) is not canonical (need u < v)")
        if self.sign not in (1, -1):
            raise ValueError(f"sign must be +1 or -1, got {self.sign}")

    @property
    def key(self) -> tuple[int, int]:
        return (self.u, self.v)


@dataclass
class IngestReport:
    edges_in: int = 0
    dropped_zero_weight: int = 0
    dropped_self_loops: int = 0
    duplicates_merged: int = 0
    conflicts: int = 0
    nodes: int = 0
    edges: int = 0
    positive: int = 0
    negative: int = 0

    def to_text(self) -> str:
        return "".join(f"{k}={v}\n" for k, v in vars(self).items())

    @classmethod
    def from_text(cls, text: str) -> "IngestReport":
        values = {}
        for line in text.splitlines():
            if line.strip():
                k, v = line.split("=", 1)
                values[k.strip()] = int(v)
        return cls(**values)


class SignedGraph:
    """Immutable simple undirected signed graph.

    Adjacency is kept twice: as CSR arrays (``indptr``, ``indices``,
    ``signs``) for vectorised work, and as per-node Python lists for the
    two-pointer merges used by triangle counting.  Both are sorted by
    neighbour id.
    """

    __slots__ = ("n", "indptr", "indices", "signs", "_edges", "_nbrs", "_nsigns", "_sign_of")

    def __init__(self, n: int, edges: Iterable[tuple[int, int, int]]):
        rows = sorted({(min(u, v), max(u, v)): s for u, v, s in edges}.items())
        for (u, v), s in rows:
            if u == v:
                raise ValueError(f"self-loop at node {u}")
            if not (0 <= u and v < n):
                raise ValueError(f"edge ({u}, {v}) outside node range [0, {n})")
            if s not in (1, -1):
                raise ValueError(f"invalid sign {s} on edge ({u}, {v})")
        self.n = int(n)
        self._edges = tuple(SignedEdge(u, v, s) for (u, v), s in rows)
        self._sign_of = {(e.u, e.v): e.sign for e in self._edges}

        nbrs: list[list[int]] = [[] for _ in range(n)]
        nsigns: list[list[int]] = [[] for _ in range(n)]
        for e in self._edges:
            nbrs[e.u].append(e.v)
            nsigns[e.u].append(e.sign)
            nbrs[e.v].append(e.u)
            nsigns[e.v].append(e.sign)
        for i in range(n):
            if nbrs[i]:
                order = sorted(range(len(nbrs[i])), key=nbrs[i].__getitem__)
                nbrs[i] = [nbrs[i][k] for k in order]
                nsigns[i] = [nsigns[i][k] for k in order]
        self._nbrs = tuple(tuple(x) for x in nbrs)
        self._nsigns = tuple(tuple(x) for x in nsigns)

        deg = np.fromiter((len(x) for x in nbrs), dtype=np.int64, count=n)
        self.indptr = np.concatenate([[0], np.cumsum(deg)]).astype(np.int64)
        self.indices = np.fromiter((j for x in nbrs for j in x), dtype=np.int64, count=int(deg.sum()))
        self.signs = np.fromiter((s for x in nsigns for s in x), dtype=np.int8, count=int(deg.sum()))
        for arr in (self.indptr, self.indices, self.signs):
            arr.setflags(write=False)

    # ------------------------------------------------------------------
    @property
    def edges(self) -> tuple[SignedEdge, ...]:
        return self._edges

    @property
    def m(self) -> int:
        return len(self._edges)

    def neighbors(self, u: int) -> tuple[int, ...]:
        return self._nbrs[u]

    def neighbor_signs(self, u: int) -> tuple[int, ...]:
        return self._nsigns[u]

    def adjacency(self, u: int) -> list[tuple[int, int]]:
        return list(zip(self._nbrs[u], self._nsigns[u]))

    def positive_neighbors(self, u: int) -> list[int]:
        return [v for v, s in zip(self._nbrs[u], self._nsigns[u]) if s > 0]

    def negative_neighbors(self, u: int) -> list[int]:
        return [v for v, s in zip(self._nbrs[u], self._nsigns[u]) if s < 0]

    def degree(self, u: int) -> int:
        return len(self._nbrs[u])

    def sign(self, u: int, v: int) -> int:
        """Sign of edge {u, v}, or 0 if absent."""
        if u > v:
            u, v = v, u
        return self._sign_of.get((u, v), 0)

    def has_edge(self, u: int, v: int) -> bool:
        return self.sign(u, v) != 0

    def edge_array(self) -> np.ndarray:
        """``(m, 3)`` int array of canonical ``u, v, sign`` rows."""
        return np.array([(e.u, e.v, e.sign) for e in self._edges], dtype=np.int64).reshape(-1, 3)

    def subgraph(self, edges: Iterable[SignedEdge]) -> "SignedGraph":
        """Graph on the same node set restricted to ``edges``."""
        rows = []
        for e in edges:
            if self.sign(e.u, e.v) != e.sign:
                raise KeyError(f"edge {e} not in graph")
            rows.append((e.u, e.v, e.sign))
        return SignedGraph(self.n, rows)

    def relabel(self, perm: Sequence[int]) -> "SignedGraph":
        """Graph with node ``i`` renamed to ``perm[i]``."""
        return SignedGraph(self.n, [(perm[e.u], perm[e.v], e.sign) for e in self._edges])

    def flip_signs(self) -> "SignedGraph":
        return SignedGraph(self.n, [(e.u, e.v, -e.sign) for e in self._edges])

    def __eq__(self, other):
        if not isinstance(other, SignedGraph):
            return NotImplemented
        return self.n == other.n and self._edges == other._edges

    def __hash__(self):
        return hash((self.n, self._edges))

    def __repr__(self):
        t, p, q = edge_counts(self)
        return f"SignedGraph(n={self.n}, m={t}, pos={p}, neg={q})"


# ----------------------------------------------------------------------
# ingestion

_SPLIT = re.compile(r"[,\s]+")


def parse_records(lines: Iterable[str]) -> list[tuple[int, int, float]]:
    """Parse ``src dst weight`` lines; extra trailing columns are ignored.

    Whitespace or commas separate fields; blank lines and ``#`` comments
    are skipped.
    """
    records = []
    for lineno, line in enumerate(lines, start=1):
        body = line.strip()
        if not body or body.startswith("#"):
            continue
        fields = [f for f in _SPLIT.split(body) if f]
        if len(fields) < 3:
            raise IngestError(lineno, line, "expected at least 3 fields (src dst weight)")
        try:
            src, dst = int(fields[0]), int(fields[1])
            weight = float(fields[2])
        except ValueError:
            raise IngestError(lineno, line, "non-numeric field") from None
        if src < 0 or dst < 0:
            raise IngestError(lineno, line, "negative node id")
        if not np.isfinite(weight):
            raise IngestError(lineno, line, "non-finite weight")
        records.append((src, dst, weight))
    return records


def ingest(records: Sequence[tuple[int, int, float]]) -> tuple[SignedGraph, IngestReport, list[int]]:
    """Build a signed graph from directed, possibly weighted records.

    Returns ``(graph, report, id_map)`` where ``id_map[new_id]`` is the raw
    id.  Signs are ``signum(weight)``; zero weights and self-loops are
    dropped.  Every record touching the same unordered pair must agree in
    sign, otherwise the pair is dropped and counted as a conflict.
    """
    if len(records) == 0:
        raise EmptyGraphError("no records to ingest")
    report = IngestReport(edges_in=len(records))
    pair_sign: dict[tuple[int, int], int] = {}
    conflicted: set[tuple[int, int]] = set()
    first_seen: dict[int, int] = {}
    order = 0
    for src, dst, w in records:
        for node in (src, dst):
            if node not in first_seen:
                first_seen[node] = order
                order += 1
        if w == 0:
            report.dropped_zero_weight += 1
            continue
        if src == dst:
            report.dropped_self_loops += 1
            continue
        s = 1 if w > 0 else -1
        key = (src, dst) if src < dst else (dst, src)
        prev = pair_sign.get(key)
        if prev is None:
            pair_sign[key] = s
        else:
            report.duplicates_merged += 1
            if prev != s:
                conflicted.add(key)
    for key in conflicted:
        del pair_sign[key]
    report.conflicts = len(conflicted)
    if not pair_sign:
        raise EmptyGraphError("no usable edges after dropping zero weights, self-loops and conflicts")

    used = {x for key in pair_sign for x in key}
    id_map = sorted(used, key=first_seen.__getitem__)
    new_id = {raw: i for i, raw in enumerate(id_map)}
    g = SignedGraph(len(id_map), [(new_id[a], new_id[b], s) for (a, b), s in pair_sign.items()])
    report.nodes = g.n
    report.edges, report.positive, report.negative = edge_counts(g)
    return g, report, id_map


def ingest_file(path) -> tuple[SignedGraph, IngestReport, list[int]]:
    """Ingest a text file; ``.gz`` files are decompressed on the fly."""
    opener = gzip.open if str(path).endswith(".gz") else open
    with opener(path, "rt") as fh:
        return ingest(parse_records(fh))


def edge_counts(g: SignedGraph) -> tuple[int, int, int]:
    """``(total, positive, negative)`` edge counts."""
    pos = sum(1 for e in g.edges if e.sign > 0)
    return g.m, pos, g.m - pos


def common_neighbors(g: SignedGraph, u: int, v: int) -> list[tuple[int, int, int]]:
    """Common neighbours of ``u`` and ``v`` as ``(w, sign(u,w), sign(v,w))``.

    Two-pointer merge over the sorted neighbour lists, linear in their
    combined length.
    """
    if u == v:
        raise ValueError("common_neighbors needs two distinct nodes")
    a, sa = g.neighbors(u), g.neighbor_signs(u)
    b, sb = g.neighbors(v), g.neighbor_signs(v)
    i = j = 0
    out = []
    while i < len(a) and j < len(b):
        x, y = a[i], b[j]
        if x == y:
            out.append((x, sa[i], sb[j]))
            i += 1
            j += 1
        elif x < y:
            i += 1
        else:
            j += 1
    return out


# ----------------------------------------------------------------------
# canonical text format


def to_edge_list_text(g: SignedGraph) -> str:
    return "".join(f"{e.u} {e.v} {e.sign}\n" for e in g.edges)


def write_graph(g: SignedGraph, path, id_map: Sequence[int] | None = None,
                report: IngestReport | None = None) -> None:
    """Write the canonical edge list plus optional ``.idmap``/``.report`` siblings.

    The node count goes in a leading comment so trailing isolated nodes
    survive a round trip.
    """
    path = Path(path)
    path.write_text(f"# nodes {g.n}\n" + to_edge_list_text(g))
    if id_map is not None:
        path.with_name(path.name + ".idmap").write_text("".join(f"{i} {raw}\n" for i, raw in enumerate(id_map)))
    if report is not None:
        path.with_name(path.name + ".report").write_text(report.to_text())


def read_graph(path) -> SignedGraph:
    """Read a canonical edge list written by :func:`write_graph`."""
    n = None
    rows = []
    with open(path) as fh:
        for lineno, line in enumerate(fh, start=1):
            body = line.strip()
            if not body:
                continue
            if body.startswith("#"):
                parts = body[1:].split()
                if len(parts) == 2 and parts[0] == "nodes":
                    n = int(parts[1])
                continue
            fields = body.split()
            if len(fields) != 3:
                raise IngestError(lineno, line, "expected 'u v sign'")
            try:
                u, v, s = (int(f) for f in fields)
            except ValueError:
                raise IngestError(lineno, line, "non-integer field") from None
            if s not in (1, -1) or u == v or min(u, v) < 0:
                raise IngestError(lineno, line, "not a canonical signed edge")
            rows.append((u, v, s))
    if n is None:
        n = 1 + max((max(u, v) for u, v, _ in rows), default=-1)
    return SignedGraph(n, rows)
