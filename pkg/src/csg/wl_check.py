"""Executable checks of why unbalanced cycles defeat two-channel message passing.

The argument runs: two nodes whose 2-hop signed ego-trees are isomorphic
get identical SGNN embeddings, and in an unbalanced cycle such a pair can
be joined by a negative edge.  The negative neighbour then sits at
distance zero, which breaks both adequacy conditions (negative neighbours
far, positive neighbours nearer than negative ones).

The fixtures are the unbalanced 3-, 4-, 5- and 6-cycles used for that
argument, plus an all-positive triangle as a control.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from .signed_graph import SignedGraph

MAX_EGO_DEPTH = 2


class EgoTreeDepthError(ValueError):
    """Requested ego-tree depth beyond the supported limit."""


# ----------------------------------------------------------------------
# reach sets


@dataclass(frozen=True)
class ReachSets:
    node: int
    balanced: tuple[frozenset, ...]  # balanced[l - 1] is B(l)
    unbalanced: tuple[frozenset, ...]

    def B(self, hop: int) -> frozenset:
        return self.balanced[hop - 1]

    def U(self, hop: int) -> frozenset:
        return self.unbalanced[hop - 1]


def reach_sets(g: SignedGraph, v: int, max_hop: int) -> ReachSets:
    """Nodes reachable from ``v`` by walks of each length, split by sign parity.

    ``B(1)`` and ``U(1)`` are the positive and negative neighbours; a
    positive step keeps the parity and a negative step flips it.  Walks
    may revisit nodes, so ``v`` itself can appear at hop 2.
    """
    if max_hop < 1:
        raise ValueError("max_hop must be >= 1")
    B = [frozenset(g.positive_neighbors(v))]
    U = [frozenset(g.negative_neighbors(v))]
    for _ in range(1, max_hop):
        nb, nu = set(), set()
        for k in B[-1]:
            nb.update(g.positive_neighbors(k))
            nu.update(g.negative_neighbors(k))
        for k in U[-1]:
            nu.update(g.positive_neighbors(k))
            nb.update(g.negative_neighbors(k))
        B.append(frozenset(nb))
        U.append(frozenset(nu))
    return ReachSets(v, tuple(B), tuple(U))


# ----------------------------------------------------------------------
# signed Weisfeiler-Lehman


@dataclass
class WlLabeling:
    """Label pairs per iteration; ``labels[0]`` holds the initial labels.

    ``table`` interns signatures to integer ids.  Share one table between
    runs when comparing different graphs.
    """

    labels: list[list[tuple[int, int]]]
    table: dict = field(default_factory=dict)

    def at(self, iteration: int) -> list[tuple[int, int]]:
        return self.labels[iteration]

    def multiset(self, iteration: int) -> list[tuple[int, int]]:
        return sorted(self.labels[iteration])

    def partition(self, iteration: int) -> frozenset:
        groups: dict = {}
        for i, lab in enumerate(self.labels[iteration]):
            groups.setdefault(lab, []).append(i)
        return frozenset(frozenset(v) for v in groups.values())


def _intern(table: dict, signature) -> int:
    if signature not in table:
        table[signature] = len(table) + 1
    return table[signature]


def signed_wl(g: SignedGraph, iterations: int, table: dict | None = None,
              initial: Sequence[int] | None = None) -> WlLabeling:
    """Extended WL refinement keeping a (balanced, unbalanced) label per node.

    Iteration 1 hashes (own label, positive-neighbour labels) and (own
    label, negative-neighbour labels).  Later iterations cross channels:
    the balanced label collects balanced labels of positive neighbours and
    unbalanced labels of negative neighbours, and vice versa.
    """
    if iterations < 1:
        raise ValueError("iterations must be >= 1")
    table = {} if table is None else table
    x0 = [0] * g.n if initial is None else list(initial)
    pos = [g.positive_neighbors(i) for i in range(g.n)]
    neg = [g.negative_neighbors(i) for i in range(g.n)]
    labels = [[(x, x) for x in x0]]
    cur = [
        (_intern(table, (x0[i], tuple(sorted(x0[j] for j in pos[i])))),
         _intern(table, (x0[i], tuple(sorted(x0[j] for j in neg[i])))))
        for i in range(g.n)
    ]
    labels.append(cur)
    for _ in range(1, iterations):
        prev = cur
        cur = []
        for i in range(g.n):
            b_sig = (prev[i][0], tuple(sorted(prev[j][0] for j in pos[i])),
                     tuple(sorted(prev[j][1] for j in neg[i])))
            u_sig = (prev[i][1], tuple(sorted(prev[j][1] for j in pos[i])),
                     tuple(sorted(prev[j][0] for j in neg[i])))
            cur.append((_intern(table, b_sig), _intern(table, u_sig)))
        labels.append(cur)
    return WlLabeling(labels, table)


# ----------------------------------------------------------------------
# ego-trees


@dataclass
class EgoTree:
    """Rooted signed tree; index 0 is the root.

    ``origin[t]`` is the graph node copied into tree node ``t``,
    ``sign[t]`` the sign of the edge to its parent (0 for the root).
    """

    origin: list[int]
    parent: list[int]
    sign: list[int]
    level: list[int]
    children: list[list[int]]
    depth: int

    @property
    def root(self) -> int:
        return self.origin[0]

    def __len__(self):
        return len(self.origin)

    def level_size(self, level: int) -> int:
        return sum(1 for x in self.level if x == level)


def build_ego_tree(g: SignedGraph, v: int, k: int) -> EgoTree:
    """k-hop ego-tree: every tree node gets a child copy of each graph neighbour.

    The neighbour it came from is copied too, so a node of degree ``d``
    has ``d`` children at every level.
    """
    if k > MAX_EGO_DEPTH:
        raise EgoTreeDepthError(f"ego-tree depth {k} exceeds the limit of {MAX_EGO_DEPTH}")
    if k < 1:
        raise ValueError("ego-tree depth must be >= 1")
    t = EgoTree([v], [-1], [0], [0], [[]], k)
    frontier = [0]
    for lvl in range(1, k + 1):
        nxt = []
        for node in frontier:
            src = t.origin[node]
            for w, s in zip(g.neighbors(src), g.neighbor_signs(src)):
                idx = len(t.origin)
                t.origin.append(w)
                t.parent.append(node)
                t.sign.append(s)
                t.level.append(lvl)
                t.children.append([])
                t.children[node].append(idx)
                nxt.append(idx)
        frontier = nxt
    return t


def _encode(t: EgoTree, node: int):
    return (t.sign[node], tuple(sorted(_encode(t, c) for c in t.children[node])))


def canonical_encoding(t: EgoTree):
    return _encode(t, 0)


def ego_tree_isomorphic(t1: EgoTree, t2: EgoTree) -> tuple[bool, dict | None]:
    """Rooted signed-tree isomorphism with an explicit witness bijection.

    Each subtree is encoded as (incoming sign, sorted child encodings);
    the trees are isomorphic iff the root encodings agree.  The witness
    pairs children that occupy the same position in the sorted orders.
    """
    if canonical_encoding(t1) != canonical_encoding(t2):
        return False, None
    psi = {}

    def match(a, b):
        psi[a] = b
        ca = sorted(t1.children[a], key=lambda c: _encode(t1, c))
        cb = sorted(t2.children[b], key=lambda c: _encode(t2, c))
        for x, y in zip(ca, cb):
            match(x, y)

    match(0, 0)
    return True, psi


def is_tree_isomorphism(t1: EgoTree, t2: EgoTree, psi: dict) -> bool:
    """Check that ``psi`` is a root-preserving, sign-preserving bijection."""
    if len(t1) != len(t2) or sorted(psi) != list(range(len(t1))):
        return False
    if sorted(psi.values()) != list(range(len(t2))) or psi[0] != 0:
        return False
    for a in range(1, len(t1)):
        b = psi[a]
        if t2.parent[b] != psi[t1.parent[a]] or t2.sign[b] != t1.sign[a]:
            return False
    return True


# ----------------------------------------------------------------------
# adequacy


@dataclass
class AdequacyReport:
    epsilon: float
    violations_a: list[tuple[int, int]]
    violations_b: list[tuple[int, int, int]]
    inadequate_nodes: set[int]
    inadequate_edges: set[tuple[int, int]]

    @property
    def adequate(self) -> bool:
        return not self.violations_a and not self.violations_b


def check_adequacy(g: SignedGraph, H: np.ndarray, epsilon: float = 1e-6) -> AdequacyReport:
    """Exhaustively test both adequacy conditions with Euclidean distance.

    (a) every negative neighbour is farther than ``epsilon``;
    (b) every positive neighbour is strictly nearer than every negative one.
    A node failing either is inadequate, and so is every edge touching it.
    """
    if epsilon <= 0:
        raise ValueError("epsilon must be positive")
    H = np.asarray(H, dtype=float)
    if H.shape[0] != g.n:
        raise ValueError(f"{H.shape[0]} embeddings for {g.n} nodes")
    va, vb = [], []
    for i in range(g.n):
        pos = g.positive_neighbors(i)
        neg = g.negative_neighbors(i)
        d_neg = {k: float(np.linalg.norm(H[i] - H[k])) for k in neg}
        for k in neg:
            if d_neg[k] <= epsilon:
                va.append((i, k))
        for j in pos:
            d_ij = float(np.linalg.norm(H[i] - H[j]))
            for k in neg:
                if d_ij >= d_neg[k]:
                    vb.append((i, j, k))
    bad = {x[0] for x in va} | {x[0] for x in vb}
    bad_edges = {e.key for e in g.edges if e.u in bad or e.v in bad}
    return AdequacyReport(epsilon, va, vb, bad, bad_edges)


# ----------------------------------------------------------------------
# fixtures and the verification harness


@dataclass(frozen=True)
class CycleFixture:
    """A small signed cycle with the roles used in the argument.

    ``iso`` lists root pairs whose 2-hop ego-trees are claimed isomorphic,
    ``non_iso`` pairs claimed not to be.  ``claimed_edges`` are the edges
    the argument declares inadequate (those present in the graph).
    """

    name: str
    graph: SignedGraph
    roles: dict
    iso: tuple = ()
    non_iso: tuple = ()
    claimed_edges: tuple = ()
    unbalanced: bool = True
    note: str = ""

    def node(self, role: str) -> int:
        return self.roles[role]


def _fixture(name, n, edges, roles, iso, non_iso, note=""):
    g = SignedGraph(n, edges)
    r = roles
    pairs = [(r[a], r[b]) for a, b in (("i", "j"), ("i", "k"), ("j", "k"))]
    claimed = tuple(sorted((min(p), max(p)) for p in pairs if g.has_edge(*p)))
    neg = sum(1 for e in g.edges if e.sign < 0)
    return CycleFixture(name, g, dict(roles),
                        tuple((r[a], r[b]) for a, b in iso),
                        tuple((r[a], r[b]) for a, b in non_iso),
                        claimed, neg % 2 == 1, note)


def theory_fixtures() -> list[CycleFixture]:
    """Unbalanced 3/4/5/6-cycles plus a balanced control triangle."""
    return [
        # i-j negative, i-k and k-j positive
        _fixture("unbalanced-3-cycle", 3, [(0, 1, -1), (0, 2, 1), (1, 2, 1)],
                 {"i": 0, "j": 1, "k": 2}, iso=[("i", "j")], non_iso=[("i", "k")]),
        # cycle i-j-l-k-i, only i-j negative
        _fixture("unbalanced-4-cycle", 4, [(0, 1, -1), (0, 2, 1), (1, 3, 1), (2, 3, 1)],
                 {"i": 0, "j": 1, "k": 2, "l": 3}, iso=[("i", "j")], non_iso=[("i", "k")]),
        # cycle i-j-a-b-k-i, only i-k negative
        _fixture("unbalanced-5-cycle", 5, [(0, 1, 1), (1, 3, 1), (3, 4, 1), (2, 4, 1), (0, 2, -1)],
                 {"i": 0, "j": 1, "k": 2, "a": 3, "b": 4}, iso=[("i", "k")], non_iso=[("i", "j")]),
        # cycle i-j-a-b-c-k-i, only i-k negative; same 2-hop picture as the 5-cycle
        _fixture("unbalanced-6-cycle", 6, [(0, 1, 1), (1, 3, 1), (3, 4, 1), (4, 5, 1), (2, 5, 1), (0, 2, -1)],
                 {"i": 0, "j": 1, "k": 2, "a": 3, "b": 4, "c": 5}, iso=[("i", "k")], non_iso=[("i", "j")],
                 note="follows the 5-cycle pattern at depth 2"),
        _fixture("balanced-3-cycle", 3, [(0, 1, 1), (0, 2, 1), (1, 2, 1)],
                 {"i": 0, "j": 1, "k": 2}, iso=[("i", "j"), ("i", "k")], non_iso=[]),
    ]


@dataclass
class Claim:
    fixture: str
    claim: str
    passed: bool
    detail: str = ""


@dataclass
class TheoryReport:
    claims: list[Claim]

    @property
    def passed(self) -> bool:
        return all(c.passed for c in self.claims)

    def failures(self) -> list[Claim]:
        return [c for c in self.claims if not c.passed]

    def to_text(self) -> str:
        lines = []
        current = None
        for c in self.claims:
            if c.fixture != current:
                current = c.fixture
                lines.append(f"[{current}]")
            status = "PASS" if c.passed else "FAIL"
            lines.append(f"  {status}  {c.claim}" + (f"  -- {c.detail}" if c.detail else ""))
        total = len(self.claims)
        ok = sum(c.passed for c in self.claims)
        lines.append(f"{ok}/{total} claims passed")
        return "\n".join(lines) + "\n"


def _uniform_features(n: int, d: int, rng) -> np.ndarray:
    # featureless nodes: one shared random vector
    return np.tile(rng.uniform(-1, 1, size=(1, d)), (n, 1))


def verify_fixture(fx: CycleFixture, draws: int = 10, seed: int = 0, tol: float = 1e-6,
                   in_dim: int = 8, hidden: int = 8) -> list[Claim]:
    from .sgnn import SgnnModel, forward

    g = fx.graph
    inv = {v: k for k, v in fx.roles.items()}
    name = lambda p: f"{inv.get(p[0], p[0])},{inv.get(p[1], p[1])}"  # noqa: E731
    claims = []
    trees = [build_ego_tree(g, v, 2) for v in range(g.n)]

    for a, b in fx.iso:
        ok, psi = ego_tree_isomorphic(trees[a], trees[b])
        good = ok and is_tree_isomorphism(trees[a], trees[b], psi)
        claims.append(Claim(fx.name, f"ego-trees of {name((a, b))} isomorphic", good,
                            "" if good else f"encodings differ: {canonical_encoding(trees[a])} vs "
                                            f"{canonical_encoding(trees[b])}"))
    for a, b in fx.non_iso:
        ok, _ = ego_tree_isomorphic(trees[a], trees[b])
        claims.append(Claim(fx.name, f"ego-trees of {name((a, b))} not isomorphic", not ok,
                            "" if not ok else "trees unexpectedly isomorphic"))

    lab = signed_wl(g, 2)
    for a, b in fx.iso:
        eq = lab.at(2)[a] == lab.at(2)[b]
        claims.append(Claim(fx.name, f"WL label pairs of {name((a, b))} equal at iteration 2", eq,
                            "" if eq else f"{lab.at(2)[a]} vs {lab.at(2)[b]}"))

    # every isomorphic pair, claimed or not, must share its embedding
    iso_pairs = [(a, b) for a in range(g.n) for b in range(a + 1, g.n)
                 if ego_tree_isomorphic(trees[a], trees[b])[0]]
    rng = np.random.default_rng(seed)
    worst = 0.0
    worst_pair = None
    sep = np.inf
    forced = []
    for a, b in fx.iso:
        if g.sign(a, b) < 0:
            forced.append((a, b))
    adequacy_ok = True
    adequacy_detail = ""
    for draw in range(draws):
        model = SgnnModel.init(in_dim, hidden, 2, head_hidden=0, seed=int(rng.integers(2 ** 31)))
        X = _uniform_features(g.n, in_dim, rng)
        H = forward(g, model, X)
        for a, b in iso_pairs:
            d = float(np.max(np.abs(H[a] - H[b])))
            if d > worst:
                worst, worst_pair = d, (a, b)
        for a, b in fx.non_iso:
            sep = min(sep, float(np.linalg.norm(H[a] - H[b])))
        rep = check_adequacy(g, H, epsilon=tol)
        if forced:
            need_nodes = {x for p in forced for x in p}
            missing_nodes = need_nodes - rep.inadequate_nodes
            missing_edges = set(fx.claimed_edges) - rep.inadequate_edges
            if missing_nodes or missing_edges:
                adequacy_ok = False
                adequacy_detail = (f"draw {draw}: nodes {sorted(missing_nodes)} / edges "
                                   f"{sorted(missing_edges)} not flagged")
        elif not fx.unbalanced and not rep.adequate:
            adequacy_ok = False
            adequacy_detail = f"draw {draw}: control flagged {rep.violations_a + rep.violations_b}"

    claims.append(Claim(fx.name, f"isomorphic roots share embeddings over {draws} draws (<= {tol:g})",
                        worst <= tol, f"max deviation {worst:.3g}" + (f" at {name(worst_pair)}" if worst_pair else "")))
    if fx.non_iso:
        claims.append(Claim(fx.name, "non-isomorphic roots get distinct embeddings", sep > tol,
                            f"min distance {sep:.3g}"))
    if fx.unbalanced:
        claims.append(Claim(fx.name, "a negative edge joins two isomorphic roots", bool(forced),
                            "" if forced else "no forced pair"))
        edges_txt = ", ".join(f"e_{name(e)}" for e in fx.claimed_edges)
        claims.append(Claim(fx.name, f"adequacy violated; {edges_txt} inadequate", adequacy_ok and bool(forced),
                            adequacy_detail))
    else:
        claims.append(Claim(fx.name, "no isomorphism-forced violation (control)", not forced and adequacy_ok,
                            adequacy_detail))
    return claims


def verify_theorems(fixtures: Sequence[CycleFixture] | None = None, draws: int = 10, seed: int = 0
                    ) -> TheoryReport:
    fixtures = theory_fixtures() if fixtures is None else fixtures
    claims = []
    for i, fx in enumerate(fixtures):
        try:
            claims += verify_fixture(fx, draws=draws, seed=seed + i)
        except Exception as exc:  # report, don't abort the whole run
            claims.append(Claim(fx.name, "harness ran", False, repr(exc)))
    return TheoryReport(claims)
