"""Splits, metrics, synthetic benchmark and the paired CSG-vs-random runner."""

from __future__ import annotations

import hashlib
import json
import math
from dataclasses import asdict, dataclass, field
from typing import Sequence

import numpy as np

from .curriculum import PacingParams, build_schedule
from .cycle_census import difficulty_scores
from .signed_graph import SignedEdge, SignedGraph
from .sgnn import TrainConfig, TrainResult, forward, init_features, predict_edges, train_csg, train_random


@dataclass(frozen=True)
class SplitSpec:
    train_fraction: float = 0.85
    val_fraction: float = 0.05
    test_fraction: float = 0.10
    seed: int = 0

    def __post_init__(self):
        fr = (self.train_fraction, self.val_fraction, self.test_fraction)
        if min(fr) < 0 or abs(sum(fr) - 1.0) > 1e-9:
            raise ValueError(f"split fractions must be non-negative and sum to 1, got {fr}")


def split_sizes(m: int, fractions: Sequence[float]) -> list[int]:
    """Largest-remainder apportionment of ``m`` items; ties go to the earlier slot."""
    quotas = [m * f for f in fractions]
    sizes = [math.floor(q) for q in quotas]
    short = m - sum(sizes)
    order = sorted(range(len(quotas)), key=lambda i: (-(quotas[i] - sizes[i]), i))
    for i in order[:short]:
        sizes[i] += 1
    return sizes


def split_edges(g: SignedGraph, spec: SplitSpec) -> tuple[list[SignedEdge], list[SignedEdge], list[SignedEdge]]:
    """Seeded uniform partition of the edges into train / validation / test."""
    fractions = (spec.train_fraction, spec.val_fraction, spec.test_fraction)
    sizes = split_sizes(g.m, fractions)
    for name, f, size in zip(("train", "val", "test"), fractions, sizes):
        if f > 0 and size == 0 and g.m * f >= 0.5:
            raise ValueError(f"{name} split is empty for {g.m} edges at fraction {f}")
    perm = np.random.default_rng(spec.seed).permutation(g.m)
    edges = g.edges
    a, b = sizes[0], sizes[0] + sizes[1]
    pick = lambda idx: sorted(edges[i] for i in idx)  # noqa: E731
    return pick(perm[:a]), pick(perm[a:b]), pick(perm[b:])


# ----------------------------------------------------------------------
# metrics


def auc(labels, scores) -> float:
    """ROC AUC via the Mann-Whitney U statistic with mid-ranks for ties."""
    y = np.asarray(labels).astype(bool)
    s = np.asarray(scores, dtype=float)
    n_pos = int(y.sum())
    n_neg = len(y) - n_pos
    if n_pos == 0 or n_neg == 0:
        raise ValueError("AUC needs both classes present")
    order = np.argsort(s, kind="mergesort")
    ranks = np.empty(len(s), dtype=float)
    ss = s[order]
    i = 0
    while i < len(ss):
        j = i
        while j + 1 < len(ss) and ss[j + 1] == ss[i]:
            j += 1
        ranks[order[i:j + 1]] = 0.5 * (i + j) + 1.0
        i = j + 1
    u = ranks[y].sum() - n_pos * (n_pos + 1) / 2.0
    return float(u / (n_pos * n_neg))


def f1_binary(labels, predictions) -> float:
    """F1 of the positive class; 0 when there are no true or predicted positives."""
    y = np.asarray(labels).astype(bool)
    p = np.asarray(predictions).astype(bool)
    tp = int(np.sum(y & p))
    fp = int(np.sum(~y & p))
    fn = int(np.sum(y & ~p))
    if tp == 0:
        return 0.0
    return 2 * tp / (2 * tp + fp + fn)


def easy_hard_split(test_edges: Sequence[SignedEdge], scores) -> tuple[list[SignedEdge], list[SignedEdge]]:
    """Hard edges sit in at least one unbalanced triangle (score > 0)."""
    easy, hard = [], []
    for e in test_edges:
        (hard if scores[e.key] > 0 else easy).append(e)
    return easy, hard


# ----------------------------------------------------------------------
# synthetic data


def synth_benchmark(n: int = 500, communities: int = 2, p_in: float = 0.1, p_out: float = 0.05,
                    noise: float = 0.1, seed: int = 0) -> SignedGraph:
    """Planted-partition signed graph.

    Nodes are dealt round-robin into ``communities`` groups.  Edges appear
    with probability ``p_in`` inside a group and ``p_out`` across; inside
    edges are positive, crossing edges negative, and each sign is then
    flipped with probability ``noise``.
    """
    if n < 2 or communities < 1:
        raise ValueError("need n >= 2 and at least one community")
    for name, p in (("p_in", p_in), ("p_out", p_out), ("noise", noise)):
        if not 0 <= p <= 1:
            raise ValueError(f"{name} must be a probability, got {p}")
    rng = np.random.default_rng(seed)
    comm = np.arange(n) % communities
    iu, iv = np.triu_indices(n, k=1)
    same = comm[iu] == comm[iv]
    keep = rng.random(len(iu)) < np.where(same, p_in, p_out)
    iu, iv, same = iu[keep], iv[keep], same[keep]
    sign = np.where(same, 1, -1)
    flip = rng.random(len(sign)) < noise
    sign = np.where(flip, -sign, sign)
    return SignedGraph(n, zip(iu.tolist(), iv.tolist(), sign.tolist()))


# ----------------------------------------------------------------------
# experiment runner


@dataclass
class ExperimentConfig:
    seeds: list[int] = field(default_factory=lambda: [0, 1, 2, 3, 4])
    split: dict = field(default_factory=lambda: {"train_fraction": 0.85, "val_fraction": 0.05,
                                                 "test_fraction": 0.10})
    pacing: dict = field(default_factory=lambda: {"kind": "linear", "lambda0": 0.25, "T": 20})
    model: dict = field(default_factory=dict)
    feature_dim: int = 64
    dataset: dict = field(default_factory=lambda: {"synth": {"n": 500, "noise": 0.1}})

    def to_dict(self) -> dict:
        return asdict(self)

    @classmethod
    def from_dict(cls, d: dict) -> "ExperimentConfig":
        known = set(cls.__dataclass_fields__)
        unknown = set(d) - known
        if unknown:
            raise ValueError(f"unknown config keys: {sorted(unknown)}")
        cfg = cls(**d)
        PacingParams(**cfg.pacing)
        TrainConfig(**cfg.model)
        return cfg

    def digest(self) -> str:
        blob = json.dumps(self.to_dict(), sort_keys=True).encode()
        return hashlib.sha256(blob).hexdigest()[:12]


@dataclass
class MetricsRecord:
    seed: int
    method: str
    auc: float
    f1_binary: float
    auc_easy: float
    auc_hard: float
    n_test: int
    n_easy: int
    n_hard: int
    best_epoch: int
    config_digest: str

    def to_json(self) -> str:
        return json.dumps(asdict(self), sort_keys=True)


def _safe_auc(edges, probs) -> float:
    y = np.array([e.sign > 0 for e in edges], dtype=bool)
    if len(y) == 0 or y.all() or not y.any():
        return float("nan")
    return auc(y, probs)


def evaluate_model(result: TrainResult, g_train: SignedGraph, X, test, easy, hard) -> dict:
    H = forward(g_train, result.model, X)
    out = {}
    for name, edges in (("auc", test), ("auc_easy", easy), ("auc_hard", hard)):
        probs = predict_edges(result.model, H, edges) if edges else np.array([])
        out[name] = _safe_auc(edges, probs)
    probs = predict_edges(result.model, H, test)
    y = np.array([e.sign > 0 for e in test])
    out["f1_binary"] = f1_binary(y, probs >= 0.5)
    return out


@dataclass
class SeedRun:
    records: list[MetricsRecord]
    csg: TrainResult
    random: TrainResult
    schedule: object


def run_seed(g: SignedGraph, cfg: ExperimentConfig, seed: int) -> SeedRun:
    """One paired run: identical split, features and init for both trainers."""
    try:
        train, val, test = split_edges(g, SplitSpec(**cfg.split, seed=seed))
        g_train = g.subgraph(train)
        # the measurer only sees training signs; easy/hard uses the full graph
        train_scores = difficulty_scores(g_train)
        schedule = build_schedule(train, train_scores, PacingParams(**cfg.pacing))
        full_scores = difficulty_scores(g)
        easy, hard = easy_hard_split(test, full_scores)
        X = init_features(g.n, cfg.feature_dim, seed=seed)
        tcfg = TrainConfig(**{**cfg.model, "seed": seed})
        csg = train_csg(g_train, X, schedule, tcfg, val_edges=val)
        rnd = train_random(g_train, X, train, tcfg, val_edges=val)
    except Exception as exc:
        raise RuntimeError(f"seed {seed}: {exc}") from exc
    digest = cfg.digest()
    records = []
    for method, res in (("csg", csg), ("random", rnd)):
        m = evaluate_model(res, g_train, X, test, easy, hard)
        records.append(MetricsRecord(seed, method, m["auc"], m["f1_binary"], m["auc_easy"], m["auc_hard"],
                                     len(test), len(easy), len(hard), res.best_epoch, digest))
    return SeedRun(records, csg, rnd, schedule)


def summarize(records: Sequence[MetricsRecord]) -> dict[str, tuple[float, float]]:
    """``{"<method>_<metric>": (mean, sample std)}`` over seeds; NaNs skipped."""
    out = {}
    for method in sorted({r.method for r in records}):
        rs = [r for r in records if r.method == method]
        for metric in ("auc", "f1_binary", "auc_easy", "auc_hard"):
            vals = np.array([getattr(r, metric) for r in rs], dtype=float)
            vals = vals[~np.isnan(vals)]
            name = f"{method}_{'f1' if metric == 'f1_binary' else metric}"
            if len(vals) == 0:
                out[name] = (float("nan"), float("nan"))
            else:
                std = float(np.std(vals, ddof=1)) if len(vals) > 1 else 0.0
                out[name] = (float(np.mean(vals)), std)
    return out


def format_summary(summary: dict[str, tuple[float, float]]) -> str:
    lines = ["metric,mean,std"]
    lines += [f"{k},{m:.6f},{s:.6f}" for k, (m, s) in summary.items()]
    return "\n".join(lines) + "\n"


def load_graph_for(cfg: ExperimentConfig) -> SignedGraph:
    ds = cfg.dataset
    if "path" in ds:
        from .signed_graph import read_graph

        return read_graph(ds["path"])
    if "synth" in ds:
        return synth_benchmark(**ds["synth"])
    raise ValueError("dataset config needs 'path' or 'synth'")


def run_experiment(cfg: ExperimentConfig, g: SignedGraph | None = None):
    """Run every seed; returns ``(records, summary, runs)`` in seed order."""
    g = g if g is not None else load_graph_for(cfg)
    runs = [run_seed(g, cfg, s) for s in cfg.seeds]
    records = [r for run in runs for r in run.records]
    return records, summarize(records), runs
