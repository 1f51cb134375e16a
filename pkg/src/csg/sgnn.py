"""Two-channel signed GNN (SGCN style) in plain numpy.

Every node carries a positive and a negative representation.  Layer 1
aggregates raw features over positive and negative neighbours separately.
Deeper layers cross channels: the positive channel averages positive
representations of positive neighbours together with negative
representations of negative neighbours, and the negative channel does the
mirror image.  COMBINE is ``tanh(W @ [self, aggregate])`` and AGGREGATE is
the mean over the multiset (zero for an empty one).

Gradients are written out by hand; ``loss_and_gradients`` is checked
against central finite differences in the test suite.
"""

from __future__ import annotations

import json
import random
from dataclasses import dataclass, field
from typing import Callable, Sequence

import numpy as np
import scipy.sparse as sp

from .curriculum import CurriculumSchedule, pacing_value
from .signed_graph import SignedEdge, SignedGraph

LOGIT_CLIP = 30.0
CHECKPOINT_VERSION = 1


def init_features(n: int, d: int = 64, seed: int = 0) -> np.ndarray:
    """``n x d`` matrix of i.i.d. uniform(-1, 1) features."""
    if n < 1 or d < 1:
        raise ValueError("need n >= 1 and d >= 1")
    return np.random.default_rng(seed).uniform(-1.0, 1.0, size=(n, d))


# ----------------------------------------------------------------------
# model


@dataclass
class SgnnModel:
    """Per-layer channel weights plus an edge classifier.

    ``W_pos[l]`` and ``W_neg[l]`` map ``[self, aggregate]`` (width
    ``2 * in_dim``) to ``hidden``.  The classifier reads the edge
    representation ``[H_u, H_v]`` (``H = [h_pos, h_neg]``, width
    ``4 * hidden``).  With ``W_head`` set it first passes through one tanh
    layer, otherwise ``w_cls`` acts on the concatenation directly.
    """

    W_pos: list[np.ndarray]
    W_neg: list[np.ndarray]
    w_cls: np.ndarray
    b_cls: float = 0.0
    W_head: np.ndarray | None = None
    b_head: np.ndarray | None = None
    seed: int | None = None

    @classmethod
    def init(cls, in_dim: int, hidden: int = 32, layers: int = 2, head_hidden: int = 32,
             seed: int = 0) -> "SgnnModel":
        rng = np.random.default_rng(seed)

        def glorot(fan_in, fan_out):
            a = np.sqrt(6.0 / (fan_in + fan_out))
            return rng.uniform(-a, a, size=(fan_in, fan_out))

        dims = [in_dim] + [hidden] * layers
        W_pos = [glorot(2 * dims[l], dims[l + 1]) for l in range(layers)]
        W_neg = [glorot(2 * dims[l], dims[l + 1]) for l in range(layers)]
        if head_hidden:
            W_head = glorot(4 * hidden, head_hidden)
            b_head = np.zeros(head_hidden)
            w_cls = glorot(head_hidden, 1)[:, 0]
        else:
            W_head = b_head = None
            w_cls = glorot(4 * hidden, 1)[:, 0]
        return cls(W_pos, W_neg, w_cls, 0.0, W_head, b_head, seed)

    @property
    def layers(self) -> int:
        return len(self.W_pos)

    @property
    def in_dim(self) -> int:
        return self.W_pos[0].shape[0] // 2

    @property
    def hidden(self) -> int:
        return self.W_pos[-1].shape[1]

    @property
    def head_hidden(self) -> int:
        return 0 if self.W_head is None else self.W_head.shape[1]

    # flat parameter access, used by the optimiser and the gradient check
    def param_names(self) -> list[str]:
        names = []
        for l in range(self.layers):
            names += [f"W_pos{l + 1}", f"W_neg{l + 1}"]
        if self.W_head is not None:
            names += ["W_head", "b_head"]
        return names + ["w_cls", "b_cls"]

    def params(self) -> dict[str, np.ndarray]:
        out = {}
        for l in range(self.layers):
            out[f"W_pos{l + 1}"] = self.W_pos[l]
            out[f"W_neg{l + 1}"] = self.W_neg[l]
        if self.W_head is not None:
            out["W_head"] = self.W_head
            out["b_head"] = self.b_head
        out["w_cls"] = self.w_cls
        out["b_cls"] = np.array(self.b_cls)
        return out

    def set_params(self, values: dict[str, np.ndarray]) -> None:
        for l in range(self.layers):
            self.W_pos[l] = np.array(values[f"W_pos{l + 1}"], dtype=float)
            self.W_neg[l] = np.array(values[f"W_neg{l + 1}"], dtype=float)
        if self.W_head is not None:
            self.W_head = np.array(values["W_head"], dtype=float)
            self.b_head = np.array(values["b_head"], dtype=float)
        self.w_cls = np.array(values["w_cls"], dtype=float)
        self.b_cls = float(values["b_cls"])

    def copy(self) -> "SgnnModel":
        return SgnnModel([w.copy() for w in self.W_pos], [w.copy() for w in self.W_neg],
                         self.w_cls.copy(), float(self.b_cls),
                         None if self.W_head is None else self.W_head.copy(),
                         None if self.b_head is None else self.b_head.copy(), self.seed)

    def validate(self) -> None:
        for l in range(1, self.layers):
            for W in (self.W_pos[l], self.W_neg[l]):
                if W.shape[0] != 2 * self.W_pos[l - 1].shape[1]:
                    raise ValueError(f"layer {l + 1} expects input width {W.shape[0] // 2}, "
                                     f"previous layer emits {self.W_pos[l - 1].shape[1]}")
        width = 4 * self.hidden
        if self.W_head is not None:
            if self.W_head.shape[0] != width or self.b_head.shape != (self.W_head.shape[1],):
                raise ValueError(f"head expects input width {self.W_head.shape[0]}, edge representation is {width}")
            width = self.W_head.shape[1]
        if self.w_cls.shape != (width,):
            raise ValueError(f"classifier needs {width} weights, has {self.w_cls.shape}")


def save_checkpoint(model: SgnnModel, path, extra: dict | None = None) -> None:
    meta = {"version": CHECKPOINT_VERSION, "layers": model.layers, "in_dim": model.in_dim,
            "hidden": model.hidden, "head_hidden": model.head_hidden, "seed": model.seed, **(extra or {})}
    arrays = {k: np.asarray(v) for k, v in model.params().items()}
    with open(path, "wb") as fh:
        np.savez(fh, __meta__=np.array(json.dumps(meta, sort_keys=True)), **arrays)


def load_checkpoint(path) -> tuple[SgnnModel, dict]:
    with np.load(path, allow_pickle=False) as z:
        meta = json.loads(str(z["__meta__"]))
        if meta.get("version") != CHECKPOINT_VERSION:
            raise ValueError(f"unsupported checkpoint version {meta.get('version')}")
        arrays = {k: z[k] for k in z.files if k != "__meta__"}
    L = meta["layers"]
    model = SgnnModel([arrays[f"W_pos{l + 1}"] for l in range(L)],
                      [arrays[f"W_neg{l + 1}"] for l in range(L)],
                      arrays["w_cls"], float(arrays["b_cls"]),
                      arrays.get("W_head"), arrays.get("b_head"), meta["seed"])
    return model, meta


# ----------------------------------------------------------------------
# forward / backward


@dataclass
class GraphOperators:
    """Row-normalised aggregation matrices for one signed graph."""

    P: sp.csr_matrix  # positive adjacency
    N: sp.csr_matrix  # negative adjacency
    inv_pos: np.ndarray  # 1 / |N+| (0 where empty)
    inv_neg: np.ndarray
    inv_all: np.ndarray  # 1 / |N|

    @classmethod
    def from_graph(cls, g: SignedGraph) -> "GraphOperators":
        rows = np.repeat(np.arange(g.n), np.diff(g.indptr))
        pos = g.signs > 0
        P = sp.csr_matrix((np.ones(pos.sum()), (rows[pos], g.indices[pos])), shape=(g.n, g.n))
        N = sp.csr_matrix((np.ones((~pos).sum()), (rows[~pos], g.indices[~pos])), shape=(g.n, g.n))

        def inv(c):
            c = np.asarray(c).ravel()
            return np.divide(1.0, c, out=np.zeros_like(c, dtype=float), where=c > 0)[:, None]

        dp = np.asarray(P.sum(axis=1)).ravel()
        dn = np.asarray(N.sum(axis=1)).ravel()
        return cls(P, N, inv(dp), inv(dn), inv(dp + dn))


def _ops(g) -> GraphOperators:
    return g if isinstance(g, GraphOperators) else GraphOperators.from_graph(g)


def _forward_cache(ops: GraphOperators, model: SgnnModel, X: np.ndarray):
    model.validate()
    if X.ndim != 2 or X.shape[1] != model.in_dim:
        raise ValueError(f"features have shape {X.shape}, model expects width {model.in_dim}")
    if X.shape[0] != ops.P.shape[0]:
        raise ValueError(f"{X.shape[0]} feature rows for a graph with {ops.P.shape[0]} nodes")
    cache = []
    a_pos = ops.inv_pos * (ops.P @ X)
    a_neg = ops.inv_neg * (ops.N @ X)
    C_pos = np.hstack([X, a_pos])
    C_neg = np.hstack([X, a_neg])
    h_pos = np.tanh(C_pos @ model.W_pos[0])
    h_neg = np.tanh(C_neg @ model.W_neg[0])
    cache.append((C_pos, C_neg, h_pos, h_neg))
    for l in range(1, model.layers):
        a_pos = ops.inv_all * (ops.P @ h_pos + ops.N @ h_neg)
        a_neg = ops.inv_all * (ops.P @ h_neg + ops.N @ h_pos)
        C_pos = np.hstack([h_pos, a_pos])
        C_neg = np.hstack([h_neg, a_neg])
        h_pos = np.tanh(C_pos @ model.W_pos[l])
        h_neg = np.tanh(C_neg @ model.W_neg[l])
        cache.append((C_pos, C_neg, h_pos, h_neg))
    return np.hstack([h_pos, h_neg]), cache


def forward(g, model: SgnnModel, X: np.ndarray) -> np.ndarray:
    """Node embeddings ``H = [h_pos, h_neg]`` after the last layer."""
    H, _ = _forward_cache(_ops(g), model, X)
    return H


def edge_representation(H: np.ndarray, u, v) -> np.ndarray:
    """``[H_u, H_v]`` rows for canonical edges ``u < v``."""
    return np.hstack([H[u], H[v]])


def _logits(model: SgnnModel, H: np.ndarray, u: np.ndarray, v: np.ndarray):
    R = edge_representation(H, u, v)
    if model.W_head is None:
        return R @ model.w_cls + model.b_cls, R, None
    Q = np.tanh(R @ model.W_head + model.b_head)
    return Q @ model.w_cls + model.b_cls, R, Q


def _sigmoid(z):
    return 0.5 * (1.0 + np.tanh(0.5 * z))


def _edge_arrays(edges: Sequence) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    arr = np.array([(e.u, e.v, e.sign) if isinstance(e, SignedEdge) else (min(e[0], e[1]), max(e[0], e[1]), e[2])
                    for e in edges], dtype=np.int64).reshape(-1, 3)
    return arr[:, 0], arr[:, 1], arr[:, 2]


def predict_edge(model: SgnnModel, H: np.ndarray, e) -> float:
    """Probability that edge ``e`` (canonicalised to ``u < v``) is positive."""
    u, v = (e.u, e.v) if isinstance(e, SignedEdge) else (min(e[:2]), max(e[:2]))
    return float(predict_edges(model, H, [(u, v, 1)])[0])


def predict_edges(model: SgnnModel, H: np.ndarray, edges: Sequence) -> np.ndarray:
    u, v, _ = _edge_arrays(edges)
    z = np.clip(_logits(model, H, u, v)[0], -LOGIT_CLIP, LOGIT_CLIP)
    return _sigmoid(z)


def class_weights(y: np.ndarray) -> np.ndarray:
    """Per-sample weights inversely proportional to class frequency.

    Normalised so the weights average to 1; a batch with equal classes
    gets all-ones.
    """
    y = np.asarray(y)
    present = [c for c in (0, 1) if np.any(y == c)]
    w = np.empty(len(y), dtype=float)
    for c in present:
        mask = y == c
        w[mask] = len(y) / (len(present) * mask.sum())
    return w


def loss_and_gradients(g, model: SgnnModel, X: np.ndarray, batch: Sequence
                       ) -> tuple[float, dict[str, np.ndarray]]:
    """Class-weighted binary cross-entropy and its gradient for every parameter."""
    if len(batch) == 0:
        raise ValueError("empty batch")
    ops = _ops(g)
    n = ops.P.shape[0]
    u, v, s = _edge_arrays(batch)
    if u.min() < 0 or v.max() >= n:
        raise IndexError(f"batch references a node outside [0, {n})")
    H, cache = _forward_cache(ops, model, X)
    y = (s > 0).astype(float)
    wts = class_weights(y)
    B = len(y)

    z_raw, R, Q = _logits(model, H, u, v)
    z = np.clip(z_raw, -LOGIT_CLIP, LOGIT_CLIP)
    # softplus(-z) for positives, softplus(z) for negatives
    per = np.where(y > 0, np.logaddexp(0.0, -z), np.logaddexp(0.0, z))
    loss = float(np.sum(wts * per) / B)

    dz = wts * (_sigmoid(z) - y) / B
    dz = np.where(np.abs(z_raw) < LOGIT_CLIP, dz, 0.0)
    grads: dict[str, np.ndarray] = {"b_cls": np.array(dz.sum())}
    if Q is None:
        grads["w_cls"] = R.T @ dz
        dR = dz[:, None] * model.w_cls[None, :]
    else:
        grads["w_cls"] = Q.T @ dz
        dpre = (dz[:, None] * model.w_cls[None, :]) * (1.0 - Q ** 2)
        grads["W_head"] = R.T @ dpre
        grads["b_head"] = dpre.sum(axis=0)
        dR = dpre @ model.W_head.T

    k = 2 * model.hidden
    dH = np.zeros_like(H)
    np.add.at(dH, u, dR[:, :k])
    np.add.at(dH, v, dR[:, k:])
    hid = model.hidden
    dh_pos, dh_neg = dH[:, :hid], dH[:, hid:]

    for l in range(model.layers - 1, -1, -1):
        C_pos, C_neg, h_pos, h_neg = cache[l]
        dZ_pos = dh_pos * (1.0 - h_pos ** 2)
        dZ_neg = dh_neg * (1.0 - h_neg ** 2)
        grads[f"W_pos{l + 1}"] = C_pos.T @ dZ_pos
        grads[f"W_neg{l + 1}"] = C_neg.T @ dZ_neg
        if l == 0:
            break
        dC_pos = dZ_pos @ model.W_pos[l].T
        dC_neg = dZ_neg @ model.W_neg[l].T
        w = dC_pos.shape[1] // 2
        da_pos = ops.inv_all * dC_pos[:, w:]
        da_neg = ops.inv_all * dC_neg[:, w:]
        # P and N are symmetric, so their transposes are themselves
        dh_pos = dC_pos[:, :w] + ops.P @ da_pos + ops.N @ da_neg
        dh_neg = dC_neg[:, :w] + ops.P @ da_neg + ops.N @ da_pos
    return loss, grads


# ----------------------------------------------------------------------
# training


@dataclass
class TrainConfig:
    hidden: int = 32
    layers: int = 2
    head_hidden: int = 32
    optimizer: str = "adam"
    lr: float = 0.01
    momentum: float = 0.9
    epochs: int = 100
    steps_per_epoch: int = 1
    weight_decay: float = 0.0
    seed: int = 0


@dataclass
class EpochRecord:
    t: int
    g_t: float
    subset_size: int
    loss: float
    val_auc: float

    def to_json(self) -> str:
        return json.dumps({"t": self.t, "g_t": self.g_t, "subset_size": self.subset_size,
                           "loss": self.loss, "val_auc": self.val_auc})


@dataclass
class TrainResult:
    model: SgnnModel
    log: list[EpochRecord] = field(default_factory=list)
    best_epoch: int = 0
    best_val_auc: float = float("nan")


def _run(g, X, batches: Callable[[int], tuple[float, list]], cfg: TrainConfig, val_edges, init_seed) -> TrainResult:
    from .evaluation import auc as _auc

    ops = _ops(g)
    model = SgnnModel.init(X.shape[1], cfg.hidden, cfg.layers, cfg.head_hidden, seed=init_seed)
    names = model.param_names()
    if cfg.optimizer not in ("sgd", "adam"):
        raise ValueError(f"unknown optimizer {cfg.optimizer!r}")
    vel = {k: np.zeros_like(v, dtype=float) for k, v in model.params().items()}
    sq = {k: np.zeros_like(v, dtype=float) for k, v in model.params().items()}
    step = 0
    val_edges = list(val_edges or [])
    if val_edges:
        yv = np.array([e.sign > 0 for e in val_edges], dtype=int)
        val_ok = 0 < yv.sum() < len(yv)
    else:
        val_ok = False
    result = TrainResult(model.copy())
    best = -np.inf
    for t in range(1, cfg.epochs + 1):
        g_t, batch = batches(t)
        if not batch:
            raise ValueError(f"epoch {t}: empty training subset")
        for _ in range(cfg.steps_per_epoch):
            loss, grads = loss_and_gradients(ops, model, X, batch)
            params = model.params()
            step += 1
            new = {}
            for k in names:
                gk = grads[k]
                if cfg.weight_decay and k != "b_cls":
                    gk = gk + cfg.weight_decay * params[k]
                if cfg.optimizer == "adam":
                    # momentum doubles as beta1
                    vel[k] = cfg.momentum * vel[k] + (1 - cfg.momentum) * gk
                    sq[k] = 0.999 * sq[k] + 0.001 * gk * gk
                    m_hat = vel[k] / (1 - cfg.momentum ** step)
                    v_hat = sq[k] / (1 - 0.999 ** step)
                    new[k] = params[k] - cfg.lr * m_hat / (np.sqrt(v_hat) + 1e-8)
                else:
                    vel[k] = cfg.momentum * vel[k] - cfg.lr * gk
                    new[k] = params[k] + vel[k]
            model.set_params(new)
        if val_ok:
            H = forward(ops, model, X)
            val_auc = _auc(yv, predict_edges(model, H, val_edges))
        else:
            val_auc = float("nan")
        result.log.append(EpochRecord(t, float(g_t), len(batch), float(loss), float(val_auc)))
        score = val_auc if val_ok else -loss
        if score > best:
            best = score
            result.model = model.copy()
            result.best_epoch = t
            result.best_val_auc = float(val_auc)
    return result


def train_csg(g, X: np.ndarray, schedule: CurriculumSchedule, cfg: TrainConfig | None = None,
              val_edges=None) -> TrainResult:
    """Curriculum training: epoch ``t`` (from 1) fits the easiest ``g(t)`` share.

    Runs a fixed budget of ``cfg.epochs`` epochs and returns the snapshot
    with the best validation AUC (lowest training loss when there is no
    usable validation set).
    """
    cfg = cfg or TrainConfig()
    if schedule.prefix_len(1) == 0:
        raise ValueError("curriculum starts with an empty subset")

    def batches(t):
        return pacing_value(schedule.params, t), schedule.subset_at(t)

    return _run(g, X, batches, cfg, val_edges, cfg.seed)


def train_random(g, X: np.ndarray, train_edges: Sequence[SignedEdge], cfg: TrainConfig | None = None,
                 val_edges=None, shuffle: bool = True) -> TrainResult:
    """Baseline: the whole training set every epoch, in a seeded random order."""
    cfg = cfg or TrainConfig()
    edges = list(train_edges)
    rng = random.Random(cfg.seed)

    def batches(t):
        if shuffle:
            rng.shuffle(edges)
        return 1.0, list(edges)

    return _run(g, X, batches, cfg, val_edges, cfg.seed)
