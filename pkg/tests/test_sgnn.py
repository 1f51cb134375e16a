import math

import numpy as np
import pytest

from csg.curriculum import PacingParams, build_schedule
from csg.cycle_census import difficulty_scores
from csg.signed_graph import SignedEdge, SignedGraph
from csg.sgnn import (
    SgnnModel,
    TrainConfig,
    forward,
    init_features,
    load_checkpoint,
    loss_and_gradients,
    predict_edge,
    predict_edges,
    save_checkpoint,
    train_csg,
    train_random,
)

from oracles import random_signed_graph


def test_init_features_determinism_and_range():
    a = init_features(50, 64, seed=3)
    assert a.shape == (50, 64)
    assert np.array_equal(a, init_features(50, 64, seed=3))
    assert not np.array_equal(a, init_features(50, 64, seed=4))
    assert np.all((a >= -1) & (a < 1))


def test_init_features_moments():
    x = init_features(1000, 1000, seed=0)
    sigma = math.sqrt(1 / 3) / 1000
    assert abs(x.mean()) < 3 * sigma
    assert x.var() == pytest.approx(1 / 3, abs=5e-3)


def test_isolated_node_sees_only_itself():
    g = SignedGraph(3, [(0, 1, 1)])
    m = SgnnModel.init(4, hidden=3, layers=2, head_hidden=0, seed=1)
    X = init_features(3, 4, seed=2)
    H = forward(g, m, X)
    # empty neighbourhoods aggregate to zero
    h1p = np.tanh(X[2] @ m.W_pos[0][:4])
    h1n = np.tanh(X[2] @ m.W_neg[0][:4])
    h2p = np.tanh(h1p @ m.W_pos[1][:3])
    h2n = np.tanh(h1n @ m.W_neg[1][:3])
    assert np.allclose(H[2], np.concatenate([h2p, h2n]), atol=1e-12)


def test_hand_computed_three_node():
    # 0 -+- 1, 0 --- 2, no edge between 1 and 2
    g = SignedGraph(3, [(0, 1, 1), (0, 2, -1)])
    X = np.array([[1.0, 0.0], [0.0, 1.0], [1.0, 1.0]])
    m = SgnnModel.init(2, hidden=2, layers=2, head_hidden=0, seed=0)
    Wp1, Wn1, Wp2, Wn2 = m.W_pos[0], m.W_neg[0], m.W_pos[1], m.W_neg[1]
    t = np.tanh
    # layer 1: sign-separated means
    agg_p = np.array([X[1], X[0], [0, 0]])
    agg_n = np.array([X[2], [0, 0], X[0]])
    hp = np.array([t(np.concatenate([X[i], agg_p[i]]) @ Wp1) for i in range(3)])
    hn = np.array([t(np.concatenate([X[i], agg_n[i]]) @ Wn1) for i in range(3)])
    # layer 2: balanced reach feeds the positive channel
    ap = np.array([(hp[1] + hn[2]) / 2, hp[0], hn[0]])
    an = np.array([(hn[1] + hp[2]) / 2, hn[0], hp[0]])
    hp2 = np.array([t(np.concatenate([hp[i], ap[i]]) @ Wp2) for i in range(3)])
    hn2 = np.array([t(np.concatenate([hn[i], an[i]]) @ Wn2) for i in range(3)])
    assert np.allclose(forward(g, m, X), np.hstack([hp2, hn2]), atol=1e-12)


def test_disjoint_copies_match():
    base = [(0, 1, 1), (1, 2, -1), (0, 2, -1), (2, 3, 1)]
    g = SignedGraph(8, base + [(u + 4, v + 4, s) for u, v, s in base])
    X0 = init_features(4, 6, seed=5)
    X = np.vstack([X0, X0])
    m = SgnnModel.init(6, hidden=5, layers=3, seed=7)
    H = forward(g, m, X)
    assert np.array_equal(H[:4], H[4:])


@pytest.mark.parametrize("seed", range(3))
def test_permutation_equivariance(seed):
    rng = np.random.default_rng(seed)
    g = random_signed_graph(rng, 40, 0.15)
    perm = rng.permutation(40)
    X = init_features(40, 8, seed=seed)
    Xp = np.empty_like(X)
    Xp[perm] = X
    m = SgnnModel.init(8, hidden=6, layers=2, seed=seed)
    H = forward(g, m, X)
    Hp = forward(g.relabel(perm), m, Xp)
    assert np.max(np.abs(Hp[perm] - H)) < 1e-10


def test_predict_edge_neutral_and_clipped():
    H = init_features(4, 4, seed=0)
    m = SgnnModel.init(2, hidden=2, layers=1, head_hidden=0)
    m.w_cls = np.zeros(8)
    assert predict_edge(m, H, SignedEdge(0, 1, 1)) == 0.5
    m.b_cls = 1e6
    p = predict_edge(m, H, (1, 0, -1))
    assert 1 - 1e-12 < p < 1
    m.b_cls = -1e6
    p = predict_edge(m, H, (2, 3, 1))
    assert 0 < p < 1e-12
    assert p == pytest.approx(1 / (1 + math.exp(30)), rel=1e-9)


def _graph_and_batch(seed=0, n=25):
    rng = np.random.default_rng(seed)
    g = random_signed_graph(rng, n, 0.25, neg_frac=0.4)
    return g, list(g.edges)


def test_loss_reference_points():
    g, batch = _graph_and_batch()
    m = SgnnModel.init(4, hidden=3, layers=2, head_hidden=0)
    X = init_features(g.n, 4)
    m.w_cls = np.zeros_like(m.w_cls)
    m.b_cls = 0.0
    loss, _ = loss_and_gradients(g, m, X, batch)
    assert loss == pytest.approx(math.log(2), abs=1e-12)
    # perfect separation via saturated bias on an all-positive batch
    pos = [e for e in batch if e.sign > 0]
    m.b_cls = 29.0
    loss, _ = loss_and_gradients(g, m, X, pos)
    assert loss < 1e-6
    with pytest.raises(ValueError):
        loss_and_gradients(g, m, X, [])
    with pytest.raises(IndexError):
        loss_and_gradients(g, m, X, [(0, g.n, 1)])


@pytest.mark.parametrize("head_hidden,layers", [(0, 1), (0, 2), (5, 2), (4, 3)])
def test_finite_difference_gradients(head_hidden, layers):
    g, batch = _graph_and_batch(seed=layers + head_hidden, n=18)
    X = init_features(g.n, 4, seed=1)
    m = SgnnModel.init(4, hidden=3, layers=layers, head_hidden=head_hidden, seed=2)
    _, grads = loss_and_gradients(g, m, X, batch)
    h = 1e-5
    for name, value in m.params().items():
        base = np.array(value, dtype=float)
        num = np.zeros_like(base)
        for idx in np.ndindex(base.shape):
            vals = {}
            for sgn in (1, -1):
                bumped = base.copy()
                bumped[idx] += sgn * h
                trial = m.copy()
                trial.set_params({**m.params(), name: bumped})
                vals[sgn] = loss_and_gradients(g, trial, X, batch)[0]
            num[idx] = (vals[1] - vals[-1]) / (2 * h)
        err = np.linalg.norm(num - grads[name]) / max(np.linalg.norm(num) + np.linalg.norm(grads[name]), 1e-12)
        assert err < 1e-4, name


def test_checkpoint_round_trip(tmp_path):
    m = SgnnModel.init(6, hidden=4, layers=3, head_hidden=5, seed=9)
    save_checkpoint(m, tmp_path / "m.ckpt", extra={"note": "x"})
    m2, meta = load_checkpoint(tmp_path / "m.ckpt")
    assert meta["layers"] == 3 and meta["note"] == "x"
    for k, v in m.params().items():
        assert np.array_equal(v, m2.params()[k])
    H = init_features(5, 8)
    edges = [(0, 1, 1), (2, 4, -1)]
    assert np.array_equal(predict_edges(m, H, edges), predict_edges(m2, H, edges))


def _setup(seed=0):
    rng = np.random.default_rng(seed)
    g = random_signed_graph(rng, 40, 0.2)
    X = init_features(g.n, 8, seed=seed)
    scores = difficulty_scores(g)
    return g, X, scores


def test_training_is_deterministic():
    g, X, scores = _setup()
    sched = build_schedule(g.edges, scores, PacingParams("linear", 0.25, 5))
    cfg = TrainConfig(hidden=4, head_hidden=4, epochs=8, seed=3)
    a = train_csg(g, X, sched, cfg, val_edges=g.edges[:10])
    b = train_csg(g, X, sched, cfg, val_edges=g.edges[:10])
    assert [r.to_json() for r in a.log] == [r.to_json() for r in b.log]
    sizes = [r.subset_size for r in a.log]
    assert sizes == sorted(sizes) and sizes[-1] == g.m


def test_full_curriculum_equals_unshuffled_baseline():
    g, X, scores = _setup(1)
    sched = build_schedule(g.edges, scores, PacingParams("linear", 1.0, 5))
    cfg = TrainConfig(hidden=4, head_hidden=4, epochs=6, seed=0)
    a = train_csg(g, X, sched, cfg)
    b = train_random(g, X, sched.ordered_edges, cfg, shuffle=False)
    assert [r.loss for r in a.log] == [r.loss for r in b.log]
    for k, v in a.model.params().items():
        assert np.array_equal(v, b.model.params()[k])


@pytest.mark.parametrize("optimizer,lr", [("adam", 0.02), ("sgd", 0.2)])
def test_loss_decreases(optimizer, lr):
    g, X, _ = _setup(2)
    cfg = TrainConfig(hidden=8, head_hidden=8, epochs=60, optimizer=optimizer, lr=lr, seed=1)
    res = train_random(g, X, g.edges, cfg)
    assert res.log[-1].loss < res.log[0].loss


def test_dimension_mismatch():
    g, X, _ = _setup()
    m = SgnnModel.init(5, hidden=3)
    with pytest.raises(ValueError):
        forward(g, m, X)
    with pytest.raises(ValueError):
        forward(g, SgnnModel.init(8, hidden=3), X[:-1])
