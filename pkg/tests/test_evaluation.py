import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from csg.cycle_census import census, difficulty_scores
from csg.evaluation import (
    ExperimentConfig,
    MetricsRecord,
    SplitSpec,
    auc,
    easy_hard_split,
    f1_binary,
    format_summary,
    run_experiment,
    split_edges,
    split_sizes,
    summarize,
    synth_benchmark,
)
from csg.signed_graph import SignedGraph

from oracles import confusion_f1, pairwise_auc, random_signed_graph


def test_split_size_examples():
    assert split_sizes(100, (0.85, 0.05, 0.10)) == [85, 5, 10]
    assert split_sizes(7, (0.85, 0.05, 0.10)) == [6, 0, 1]


@settings(max_examples=100, deadline=None)
@given(st.integers(0, 5000))
def test_split_sizes_sum(m):
    s = split_sizes(m, (0.85, 0.05, 0.10))
    assert sum(s) == m
    assert all(abs(x - m * f) < 1 for x, f in zip(s, (0.85, 0.05, 0.10)))


def test_split_edges_partition():
    g = random_signed_graph(np.random.default_rng(0), 60, 0.1)
    tr, va, te = split_edges(g, SplitSpec(seed=4))
    assert (len(tr), len(va), len(te)) == tuple(split_sizes(g.m, (0.85, 0.05, 0.10)))
    assert sorted(tr + va + te) == sorted(g.edges)
    assert not (set(tr) & set(va) or set(tr) & set(te) or set(va) & set(te))
    assert split_edges(g, SplitSpec(seed=4)) == (tr, va, te)
    assert split_edges(g, SplitSpec(seed=5)) != (tr, va, te)


def test_split_spec_validation():
    with pytest.raises(ValueError):
        SplitSpec(0.5, 0.5, 0.5)


def test_auc_examples():
    assert auc([1, 0], [0.9, 0.1]) == 1.0
    assert auc([1, 0], [0.1, 0.9]) == 0.0
    assert auc([1, 0, 1, 0], [0.5] * 4) == 0.5
    with pytest.raises(ValueError):
        auc([1, 1], [0.2, 0.3])


@settings(max_examples=100, deadline=None)
@given(st.lists(st.tuples(st.booleans(), st.integers(0, 6)), min_size=2, max_size=60))
def test_auc_matches_pairwise(rows):
    y = [r[0] for r in rows]
    if all(y) or not any(y):
        return
    s = [r[1] / 6 for r in rows]
    assert auc(y, s) == pytest.approx(pairwise_auc(y, s), abs=1e-12)


def test_f1_examples():
    y = [1] * 90 + [0] * 10
    assert f1_binary(y, [1] * 100) == pytest.approx(0.9474, abs=1e-4)
    assert f1_binary([0, 0], [0, 0]) == 0.0
    assert f1_binary([1, 0], [1, 0]) == 1.0


@settings(max_examples=100, deadline=None)
@given(st.lists(st.tuples(st.booleans(), st.booleans()), min_size=1, max_size=50))
def test_f1_matches_confusion(rows):
    y = [r[0] for r in rows]
    p = [r[1] for r in rows]
    assert f1_binary(y, p) == pytest.approx(confusion_f1(y, p), abs=1e-12)


def test_easy_hard_split():
    g = SignedGraph(5, [(0, 1, 1), (1, 2, 1), (0, 2, -1), (3, 4, 1)])
    scores = difficulty_scores(g)
    easy, hard = easy_hard_split(g.edges, scores)
    assert [e.key for e in easy] == [(3, 4)]
    assert len(hard) == 3


@pytest.mark.parametrize("seed", range(3))
def test_synth_noise_free_is_balanced(seed):
    g = synth_benchmark(n=60, p_in=0.2, p_out=0.1, noise=0.0, seed=seed)
    c = census(g, 6)
    assert all(c[k].unbalanced == 0 for k in range(3, 7))
    assert c[3].total > 0


def test_three_groups_allow_all_negative_triangles():
    # one node per group closes a triangle of three crossing edges
    g = synth_benchmark(n=3, communities=3, p_in=1.0, p_out=1.0, noise=0.0)
    assert census(g, 3)[3].unbalanced == 1


def test_synth_deterministic():
    assert synth_benchmark(n=60, seed=1) == synth_benchmark(n=60, seed=1)
    assert synth_benchmark(n=60, seed=1) != synth_benchmark(n=60, seed=2)


def test_synth_validation():
    with pytest.raises(ValueError):
        synth_benchmark(n=10, noise=1.5)


def _rec(seed, method, a):
    return MetricsRecord(seed, method, a, 0.5, a, float("nan"), 10, 5, 5, 1, "x")


def test_summary_statistics():
    recs = [_rec(0, "csg", 0.8), _rec(1, "csg", 0.9), _rec(2, "csg", 1.0)]
    s = summarize(recs)
    mean, std = s["csg_auc"]
    assert mean == pytest.approx(0.9)
    assert std == pytest.approx(0.1)
    assert math.isnan(s["csg_auc_hard"][0])
    assert format_summary(s).splitlines()[0] == "metric,mean,std"


def test_config_round_trip():
    cfg = ExperimentConfig(seeds=[3])
    assert ExperimentConfig.from_dict(cfg.to_dict()) == cfg
    assert len(cfg.digest()) == 12
    with pytest.raises(ValueError):
        ExperimentConfig.from_dict({"bogus": 1})


def test_small_experiment_runs():
    cfg = ExperimentConfig(seeds=[0], model={"hidden": 4, "head_hidden": 4, "epochs": 5},
                           feature_dim=8, dataset={"synth": {"n": 60, "seed": 0}})
    records, summary, runs = run_experiment(cfg)
    assert [r.method for r in records] == ["csg", "random"]
    assert all(0 <= r.auc <= 1 for r in records)
    assert records[0].n_test == records[0].n_easy + records[0].n_hard
    sizes = [e.subset_size for e in runs[0].csg.log]
    assert sizes == sorted(sizes)
