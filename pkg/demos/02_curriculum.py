"""
Difficulty scores and the training curriculum
=============================================

Score every edge, sort easy to hard and watch the training prefix grow
under the three pacing functions.
"""

from collections import Counter

from csg.curriculum import PACING_KINDS, PacingParams, build_schedule, pacing_value
from csg.cycle_census import balance_ratio_report, difficulty_scores
from csg.evaluation import synth_benchmark

g = synth_benchmark(n=300, noise=0.1, seed=1)
scores = difficulty_scores(g)

# most edges have no unbalanced triangle at all
easy = sum(1 for s in scores.values() if s == 0)
print(f"{easy} of {g.m} edges score 0")
print("most common non-zero scores:", Counter(s for s in scores.values() if s).most_common(4))

# pacing functions share g(0) = lambda0 and reach 1 at T
print("\n t  " + "  ".join(f"{k:>9}" for k in PACING_KINDS))
for t in (0, 2, 5, 10, 15, 20):
    row = [pacing_value(PacingParams(k, 0.25, 20), t) for k in PACING_KINDS]
    print(f"{t:2d}  " + "  ".join(f"{v:9.3f}" for v in row))

# the subset at each epoch is a prefix of the sorted edge list
sched = build_schedule(g.edges, scores, PacingParams("linear", 0.25, 20))
for t in (1, 5, 10, 20):
    sub = sched.subset_at(t)
    print(f"epoch {t:2d}: {len(sub):5d} edges, {balance_ratio_report(g, sub)}")
