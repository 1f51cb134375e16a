"""
Curriculum vs. random-order training
====================================

One paired run on the synthetic benchmark: same split, features and
initial weights, trained once with the curriculum and once without.
Takes about half a minute.
"""

from csg.evaluation import ExperimentConfig, format_summary, run_experiment

cfg = ExperimentConfig(seeds=[0, 1], dataset={"synth": {"n": 500, "noise": 0.1}})
records, summary, runs = run_experiment(cfg)

for r in records:
    print(f"seed {r.seed} {r.method:6s} auc {r.auc:.3f}  easy {r.auc_easy:.3f}  hard {r.auc_hard:.3f}  "
          f"best epoch {r.best_epoch}")

# the curriculum run's training log: subset size grows until epoch T
log = runs[0].csg.log
for rec in log[:3] + log[18:21]:
    print(f"t={rec.t:3d} g={rec.g_t:.3f} |subset|={rec.subset_size} loss={rec.loss:.4f} val_auc={rec.val_auc:.3f}")

print()
print(format_summary(summary))
