"""Command-line entry point: ``csg <command> ...``."""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

from . import cycle_census, evaluation, signed_graph, wl_check
from .curriculum import PACING_KINDS, PacingParams
from .sgnn import save_checkpoint


def _graph(path) -> signed_graph.SignedGraph:
    p = Path(path)
    if not p.is_file():
        raise FileNotFoundError(f"graph file not found: {p}")
    return signed_graph.read_graph(p)


def cmd_ingest(args) -> int:
    src = Path(args.input)
    if not src.is_file():
        raise FileNotFoundError(f"input file not found: {src}")
    g, report, id_map = signed_graph.ingest_file(src)
    signed_graph.write_graph(g, args.output, id_map=id_map, report=report)
    sys.stdout.write(report.to_text())
    return 0


def cmd_census(args) -> int:
    g = _graph(args.graph)
    c = cycle_census.census(g, args.max_n, workers=args.workers)
    for n, cnt in sorted(c.counts.items()):
        print(f"n={n} total {cnt.total} balanced {cnt.balanced} unbalanced {cnt.unbalanced}")
    if args.output:
        Path(args.output).write_text(json.dumps(c.to_dict(), indent=2, sort_keys=True) + "\n")
    return 0


def cmd_score(args) -> int:
    g = _graph(args.graph)
    cycle_census.write_scores_csv(g, args.output)
    return 0


def _seeds(text: str) -> list[int]:
    if "," in text:
        return [int(x) for x in text.split(",") if x.strip()]
    n = int(text)
    if n < 1:
        raise argparse.ArgumentTypeError("--seeds needs a positive count or a comma list")
    return list(range(n))


def _config_from_args(args) -> evaluation.ExperimentConfig:
    base = {}
    if args.config:
        base = json.loads(Path(args.config).read_text())
    cfg = evaluation.ExperimentConfig.from_dict(base) if base else evaluation.ExperimentConfig()
    pacing = dict(cfg.pacing)
    for key, val in (("kind", args.pacing), ("lambda0", args.lambda0), ("T", args.T)):
        if val is not None:
            pacing[key] = val
    PacingParams(**pacing)
    cfg.pacing = pacing
    if args.seeds is not None:
        cfg.seeds = args.seeds
    model = dict(cfg.model)
    for key in ("epochs", "lr", "hidden"):
        val = getattr(args, key)
        if val is not None:
            model[key] = val
    cfg.model = model
    cfg.dataset = {"path": str(Path(args.graph))}
    return cfg


def cmd_train(args) -> int:
    g = _graph(args.graph)
    cfg = _config_from_args(args)
    out = Path(args.output)
    out.mkdir(parents=True, exist_ok=True)
    records, summary, runs = evaluation.run_experiment(cfg, g)

    (out / "config.snapshot").write_text(json.dumps(cfg.to_dict(), indent=2, sort_keys=True) + "\n")
    first = runs[0]
    sched_rows = first.schedule.dump_rows(first.csg.log[-1].t if first.csg.log else 0)
    (out / "schedule.csv").write_text("epoch,prefix_len,g_value\n"
                                      + "".join(f"{t},{k},{g_t!r}\n" for t, k, g_t in sched_rows))
    with open(out / "epochs.log", "w") as fh:
        for seed, run in zip(cfg.seeds, runs):
            for method, res in (("csg", run.csg), ("random", run.random)):
                for rec in res.log:
                    row = json.loads(rec.to_json())
                    fh.write(json.dumps({"seed": seed, "method": method, **row}) + "\n")
    with open(out / "metrics.jsonl", "w") as fh:
        for r in records:
            fh.write(r.to_json() + "\n")
    (out / "summary.txt").write_text(evaluation.format_summary(summary))
    save_checkpoint(first.csg.model, out / "model.ckpt",
                    extra={"run_seed": cfg.seeds[0], "method": "csg", "config_digest": cfg.digest()})
    sys.stdout.write(evaluation.format_summary(summary))
    return 0


def load_records(rundir) -> list[evaluation.MetricsRecord]:
    path = Path(rundir) / "metrics.jsonl"
    if not path.is_file():
        raise FileNotFoundError(f"no metrics.jsonl in {rundir}; run 'csg train' first")
    records = []
    for line in path.read_text().splitlines():
        if line.strip():
            records.append(evaluation.MetricsRecord(**json.loads(line)))
    return records


def cmd_eval(args) -> int:
    records = load_records(args.rundir)
    by_seed: dict = {}
    for r in records:
        by_seed.setdefault(r.seed, {})[r.method] = r
    cols = ["auc", "f1_binary", "auc_easy", "auc_hard"]
    methods = sorted({r.method for r in records})
    header = ["seed"] + [f"{m}_{'f1' if c == 'f1_binary' else c}" for c in cols for m in methods]
    print(",".join(header))
    for seed in sorted(by_seed):
        row = [str(seed)]
        for c in cols:
            for m in methods:
                r = by_seed[seed].get(m)
                row.append("" if r is None else f"{getattr(r, c):.6f}")
        print(",".join(row))
    print()
    sys.stdout.write(evaluation.format_summary(evaluation.summarize(records)))
    return 0


def cmd_verify(args) -> int:
    report = wl_check.verify_theorems(draws=args.draws, seed=args.seed)
    sys.stdout.write(report.to_text())
    return 0 if report.passed else 1


def cmd_synth(args) -> int:
    g = evaluation.synth_benchmark(args.n, args.communities, args.p_in, args.p_out, args.noise, args.seed)
    signed_graph.write_graph(g, args.output)
    t, p, q = signed_graph.edge_counts(g)
    print(f"nodes={g.n} edges={t} positive={p} negative={q}")
    return 0


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="csg", description="Curriculum training for signed GNNs.")
    sub = ap.add_subparsers(dest="command", required=True)

    p = sub.add_parser("ingest", help="raw 'src dst weight' records -> canonical signed edge list")
    p.add_argument("input")
    p.add_argument("-o", "--output", required=True)
    p.set_defaults(func=cmd_ingest)

    p = sub.add_parser("census", help="count balanced/unbalanced cycles of length 3..max-n")
    p.add_argument("graph")
    p.add_argument("--max-n", type=int, default=6, choices=range(3, 7), metavar="{3..6}")
    p.add_argument("--workers", type=int, default=1)
    p.add_argument("-o", "--output", help="optional JSON output")
    p.set_defaults(func=cmd_census)

    p = sub.add_parser("score", help="per-edge triangle difficulty scores")
    p.add_argument("graph")
    p.add_argument("-o", "--output", required=True)
    p.set_defaults(func=cmd_score)

    p = sub.add_parser("train", help="paired curriculum vs random-order training over seeds")
    p.add_argument("graph")
    p.add_argument("--config", help="JSON experiment config; flags override it")
    p.add_argument("--pacing", choices=PACING_KINDS, default=None)
    p.add_argument("--lambda0", type=float, default=None)
    p.add_argument("-T", type=int, default=None)
    p.add_argument("--seeds", type=_seeds, default=None, help="count (0..n-1) or comma list")
    p.add_argument("--epochs", type=int, default=None)
    p.add_argument("--lr", type=float, default=None)
    p.add_argument("--hidden", type=int, default=None)
    p.add_argument("-o", "--output", required=True)
    p.set_defaults(func=cmd_train)

    p = sub.add_parser("eval", help="per-seed metrics and summary for a run directory")
    p.add_argument("rundir")
    p.set_defaults(func=cmd_eval)

    p = sub.add_parser("verify-theory", help="check the ego-tree / adequacy argument on cycle fixtures")
    p.add_argument("--draws", type=int, default=10)
    p.add_argument("--seed", type=int, default=0)
    p.set_defaults(func=cmd_verify)

    p = sub.add_parser("synth", help="planted-partition signed benchmark graph")
    p.add_argument("--n", type=int, default=500)
    p.add_argument("--communities", type=int, default=2)
    p.add_argument("--p-in", type=float, default=0.1)
    p.add_argument("--p-out", type=float, default=0.05)
    p.add_argument("--noise", type=float, default=0.1)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("-o", "--output", required=True)
    p.set_defaults(func=cmd_synth)
    return ap


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except (OSError, ValueError, KeyError, RuntimeError) as exc:
        print(f"csg {args.command}: error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
