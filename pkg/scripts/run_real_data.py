"""Desk-scale run on a downloaded signed network (e.g. SNAP Slashdot or Epinions).

Download ``soc-sign-Slashdot090221.txt.gz`` or ``soc-sign-epinions.txt.gz``
from https://snap.stanford.edu/data/ and pass the paths. Each file is merged to
an undirected graph, reduced to ``--sample-nodes`` nodes and evaluated over
c in {0.2, 0.3}, k in {1, 2, 3} with 5 runs.

    python scripts/run_real_data.py data/real/soc-sign-Slashdot090221.txt.gz --out runs/real
"""
import argparse
import sys
import time
from pathlib import Path

from ggnet import evaluation as E
from ggnet.graph import format_stats_row, stats


def main(argv=None) -> int:
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("paths", nargs="+")
    ap.add_argument("--sample-nodes", type=int, default=2000)
    ap.add_argument("--sample-method", default="top-degree-induced",
                    choices=("top-degree-induced", "bfs-ball"))
    ap.add_argument("--runs", type=int, default=5)
    ap.add_argument("--jobs", type=int, default=1)
    ap.add_argument("--out", default="runs/real")
    args = ap.parse_args(argv)
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)

    for path in args.paths:
        cfg = E.ExperimentConfig(dataset=path, c_values=(0.2, 0.3), k_values=(1, 2, 3),
                                 runs=args.runs, sample_nodes=args.sample_nodes,
                                 sample_method=args.sample_method, jobs=args.jobs)
        t0 = time.perf_counter()
        name, truth = E.prepare_dataset(cfg)
        print(format_stats_row(Path(path).name, stats(truth)))
        summary = E.run_experiment(cfg, truth=truth, name=name)
        stem = Path(path).name.split(".")[0]
        with open(out / f"{stem}-results.csv", "w") as fh:
            E.write_results_csv(summary.results, fh, include_runtime=True)
        with open(out / f"{stem}-summary.json", "w") as fh:
            E.write_summary_json(summary, fh)
        for (_, c, k), cell in sorted(summary.cells.items()):
            acc = cell.avg_accuracy.mean
            print(f"  c={c:g} k={k}: accuracy {'undefined' if acc is None else f'{acc:.4f}'} "
                  f"predictive {cell.predictive_pct.mean:.4f} cancellations {cell.cancellations}")
        print(f"  {time.perf_counter() - t0:.1f} s")
    return 0


if __name__ == "__main__":
    sys.exit(main())
