"""Metrics and the end-to-end relationship-inference experiment.

One run: simulate the team game on the signed truth graph, build the GGN of
the resulting teams against the unsigned skeleton, score the skeleton edges
with the truncated exponential kernel, and compare signs with the truth.
"""
from __future__ import annotations

import csv
import json
import math
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, field
from typing import TextIO

import numpy as np

from . import graph as graphs
from .ggn import build_team_ggn, filter_edges
from .graph import SignedGraph
from .inference import PredictionSet, exponential_kernel, predict_signs
from .team_game import TeamGameConfig, simulate

RESULTS_HEADER = ["dataset", "c", "k", "run", "seed", "avg_accuracy", "predictive_pct",
                  "sweeps", "runtime_s"]
ACCURACY_SCOPES = ("predicted", "all")


class UndefinedMetric(ValueError):
    """A metric has no defined value for the given input."""


def _truth_signs(pred: PredictionSet, truth: SignedGraph) -> np.ndarray:
    if truth.directed:
        raise ValueError("truth graph must be undirected")
    keys = truth.pair_keys()
    probe = np.minimum(pred.u, pred.v) * max(truth.n, 1) + np.maximum(pred.u, pred.v)
    pos = np.searchsorted(keys, probe)
    ok = pos < len(keys)
    ok[ok] = keys[pos[ok]] == probe[ok]
    if not ok.all():
        raise ValueError("prediction refers to an edge absent from the truth graph")
    return np.sign(truth.weight[pos])


def average_accuracy(pred: PredictionSet, truth: SignedGraph, scope: str = "predicted") -> float:
    """Mean of the accuracies on truly positive and truly negative edges.

    With ``scope="predicted"`` only predicted edges count. With ``"all"``
    every truth edge counts and unpredicted ones are wrong. Raises
    :class:`UndefinedMetric` when either class is empty.
    """
    if scope not in ACCURACY_SCOPES:
        raise ValueError(f"scope must be one of {ACCURACY_SCOPES}")
    t = _truth_signs(pred, truth)
    correct = pred.sign == t
    if scope == "predicted":
        totals = {s: int(np.count_nonzero(t == s)) for s in (1, -1)}
    else:
        totals = {s: int(np.count_nonzero(np.sign(truth.weight) == s)) for s in (1, -1)}
    hits = {s: int(np.count_nonzero(correct & (t == s))) for s in (1, -1)}
    for s, name in ((1, "positive"), (-1, "negative")):
        if totals[s] == 0:
            raise UndefinedMetric(f"no {name} edges to score")
    return 0.5 * (hits[1] / totals[1] + hits[-1] / totals[-1])


def predictive_percentage(pred: PredictionSet, skeleton: SignedGraph) -> float:
    """Fraction of skeleton edges that received a nonzero score."""
    if skeleton.num_edges == 0:
        raise ValueError("skeleton has no edges")
    return len(pred) / skeleton.num_edges


@dataclass(frozen=True)
class ExperimentConfig:
    dataset: str = "karate-planted"
    c_values: tuple = (0.2,)
    k_values: tuple = (2,)
    runs: int = 5
    base_seed: int = 0
    symmetrize: bool = True
    tie_rule: str = "current-first"
    accuracy_scope: str = "predicted"
    max_sweeps: int = 200
    sample_nodes: int | None = None
    sample_method: str = "top-degree-induced"
    jobs: int = 1

    def __post_init__(self):
        object.__setattr__(self, "c_values", tuple(float(c) for c in self.c_values))
        object.__setattr__(self, "k_values", tuple(int(k) for k in self.k_values))
        if self.runs < 1:
            raise ValueError("runs must be at least 1")
        if any(c < 0 for c in self.c_values) or any(k < 0 for k in self.k_values):
            raise ValueError("c and k values must be non-negative")
        if not self.c_values or not self.k_values:
            raise ValueError("need at least one c and one k value")
        if self.accuracy_scope not in ACCURACY_SCOPES:
            raise ValueError(f"accuracy_scope must be one of {ACCURACY_SCOPES}")


@dataclass
class RunResult:
    dataset: str
    c: float
    k: int
    run: int
    seed: int
    avg_accuracy: float | None
    predictive_pct: float
    sweeps: int
    runtime: float
    converged: bool = True
    # edges predicted at the previous (smaller) k of the sweep but not at this one
    cancellations: int = 0


@dataclass
class MetricSummary:
    mean: float | None
    std: float | None
    n: int
    excluded: int = 0


@dataclass
class CellSummary:
    dataset: str
    c: float
    k: int
    runs: int
    avg_accuracy: MetricSummary
    predictive_pct: MetricSummary
    failed: int = 0
    cancellations: int = 0


@dataclass
class Summary:
    cells: dict = field(default_factory=dict)
    results: list = field(default_factory=list)

    def cell(self, dataset: str, c: float, k: int) -> CellSummary:
        return self.cells[(dataset, float(c), int(k))]

    def to_json_dict(self) -> dict:
        out: dict = {}
        for (dataset, c, k), cell in sorted(self.cells.items()):
            out.setdefault(dataset, {}).setdefault(repr(c), {})[str(k)] = {
                "runs": cell.runs,
                "avg_accuracy": asdict(cell.avg_accuracy),
                "predictive_pct": asdict(cell.predictive_pct),
                "failed": cell.failed,
                "cancellations": cell.cancellations,
            }
        return out


def _describe(values: list[float], excluded: int) -> MetricSummary:
    if not values:
        return MetricSummary(None, None, 0, excluded)
    mean = math.fsum(values) / len(values)
    std = float(np.std(values, ddof=1)) if len(values) > 1 else 0.0
    return MetricSummary(mean, std, len(values), excluded)


def aggregate(results: list[RunResult]) -> Summary:
    """Mean and sample standard deviation per ``(dataset, c, k)``.

    Runs with undefined accuracy are left out of the accuracy statistics and
    counted in ``excluded``; non-converged runs are left out of both metrics
    and counted in ``failed``.
    """
    if not results:
        raise ValueError("no results to aggregate")
    groups: dict = {}
    for r in sorted(results, key=lambda r: (r.dataset, r.c, r.k, r.seed)):
        groups.setdefault((r.dataset, float(r.c), int(r.k)), []).append(r)
    summary = Summary(results=sorted(results, key=lambda r: (r.dataset, r.c, r.k, r.run)))
    for key, rs in groups.items():
        ok = [r for r in rs if r.converged]
        acc = [r.avg_accuracy for r in ok if r.avg_accuracy is not None]
        summary.cells[key] = CellSummary(
            dataset=key[0], c=key[1], k=key[2], runs=len(rs),
            avg_accuracy=_describe(acc, len(ok) - len(acc)),
            predictive_pct=_describe([r.predictive_pct for r in ok], 0),
            failed=len(rs) - len(ok),
            cancellations=sum(r.cancellations for r in rs),
        )
    return summary


def parse_dataset(spec: str) -> SignedGraph:
    """Resolve a dataset spec to an undirected signed graph.

    Builtins: ``karate`` (all +1), ``karate-planted[:node]`` (default node 23),
    ``communities[:seed]`` (200 nodes, degree 10, 10% noise). Anything else is
    read as an edge-list path and merged to undirected.
    """
    name, _, arg = spec.partition(":")
    if name == "karate":
        return graphs.karate_graph()
    if name == "karate-planted":
        return graphs.karate_with_planted_signs(int(arg) if arg else 23)
    if name == "communities":
        return graphs.planted_communities(seed=int(arg) if arg else 0)
    return graphs.make_undirected(graphs.load_edge_list(spec))


def prepare_dataset(cfg: ExperimentConfig) -> tuple[str, SignedGraph]:
    g = parse_dataset(cfg.dataset)
    name = cfg.dataset
    if cfg.sample_nodes is not None:
        g = graphs.sample_subgraph(g, cfg.sample_nodes, cfg.sample_method, cfg.base_seed)
        name = f"{cfg.dataset}@{cfg.sample_nodes}"
    return name, g


def _one_simulation(args) -> list[RunResult]:
    name, truth, cfg, c, run = args
    seed = cfg.base_seed + run
    skeleton = graphs.to_skeleton(truth)
    t0 = time.perf_counter()
    sim = simulate(truth, TeamGameConfig(c=c, seed=seed, max_sweeps=cfg.max_sweeps,
                                         tie_rule=cfg.tie_rule))
    ggn = filter_edges(build_team_ggn(sim.partition, skeleton, c, cfg.tie_rule), skeleton)
    adjacency = ggn.adjacency()
    shared = time.perf_counter() - t0
    out = []
    previous: set | None = None
    for k in sorted(set(cfg.k_values)):
        t1 = time.perf_counter()
        pred = predict_signs(exponential_kernel(adjacency, k), skeleton, cfg.symmetrize)
        try:
            acc = average_accuracy(pred, truth, cfg.accuracy_scope)
        except UndefinedMetric:
            acc = None
        current = set(zip(pred.u.tolist(), pred.v.tolist()))
        lost = len(previous - current) if previous is not None else 0
        previous = current
        out.append(RunResult(name, c, k, run, seed, acc, predictive_percentage(pred, skeleton),
                             sim.sweeps, shared + time.perf_counter() - t1, sim.converged, lost))
    return out


def run_experiment(cfg: ExperimentConfig, truth: SignedGraph | None = None,
                   name: str | None = None) -> Summary:
    """Run every ``(c, run)`` simulation and score it at every ``k``.

    The team game does not depend on ``k``, so one simulation (seeded with
    ``base_seed + run``) is shared by all kernel orders.
    """
    if truth is None:
        name, truth = prepare_dataset(cfg)
    truth = graphs.make_undirected(truth)
    name = name or cfg.dataset
    tasks = [(name, truth, cfg, c, run) for c in cfg.c_values for run in range(cfg.runs)]
    if cfg.jobs > 1:
        with ProcessPoolExecutor(max_workers=cfg.jobs) as pool:
            batches = list(pool.map(_one_simulation, tasks))
    else:
        batches = [_one_simulation(t) for t in tasks]
    return aggregate([r for batch in batches for r in batch])


def _fmt(x) -> str:
    return "" if x is None else repr(float(x))


def write_results_csv(results: list[RunResult], stream: TextIO, include_runtime: bool = False) -> None:
    """One row per run; undefined accuracy is an empty cell.

    Runtimes are written only on request so that repeated runs produce
    identical files.
    """
    writer = csv.writer(stream, lineterminator="\n")
    writer.writerow(RESULTS_HEADER)
    for r in sorted(results, key=lambda r: (r.dataset, r.c, r.k, r.run)):
        writer.writerow([r.dataset, repr(float(r.c)), r.k, r.run, r.seed, _fmt(r.avg_accuracy),
                         _fmt(r.predictive_pct), r.sweeps,
                         f"{r.runtime:.3f}" if include_runtime else ""])


def write_summary_json(summary: Summary, stream: TextIO) -> None:
    json.dump(summary.to_json_dict(), stream, indent=2, sort_keys=True)
    stream.write("\n")
