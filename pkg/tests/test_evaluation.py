import io
import json

import numpy as np
import pytest

from ggnet import evaluation as E
from ggnet.evaluation import ExperimentConfig, RunResult, UndefinedMetric
from ggnet.graph import SignedGraph, karate_graph
from ggnet.inference import PredictionSet


def make_pred(edges, signs, universe=None):
    u = np.array([e[0] for e in edges], dtype=np.int64)
    v = np.array([e[1] for e in edges], dtype=np.int64)
    return PredictionSet(u, v, np.array(signs, dtype=np.int64), np.ones(len(edges)),
                         universe if universe is not None else len(edges))


@pytest.fixture
def four_edges():
    # three positive and one negative edge
    return SignedGraph.from_edges(5, [(0, 1, 1.0), (1, 2, 1.0), (2, 3, 1.0), (3, 4, -1.0)])


def test_accuracy_all_correct(four_edges):
    pred = make_pred([(0, 1), (1, 2), (2, 3), (3, 4)], [1, 1, 1, -1])
    assert E.average_accuracy(pred, four_edges) == 1.0


def test_accuracy_per_class_mean(four_edges):
    pred = make_pred([(0, 1), (1, 2), (2, 3), (3, 4)], [1, 1, -1, -1])
    assert E.average_accuracy(pred, four_edges) == pytest.approx(0.8333, abs=1e-4)


def test_accuracy_all_flipped(four_edges):
    pred = make_pred([(0, 1), (1, 2), (2, 3), (3, 4)], [-1, -1, -1, 1])
    assert E.average_accuracy(pred, four_edges) == 0.0


def test_accuracy_undefined_without_a_class(four_edges):
    with pytest.raises(UndefinedMetric):
        E.average_accuracy(make_pred([(0, 1), (1, 2)], [1, 1]), four_edges)


def test_accuracy_all_scope_counts_missing_as_wrong(four_edges):
    pred = make_pred([(0, 1), (3, 4)], [1, -1], universe=4)
    assert E.average_accuracy(pred, four_edges) == 1.0
    assert E.average_accuracy(pred, four_edges, scope="all") == pytest.approx((1 / 3 + 1) / 2)


def test_accuracy_rejects_edge_outside_truth(four_edges):
    with pytest.raises(ValueError):
        E.average_accuracy(make_pred([(0, 4)], [1]), four_edges)


def test_accuracy_invariant_to_class_duplication():
    rng = np.random.default_rng(0)
    n = 60
    iu, ju = np.triu_indices(n, 1)
    pick = rng.choice(len(iu), 300, replace=False)
    signs = rng.choice([-1.0, 1.0], 300)
    truth = SignedGraph(n, False, iu[pick], ju[pick], signs)
    guesses = rng.choice([-1, 1], 300)
    base = E.average_accuracy(make_pred(list(zip(truth.src, truth.dst)), guesses), truth)
    # copy every positive edge (and its prediction) onto fresh nodes
    pos = truth.weight > 0
    off = n
    big = SignedGraph(2 * n, False,
                      np.concatenate([truth.src, truth.src[pos] + off]),
                      np.concatenate([truth.dst, truth.dst[pos] + off]),
                      np.concatenate([truth.weight, truth.weight[pos]]))
    lookup = dict(zip(zip(truth.src.tolist(), truth.dst.tolist()), guesses.tolist()))
    big_guess = [lookup[(u % n, v % n)] for u, v in zip(big.src.tolist(), big.dst.tolist())]
    dup = E.average_accuracy(make_pred(list(zip(big.src, big.dst)), big_guess), big)
    assert dup == pytest.approx(base, abs=1e-12)


def test_random_guessing_baseline():
    rng = np.random.default_rng(1)
    n = 400
    iu, ju = np.triu_indices(n, 1)
    pick = rng.choice(len(iu), 2000, replace=False)
    truth = SignedGraph(n, False, iu[pick], ju[pick], np.where(np.arange(2000) % 2, 1.0, -1.0))
    edges = list(zip(truth.src, truth.dst))
    scores = [E.average_accuracy(make_pred(edges, rng.choice([-1, 1], 2000)), truth)
              for _ in range(1000)]
    assert abs(np.mean(scores) - 0.5) <= 0.05
    assert np.all(np.abs(np.array(scores) - 0.5) <= 0.05)


def test_predictive_percentage():
    karate = karate_graph()
    e = list(zip(karate.src, karate.dst))
    assert E.predictive_percentage(make_pred(e, [1] * 78, 78), karate) == 1.0
    assert E.predictive_percentage(make_pred([], [], 78), karate) == 0.0
    assert E.predictive_percentage(make_pred(e[:30], [1] * 30, 78), karate) == pytest.approx(0.3846, abs=1e-4)
    with pytest.raises(ValueError):
        E.predictive_percentage(make_pred([], [], 0), SignedGraph.from_edges(3, []))


def result(acc, k=2, run=0, pct=0.5, converged=True):
    return RunResult("d", 0.2, k, run, run, acc, pct, 3, 0.0, converged)


def test_aggregate_arithmetic():
    s = E.aggregate([result(0.6), result(0.7, run=1)])
    assert s.cell("d", 0.2, 2).avg_accuracy.mean == pytest.approx(0.65)
    single = E.aggregate([result(0.9)]).cell("d", 0.2, 2).avg_accuracy
    assert (single.mean, single.std) == (0.9, 0.0)
    assert E.aggregate([result(1.0), result(0.0, run=1)]).cell("d", 0.2, 2).avg_accuracy.mean == 0.5


def test_aggregate_excludes_undefined_and_failed():
    rs = [result(0.5, run=r) for r in range(4)] + [result(None, run=4)]
    cell = E.aggregate(rs).cell("d", 0.2, 2)
    assert cell.runs == 5 and cell.avg_accuracy.n == 4 and cell.avg_accuracy.excluded == 1
    assert cell.predictive_pct.n == 5
    cell = E.aggregate([result(0.5), result(0.9, run=1, converged=False)]).cell("d", 0.2, 2)
    assert cell.failed == 1 and cell.avg_accuracy.mean == 0.5
    with pytest.raises(ValueError):
        E.aggregate([])


def test_sample_standard_deviation():
    cell = E.aggregate([result(a, run=i) for i, a in enumerate([0.2, 0.4, 0.9])]).cell("d", 0.2, 2)
    assert cell.avg_accuracy.std == pytest.approx(np.std([0.2, 0.4, 0.9], ddof=1))


def test_run_experiment_structure():
    cfg = ExperimentConfig(dataset="karate-planted", c_values=(0.2,), k_values=(2,), runs=5)
    s = E.run_experiment(cfg)
    cell = s.cell("karate-planted", 0.2, 2)
    assert cell.runs == 5 and len(s.results) == 5
    assert [r.seed for r in s.results] == [0, 1, 2, 3, 4]
    assert cell.avg_accuracy.mean is not None or cell.avg_accuracy.excluded == 5
    for r in s.results:
        assert 0 <= r.predictive_pct <= 1
        assert r.avg_accuracy is None or 0 <= r.avg_accuracy <= 1


def test_order_zero_predicts_nothing():
    s = E.run_experiment(ExperimentConfig(dataset="karate-planted", k_values=(0,), runs=2))
    cell = s.cell("karate-planted", 0.2, 0)
    assert cell.predictive_pct.mean == 0.0
    assert cell.avg_accuracy.mean is None and cell.avg_accuracy.excluded == 2


def test_run_experiment_deterministic():
    cfg = ExperimentConfig(dataset="communities:3", c_values=(0.2, 0.3), k_values=(1, 2), runs=2)
    outs = []
    for _ in range(2):
        s = E.run_experiment(cfg)
        csv_buf, json_buf = io.StringIO(), io.StringIO()
        E.write_results_csv(s.results, csv_buf)
        E.write_summary_json(s, json_buf)
        outs.append((csv_buf.getvalue(), json_buf.getvalue()))
    assert outs[0] == outs[1]
    header = outs[0][0].splitlines()[0]
    assert header == "dataset,c,k,run,seed,avg_accuracy,predictive_pct,sweeps,runtime_s"
    nested = json.loads(outs[0][1])
    assert set(nested["communities:3"]) == {"0.2", "0.3"}
    assert set(nested["communities:3"]["0.2"]["2"]["avg_accuracy"]) >= {"mean", "std", "excluded"}


def test_predictive_percentage_monotone_in_k():
    cfg = ExperimentConfig(dataset="communities:1", k_values=(1, 2, 3, 4), runs=3)
    s = E.run_experiment(cfg)
    m = E.parse_dataset("communities:1").num_edges
    for run in range(3):
        rs = sorted((r for r in s.results if r.run == run), key=lambda r: r.k)
        for prev, cur in zip(rs, rs[1:]):
            # any drop must be explained by recorded cancellations
            drop = (prev.predictive_pct - cur.predictive_pct) * m
            assert drop <= cur.cancellations + 1e-9


def test_config_validation():
    for bad in (dict(runs=0), dict(c_values=(-0.1,)), dict(k_values=(-1,)),
                dict(accuracy_scope="some")):
        with pytest.raises(ValueError):
            ExperimentConfig(**bad)


def test_sampled_dataset_name():
    cfg = ExperimentConfig(dataset="karate-planted", runs=1, sample_nodes=20)
    name, g = E.prepare_dataset(cfg)
    assert name == "karate-planted@20" and g.n == 20


def test_dataset_from_path(tmp_path):
    path = tmp_path / "tiny.txt"
    path.write_text("1 2 1\n2 1 1\n2 3 -1\n")
    g = E.parse_dataset(str(path))
    assert not g.directed and g.edges() == [(0, 1, 2.0), (1, 2, -1.0)]
