"""Command-line front end: ``ggn <subcommand> [flags]``.

Exit status is 0 on success, 1 on a runtime failure and 2 on a usage error.
Flags may also come from a JSON ``--config`` file whose keys mirror the flag
names; flags given explicitly on the command line win.
"""
from __future__ import annotations

import argparse
import json
import sys
import time
import warnings
from pathlib import Path

import numpy as np

from . import evaluation, games, ggn, graph, inference, team_game


def _float_list(text: str) -> list[float]:
    return [float(x) for x in str(text).split(",") if x.strip()]


def _int_list(text: str) -> list[int]:
    return [int(x) for x in str(text).split(",") if x.strip()]


def _bool(text) -> bool:
    if isinstance(text, bool):
        return text
    value = str(text).strip().lower()
    if value in ("1", "true", "yes", "on"):
        return True
    if value in ("0", "false", "no", "off"):
        return False
    raise argparse.ArgumentTypeError(f"expected a boolean, got {text!r}")


def _add(p: argparse.ArgumentParser, *names: str) -> None:
    """Attach shared flags by name."""
    spec = {
        "dataset": dict(default="karate-planted",
                        help="edge-list path or builtin: karate, karate-planted[:node], communities[:seed]"),
        "c": dict(type=float, default=0.2, help="team size penalty c"),
        "c-list": dict(dest="c", type=_float_list, default="0.2",
                       help="comma-separated c values"),
        "k": dict(type=int, default=2, help="exponential kernel order"),
        "k-list": dict(dest="k", type=_int_list, default="2", help="comma-separated kernel orders"),
        "runs": dict(type=int, default=5, help="repetitions per (c, k)"),
        "seed": dict(type=int, default=0, help="base random seed"),
        "out": dict(default=None, help="output directory (default: runs/<command>-<timestamp>)"),
        "jobs": dict(type=int, default=1, help="parallel worker processes"),
        "symmetrize": dict(type=_bool, default=True,
                           help="score an edge by K[u,v] + K[v,u]"),
        "tie-rule": dict(choices=team_game.TIE_RULES, default="current-first",
                         help="tie rule for an agent's best team"),
        "accuracy-scope": dict(choices=evaluation.ACCURACY_SCOPES, default="predicted",
                               help="score predicted edges only, or all edges"),
        "max-sweeps": dict(type=int, default=200, help="sweep limit of the team game"),
    }
    for name in names:
        kwargs = dict(spec[name])
        flag = "--" + name.replace("-list", "")
        p.add_argument(flag, **kwargs)


def build_parser() -> argparse.ArgumentParser:
    fmt = argparse.ArgumentDefaultsHelpFormatter
    parser = argparse.ArgumentParser(prog="ggn", description=__doc__.splitlines()[0],
                                     formatter_class=fmt)
    sub = parser.add_subparsers(dest="command", required=True, metavar="command")

    def command(name, helptext):
        p = sub.add_parser(name, help=helptext, description=helptext, formatter_class=fmt)
        p.add_argument("--config", default=None, help="JSON file of flag values")
        return p

    p = command("simulate", "simulate the team game and write partition.csv")
    _add(p, "dataset", "c", "seed", "tie-rule", "max-sweeps", "out")

    p = command("ggn", "build the filtered team-game GGN and write ggn.edges")
    _add(p, "dataset", "c", "seed", "tie-rule", "max-sweeps", "out")
    p.add_argument("--partition", default=None,
                   help="observed partition CSV (default: simulate on the dataset)")
    p.add_argument("--raw", action="store_true", help="skip skeleton filtering")

    p = command("infer", "score skeleton edges from a GGN and write predictions.csv")
    _add(p, "dataset", "k", "symmetrize", "out")
    p.add_argument("--ggn", required=True, help="GGN edge list written by the ggn command")

    p = command("evaluate", "full experiment: write results.csv and summary.json")
    _add(p, "dataset", "c-list", "k-list", "runs", "seed", "jobs", "symmetrize",
         "tie-rule", "accuracy-scope", "max-sweeps", "out")
    p.add_argument("--sample-nodes", type=int, default=None,
                   help="first reduce the dataset to this many nodes")
    p.add_argument("--sample-method", choices=("top-degree-induced", "bfs-ball"),
                   default="top-degree-induced", help="subgraph sampler")
    p.add_argument("--record-runtime", type=_bool, default=False,
                   help="fill the runtime_s column (makes output non-reproducible)")

    p = command("pd-demo", "prisoners' dilemma payoff table, Nash profile and GGNs")
    p.add_argument("--outcome", default=None,
                   help="observed outcome such as Q,S (default: Q,S and Q,Q)")
    p.add_argument("--quiet-payoff", type=float, default=-1.0,
                   help="payoff of each player when both keep quiet")
    p.add_argument("--game", default=None, help="JSON game file replacing the dilemma")

    p = command("karate-demo", "karate club case study with one planted hostile node")
    p.add_argument("--node", type=int, default=23, help="node with all-negative edges")
    _add(p, "c", "k", "seed", "symmetrize", "tie-rule", "max-sweeps")

    p = command("stats", "print a dataset statistics row")
    _add(p, "dataset")
    p.add_argument("--name", default=None, help="row label (default: dataset)")
    p.add_argument("--keep-directed", action="store_true",
                   help="count directed edges instead of merged undirected pairs")
    return parser


def _subparser(parser: argparse.ArgumentParser, command: str) -> argparse.ArgumentParser:
    for action in parser._subparsers._group_actions:
        if command in action.choices:
            return action.choices[command]
    raise KeyError(command)


def parse_args(argv=None) -> argparse.Namespace:
    parser = build_parser()
    args = parser.parse_args(argv)
    if args.config:
        sub = _subparser(parser, args.command)
        try:
            with open(args.config, encoding="utf-8") as fh:
                config = json.load(fh)
        except (OSError, json.JSONDecodeError) as exc:
            parser.error(f"cannot read config {args.config}: {exc}")
        known = {a.dest for a in sub._actions}
        defaults = {}
        for key, value in config.items():
            dest = key.lstrip("-").replace("-", "_")
            if dest not in known or dest == "config":
                sub.error(f"unknown config key {key!r}")
            # list flags are parsed from comma-separated text
            defaults[dest] = ",".join(map(str, value)) if isinstance(value, list) else value
        sub.set_defaults(**defaults)
        args = parser.parse_args(argv)
    return args


def _resolved(args: argparse.Namespace) -> dict:
    return {k: v for k, v in sorted(vars(args).items()) if k != "config"}


def _out_dir(args) -> Path:
    out = Path(args.out) if args.out else Path("runs") / f"{args.command}-{time.strftime('%Y%m%d-%H%M%S')}"
    out.mkdir(parents=True, exist_ok=True)
    return out


def _write_config(out: Path, args) -> None:
    with open(out / "config.json", "w", encoding="utf-8") as fh:
        json.dump(_resolved(args), fh, indent=2, sort_keys=True)
        fh.write("\n")


def _simulate(args, truth):
    cfg = team_game.TeamGameConfig(c=args.c, seed=args.seed, max_sweeps=args.max_sweeps,
                                   tie_rule=args.tie_rule)
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", RuntimeWarning)
        return team_game.simulate(truth, cfg)


def cmd_simulate(args) -> int:
    truth = evaluation.parse_dataset(args.dataset)
    result = _simulate(args, truth)
    out = _out_dir(args)
    with open(out / "partition.csv", "w", encoding="utf-8") as fh:
        team_game.write_partition(result.partition, fh)
    _write_config(out, args)
    print(f"teams={len(result.teams)} sweeps={result.sweeps} moves={result.moves} "
          f"converged={result.converged}")
    print(f"wrote {out / 'partition.csv'}")
    if not result.converged:
        print(f"error: no convergence within {args.max_sweeps} sweeps", file=sys.stderr)
        return 1
    return 0


def cmd_ggn(args) -> int:
    truth = evaluation.parse_dataset(args.dataset)
    skeleton = graph.to_skeleton(truth)
    if args.partition:
        with open(args.partition, encoding="utf-8") as fh:
            observed = team_game.read_partition(fh)
    else:
        result = _simulate(args, truth)
        if not result.converged:
            print(f"error: no convergence within {args.max_sweeps} sweeps", file=sys.stderr)
            return 1
        observed = result.partition
    net = ggn.build_team_ggn(observed, skeleton, args.c, args.tie_rule)
    if not args.raw:
        net = ggn.filter_edges(net, skeleton)
    out = _out_dir(args)
    with open(out / "ggn.edges", "w", encoding="utf-8") as fh:
        ggn.write_ggn(net, fh)
    _write_config(out, args)
    print(f"edges={len(net)}")
    print(f"wrote {out / 'ggn.edges'}")
    return 0


def cmd_infer(args) -> int:
    skeleton = graph.to_skeleton(evaluation.parse_dataset(args.dataset))
    with open(args.ggn, encoding="utf-8") as fh:
        net = ggn.read_ggn(fh, n=skeleton.n)
    kernel = inference.exponential_kernel(net.adjacency(), args.k)
    pred = inference.predict_signs(kernel, skeleton, args.symmetrize)
    out = _out_dir(args)
    with open(out / "predictions.csv", "w", encoding="utf-8") as fh:
        inference.write_predictions(pred, fh)
    _write_config(out, args)
    print(f"predicted={len(pred)} of {skeleton.num_edges} "
          f"({evaluation.predictive_percentage(pred, skeleton):.4f})")
    print(f"wrote {out / 'predictions.csv'}")
    return 0


def cmd_evaluate(args) -> int:
    cfg = evaluation.ExperimentConfig(
        dataset=args.dataset, c_values=tuple(args.c), k_values=tuple(args.k), runs=args.runs,
        base_seed=args.seed, symmetrize=args.symmetrize, tie_rule=args.tie_rule,
        accuracy_scope=args.accuracy_scope, max_sweeps=args.max_sweeps,
        sample_nodes=args.sample_nodes, sample_method=args.sample_method, jobs=args.jobs)
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", RuntimeWarning)
        summary = evaluation.run_experiment(cfg)
    out = _out_dir(args)
    with open(out / "results.csv", "w", encoding="utf-8") as fh:
        evaluation.write_results_csv(summary.results, fh, include_runtime=args.record_runtime)
    with open(out / "summary.json", "w", encoding="utf-8") as fh:
        evaluation.write_summary_json(summary, fh)
    _write_config(out, args)
    for (dataset, c, k), cell in sorted(summary.cells.items()):
        acc, pct = cell.avg_accuracy, cell.predictive_pct
        acc_text = "undefined" if acc.mean is None else f"{acc.mean:.4f} +/- {acc.std:.4f}"
        pct_text = "undefined" if pct.mean is None else f"{pct.mean:.4f}"
        print(f"{dataset} c={c:g} k={k}: avg_accuracy {acc_text} (excluded {acc.excluded}), "
              f"predictive_pct {pct_text}, failed {cell.failed}")
    print(f"wrote {out / 'results.csv'} and {out / 'summary.json'}")
    return 1 if any(cell.failed for cell in summary.cells.values()) else 0


def _payoff_text(values) -> str:
    return ",".join(f"{v:g}" for v in values)


def cmd_pd_demo(args) -> int:
    game = games.load_game(args.game) if args.game else games.prisoners_dilemma(args.quiet_payoff)
    names = game.strategy_names
    if game.n_players == 2:
        print(f"payoff table ({game.player_names[0]} rows, {game.player_names[1]} columns):")
        width = 12
        print(" " * 4 + "".join(f"{s:>{width}}" for s in names[1]))
        for a, row_name in enumerate(names[0]):
            cells = "".join(f"{_payoff_text(game.payoff[a, b]):>{width}}" for b in range(len(names[1])))
            print(f"{row_name:<4}{cells}")
    else:
        print("payoffs:")
        for profile in games.all_profiles(game):
            print(f"  ({','.join(game.profile_names(profile))}): {_payoff_text(game.payoff[profile])}")
    equilibria = games.find_pure_nash(game)
    shown = ", ".join("(" + ",".join(game.profile_names(e)) + ")" for e in equilibria) or "none"
    print(f"pure Nash equilibria: {shown}")

    if args.outcome:
        outcomes = [args.outcome]
    elif game.n_players == 2 and names == (("Q", "S"), ("Q", "S")):
        outcomes = ["Q,S", "Q,Q"]
    else:
        outcomes = [",".join(game.profile_names(e)) for e in equilibria[:1]]
    for text in outcomes:
        profile = game.profile_from_names([s.strip() for s in text.split(",")])
        net = ggn.build_general_ggn(game, profile)[0]
        print(f"GGN for observed outcome ({','.join(game.profile_names(profile))}):")
        for e in net.edges:
            print(f"  edge {e.src + 1}->{e.dst + 1} weight {e.weight:g}")
    return 0


def cmd_karate_demo(args) -> int:
    truth = graph.karate_with_planted_signs(args.node)
    skeleton = graph.to_skeleton(truth)
    result = _simulate(args, truth)
    print(f"teams ({'converged' if result.converged else 'NOT converged'} "
          f"after {result.sweeps} sweeps):")
    for team in result.teams:
        print("  " + " ".join(str(i) for i in team))
    net = ggn.filter_edges(ggn.build_team_ggn(result.partition, skeleton, args.c, args.tie_rule),
                           skeleton)
    node = args.node
    print(f"GGN edges touching node {node}:")
    for e in net.edges:
        if node in (e.src, e.dst):
            print(f"  {e.src}->{e.dst} weight {e.weight:g}")
    scores = inference.exponential_kernel(net.adjacency(), args.k).toarray()
    pair = scores[:, node] + scores[node, :] if args.symmetrize else scores[:, node]
    adjacent = {e.dst if e.src == node else e.src for e in net.edges if node in (e.src, e.dst)}
    print(f"first-order relations to node {node} (GGN neighbors):")
    for x in sorted(adjacent):
        print(f"  {x}: {'negative' if pair[x] < 0 else 'positive'} ({pair[x]:.4g})")
    print(f"higher-order relations to node {node}:")
    for x in np.flatnonzero(pair != 0):
        if x != node and x not in adjacent:
            print(f"  {x}: {'negative' if pair[x] < 0 else 'positive'} ({pair[x]:.4g})")
    return 0 if result.converged else 1


def cmd_stats(args) -> int:
    name, _, _ = args.dataset.partition(":")
    if name in ("karate", "karate-planted", "communities") or not args.keep_directed:
        g = evaluation.parse_dataset(args.dataset)
    else:
        g = graph.load_edge_list(args.dataset)
    print(graph.format_stats_row(args.name or Path(args.dataset).name, graph.stats(g)))
    return 0


COMMANDS = {
    "simulate": cmd_simulate,
    "ggn": cmd_ggn,
    "infer": cmd_infer,
    "evaluate": cmd_evaluate,
    "pd-demo": cmd_pd_demo,
    "karate-demo": cmd_karate_demo,
    "stats": cmd_stats,
}


def main(argv=None) -> int:
    args = parse_args(argv)
    print(json.dumps(_resolved(args), sort_keys=True))
    try:
        return COMMANDS[args.command](args)
    except (ValueError, KeyError, OSError, RuntimeError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
