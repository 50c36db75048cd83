"""Game generative networks.

An edge ``i -> j`` records how agent ``j``'s utility under the observed
outcome differs from its utility had ``i`` alone played what an idealized
selfish model predicts for it.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Sequence, TextIO

import numpy as np
import scipy.sparse as sp

from . import games
from .games import NormalFormGame
from .graph import SignedGraph
from .team_game import TeamGameState, TeamPartition

MODES = ("best-response", "nash-profile")


class ModelError(ValueError):
    """Raised when the deviation model cannot produce an ideal strategy."""


@dataclass(frozen=True)
class GgnEdge:
    src: int
    dst: int
    weight: float
    time: int | None = None


@dataclass
class GgnGraph:
    """Directed signed multigraph of deviation edges."""

    n: int
    edges: list[GgnEdge] = field(default_factory=list)

    def weight_of(self, src: int, dst: int) -> float:
        """Summed weight of all ``src -> dst`` edges (0 when absent)."""
        return float(sum(e.weight for e in self.edges if e.src == src and e.dst == dst))

    def adjacency(self) -> sp.csr_matrix:
        """Weighted adjacency; parallel edges are summed."""
        if not self.edges:
            return sp.csr_matrix((self.n, self.n))
        rows = np.fromiter((e.src for e in self.edges), dtype=np.int64)
        cols = np.fromiter((e.dst for e in self.edges), dtype=np.int64)
        vals = np.fromiter((e.weight for e in self.edges), dtype=np.float64)
        a = sp.csr_matrix((vals, (rows, cols)), shape=(self.n, self.n))
        a.sum_duplicates()
        return a

    def __len__(self) -> int:
        return len(self.edges)


@dataclass(frozen=True)
class DeviationModel:
    """How the ideal strategy of each agent is chosen.

    ``best-response`` uses each agent's best reply to the observed outcome,
    preferring its observed strategy on ties and then the lowest index.
    ``nash-profile`` takes the agent's strategy from a pure Nash equilibrium,
    producing one network per equilibrium.
    """

    mode: str = "best-response"

    def __post_init__(self):
        if self.mode not in MODES:
            raise ValueError(f"mode must be one of {MODES}")


def _deviation_network(game: NormalFormGame, real: tuple, ideal: Sequence[int]) -> GgnGraph:
    n = game.n_players
    real_payoff = game.payoff[real]
    edges = []
    for i in range(n):
        deviated = list(real)
        deviated[i] = ideal[i]
        dev_payoff = game.payoff[tuple(deviated)]
        for j in range(n):
            if j != i:
                edges.append(GgnEdge(i, j, float(real_payoff[j] - dev_payoff[j])))
    return GgnGraph(n, edges)


def build_general_ggn(game: NormalFormGame, real_profile: Sequence[int],
                      model: DeviationModel = DeviationModel()) -> list[GgnGraph]:
    """Networks with edge weights ``u_j(real) - u_j(real with i's ideal strategy)``.

    Every ordered pair ``i != j`` gets an edge, zero weights included, so the
    result shows the full signature of the outcome; :func:`filter_edges`
    removes the zeros.
    """
    real = game.check_profile(real_profile)
    if model.mode == "best-response":
        ideal = []
        for i in range(game.n_players):
            best = games.best_response(game, real, i)
            ideal.append(real[i] if real[i] in best else best[0])
        return [_deviation_network(game, real, ideal)]
    equilibria = games.find_pure_nash(game)
    if not equilibria:
        raise ModelError("game has no pure Nash equilibrium")
    return [_deviation_network(game, real, eq) for eq in equilibria]


def build_dynamic_ggn(game: NormalFormGame, trace: Sequence[tuple[int, int, int]],
                      initial: Sequence[int]) -> GgnGraph:
    """Timestamped edges from a sequence of ``(time, player, new_strategy)`` changes.

    Each change by ``i`` from profile ``s`` to ``s'`` yields ``i -> j`` with
    weight ``u_j(s') - u_j(s)`` for every other player ``j``.
    """
    profile = list(game.check_profile(initial))
    edges = []
    last_time = None
    for time, player, strategy in trace:
        player = game.check_player(player)
        if not 0 <= strategy < game.strategy_counts[player]:
            raise ValueError(f"strategy {strategy} invalid for player {player}")
        if last_time is not None and time <= last_time:
            raise ValueError("trace times must be strictly increasing")
        if profile[player] == strategy:
            raise ValueError(f"change at time {time} does not alter player {player}'s strategy")
        before = game.payoff[tuple(profile)]
        profile[player] = strategy
        after = game.payoff[tuple(profile)]
        for j in range(game.n_players):
            if j != player:
                edges.append(GgnEdge(player, j, float(after[j] - before[j]), int(time)))
        last_time = time
    return GgnGraph(game.n_players, edges)


def build_team_ggn(observed: TeamPartition, skeleton: SignedGraph, c: float,
                   tie_rule: str = "current-first") -> GgnGraph:
    """GGN of an observed team partition against the team game on ``skeleton``.

    For every agent whose ideal move on the skeleton differs from its observed
    team, only members of its old and new teams see their utility change:
    an old teammate ``j`` loses ``A_ij`` and gains ``c``, a new teammate the
    reverse. Edges are emitted for exactly those agents, zero weights included.
    """
    if observed.n != skeleton.n:
        raise ValueError(f"partition covers {observed.n} nodes, skeleton has {skeleton.n}")
    state = TeamGameState(skeleton, c, observed)
    p = state.partition
    a = skeleton.csr
    edges = []
    for i in range(skeleton.n):
        target = state.best_move(i, tie_rule)
        old = p.team_of(i)
        if target == old:
            continue
        row = a.getrow(i)
        w_to = dict(zip(row.indices.tolist(), row.data.tolist()))
        old_mates = p.members(old)
        new_mates = p.members(target)
        affected = [(int(j), w_to.get(int(j), 0.0) - c) for j in old_mates if j != i]
        affected += [(int(j), c - w_to.get(int(j), 0.0)) for j in new_mates]
        affected.sort()
        edges.extend(GgnEdge(i, j, w) for j, w in affected)
    return GgnGraph(skeleton.n, edges)


def filter_edges(ggn: GgnGraph, skeleton: SignedGraph) -> GgnGraph:
    """Keep only skeleton pairs, drop self-loops, sum parallel edges, drop zeros.

    An undirected skeleton admits both orientations of each of its pairs.
    Output edges are untimed and sorted by ``(src, dst)``.
    """
    if skeleton.n < ggn.n:
        raise ValueError("skeleton has fewer nodes than the GGN")
    totals: dict[tuple[int, int], float] = {}
    for e in ggn.edges:
        if e.src == e.dst:
            continue
        totals[(e.src, e.dst)] = totals.get((e.src, e.dst), 0.0) + e.weight
    if not totals:
        return GgnGraph(ggn.n, [])
    pairs = np.array(list(totals), dtype=np.int64)
    u, v = pairs[:, 0], pairs[:, 1]
    if not skeleton.directed:
        u, v = np.minimum(u, v), np.maximum(u, v)
    present = np.isin(u * max(skeleton.n, 1) + v, skeleton.pair_keys())
    kept = sorted((pair, w) for (pair, w), ok in zip(totals.items(), present) if ok and w != 0.0)
    return GgnGraph(ggn.n, [GgnEdge(s, d, w) for (s, d), w in kept])


def write_ggn(ggn: GgnGraph, stream: TextIO) -> None:
    """``src dst weight [time]`` lines, directed."""
    stream.write(f"# directed GGN n={ggn.n} m={len(ggn.edges)}\n")
    for e in ggn.edges:
        line = f"{e.src} {e.dst} {float(e.weight)!r}"
        if e.time is not None:
            line += f" {e.time}"
        stream.write(line + "\n")


def read_ggn(stream: TextIO, n: int | None = None) -> GgnGraph:
    """Inverse of :func:`write_ggn`. ``n`` defaults to the header value or max id + 1."""
    edges = []
    header_n = None
    for lineno, line in enumerate(stream, start=1):
        s = line.strip()
        if not s:
            continue
        if s[0] in "#%":
            for tok in s.split():
                if tok.startswith("n="):
                    header_n = int(tok[2:])
            continue
        tok = s.split()
        if len(tok) < 3:
            raise ValueError(f"line {lineno}: expected 'src dst weight [time]'")
        time = int(tok[3]) if len(tok) > 3 else None
        edges.append(GgnEdge(int(tok[0]), int(tok[1]), float(tok[2]), time))
    if n is None:
        n = header_n if header_n is not None else 1 + max((max(e.src, e.dst) for e in edges), default=-1)
    return GgnGraph(n, edges)
