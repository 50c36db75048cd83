"""Team game on a signed graph.

Each agent belongs to exactly one team. Its utility is the summed edge weight
to its teammates minus ``c`` times the size of its team (itself included).
The game is an exact potential game with potential

    Phi = 1/2 * sum_i gain_i - c/2 * sum_T |T|^2

so randomized better-response dynamics from singleton teams terminate in a
pure Nash equilibrium.
"""
from __future__ import annotations

import csv
import heapq
import warnings
from dataclasses import dataclass, field
from typing import Iterable, TextIO

import numpy as np

from .graph import SignedGraph

TIE_TOL = 1e-12
TIE_RULES = ("current-first", "lowest-id")


class TeamPartition:
    """Assignment of nodes ``0..n-1`` to team ids in ``0..n-1``.

    Team sizes are maintained on every move, and the lowest empty team id is
    available as :meth:`fresh_team` for agents leaving to start a new team.
    """

    def __init__(self, assignment: Iterable[int]):
        assignment = np.array(list(assignment) if not isinstance(assignment, np.ndarray)
                              else assignment, dtype=np.int64)
        n = len(assignment)
        if n and (assignment.min() < 0 or assignment.max() >= n):
            raise ValueError("team ids must lie in [0, n)")
        self.assignment = assignment
        self.sizes = np.bincount(assignment, minlength=n).astype(np.int64)
        self._free = [int(t) for t in np.flatnonzero(self.sizes == 0)]
        heapq.heapify(self._free)

    @classmethod
    def singletons(cls, n: int) -> "TeamPartition":
        return cls(np.arange(n))

    @classmethod
    def from_teams(cls, n: int, teams: Iterable[Iterable[int]]) -> "TeamPartition":
        """Teams given as member lists; team ``k`` gets id ``k``, unlisted nodes become singletons."""
        assignment = np.full(n, -1, dtype=np.int64)
        n_listed = 0
        for k, members in enumerate(teams):
            n_listed = k + 1
            for i in members:
                if assignment[i] != -1:
                    raise ValueError(f"node {i} listed in two teams")
                assignment[i] = k
        rest = np.flatnonzero(assignment == -1)
        assignment[rest] = n_listed + np.arange(len(rest))
        return cls(assignment)

    @property
    def n(self) -> int:
        return len(self.assignment)

    def team_of(self, i: int) -> int:
        return int(self.assignment[i])

    def size(self, team: int) -> int:
        return int(self.sizes[team])

    def members(self, team: int) -> np.ndarray:
        return np.flatnonzero(self.assignment == team)

    def teams(self) -> list[list[int]]:
        """Nonempty teams as sorted member lists, ordered by team id."""
        order = np.argsort(self.assignment, kind="stable")
        bounds = np.flatnonzero(np.diff(self.assignment[order])) + 1
        return [chunk.tolist() for chunk in np.split(order, bounds)] if self.n else []

    def canonical(self) -> tuple[tuple[int, ...], ...]:
        """Id-free form of the partition, for comparing partitions."""
        return tuple(sorted(tuple(t) for t in self.teams()))

    def fresh_team(self) -> int | None:
        """Lowest empty team id, or ``None`` if every id is in use."""
        free = self._free
        while free and self.sizes[free[0]] > 0:
            heapq.heappop(free)
        return free[0] if free else None

    def move(self, i: int, team: int) -> None:
        old = self.assignment[i]
        if team == old:
            return
        self.sizes[old] -= 1
        self.sizes[team] += 1
        self.assignment[i] = team
        if self.sizes[old] == 0:
            heapq.heappush(self._free, int(old))

    def copy(self) -> "TeamPartition":
        return TeamPartition(self.assignment.copy())

    def __eq__(self, other) -> bool:
        return isinstance(other, TeamPartition) and np.array_equal(self.assignment, other.assignment)

    def __repr__(self) -> str:
        return f"TeamPartition({self.teams()})"


@dataclass(frozen=True)
class TeamGameConfig:
    c: float = 0.2
    seed: int = 0
    max_sweeps: int = 200
    improvement_tolerance: float = 1e-9
    tie_rule: str = "current-first"

    def __post_init__(self):
        if self.c < 0:
            raise ValueError("c must be non-negative")
        if self.max_sweeps < 1:
            raise ValueError("max_sweeps must be at least 1")
        if not self.improvement_tolerance > 0:
            raise ValueError("improvement_tolerance must be positive")
        if self.tie_rule not in TIE_RULES:
            raise ValueError(f"tie_rule must be one of {TIE_RULES}")


def _csr(g):
    a = g.csr if isinstance(g, SignedGraph) else g
    return a.indptr, a.indices, a.data


def _check_undirected(g) -> None:
    if isinstance(g, SignedGraph) and g.directed:
        raise ValueError("the team game needs an undirected graph")


def gain(i: int, p: TeamPartition, g: SignedGraph) -> float:
    """Summed weight of ``i``'s edges to its teammates."""
    _check_undirected(g)
    indptr, indices, data = _csr(g)
    lo, hi = indptr[i], indptr[i + 1]
    same = p.assignment[indices[lo:hi]] == p.assignment[i]
    return float(data[lo:hi][same].sum())


def loss(i: int, p: TeamPartition, c: float) -> float:
    return c * p.size(p.team_of(i))


def utility(i: int, p: TeamPartition, g: SignedGraph, c: float) -> float:
    return gain(i, p, g) - loss(i, p, c)


def all_gains(p: TeamPartition, g: SignedGraph) -> np.ndarray:
    """Gain of every node, computed from the edge list."""
    _check_undirected(g)
    same = p.assignment[g.src] == p.assignment[g.dst]
    w = np.where(same, g.weight, 0.0)
    return (np.bincount(g.src, weights=w, minlength=g.n)
            + np.bincount(g.dst, weights=w, minlength=g.n))


def all_utilities(p: TeamPartition, g: SignedGraph, c: float) -> np.ndarray:
    return all_gains(p, g) - c * p.sizes[p.assignment]


def potential(p: TeamPartition, g: SignedGraph, c: float) -> float:
    """Potential ``1/2 * sum_i (gain_i - loss_i)``."""
    return 0.5 * float(np.sum(all_utilities(p, g, c)))


def _candidates(i, assignment, sizes, indptr, indices, data, c, fresh):
    """Candidate teams for ``i`` and ``i``'s utility after joining each.

    Returns ``(teams, utils)`` with the current team first. Teams holding
    none of ``i``'s neighbors are represented by the fresh team when one is
    available; with ``c > 0`` they are strictly worse than it, and with
    ``c = 0`` the lowest-id such team ties it and is added explicitly.
    """
    cur = assignment[i]
    lo, hi = indptr[i], indptr[i + 1]
    nb_teams = assignment[indices[lo:hi]]
    teams, inv = np.unique(nb_teams, return_inverse=True)
    gains = np.bincount(inv, weights=data[lo:hi], minlength=len(teams))
    is_cur = teams == cur
    g_cur = gains[is_cur].sum()
    others = teams[~is_cur]
    utils = gains[~is_cur] - c * (sizes[others] + 1)
    out_t = [np.array([cur]), others]
    out_u = [np.array([g_cur - c * sizes[cur]]), utils]
    if sizes[cur] > 1 and fresh is not None:
        out_t.append(np.array([fresh]))
        out_u.append(np.array([-c]))
    if c == 0:
        occupied = np.flatnonzero(sizes > 0)
        spare = np.setdiff1d(occupied, np.append(teams, cur), assume_unique=False)
        if len(spare):
            out_t.append(spare[:1])
            out_u.append(np.zeros(1))
    return np.concatenate(out_t), np.concatenate(out_u)


def _choose(teams, utils, tie_rule):
    best = utils.max()
    tied = teams[utils >= best - TIE_TOL]
    if tie_rule == "current-first" and utils[0] >= best - TIE_TOL:
        return int(teams[0])
    return int(tied.min())


def best_team_move(i: int, p: TeamPartition, g: SignedGraph, c: float,
                   tie_rule: str = "current-first") -> int:
    """Team maximizing ``i``'s utility after moving there (possibly its own team).

    Candidates are every nonempty team plus a fresh empty team. Ties keep the
    current team under ``current-first``, otherwise go to the lowest team id.
    """
    _check_undirected(g)
    indptr, indices, data = _csr(g)
    teams, utils = _candidates(i, p.assignment, p.sizes, indptr, indices, data, c,
                               p.fresh_team())
    return _choose(teams, utils, tie_rule)


def move_utility(i: int, team: int, p: TeamPartition, g: SignedGraph, c: float) -> float:
    """Utility of ``i`` if it moved to ``team`` with everyone else fixed."""
    indptr, indices, data = _csr(g)
    lo, hi = indptr[i], indptr[i + 1]
    nb = indices[lo:hi]
    mask = p.assignment[nb] == team
    size_after = p.size(team) + (0 if p.team_of(i) == team else 1)
    return float(data[lo:hi][mask].sum()) - c * size_after


class TeamGameState:
    """A partition with cached per-node gains and an incrementally tracked potential.

    Moves update the gain cache of the mover's neighbors in ``O(degree)``.
    """

    def __init__(self, g: SignedGraph, c: float, partition: TeamPartition | None = None):
        _check_undirected(g)
        self.graph = g
        self.c = float(c)
        self.partition = partition.copy() if partition is not None else TeamPartition.singletons(g.n)
        self.indptr, self.indices, self.data = _csr(g)
        self.own_gain = all_gains(self.partition, g)
        self._gain_total = float(self.own_gain.sum())
        self._size_sq = float(np.sum(self.partition.sizes.astype(np.float64) ** 2))

    @property
    def potential(self) -> float:
        return 0.5 * self._gain_total - 0.5 * self.c * self._size_sq

    def utility(self, i: int) -> float:
        p = self.partition
        return float(self.own_gain[i] - self.c * p.sizes[p.assignment[i]])

    def candidates(self, i: int):
        p = self.partition
        return _candidates(i, p.assignment, p.sizes, self.indptr, self.indices, self.data,
                           self.c, p.fresh_team())

    def best_move(self, i: int, tie_rule: str = "current-first") -> int:
        return _choose(*self.candidates(i), tie_rule)

    def move(self, i: int, team: int) -> None:
        p = self.partition
        old = p.assignment[i]
        if team == old:
            return
        lo, hi = self.indptr[i], self.indptr[i + 1]
        nb, w = self.indices[lo:hi], self.data[lo:hi]
        nb_team = p.assignment[nb]
        leave = nb_team == old
        join = nb_team == team
        self.own_gain[nb[leave]] -= w[leave]
        self.own_gain[nb[join]] += w[join]
        new_gain = float(w[join].sum())
        self._gain_total += 2.0 * (new_gain - self.own_gain[i])
        self.own_gain[i] = new_gain
        s_old, s_new = p.sizes[old], p.sizes[team]
        self._size_sq += (1 - 2 * s_old) + (2 * s_new + 1)
        p.move(i, team)


@dataclass
class SimulationResult:
    partition: TeamPartition
    converged: bool
    sweeps: int
    moves: int
    potentials: list = field(default_factory=list)

    @property
    def teams(self) -> list[list[int]]:
        return self.partition.teams()


def simulate(g: SignedGraph, cfg: TeamGameConfig, record_potential: bool = False,
             initial: TeamPartition | None = None) -> SimulationResult:
    """Randomized better-response dynamics from singleton teams.

    Every sweep visits the nodes in a fresh random order; a node moves to its
    best team only if that raises its utility by more than
    ``cfg.improvement_tolerance``. Converges when a sweep makes no move. If
    ``cfg.max_sweeps`` is exhausted first the last partition is returned with
    ``converged=False`` and a warning is emitted.
    """
    state = TeamGameState(g, cfg.c, initial)
    rng = np.random.default_rng(cfg.seed)
    tol = cfg.improvement_tolerance
    potentials = [state.potential] if record_potential else []
    moves = 0
    for sweep in range(1, cfg.max_sweeps + 1):
        changed = 0
        for i in rng.permutation(g.n):
            teams, utils = state.candidates(i)
            target = _choose(teams, utils, cfg.tie_rule)
            if target == teams[0]:
                continue
            gain_ = utils[teams == target][0] - utils[0]
            if gain_ <= tol:
                continue
            state.move(i, target)
            changed += 1
            if record_potential:
                potentials.append(state.potential)
        moves += changed
        if changed == 0:
            return SimulationResult(state.partition, True, sweep, moves, potentials)
    warnings.warn(f"team game did not converge within {cfg.max_sweeps} sweeps",
                  RuntimeWarning, stacklevel=2)
    return SimulationResult(state.partition, False, cfg.max_sweeps, moves, potentials)


def is_nash(p: TeamPartition, g: SignedGraph, c: float, tol: float = 1e-9) -> bool:
    """True when no node can raise its utility by more than ``tol`` with one move."""
    state = TeamGameState(g, c, p)
    for i in range(g.n):
        _, utils = state.candidates(i)
        if utils.max() > utils[0] + tol:
            return False
    return True


def write_partition(p: TeamPartition, stream: TextIO) -> None:
    writer = csv.writer(stream, lineterminator="\n")
    writer.writerow(["node", "team"])
    for i, t in enumerate(p.assignment.tolist()):
        writer.writerow([i, t])


def read_partition(stream: TextIO) -> TeamPartition:
    reader = csv.DictReader(stream)
    if reader.fieldnames != ["node", "team"]:
        raise ValueError(f"expected header node,team, got {reader.fieldnames}")
    rows = sorted((int(r["node"]), int(r["team"])) for r in reader)
    if [r[0] for r in rows] != list(range(len(rows))):
        raise ValueError("partition rows must cover nodes 0..n-1 exactly once")
    return TeamPartition([r[1] for r in rows])
