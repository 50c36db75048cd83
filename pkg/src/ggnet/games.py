"""Finite normal-form games: utilities, best responses and pure Nash enumeration."""
from __future__ import annotations

import itertools
import json
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

# tie tolerance for comparing payoffs
TIE_TOL = 1e-12
MAX_PROFILES = 10**6


class CapacityError(RuntimeError):
    """Raised when a computation would exceed a fixed size guard."""


@dataclass(frozen=True)
class NormalFormGame:
    """A finite game in normal form.

    ``payoff`` has shape ``(*strategy_counts, n_players)``: indexing with a
    strategy profile yields every player's payoff.
    """

    payoff: np.ndarray
    strategy_names: tuple = field(default=())
    player_names: tuple = field(default=())

    def __post_init__(self):
        payoff = np.array(self.payoff, dtype=np.float64)
        if payoff.ndim < 2 or payoff.shape[-1] != payoff.ndim - 1:
            raise ValueError("payoff must have shape (*strategy_counts, n_players)")
        if not np.all(np.isfinite(payoff)):
            raise ValueError("payoffs must be finite")
        payoff.setflags(write=False)
        object.__setattr__(self, "payoff", payoff)
        counts = payoff.shape[:-1]
        names = self.strategy_names or tuple(
            tuple(str(s) for s in range(k)) for k in counts)
        names = tuple(tuple(ns) for ns in names)
        if tuple(len(ns) for ns in names) != counts:
            raise ValueError("strategy_names do not match payoff shape")
        object.__setattr__(self, "strategy_names", names)
        players = self.player_names or tuple(f"p{i + 1}" for i in range(len(counts)))
        object.__setattr__(self, "player_names", tuple(players))

    @property
    def n_players(self) -> int:
        return self.payoff.ndim - 1

    @property
    def strategy_counts(self) -> tuple[int, ...]:
        return self.payoff.shape[:-1]

    @property
    def n_profiles(self) -> int:
        return int(np.prod(self.strategy_counts))

    def check_profile(self, profile: Sequence[int]) -> tuple[int, ...]:
        profile = tuple(int(s) for s in profile)
        if len(profile) != self.n_players:
            raise ValueError(f"profile has {len(profile)} entries, game has {self.n_players} players")
        for i, (s, k) in enumerate(zip(profile, self.strategy_counts)):
            if not 0 <= s < k:
                raise ValueError(f"strategy {s} invalid for player {i} ({k} strategies)")
        return profile

    def check_player(self, player: int) -> int:
        if not 0 <= player < self.n_players:
            raise ValueError(f"player index {player} out of range")
        return int(player)

    def profile_from_names(self, names: Sequence[str]) -> tuple[int, ...]:
        if len(names) != self.n_players:
            raise ValueError(f"expected {self.n_players} strategy names, got {len(names)}")
        try:
            return tuple(self.strategy_names[i].index(nm) for i, nm in enumerate(names))
        except ValueError:
            raise ValueError(f"unknown strategy name in {list(names)}") from None

    def profile_names(self, profile: Sequence[int]) -> tuple[str, ...]:
        return tuple(self.strategy_names[i][s] for i, s in enumerate(profile))


def utility(game: NormalFormGame, profile: Sequence[int], player: int) -> float:
    profile = game.check_profile(profile)
    return float(game.payoff[profile + (game.check_player(player),)])


def _deviation_payoffs(game: NormalFormGame, profile: tuple, player: int) -> np.ndarray:
    index = list(profile)
    index[player] = slice(None)
    return game.payoff[tuple(index) + (player,)]


def best_response(game: NormalFormGame, profile: Sequence[int], player: int) -> list[int]:
    """All strategies of ``player`` maximizing its payoff with the others fixed, ascending."""
    profile = game.check_profile(profile)
    player = game.check_player(player)
    values = _deviation_payoffs(game, profile, player)
    best = values.max()
    return [int(s) for s in np.flatnonzero(values >= best - TIE_TOL)]


def find_pure_nash(game: NormalFormGame) -> list[tuple[int, ...]]:
    """Every pure-strategy Nash equilibrium, in lexicographic profile order."""
    if game.n_profiles > MAX_PROFILES:
        raise CapacityError(f"{game.n_profiles} profiles exceed the limit of {MAX_PROFILES}")
    # stable iff each player's payoff is within tolerance of its best deviation
    stable = np.ones(game.strategy_counts, dtype=bool)
    for i in range(game.n_players):
        own = game.payoff[..., i]
        stable &= own >= own.max(axis=i, keepdims=True) - TIE_TOL
    return [tuple(int(s) for s in p) for p in np.argwhere(stable)]


def prisoners_dilemma(quiet_payoff: float = -1.0) -> NormalFormGame:
    """Two prisoners choosing Q (keep quiet, index 0) or S (squeal, index 1).

    Payoffs are negated prison years. ``quiet_payoff`` sets the mutual-quiet
    cell, which defaults to one year each.
    """
    payoff = np.empty((2, 2, 2))
    payoff[0, 0] = (quiet_payoff, quiet_payoff)
    payoff[0, 1] = (-5.0, 0.0)
    payoff[1, 0] = (0.0, -5.0)
    payoff[1, 1] = (-4.0, -4.0)
    return NormalFormGame(payoff, strategy_names=(("Q", "S"), ("Q", "S")))


def game_from_dict(doc: dict) -> NormalFormGame:
    """Build a game from the JSON layout ``{"players", "strategies", "payoffs"}``.

    ``payoffs`` is nested by strategy index per player, innermost a list of
    per-player payoffs.
    """
    players = doc["players"]
    if isinstance(players, int):
        players = [f"p{i + 1}" for i in range(players)]
    strategies = doc["strategies"]
    payoff = np.asarray(doc["payoffs"], dtype=np.float64)
    expected = tuple(len(s) for s in strategies) + (len(players),)
    if payoff.shape != expected:
        raise ValueError(f"payoffs have shape {payoff.shape}, expected {expected}")
    return NormalFormGame(payoff, strategy_names=tuple(tuple(s) for s in strategies),
                          player_names=tuple(players))


def game_to_dict(game: NormalFormGame) -> dict:
    return {
        "players": list(game.player_names),
        "strategies": [list(s) for s in game.strategy_names],
        "payoffs": game.payoff.tolist(),
    }


def load_game(path) -> NormalFormGame:
    with open(path, encoding="utf-8") as fh:
        return game_from_dict(json.load(fh))


def all_profiles(game: NormalFormGame):
    return itertools.product(*(range(k) for k in game.strategy_counts))
