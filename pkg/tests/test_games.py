import itertools
import json

import numpy as np
import pytest
from hypothesis import given, strategies as st

from ggnet import games
from ggnet.games import CapacityError, NormalFormGame

Q, S = 0, 1


@pytest.fixture
def pd():
    return games.prisoners_dilemma()


def test_pd_payoffs_from_story(pd):
    assert games.utility(pd, (S, Q), 0) == 0      # p1 squeals and walks free
    assert games.utility(pd, (S, Q), 1) == -5     # p2 serves five years
    assert games.utility(pd, (S, S), 0) == games.utility(pd, (S, S), 1) == -4
    assert games.utility(pd, (Q, S), 1) == 0
    assert games.utility(pd, (Q, Q), 0) == -1


def test_quiet_payoff_is_configurable():
    g = games.prisoners_dilemma(quiet_payoff=-2)
    assert games.utility(g, (Q, Q), 1) == -2
    assert games.find_pure_nash(g) == [(S, S)]


def test_pd_best_responses(pd):
    assert games.best_response(pd, (Q, S), 0) == [S]
    assert games.best_response(pd, (Q, Q), 0) == [S]
    assert games.best_response(pd, (S, Q), 1) == [S]


def test_pd_unique_nash(pd):
    assert games.find_pure_nash(pd) == [(S, S)]


def test_constant_game_all_best():
    g = NormalFormGame(np.full((3, 2, 2), 7.0))
    assert games.best_response(g, (1, 0), 0) == [0, 1, 2]
    assert len(games.find_pure_nash(g)) == 6


def test_coordination_and_matching_pennies():
    coord = np.zeros((2, 2, 2))
    coord[0, 0] = coord[1, 1] = 1
    assert games.find_pure_nash(NormalFormGame(coord)) == [(0, 0), (1, 1)]
    pennies = np.zeros((2, 2, 2))
    for a, b in itertools.product(range(2), repeat=2):
        pennies[a, b] = (1, -1) if a == b else (-1, 1)
    assert games.find_pure_nash(NormalFormGame(pennies)) == []


def test_invalid_indices(pd):
    with pytest.raises(ValueError):
        games.utility(pd, (0, 2), 0)
    with pytest.raises(ValueError):
        games.utility(pd, (0, 1), 2)
    with pytest.raises(ValueError):
        games.utility(pd, (0,), 0)


def test_capacity_guard():
    g = NormalFormGame(np.zeros((1001, 1000, 2)))
    with pytest.raises(CapacityError):
        games.find_pure_nash(g)


@st.composite
def small_games(draw):
    n = draw(st.integers(1, 3))
    counts = tuple(draw(st.integers(1, 4)) for _ in range(n))
    size = int(np.prod(counts)) * n
    vals = draw(st.lists(st.integers(-3, 3), min_size=size, max_size=size))
    return NormalFormGame(np.array(vals, dtype=float).reshape(counts + (n,)))


def brute_force_nash(game):
    found = []
    for profile in itertools.product(*(range(k) for k in game.strategy_counts)):
        stable = True
        for i in range(game.n_players):
            here = game.payoff[profile][i]
            for alt in range(game.strategy_counts[i]):
                dev = list(profile)
                dev[i] = alt
                if game.payoff[tuple(dev)][i] > here:
                    stable = False
        if stable:
            found.append(profile)
    return found


def test_nash_matches_brute_force_on_random_games():
    rng = np.random.default_rng(7)
    for _ in range(200):
        n = int(rng.integers(1, 4))
        counts = tuple(int(x) for x in rng.integers(1, 5, size=n))
        game = NormalFormGame(rng.integers(-3, 4, size=counts + (n,)).astype(float))
        assert games.find_pure_nash(game) == brute_force_nash(game)


@given(small_games(), st.data())
def test_best_response_weakly_dominates(game, data):
    profile = tuple(data.draw(st.integers(0, k - 1)) for k in game.strategy_counts)
    i = data.draw(st.integers(0, game.n_players - 1))
    best = games.best_response(game, profile, i)
    assert best
    alts = []
    for s in range(game.strategy_counts[i]):
        dev = list(profile)
        dev[i] = s
        alts.append(games.utility(game, dev, i))
    for b in best:
        assert all(alts[b] >= a for a in alts)


@given(small_games(), st.data(), st.integers(-100, 100))
def test_best_response_shift_invariant(game, data, shift):
    profile = tuple(data.draw(st.integers(0, k - 1)) for k in game.strategy_counts)
    i = data.draw(st.integers(0, game.n_players - 1))
    shifted = game.payoff.copy()
    shifted[..., i] += shift
    assert games.best_response(NormalFormGame(shifted), profile, i) == \
        games.best_response(game, profile, i)


def test_game_json_round_trip(tmp_path, pd):
    path = tmp_path / "pd.json"
    path.write_text(json.dumps(games.game_to_dict(pd)))
    back = games.load_game(path)
    assert np.array_equal(back.payoff, pd.payoff)
    assert back.strategy_names == (("Q", "S"), ("Q", "S"))
    assert back.profile_from_names(["Q", "S"]) == (Q, S)


def test_game_json_shape_checked():
    with pytest.raises(ValueError):
        games.game_from_dict({"players": 2, "strategies": [["a"], ["b", "c"]],
                              "payoffs": [[[0, 0]]]})
