import itertools

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from gamedyn import (CapacityError, Game, GameSpec, best_response,
                     enumerate_pure_nash, expected_payoff, index_to_profile,
                     is_pure_nash, payoff, profile_to_index, sample_game,
                     uniform_mixed, validate_mixed)


def toy_game():
    # shared table with maxima at (0,0) and (1,1); (1,1) is the global one
    psi = np.array([[1.0, 0.0], [0.0, 2.0]])
    return Game.from_potential(psi)


def test_spec_validation():
    with pytest.raises(ValueError):
        GameSpec(1, 3, 0.5, 0)
    with pytest.raises(ValueError):
        GameSpec(2, 1, 0.5, 0)
    with pytest.raises(ValueError):
        GameSpec(2, 3, 1.5, 0)
    with pytest.raises(ValueError):
        GameSpec(2, 3, -0.1, 0)
    with pytest.raises(ValueError):
        GameSpec(2, 3, 0.5, 2 ** 64)
    with pytest.raises(CapacityError):
        GameSpec(10, 100, 0.5, 0)  # 10^20 entries


def test_num_profiles():
    assert GameSpec(3, 4, 1.0, 0).num_profiles == 64


@given(st.integers(2, 4), st.integers(2, 6), st.data())
@settings(max_examples=60, deadline=None)
def test_profile_index_round_trip(n, m, data):
    profile = tuple(data.draw(st.integers(0, m - 1)) for _ in range(n))
    idx = profile_to_index(profile, m)
    assert 0 <= idx < m ** n
    assert index_to_profile(idx, n, m) == profile


def test_profile_index_is_row_major_player0_most_significant():
    assert profile_to_index((1, 0), 3) == 3
    assert profile_to_index((0, 1), 3) == 1
    assert profile_to_index((2, 1, 0), 3) == 2 * 9 + 1 * 3


def test_payoff_lookup_matches_tensor():
    g = sample_game(GameSpec(3, 4, 0.5, 91))
    tens = [g.payoff_tensor(i) for i in range(3)]
    for profile in itertools.product(range(4), repeat=3):
        for i in range(3):
            assert payoff(g, i, profile) == tens[i][profile]


def test_tables_are_read_only():
    g = sample_game(GameSpec(2, 3, 1.0, 5))
    with pytest.raises(ValueError):
        g.tables[0][0] = 99.0


def test_potential_game_flags_and_alias():
    g = sample_game(GameSpec(3, 4, 1.0, 7))
    assert g.is_potential
    assert g.tables[0] is g.tables[1] is g.tables[2]
    assert np.array_equal(g.potential.reshape(-1), g.tables[0])
    g0 = sample_game(GameSpec(3, 4, 0.999, 7))
    assert not g0.is_potential


def test_sampling_is_deterministic_in_seed():
    a = sample_game(GameSpec(2, 5, 0.3, 123))
    b = sample_game(GameSpec(2, 5, 0.3, 123))
    c = sample_game(GameSpec(2, 5, 0.3, 124))
    assert np.array_equal(a.tables[0], b.tables[0])
    assert np.array_equal(a.tables[1], b.tables[1])
    assert not np.array_equal(a.tables[0], c.tables[0])


def test_from_payoffs_shape_checks():
    with pytest.raises(ValueError):
        Game.from_payoffs([np.zeros((2, 2)), np.zeros((2, 3))])
    with pytest.raises(ValueError):
        Game.from_payoffs([np.zeros((2, 2))])  # one table, two axes


def test_toy_game_nash_set():
    g = toy_game()
    assert enumerate_pure_nash(g) == [(0, 0), (1, 1)]
    assert is_pure_nash(g, (0, 0))
    assert is_pure_nash(g, (1, 1))
    assert not is_pure_nash(g, (0, 1))
    assert not is_pure_nash(g, (1, 0))


def test_best_response_lowest_index_tie_break():
    psi = np.array([[1.0, 1.0, 0.0],
                    [0.0, 0.0, 0.0],
                    [1.0, 0.0, 0.0]])
    g = Game.from_potential(psi)
    # player 1 is indifferent between actions 0 and 1 at row 0
    assert best_response(g, 1, (0, 2)) == 0
    # player 0 is indifferent between rows 0 and 2 at column 0
    assert best_response(g, 0, (1, 0)) == 0


def test_enumerate_matches_bruteforce_on_random_games():
    rng = np.random.default_rng(17)
    for _ in range(25):
        n = int(rng.integers(2, 4))
        m = int(rng.integers(2, 5))
        seed = int(rng.integers(0, 2 ** 63))
        lam = float(rng.uniform())
        g = sample_game(GameSpec(n, m, lam, seed))
        brute = [p for p in itertools.product(range(m), repeat=n)
                 if all(payoff(g, i, p) >= max(
                     payoff(g, i, p[:i] + (a,) + p[i + 1:])
                     for a in range(m)) for i in range(n))]
        assert enumerate_pure_nash(g) == brute


def test_potential_argmax_is_nash():
    # the global maximizer of a shared table is always an equilibrium
    for seed in range(30):
        g = sample_game(GameSpec(3, 4, 1.0, seed))
        best = index_to_profile(int(np.argmax(g.tables[0])), 3, 4)
        assert is_pure_nash(g, best)


def test_zero_correlation_tables_uncorrelated():
    # 102400 profiles is enough to pin the empirical correlation near 0
    g = sample_game(GameSpec(2, 320, 0.0, 2024))
    r = float(np.corrcoef(g.tables[0], g.tables[1])[0, 1])
    assert abs(r) < 0.01


def test_full_correlation_nash_are_local_maxima():
    # on a shared table, equilibria are exactly the profiles that no
    # single-coordinate move can improve
    for seed in range(20):
        g = sample_game(GameSpec(3, 4, 1.0, seed))
        psi = g.potential
        locmax = np.ones(psi.shape, dtype=bool)
        for axis in range(3):
            locmax &= psi == psi.max(axis=axis, keepdims=True)
        expected = sorted(tuple(int(v) for v in idx)
                          for idx in np.argwhere(locmax))
        assert enumerate_pure_nash(g) == expected


def test_degenerate_single_action_game():
    g = Game.from_payoffs([np.zeros((1, 1)), np.zeros((1, 1))])
    assert enumerate_pure_nash(g) == [(0, 0)]
    assert is_pure_nash(g, (0, 0))


def test_expected_payoff_pure_profile_matches_lookup():
    g = sample_game(GameSpec(3, 3, 0.4, 3))
    profile = (2, 0, 1)
    x = np.zeros((3, 3))
    for i, a in enumerate(profile):
        x[i, a] = 1.0
    for i in range(3):
        assert expected_payoff(g, x, i) == pytest.approx(
            payoff(g, i, profile), rel=1e-12)


def test_expected_payoff_uniform_matches_tensor_mean():
    g = sample_game(GameSpec(2, 4, 0.8, 10))
    x = uniform_mixed(g)
    for i in range(2):
        assert expected_payoff(g, x, i) == pytest.approx(
            float(g.tables[i].mean()), rel=1e-12)


@given(st.integers(2, 3), st.integers(2, 5), st.integers(0, 2 ** 32))
@settings(max_examples=30, deadline=None)
def test_expected_payoff_is_multilinear(n, m, seed):
    g = sample_game(GameSpec(n, m, 0.5, seed))
    rng = np.random.default_rng(seed)
    x = rng.dirichlet(np.ones(m), size=n)
    y = x.copy()
    y[0] = rng.dirichlet(np.ones(m))
    t = 0.37
    z = x.copy()
    z[0] = t * x[0] + (1 - t) * y[0]
    for i in range(n):
        mix = t * expected_payoff(g, x, i) + (1 - t) * expected_payoff(
            g, y, i)
        assert expected_payoff(g, z, i) == pytest.approx(mix, abs=1e-12)


def test_validate_mixed_rejects_bad_shapes_and_masses():
    g = sample_game(GameSpec(2, 3, 0.5, 1))
    with pytest.raises(ValueError):
        validate_mixed(g, np.ones((2, 4)))
    bad = uniform_mixed(g)
    bad[0, 0] = -0.1
    bad[0, 1] = 0.1 + 1 / 3
    with pytest.raises(ValueError):
        validate_mixed(g, bad)
    with pytest.raises(ValueError):
        validate_mixed(g, uniform_mixed(g) * 1.5)


def test_payoff_profile_bounds_checked():
    g = sample_game(GameSpec(2, 3, 0.5, 1))
    with pytest.raises(ValueError):
        payoff(g, 0, (0, 3))
    with pytest.raises(ValueError):
        payoff(g, 0, (0,))
