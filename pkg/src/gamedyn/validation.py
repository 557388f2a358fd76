"""Theory-check suites over seeded Monte Carlo runs.

Each suite returns (ok, details) where details is a flat dict of the
numbers behind the verdict.  The CLI `validate` subcommand and the
acceptance tests both call these, so a suite is the single source of
truth for its check.
"""

from __future__ import annotations

import math
from typing import Callable

import numpy as np

from .dynamics import (CYCLE, FIXED_POINT, TRUNCATED, compare_sbrd_indd,
                       cross_profiles_are_nash, run_indd, run_sbrd)
from .experiment import derive_seed
from .game_model import Game, GameSpec, sample_game
from .spgd import marginal_payoffs, policy_gradient, softmax
from .stats import clopper_pearson

# theorem step bound at epsilon = 0.05: survival shrinks by 3/4 per step
THEOREM1_STEP_BOUND = math.ceil(math.log(0.05) / math.log(0.75))


def _grid_games(seed: int, runs: int, n: int, m: int, lam: float):
    for i in range(runs):
        yield sample_game(GameSpec(n, m, lam, derive_seed(seed, 0, i)))


def suite_lemma1(seed: int = 0, runs: int = 2000, m: int = 50):
    """Two-player shared-table runs terminate in a fixed point or 2-cycle."""
    fixed = cyc2 = longer = truncated = 0
    for game in _grid_games(seed, runs, 2, m, 1.0):
        out = run_sbrd(game)
        if out.kind == FIXED_POINT:
            fixed += 1
        elif out.kind == CYCLE:
            if out.cycle_length == 2:
                cyc2 += 1
            else:
                longer += 1
        else:
            truncated += 1
    ok = longer == 0 and truncated == 0
    return ok, dict(runs=runs, fixed_points=fixed, two_cycles=cyc2,
                    longer_cycles=longer, truncated=truncated)


def suite_remark(seed: int = 0, runs: int = 2000, m: int = 50):
    """Every observed 2-cycle has both cross profiles as equilibria."""
    cycles = holds = 0
    for game in _grid_games(seed, runs, 2, m, 1.0):
        out = run_sbrd(game)
        if out.cycle_length == 2:
            cycles += 1
            holds += cross_profiles_are_nash(game, out)
    ok = holds == cycles
    return ok, dict(runs=runs, two_cycles=cycles, cross_nash=holds)


def suite_indd(seed: int = 0, runs: int = 1000, m: int = 500):
    """The independent dynamic always ends in a 2-cycle on shared tables."""
    cyc2 = other = 0
    for game in _grid_games(seed, runs, 2, m, 1.0):
        out = run_indd(game)
        if out.kind == CYCLE and out.cycle_length == 2:
            cyc2 += 1
        else:
            other += 1
    ok = other == 0
    return ok, dict(runs=runs, two_cycles=cyc2, other=other)


def suite_agreement(seed: int = 0, runs: int = 1000, m: int = 500,
                    threshold: float = 0.90):
    """SBRD and INDD walk identically through INDD termination >= 90%."""
    coincide = 0
    for game in _grid_games(seed, runs, 2, m, 1.0):
        coincide += compare_sbrd_indd(game).coincide
    frac = coincide / runs
    return frac >= threshold, dict(runs=runs, coincide=coincide,
                                   fraction=frac, threshold=threshold)


def suite_theorem1(seed: int = 0, runs: int = 1000, m: int = 500):
    """Large-m two-player runs 2-cycle fast: fraction >= 0.95 with the
    99.5% lower confidence bound >= 0.92, and at most the step bound in
    >= 90% of runs."""
    cyc2 = fast = 0
    for game in _grid_games(seed, runs, 2, m, 1.0):
        out = run_sbrd(game)
        if out.cycle_length == 2:
            cyc2 += 1
        if out.kind != TRUNCATED \
                and out.steps_to_terminal <= THEOREM1_STEP_BOUND:
            fast += 1
    ci = clopper_pearson(cyc2, runs)
    frac2, fracf = cyc2 / runs, fast / runs
    ok = frac2 >= 0.95 and ci.lo >= 0.92 and fracf >= 0.90
    return ok, dict(runs=runs, two_cycle_fraction=frac2, cp_lower=ci.lo,
                    step_bound=THEOREM1_STEP_BOUND, fast_fraction=fracf)


def suite_gradcheck(seed: int = 0, runs: int = 20, h: float = 1e-5):
    """Analytic gradient vs central finite differences on small games."""
    rng = np.random.default_rng(seed)
    worst_rel = worst_sum = 0.0
    for i in range(runs):
        n = int(rng.integers(2, 4))
        m = int(rng.integers(2, 7))
        lam = float(rng.uniform(0.0, 1.0))
        game = sample_game(GameSpec(n, m, lam, derive_seed(seed, 1, i)))
        z = rng.normal(scale=1.5, size=(n, m))
        x = softmax(z)
        for player in range(n):
            g = policy_gradient(game, x, player)
            worst_sum = max(worst_sum, abs(float(g.sum())))
            for a in range(m):
                zp = z.copy()
                zp[player, a] += h
                zm = z.copy()
                zm[player, a] -= h
                up = _expected(game, softmax(zp), player)
                um = _expected(game, softmax(zm), player)
                fd = (up - um) / (2.0 * h)
                scale = max(abs(fd), abs(float(g[a])), 1e-6)
                worst_rel = max(worst_rel, abs(fd - float(g[a])) / scale)
    ok = worst_rel <= 1e-5 and worst_sum <= 1e-12
    # plain floats so the failure report serializes to JSON
    return ok, dict(games=runs, max_rel_err=float(worst_rel),
                    max_component_sum=float(worst_sum))


def _expected(game: Game, x, player: int) -> float:
    q = marginal_payoffs(game, x, player)
    return float(q @ x[player])


SUITES: dict[str, Callable] = {
    "lemma1": suite_lemma1,
    "remark": suite_remark,
    "indd": suite_indd,
    "agreement": suite_agreement,
    "theorem1": suite_theorem1,
    "gradcheck": suite_gradcheck,
}
