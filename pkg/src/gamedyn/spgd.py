"""Softmax policy gradient dynamics over mixed strategies.

Every player parameterizes its mixed strategy as a softmax over logits and
simultaneously ascends its own expected payoff with the exact gradient

    g_{i,a} = x_{i,a} * (q_i(a) - u_i(x))

where q_i(a) is the marginal payoff of action a against the others' mixed
play.  The run stops when the largest profitable-deviation gap falls below
`gap_tol`, or at `max_iters`.  Unlike best response, the ascent can hang
near a non-equilibrium vertex for a long time: the gradient scales with
the vanishing probability of the profitable action, so non-converged runs
at the iteration cap are expected behavior at moderate learning rates,
not an error.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional

import numpy as np

from ._kernels import get_backend
from .errors import NumericalDivergenceError
from .game_model import (ActionProfile, Game, is_pure_nash, validate_mixed)


@dataclass(frozen=True)
class SpgdConfig:
    """Hyperparameters of the gradient run.

    record_every controls the trajectory-payoff sampling stride: iteration
    k contributes to trajectory_mean_payoff iff k % record_every == 0.
    """

    learning_rate: float = 0.5
    max_iters: int = 10 ** 5
    gap_tol: float = 1e-3
    record_every: int = 1

    def __post_init__(self):
        if not (np.isfinite(self.learning_rate) and self.learning_rate > 0):
            raise ValueError("learning_rate must be positive and finite")
        if self.max_iters < 1:
            raise ValueError("max_iters must be at least 1")
        if not (np.isfinite(self.gap_tol) and self.gap_tol > 0):
            raise ValueError("gap_tol must be positive")
        if self.record_every < 1:
            raise ValueError("record_every must be at least 1")


@dataclass(frozen=True)
class SpgdOutcome:
    """Terminal state of a gradient run.

    terminal_expected_payoffs holds u_i(final) per player;
    trajectory_mean_payoff averages the player-mean expected payoff over
    the recorded iterations; rounded_profile takes each player's argmax.
    """

    final: np.ndarray
    iters: int
    converged: bool
    ne_gap: float
    terminal_expected_payoffs: np.ndarray
    trajectory_mean_payoff: float
    rounded_profile: ActionProfile
    rounded_is_nash: bool


def softmax(logits: np.ndarray) -> np.ndarray:
    """Max-shifted softmax along the last axis; overflow-safe."""
    z = np.asarray(logits, dtype=np.float64)
    e = np.exp(z - z.max(axis=-1, keepdims=True))
    return e / e.sum(axis=-1, keepdims=True)


def marginal_payoffs(game: Game, mixed: np.ndarray,
                     player: int) -> np.ndarray:
    """q_i(a) = expected payoff of pure action a against the others' play."""
    x = validate_mixed(game, mixed)
    t = game.payoff_tensor(player)
    for j in range(game.num_players - 1, player, -1):
        t = t @ x[j]
    for j in range(player):
        t = np.tensordot(x[j], t, axes=(0, 0))
    return t


def policy_gradient(game: Game, mixed: np.ndarray, player: int) -> np.ndarray:
    """Gradient of player's expected payoff with respect to its logits."""
    x = validate_mixed(game, mixed)
    q = marginal_payoffs(game, x, player)
    u = float(q @ x[player])
    return x[player] * (q - u)


def ne_gap(game: Game, mixed: np.ndarray) -> float:
    """Largest gain any player can get by deviating to a pure action;
    zero exactly at Nash equilibria."""
    x = validate_mixed(game, mixed)
    worst = 0.0
    for i in range(game.num_players):
        q = marginal_payoffs(game, x, i)
        worst = max(worst, float(q.max() - q @ x[i]))
    return worst


def run_spgd(game: Game, init_logits: Optional[np.ndarray] = None,
             cfg: Optional[SpgdConfig] = None) -> SpgdOutcome:
    """Simultaneous gradient ascent from the given logits (default zeros).

    Raises NumericalDivergenceError if an update produces non-finite
    logits, which signals a learning rate far too large for the payoff
    scale.
    """
    if cfg is None:
        cfg = SpgdConfig()
    n, m = game.num_players, game.num_actions
    if init_logits is None:
        z0 = np.zeros((n, m))
    else:
        z0 = np.asarray(init_logits, dtype=np.float64)
        if z0.shape != (n, m):
            raise ValueError(f"init logits must have shape ({n}, {m})")
        if not np.isfinite(z0).all():
            raise ValueError("init logits must be finite")
    kern = get_backend()
    status, iters, converged, gap, x, u, pay_sum, pay_count = kern.spgd_loop(
        list(game.tables), z0, cfg.learning_rate, cfg.gap_tol,
        cfg.max_iters, cfg.record_every)
    if status == kern.SPGD_DIVERGED:
        raise NumericalDivergenceError(
            f"non-finite logits after iteration {iters}; "
            f"learning_rate={cfg.learning_rate} is too large")
    rounded = tuple(int(a) for a in np.argmax(x, axis=1))
    return SpgdOutcome(final=x, iters=int(iters), converged=bool(converged),
                       ne_gap=float(gap),
                       terminal_expected_payoffs=np.asarray(u),
                       trajectory_mean_payoff=float(pay_sum / pay_count),
                       rounded_profile=rounded,
                       rounded_is_nash=is_pure_nash(game, rounded))
