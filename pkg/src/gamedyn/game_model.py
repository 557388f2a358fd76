"""Normal-form games with tunably correlated payoff tables.

A game has n players with m actions each.  Payoff tables are sampled as

    u_i = sqrt(lam) * Z + sqrt(1 - lam) * W_i

with Z and all W_i independent standard normal tensors, so any two players'
payoffs at a profile have correlation `lam`.  At lam == 1 every player shares
the table Z and the game is a potential game with potential Z; pure Nash
equilibria are then exactly the profiles no single coordinate move can
improve.

Profiles are tuples (a_0, .., a_{n-1}); the flat index of a profile is
sum(a_i * m**(n-1-i)), player 0 most significant.  Tables are stored flat in
that order.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional, Sequence

import numpy as np

from ._kernels import get_backend
from .errors import CapacityError

ActionProfile = tuple[int, ...]

DEFAULT_MAX_ENTRIES = 10 ** 8
ENUMERATION_LIMIT = 10 ** 7


@dataclass(frozen=True)
class GameSpec:
    """Everything needed to regenerate a game deterministically.

    Parameters
    ----------
    num_players : int, at least 2
    num_actions : int, at least 2, shared by every player
    correlation : float in [0, 1]; 1 gives a random potential game
    seed : int, unsigned 64-bit stream id
    max_entries : int, budget for num_players * num_actions ** num_players
    """

    num_players: int
    num_actions: int
    correlation: float
    seed: int
    max_entries: int = DEFAULT_MAX_ENTRIES

    def __post_init__(self):
        if self.num_players < 2:
            raise ValueError("num_players must be at least 2")
        if self.num_actions < 2:
            raise ValueError("num_actions must be at least 2")
        if not 0.0 <= self.correlation <= 1.0:
            raise ValueError("correlation must lie in [0, 1]")
        if not 0 <= self.seed < 2 ** 64:
            raise ValueError("seed must fit in an unsigned 64-bit integer")
        entries = self.num_players * self.num_actions ** self.num_players
        if entries > self.max_entries:
            raise CapacityError(
                f"game needs {entries} payoff entries, budget is "
                f"{self.max_entries}")

    @property
    def num_profiles(self) -> int:
        return self.num_actions ** self.num_players


@dataclass(frozen=True)
class Game:
    """A concrete game: one flat float64 table per player.

    Build with `sample_game`, `Game.from_potential` or `Game.from_payoffs`.
    Tables are read-only; at correlation 1 all list entries alias one array.
    """

    num_players: int
    num_actions: int
    tables: tuple[np.ndarray, ...]
    is_potential: bool
    spec: Optional[GameSpec] = None

    @property
    def num_profiles(self) -> int:
        return self.num_actions ** self.num_players

    @property
    def shape(self) -> tuple[int, ...]:
        return (self.num_actions,) * self.num_players

    @property
    def potential(self) -> np.ndarray:
        """Shared table as an (m,..,m) tensor; potential games only."""
        if not self.is_potential:
            raise ValueError("game does not carry a potential")
        return self.tables[0].reshape(self.shape)

    def payoff_tensor(self, player: int) -> np.ndarray:
        return self.tables[player].reshape(self.shape)

    @classmethod
    def from_potential(cls, table) -> "Game":
        """Potential game from one (m,..,m) tensor shared by all players."""
        arr = _frozen_table(table)
        n = arr.ndim
        m = arr.shape[0] if n else 0
        if n < 2 or any(s != m for s in arr.shape):
            raise ValueError("potential must be an (m,..,m) tensor, n >= 2")
        flat = arr.reshape(-1)
        return cls(n, m, (flat,) * n, True)

    @classmethod
    def from_payoffs(cls, tables: Sequence) -> "Game":
        """General game from one (m,..,m) tensor per player."""
        n = len(tables)
        if n < 2:
            raise ValueError("need at least two payoff tensors")
        arrs = [_frozen_table(t) for t in tables]
        m = arrs[0].shape[0] if arrs[0].ndim else 0
        for a in arrs:
            if a.ndim != n or any(s != m for s in a.shape):
                raise ValueError("every tensor must have shape (m,..,m) with "
                                 "one axis per player")
        return cls(n, m, tuple(a.reshape(-1) for a in arrs), False)


def _frozen_table(table) -> np.ndarray:
    arr = np.ascontiguousarray(table, dtype=np.float64)
    if arr is table:
        arr = arr.copy()
    arr.setflags(write=False)
    return arr


def sample_game(spec: GameSpec) -> Game:
    """Draw the game `spec` describes.  Pure function of the spec."""
    kern = get_backend()
    tables = kern.sample_tables(spec.seed, spec.num_players,
                                spec.num_actions, spec.correlation)
    for t in tables:
        t.setflags(write=False)
    return Game(spec.num_players, spec.num_actions, tuple(tables),
                spec.correlation == 1.0, spec)


def profile_to_index(profile: Sequence[int], num_actions: int) -> int:
    idx = 0
    for a in profile:
        idx = idx * num_actions + a
    return idx


def index_to_profile(index: int, num_players: int,
                     num_actions: int) -> ActionProfile:
    out = []
    for _ in range(num_players):
        index, a = divmod(index, num_actions)
        out.append(a)
    return tuple(reversed(out))


def _check_profile(game: Game, profile: Sequence[int]) -> ActionProfile:
    profile = tuple(int(a) for a in profile)
    if len(profile) != game.num_players:
        raise ValueError(f"profile has {len(profile)} entries, game has "
                         f"{game.num_players} players")
    if any(a < 0 or a >= game.num_actions for a in profile):
        raise ValueError("action out of range")
    return profile


def payoff(game: Game, player: int, profile: Sequence[int]) -> float:
    """u_player(profile)."""
    profile = _check_profile(game, profile)
    return float(game.tables[player][profile_to_index(profile,
                                                      game.num_actions)])


def _own_action_slice(game: Game, player: int,
                      profile: ActionProfile) -> np.ndarray:
    """Payoffs of every own action against the others' fixed actions."""
    m = game.num_actions
    stride = m ** (game.num_players - 1 - player)
    idx = profile_to_index(profile, m)
    base = idx - profile[player] * stride
    return game.tables[player][base:base + m * stride:stride]


def best_response(game: Game, player: int, profile: Sequence[int]) -> int:
    """Payoff-maximizing own action against profile[-player]; ties go to
    the lowest action index."""
    profile = _check_profile(game, profile)
    return int(np.argmax(_own_action_slice(game, player, profile)))


def is_pure_nash(game: Game, profile: Sequence[int]) -> bool:
    """True iff no player gains by a unilateral deviation (ties allowed)."""
    profile = _check_profile(game, profile)
    for i in range(game.num_players):
        row = _own_action_slice(game, i, profile)
        if row[profile[i]] < row.max():
            return False
    return True


def enumerate_pure_nash(game: Game) -> list[ActionProfile]:
    """All pure Nash equilibria in ascending profile-index order.

    Refuses games with more than 10**7 profiles; use `is_pure_nash` spot
    checks at that scale.
    """
    if game.num_profiles > ENUMERATION_LIMIT:
        raise CapacityError(
            f"enumeration over {game.num_profiles} profiles exceeds the "
            f"{ENUMERATION_LIMIT} limit")
    mask = np.ones(game.shape, dtype=bool)
    for i in range(game.num_players):
        t = game.payoff_tensor(i)
        mask &= t == t.max(axis=i, keepdims=True)
    n, m = game.num_players, game.num_actions
    return [index_to_profile(int(j), n, m)
            for j in np.flatnonzero(mask.reshape(-1))]


def expected_payoff(game: Game, mixed: np.ndarray, player: int) -> float:
    """Expected payoff of `player` under independent mixed strategies.

    `mixed` is an (n, m) array, one simplex row per player.
    """
    x = validate_mixed(game, mixed)
    t = game.payoff_tensor(player)
    for j in range(game.num_players - 1, -1, -1):
        t = t @ x[j]
    return float(t)


def validate_mixed(game: Game, mixed: np.ndarray) -> np.ndarray:
    x = np.asarray(mixed, dtype=np.float64)
    if x.shape != (game.num_players, game.num_actions):
        raise ValueError(f"mixed profile must have shape "
                         f"({game.num_players}, {game.num_actions})")
    if (x < 0.0).any() or not np.allclose(x.sum(axis=1), 1.0, atol=1e-9):
        raise ValueError("each row must be a probability vector")
    return x


def uniform_mixed(game: Game) -> np.ndarray:
    return np.full((game.num_players, game.num_actions),
                   1.0 / game.num_actions)
