"""Random games with correlated payoffs and the dynamics that play them."""

from .errors import (ArityError, CapacityError, ConfigError,
                     EligibleSetEmptyError, GamedynError,
                     NumericalDivergenceError)
from .game_model import (Game, GameSpec, best_response, enumerate_pure_nash,
                         expected_payoff, index_to_profile, is_pure_nash,
                         payoff, profile_to_index, sample_game,
                         uniform_mixed, validate_mixed)

__version__ = "0.1.0"

__all__ = [
    "ArityError", "CapacityError", "ConfigError", "EligibleSetEmptyError",
    "GamedynError", "NumericalDivergenceError",
    "Game", "GameSpec", "best_response", "enumerate_pure_nash",
    "expected_payoff", "index_to_profile", "is_pure_nash", "payoff",
    "profile_to_index", "sample_game", "uniform_mixed", "validate_mixed",
    "__version__",
]
