"""Exception types shared across the package."""


class GamedynError(Exception):
    """Base class for all package-specific errors."""


class CapacityError(GamedynError):
    """Requested game would exceed the configured payoff-entry budget."""


class ArityError(GamedynError):
    """Operation requires a different number of players than the game has."""


class EligibleSetEmptyError(GamedynError):
    """A player ran out of eligible actions during the independent dynamic."""


class NumericalDivergenceError(GamedynError):
    """Gradient ascent produced non-finite logits."""


class ConfigError(GamedynError):
    """Invalid sweep or solver configuration."""
