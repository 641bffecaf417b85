"""Exception types shared across the package."""


class ValidationError(ValueError):
    """Malformed graph, state, sequence or argument."""


class CapacityError(ValueError):
    """A graph class is too large to enumerate exhaustively."""


class HorizonError(ValueError):
    """A sequence ran out of rounds before the requested horizon."""
