"""Exception types shared across the engine."""


class EngineError(Exception):
    """Base class for all errors raised by this package."""


class DimensionMismatch(EngineError):
    """Shapes of linear-algebra operands do not line up."""


class GroupValidationError(EngineError):
    """A group description violates a group axiom or the 2-group requirement."""


class HomomorphismError(EngineError):
    """A supplied map between groups is not a homomorphism."""


class DegreeLimitError(EngineError):
    """A computation was requested beyond the computed degree range."""


class EngineIntegrityError(EngineError):
    """An internal consistency check failed; indicates a bug, never bad input."""
