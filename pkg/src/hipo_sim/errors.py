"""Exception hierarchy shared by the simulator modules."""


class HipoError(Exception):
    """Base class for all simulator errors."""


class ConfigError(HipoError):
    """Malformed configuration (missing file, bad JSON, unknown key)."""

    def __init__(self, message, key=None, line=None):
        super().__init__(message)
        self.key = key
        self.line = line


class InvariantError(ConfigError, ValueError):
    """A parameter violates one of its documented constraints."""

    def __init__(self, name, constraint):
        super().__init__(f"invariant violated for {name}: {constraint}", key=name)
        self.name = name
        self.constraint = constraint


class NumericalError(HipoError):
    """Integration produced a non-finite state or an event failed to converge."""

    kind = "numerical"

    def __init__(self, message, last_good_time=None):
        super().__init__(message)
        self.last_good_time = last_good_time


class InstabilityError(NumericalError):
    kind = "instability"


class EventConvergenceError(NumericalError):
    kind = "event_nonconvergence"


class BracketError(HipoError, ValueError):
    """The two bracketing states do not straddle the contact surface."""


class CollisionError(HipoError, ValueError):
    """Impulse requested for bodies that are already separating."""


class InsufficientDataError(HipoError):
    """Too few peaks, events or converged points for the requested analysis."""
