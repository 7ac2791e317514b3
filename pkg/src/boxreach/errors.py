"""Exception types shared across the package."""


class BoxReachError(Exception):
    """Base class for boxreach-specific errors."""


class InputError(BoxReachError):
    """A user-supplied file, flag, or value could not be parsed or validated."""


class InternalError(BoxReachError):
    """An internal invariant was violated; indicates a bug, not bad input."""
