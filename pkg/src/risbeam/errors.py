"""Exception types raised across the package."""


class DimensionError(ValueError):
    """Array sizes or vector lengths are inconsistent."""


class ConfigurationError(ValueError):
    """A system or experiment configuration cannot be realized."""


class DegenerateChannelError(ValueError):
    """The channel carries no energy, so no dominant path exists."""
