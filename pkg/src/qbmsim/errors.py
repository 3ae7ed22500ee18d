"""Exception types shared across the package."""


class ConfigError(ValueError):
    """Invalid run configuration or unreadable/ill-formed config file."""


class StabilityError(RuntimeError):
    """Numerical-stability failure: unstable spectrum, invalid covariance,
    or a diverging relative entropy against a (near-)pure reference."""
