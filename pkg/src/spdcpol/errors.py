"""Exception types shared across the package."""


class ConfigurationError(ValueError):
    """Inconsistent setup: bad config key, grid narrower than the filter band,
    empty scan range, mismatched sequence lengths, and similar."""


class DegenerateDataError(ValueError):
    """Data that cannot be analyzed: zero-norm spectrum, coincidence block
    with an all-zero denominator, flat-zero fringe."""
