"""Structured errors raised by the pricing library.

Every error carries a stable ``name`` used by the CLI/service when reporting
failures, and an ``exit_code`` (2 for configuration problems, 3 for numerical
failures) matching the CLI contract.
"""


class PricingError(Exception):
    """Base class for all structured pricing errors."""

    name = "PricingError"
    exit_code = 3


class ConfigurationError(PricingError):
    """Invalid inputs: bad parameters, grids, or run configuration."""

    exit_code = 2


class NumericalError(PricingError):
    """A computation could not be carried out on the given data."""

    exit_code = 3


class NonPositiveSigma(ConfigurationError):
    name = "NonPositiveSigma"


class VGInadmissible(ConfigurationError):
    """Variance-gamma parameters violate the martingale admissibility bound."""

    name = "VGInadmissible"


class BadGrid(ConfigurationError):
    name = "BadGrid"


class BadFixings(ConfigurationError):
    name = "BadFixings"


class BadConfig(ConfigurationError):
    """Catch-all for invalid run configuration (spot, schedule, CLI input)."""

    name = "BadConfig"


class GridTooCoarse(NumericalError):
    name = "GridTooCoarse"


class OutOfCoverage(NumericalError):
    """Requested strike falls outside a sampled curve's coverage."""

    name = "OutOfCoverage"


class StrikeOutOfGrid(NumericalError):
    name = "StrikeOutOfGrid"


class BranchCutViolation(NumericalError):
    """Complex power base crossed the negative real axis."""

    name = "BranchCutViolation"
