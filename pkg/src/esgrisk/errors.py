"""Error classes shared across the package.

The CLI maps these onto exit codes: configuration/usage problems exit 2,
data problems exit 3, numeric problems exit 4.
"""


class EsgRiskError(Exception):
    """Base class for all package errors."""


class ConfigError(EsgRiskError):
    """Bad configuration value or unusable invocation."""


class DataError(EsgRiskError):
    """Input data is malformed beyond what row-skipping can absorb."""


class NumericError(EsgRiskError):
    """A numeric invariant failed where silent continuation would be wrong."""
