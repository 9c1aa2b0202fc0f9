"""Exception hierarchy shared across the package.

Plain ``ValueError`` is used for bad call arguments (shape/range problems);
the classes here mark failure modes that callers may want to route
differently, e.g. to distinct process exit codes.
"""


class GpemuError(Exception):
    """Base class for package-specific failures."""


class ConfigError(GpemuError):
    """Invalid or inconsistent run configuration."""


class NumericalError(GpemuError):
    """Linear-algebra failure that survived the jitter escalation policy."""


class OptimizationError(NumericalError):
    """Every hyperparameter-search restart failed numerically."""


class SimulationError(GpemuError):
    """A simulator could not evaluate a requested input point."""


class IngestionError(GpemuError):
    """A data file is malformed; message carries the offending line number."""


class EmptyDistributionError(GpemuError):
    """No sample landed in the valid-AP region, so there is no output
    distribution to build; ``tally`` records where the samples went."""

    def __init__(self, message: str, tally: dict | None = None):
        super().__init__(message)
        self.tally = tally or {}
