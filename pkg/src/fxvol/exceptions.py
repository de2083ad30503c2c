"""Exception types raised across the package.

Everything derives from FxvolError so callers can catch the whole family.
Fit failures during grid searches and backtests are expected events
(OptimizationFailed) and are recorded rather than aborting the run.
"""


class FxvolError(Exception):
    """Base class for all errors raised by fxvol."""


# data ingestion / series construction

class FileUnreadable(FxvolError):
    pass


class MalformedRow(FxvolError):
    def __init__(self, line_number, reason):
        self.line_number = line_number
        self.reason = reason
        super().__init__(f"line {line_number}: {reason}")


class EmptySeries(FxvolError):
    pass


class TooFewObservations(FxvolError):
    pass


class HoldoutTooLarge(FxvolError):
    pass


class MisalignedSeries(FxvolError):
    pass


# model parameters / likelihood

class InvalidParams(FxvolError):
    """A parameter vector violates its family's constraints; the message
    names the constraint."""


class NonStationary(FxvolError):
    pass


class SeriesTooShort(FxvolError):
    pass


class NonFiniteLikelihood(FxvolError):
    """Signals the optimizer to reject the current point."""


# estimation / selection / forecasting

class OptimizationFailed(FxvolError):
    pass


class AllCellsFailed(FxvolError):
    pass


class InvalidState(FxvolError):
    pass


class NoValidOrigins(FxvolError):
    pass


# option pricing

class InvalidInputs(FxvolError):
    pass


class PriceOutOfBand(FxvolError):
    pass


class NoConvergence(FxvolError):
    pass


# regression

class SingularDesign(FxvolError):
    pass


# pipeline

class MissingInputs(FxvolError):
    pass


class ConfigError(FxvolError):
    pass
