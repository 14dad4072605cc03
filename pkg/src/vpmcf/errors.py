"""Exception types raised by the simulator and its analysis tools."""


class VPMCFError(Exception):
    """Base class for all package errors."""


class AxisContact(VPMCFError):
    """The profile touched (or crossed) the axis of rotation."""


class OddIntervalCount(VPMCFError):
    """Simpson quadrature needs an even number of grid intervals."""


class InsufficientHistory(VPMCFError):
    """Fewer recorded states than an operation needs."""


class InsufficientBlowupData(VPMCFError):
    """The blow-up window holds too few states for a rate fit."""


class EmptyWindow(VPMCFError):
    """A rescaling window contains too few grid intervals."""


class NoInteriorMinimum(VPMCFError):
    """A profile has no interior minimum to center a catenoid on."""


class TrackingLost(VPMCFError):
    """A neck could not be matched between consecutive censuses."""


class ConfigError(VPMCFError):
    """Malformed or inconsistent run configuration."""

    def __init__(self, message, lineno=None):
        self.lineno = lineno
        if lineno is not None:
            message = f"line {lineno}: {message}"
        super().__init__(message)
