"""Exception types shared across the package."""


class SlitSimError(Exception):
    """Base class for all package-specific errors."""


class ScreenSurfaceError(SlitSimError, ValueError):
    """Evaluation requested on the charged screen surface (x = 0, |y| >= R)."""


class ToleranceNotMetError(SlitSimError, RuntimeError):
    """Adaptive quadrature exhausted its subdivision budget."""


class StepLimitExceededError(SlitSimError, RuntimeError):
    """Reference integration ran out of steps before its stop condition fired."""


class ConfigurationError(SlitSimError, ValueError):
    """Inconsistent or invalid run parameters."""


class SpecMismatchError(SlitSimError, ValueError):
    """Histograms with different bin layouts cannot be combined."""


class EmptyHistogramError(SlitSimError, ValueError):
    """Operation requires at least one detected particle."""
