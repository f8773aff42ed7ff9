"""Exception types shared across the package."""


class ManifoldFlowError(Exception):
    """Base class for all package-specific errors."""


class InvalidDimensionError(ManifoldFlowError, ValueError):
    """Sizes, degrees or index ranges that cannot form a valid spline object."""


class DegenerateGeometryError(ManifoldFlowError, ValueError):
    """Vanishing tangents or a singular first fundamental form."""


class DegeneratePatchError(ManifoldFlowError, ValueError):
    """Patch point set too degenerate for a PCA frame (collinear or coincident)."""


class DegenerateChartError(ManifoldFlowError, ValueError):
    """Projected parameters collapse to a line or point; no usable chart."""


class ZeroChordError(ManifoldFlowError, ValueError):
    """Repeated consecutive points make chord-length parameters undefined."""


class PatchFitError(ManifoldFlowError, RuntimeError):
    """Interpolation or least-squares fit could not produce a usable surface."""
