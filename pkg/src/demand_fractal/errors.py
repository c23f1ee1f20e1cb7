"""Error taxonomy for the demand fractal toolkit."""

from __future__ import annotations


class DemandFractalError(Exception):
    """Base class for all domain errors."""


class InvalidDemandInput(DemandFractalError):
    """Raised when demand records are missing or invalid."""


class DemandParseError(InvalidDemandInput):
    """Raised when a demand CSV row cannot be parsed.

    The offending 1-based source line is kept on ``line`` so callers can
    point users at the exact row.
    """

    def __init__(self, message: str, line: int) -> None:
        super().__init__(f"line {line}: {message}")
        self.line = line


class InvalidParameter(DemandFractalError):
    """Raised for non-finite parameters or invalid iteration settings."""


class RenderError(DemandFractalError):
    """Rendering failures (viewport, tiling, montage layout)."""


class MetricError(DemandFractalError):
    """Fractal metric failures (empty masks, bad scale lists)."""
