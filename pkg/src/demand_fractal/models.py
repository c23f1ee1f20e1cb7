"""Shared data structures for the demand fractal toolkit."""

from __future__ import annotations

import math
import os
from dataclasses import dataclass, field
from enum import Enum
from typing import Any, Optional

import numpy as np

from demand_fractal.errors import (
    InvalidDemandInput,
    InvalidParameter,
    RenderError,
)

HOURS_PER_DAY = 24
DEFAULT_BASE_POWER_MVA = 4000.0


class LoadCharacter(Enum):
    """Sign of the reactive power: positive Q is an inductive load."""

    INDUCTIVE = "inductive"
    CAPACITIVE = "capacitive"
    RESISTIVE = "resistive"


class ParameterRegion(Enum):
    INTERIOR = "INTERIOR"
    BOUNDARY = "BOUNDARY"
    EXTERIOR = "EXTERIOR"


class DerivativeSpace(Enum):
    """Which first variation ``iterate_escape`` co-iterates.

    - PARAMETER: dZ/dC with d0 = 0 and d <- 2zd + 1 (Mandelbrot runs)
    - DYNAMIC: dZ/dZ0 with d0 = 1 and d <- 2zd (Julia runs)
    """

    PARAMETER = "parameter"
    DYNAMIC = "dynamic"


class FractalKind(Enum):
    MANDELBROT = "mandelbrot"
    JULIA = "julia"
    MONTAGE = "montage"


class PaletteType(Enum):
    GRAYSCALE = "grayscale"
    SMOOTH = "smooth"


@dataclass(frozen=True)
class DemandRecord:
    """One hourly row of the daily demand curve, in physical units."""

    hour: int
    p_mw: float
    q_mvar: float
    s_mva: float

    def __post_init__(self) -> None:
        if isinstance(self.hour, bool) or int(self.hour) != self.hour:
            raise InvalidDemandInput(f"hour must be an integer, got {self.hour!r}")
        if not 0 <= self.hour < HOURS_PER_DAY:
            raise InvalidDemandInput(f"hour out of range 0-23: {self.hour}")
        for name in ("p_mw", "q_mvar", "s_mva"):
            if not math.isfinite(getattr(self, name)):
                raise InvalidDemandInput(f"{name} must be finite at hour {self.hour}")
        if self.p_mw < 0:
            raise InvalidDemandInput(
                f"negative real power at hour {self.hour}: {self.p_mw} MW"
            )
        if self.s_mva < 0:
            raise InvalidDemandInput(
                f"negative apparent power at hour {self.hour}: {self.s_mva} MVA"
            )


@dataclass(frozen=True)
class BasePower:
    value: float = DEFAULT_BASE_POWER_MVA

    def __post_init__(self) -> None:
        if not math.isfinite(self.value) or self.value <= 0:
            raise InvalidDemandInput(f"base power must be positive, got {self.value}")


@dataclass(frozen=True)
class DemandPoint:
    """Per-unit parameter c = P_pu + i*Q_pu for one hour."""

    hour: int
    c_re: float
    c_im: float

    @property
    def c(self) -> complex:
        return complex(self.c_re, self.c_im)


@dataclass(frozen=True)
class IterationConfig:
    max_iter: int = 1000
    escape_radius: float = 2.0

    def __post_init__(self) -> None:
        if isinstance(self.max_iter, bool) or int(self.max_iter) != self.max_iter:
            raise InvalidParameter(f"max_iter must be an integer: {self.max_iter!r}")
        if self.max_iter < 1:
            raise InvalidParameter(f"max_iter must be >= 1, got {self.max_iter}")
        if not math.isfinite(self.escape_radius) or self.escape_radius < 2.0:
            raise InvalidParameter(
                f"escape_radius must be >= 2, got {self.escape_radius}"
            )


@dataclass(frozen=True)
class EscapeResult:
    escaped: bool
    iterations: int
    final_magnitude: float
    derivative_magnitude: float = 0.0


@dataclass(frozen=True)
class ParameterClass:
    region: ParameterRegion
    distance_estimate: float = 0.0

    def describe(self) -> dict[str, Any]:
        return {
            "class": self.region.value,
            "distance_estimate": self.distance_estimate,
        }


@dataclass(frozen=True)
class Viewport:
    """Complex-plane window sampled at pixel centers, y pointing down."""

    re_min: float
    re_max: float
    im_min: float
    im_max: float
    width: int
    height: int

    def __post_init__(self) -> None:
        bounds = (self.re_min, self.re_max, self.im_min, self.im_max)
        if not all(math.isfinite(v) for v in bounds):
            raise RenderError(f"viewport bounds must be finite: {bounds}")
        if not self.re_min < self.re_max:
            raise RenderError(f"re_min must be < re_max: {self.re_min}, {self.re_max}")
        if not self.im_min < self.im_max:
            raise RenderError(f"im_min must be < im_max: {self.im_min}, {self.im_max}")
        if self.width < 1 or self.height < 1:
            raise RenderError(f"viewport size must be >= 1: {self.width}x{self.height}")

    @classmethod
    def square(cls, half_width: float, size: int) -> Viewport:
        """Window [-h, h]^2 centered on the origin."""
        return cls(-half_width, half_width, -half_width, half_width, size, size)

    @property
    def pixel_width(self) -> float:
        return (self.re_max - self.re_min) / self.width

    @property
    def pixel_height(self) -> float:
        return (self.im_max - self.im_min) / self.height

    def pixel_center(self, x: int, y: int) -> complex:
        return complex(
            self.re_min + (x + 0.5) * self.pixel_width,
            self.im_max - (y + 0.5) * self.pixel_height,
        )

    def contains(self, c: complex) -> bool:
        return (
            self.re_min <= c.real <= self.re_max
            and self.im_min <= c.imag <= self.im_max
        )

    def pixel_of(self, c: complex) -> Optional[tuple[int, int]]:
        """Pixel whose cell holds ``c``, or None outside the window."""
        if not self.contains(c):
            return None
        x = int((c.real - self.re_min) / self.pixel_width)
        y = int((self.im_max - c.imag) / self.pixel_height)
        return min(x, self.width - 1), min(y, self.height - 1)


@dataclass(frozen=True)
class RenderMode:
    kind: FractalKind
    c: Optional[complex] = None

    @classmethod
    def mandelbrot(cls) -> RenderMode:
        return cls(FractalKind.MANDELBROT)

    @classmethod
    def julia(cls, c: complex) -> RenderMode:
        return cls(FractalKind.JULIA, complex(c))

    def label(self) -> str:
        if self.kind is FractalKind.JULIA and self.c is not None:
            return f"julia({self.c.real:g}{self.c.imag:+g}i)"
        return self.kind.value


def _default_workers() -> int:
    return max(1, os.cpu_count() or 1)


@dataclass(frozen=True)
class RenderSettings:
    tile_size: int = 64
    workers: int = field(default_factory=_default_workers)

    def __post_init__(self) -> None:
        if self.tile_size < 1:
            raise RenderError(f"tile_size must be >= 1, got {self.tile_size}")
        if self.workers < 1:
            raise RenderError(f"workers must be >= 1, got {self.workers}")


RGB = tuple[int, int, int]


@dataclass(frozen=True)
class ColorMap:
    interior_color: RGB = (0, 0, 0)
    palette: PaletteType = PaletteType.GRAYSCALE
    marker_color: RGB = (255, 0, 0)
    separator_color: RGB = (255, 255, 255)


@dataclass
class EscapeRaster:
    """Per-pixel escape data for one rendered window.

    ``iterations``, ``escaped`` and ``smooth`` are row-major arrays of shape
    (height, width); ``smooth`` is NaN for bounded pixels. ``markers`` and
    ``separators`` flag overlay pixels that replace the escape colors.
    Montages store the shared per-panel window in ``viewport``, so only
    single renders have viewport and array sizes that agree.
    """

    viewport: Viewport
    cfg: IterationConfig
    mode: RenderMode
    iterations: np.ndarray
    escaped: np.ndarray
    smooth: np.ndarray
    markers: np.ndarray = field(default=None)  # type: ignore[assignment]
    separators: np.ndarray = field(default=None)  # type: ignore[assignment]
    metadata: dict[str, Any] = field(default_factory=dict)

    def __post_init__(self) -> None:
        shape = self.iterations.shape
        if self.escaped.shape != shape or self.smooth.shape != shape:
            raise RenderError("raster arrays must share one shape")
        if self.markers is None:
            self.markers = np.zeros(shape, dtype=bool)
        if self.separators is None:
            self.separators = np.zeros(shape, dtype=bool)

    @property
    def height(self) -> int:
        return int(self.iterations.shape[0])

    @property
    def width(self) -> int:
        return int(self.iterations.shape[1])

    @property
    def bounded(self) -> np.ndarray:
        return ~self.escaped & ~self.separators


@dataclass(frozen=True)
class FoldMetrics:
    hour: int
    boundary_pixel_fraction: float
    box_dimension: float
    box_dimension_stderr: float
    m_distance_estimate: float
    c: complex = 0j
