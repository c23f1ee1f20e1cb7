"""Public package entry point for the demand fractal toolkit."""

from __future__ import annotations

import logging
from collections.abc import Sequence
from typing import Any

from demand_fractal.dynamics import (
    as_parameter,
    boundary_distance,
    cardioid_bulb_member,
    classify_parameter,
    critical_orbit,
    exterior_distance,
    iterate_escape,
    julia_connected,
    mandelbrot_member,
    smooth_iteration,
)
from demand_fractal.errors import (
    DemandFractalError,
    DemandParseError,
    InvalidDemandInput,
    InvalidParameter,
    MetricError,
    RenderError,
)
from demand_fractal.ingest import (
    builtin_table1,
    builtin_table1_printed_pu,
    demand_extremes,
    demand_table,
    load_character,
    load_demand,
    parse_demand_csv,
    to_per_unit,
    to_per_unit_all,
    validate_apparent_power,
    write_demand_csv,
)
from demand_fractal.metrics import (
    boundary_mask,
    box_counting_dimension,
    fold_report,
    rank_correlation,
    write_report_csv,
)
from demand_fractal.models import (
    BasePower,
    ColorMap,
    DemandPoint,
    DemandRecord,
    DerivativeSpace,
    EscapeRaster,
    EscapeResult,
    FoldMetrics,
    FractalKind,
    IterationConfig,
    LoadCharacter,
    PaletteType,
    ParameterClass,
    ParameterRegion,
    RenderMode,
    RenderSettings,
    Viewport,
)
from demand_fractal.raster import (
    plot_demand_curves,
    render_daily_montage,
    render_demand_overlay,
    render_julia_for,
    render_raster,
    rgb_image,
    write_ppm,
)

__version__ = "0.1.0"

logging.getLogger(__name__).addHandler(logging.NullHandler())


def table1_points(base_power: float = 4000.0) -> list[DemandPoint]:
    """Per-unit parameters of the built-in 24-hour demand curve."""
    return to_per_unit_all(builtin_table1(), BasePower(base_power))


def classify_day(
    points: Sequence[DemandPoint] | None = None,
    cfg: IterationConfig | None = None,
) -> list[dict[str, Any]]:
    """Classify every hour of a demand day (the built-in curve by default).

    Returns:
        One dict per hour with ``hour``, ``c``, ``class``, ``connected`` and
        ``distance_estimate`` keys.

    Example:
        >>> rows = classify_day()
        >>> all(row["connected"] for row in rows)
        True
    """
    points = table1_points() if points is None else points
    rows = []
    for point in points:
        kind = classify_parameter(point.c, cfg)
        rows.append(
            {
                "hour": point.hour,
                "c": point.c,
                **kind.describe(),
                "connected": julia_connected(point.c, cfg),
            }
        )
    return rows


__all__ = [
    "BasePower",
    "ColorMap",
    "DemandPoint",
    "DemandRecord",
    "DerivativeSpace",
    "EscapeRaster",
    "EscapeResult",
    "FoldMetrics",
    "FractalKind",
    "IterationConfig",
    "LoadCharacter",
    "PaletteType",
    "ParameterClass",
    "ParameterRegion",
    "RenderMode",
    "RenderSettings",
    "Viewport",
    "DemandFractalError",
    "DemandParseError",
    "InvalidDemandInput",
    "InvalidParameter",
    "MetricError",
    "RenderError",
    "as_parameter",
    "boundary_distance",
    "cardioid_bulb_member",
    "classify_parameter",
    "critical_orbit",
    "exterior_distance",
    "iterate_escape",
    "julia_connected",
    "mandelbrot_member",
    "smooth_iteration",
    "builtin_table1",
    "builtin_table1_printed_pu",
    "demand_extremes",
    "demand_table",
    "load_character",
    "load_demand",
    "parse_demand_csv",
    "to_per_unit",
    "to_per_unit_all",
    "validate_apparent_power",
    "write_demand_csv",
    "boundary_mask",
    "box_counting_dimension",
    "fold_report",
    "rank_correlation",
    "write_report_csv",
    "plot_demand_curves",
    "render_daily_montage",
    "render_demand_overlay",
    "render_julia_for",
    "render_raster",
    "rgb_image",
    "write_ppm",
    "table1_points",
    "classify_day",
    "__version__",
]
