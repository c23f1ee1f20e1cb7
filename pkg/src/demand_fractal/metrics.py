"""Fold-density metrics of Julia rasters.

"Fold density" is measured three ways per hour: the fraction of boundary
pixels in the rendered filled Julia set, the box-counting dimension of that
boundary, and the distance of the demand parameter to the Mandelbrot
boundary.
"""

from __future__ import annotations

import logging
import math
from collections.abc import Sequence
from concurrent.futures import ThreadPoolExecutor
from dataclasses import replace
from typing import IO

import numpy as np
import pandas as pd

from demand_fractal.dynamics import boundary_distance
from demand_fractal.errors import MetricError
from demand_fractal.models import (
    DemandPoint,
    EscapeRaster,
    FoldMetrics,
    FractalKind,
    IterationConfig,
    RenderMode,
    RenderSettings,
    Viewport,
)
from demand_fractal.raster import render_raster

logger = logging.getLogger(__name__)

REPORT_SCALES = (2, 4, 8, 16, 32)
REPORT_HALF_WIDTH = 1.6
MIN_SCALES = 4
REPORT_COLUMNS = [
    "hour",
    "boundary_fraction",
    "box_dim",
    "box_dim_stderr",
    "m_distance",
]


def boundary_mask(raster: EscapeRaster) -> np.ndarray:
    """Bounded pixels with at least one escaped 4-neighbor inside the grid."""
    if raster.mode.kind is not FractalKind.JULIA:
        raise MetricError(
            "boundary mask is defined for Julia rasters, "
            f"got {raster.mode.kind.value}"
        )
    escaped = np.pad(raster.escaped, 1, mode="constant", constant_values=False)
    touches_escape = (
        escaped[:-2, 1:-1]
        | escaped[2:, 1:-1]
        | escaped[1:-1, :-2]
        | escaped[1:-1, 2:]
    )
    return ~raster.escaped & touches_escape


def box_counts(mask: np.ndarray, scales: Sequence[int]) -> list[int]:
    height, width = mask.shape
    counts = []
    for s in scales:
        boxes = mask.reshape(height // s, s, width // s, s).any(axis=(1, 3))
        counts.append(int(boxes.sum()))
    return counts


def box_counting_dimension(
    mask: np.ndarray, scales: Sequence[int] = REPORT_SCALES
) -> tuple[float, float]:
    """Least-squares slope of log N(s) against log(1/s), with its standard error.

    Args:
        mask: 2-D boolean grid with at least one marked pixel.
        scales: At least 4 strictly increasing box sizes, each dividing both
            grid dimensions.

    Returns:
        (dimension, stderr). The standard error is 0 for an exact fit.

    Raises:
        MetricError: On an empty mask or an invalid scale list.
    """
    mask = np.asarray(mask, dtype=bool)
    if mask.ndim != 2:
        raise MetricError(f"mask must be 2-D, got shape {mask.shape}")
    if not mask.any():
        raise MetricError("box counting needs a nonempty mask")
    scales = [int(s) for s in scales]
    if len(scales) < MIN_SCALES:
        raise MetricError(f"box counting needs >= {MIN_SCALES} scales, got {scales}")
    if any(b <= a for a, b in zip(scales, scales[1:])) or scales[0] < 1:
        raise MetricError(
            f"scales must be positive and strictly increasing: {scales}"
        )
    height, width = mask.shape
    for s in scales:
        if height % s or width % s:
            raise MetricError(
                f"scale {s} does not divide the {width}x{height} grid"
            )

    x = np.log(1.0 / np.asarray(scales, dtype=np.float64))
    y = np.log(np.asarray(box_counts(mask, scales), dtype=np.float64))
    coefficients, covariance = np.polyfit(x, y, 1, cov=True)
    return float(coefficients[0]), math.sqrt(max(float(covariance[0, 0]), 0.0))


def report_viewport(resolution: int) -> Viewport:
    return Viewport.square(REPORT_HALF_WIDTH, resolution)


def hour_metrics(
    point: DemandPoint,
    cfg: IterationConfig,
    resolution: int,
    settings: RenderSettings | None = None,
) -> FoldMetrics:
    raster = render_raster(
        RenderMode.julia(point.c), report_viewport(resolution), cfg, settings
    )
    mask = boundary_mask(raster)
    try:
        dimension, stderr = box_counting_dimension(mask, REPORT_SCALES)
    except MetricError as exc:
        raise MetricError(f"hour {point.hour}: {exc}") from exc
    distance = boundary_distance(point.c, cfg)
    logger.debug(
        "hour %d: boundary=%d px, dim=%.4f, distance=%.4g",
        point.hour,
        int(mask.sum()),
        dimension,
        distance,
    )
    return FoldMetrics(
        hour=point.hour,
        boundary_pixel_fraction=float(mask.mean()),
        box_dimension=dimension,
        box_dimension_stderr=stderr,
        m_distance_estimate=distance,
        c=point.c,
    )


def fold_report(
    points: Sequence[DemandPoint],
    cfg: IterationConfig | None = None,
    resolution: int = 512,
    settings: RenderSettings | None = None,
) -> list[FoldMetrics]:
    """Fold metrics for every demand point, ordered by hour.

    Hours run concurrently, one per worker, each rendered single-threaded;
    the result order does not depend on completion order.
    """
    if not points:
        raise MetricError("fold report needs at least one demand point")
    cfg = cfg or IterationConfig()
    settings = settings or RenderSettings()
    ordered = sorted(points, key=lambda p: p.hour)
    per_hour = replace(settings, workers=1)
    workers = min(settings.workers, len(ordered))

    def run(point: DemandPoint) -> FoldMetrics:
        return hour_metrics(point, cfg, resolution, per_hour)

    if workers <= 1:
        return [run(point) for point in ordered]
    with ThreadPoolExecutor(max_workers=workers) as executor:
        return list(executor.map(run, ordered))


def report_frame(report: Sequence[FoldMetrics]) -> pd.DataFrame:
    return pd.DataFrame(
        [
            (
                m.hour,
                m.boundary_pixel_fraction,
                m.box_dimension,
                m.box_dimension_stderr,
                m.m_distance_estimate,
            )
            for m in report
        ],
        columns=REPORT_COLUMNS,
    )


def write_report_csv(report: Sequence[FoldMetrics], sink: IO[str]) -> None:
    report_frame(report).to_csv(
        sink, index=False, float_format="%.6g", lineterminator="\n"
    )


def rank_correlation(report: Sequence[FoldMetrics]) -> float:
    """Spearman correlation between |c| and box dimension across hours."""
    if len(report) < 2:
        raise MetricError("rank correlation needs at least two hours")
    magnitude = pd.Series([abs(m.c) for m in report])
    dimension = pd.Series([m.box_dimension for m in report])
    # Pearson correlation of average ranks
    return float(magnitude.rank().corr(dimension.rank()))
