"""Deterministic escape-time rendering of Mandelbrot and Julia windows."""

from __future__ import annotations

import io
import logging
import math
from collections.abc import Sequence
from concurrent.futures import ThreadPoolExecutor
from typing import IO

import matplotlib
import numpy as np
from matplotlib.backends.backend_agg import FigureCanvasAgg
from matplotlib.figure import Figure

from demand_fractal import kernels
from demand_fractal.dynamics import as_parameter
from demand_fractal.errors import RenderError
from demand_fractal.models import (
    ColorMap,
    DemandPoint,
    DemandRecord,
    EscapeRaster,
    FractalKind,
    IterationConfig,
    PaletteType,
    RenderMode,
    RenderSettings,
    Viewport,
)

logger = logging.getLogger(__name__)

MARKER_ARM = 2
MONTAGE_COLUMNS = 4
SEPARATOR_WIDTH = 2
DEFAULT_MANDELBROT_VIEWPORT = (-2.0, 1.0, -1.5, 1.5)
SVG_WIDTH = 800
SVG_HEIGHT = 480
SVG_DPI = 72
SVG_RC = {"svg.hashsalt": "demand-fractal"}

Tile = tuple[int, int, int, int]


def tile_grid(width: int, height: int, tile_size: int) -> list[Tile]:
    """Split a width x height image into (x0, x1, y0, y1) tiles, row-major."""
    return [
        (x0, min(x0 + tile_size, width), y0, min(y0 + tile_size, height))
        for y0 in range(0, height, tile_size)
        for x0 in range(0, width, tile_size)
    ]


def render_raster(
    mode: RenderMode,
    viewport: Viewport,
    cfg: IterationConfig | None = None,
    settings: RenderSettings | None = None,
) -> EscapeRaster:
    """Escape-time raster of ``viewport`` sampled at pixel centers.

    MANDELBROT varies c with z0 = 0; JULIA varies z0 with the mode's fixed c.
    Tiles are computed independently into disjoint slices, so the output
    does not depend on tile size or worker count.
    """
    cfg = cfg or IterationConfig()
    settings = settings or RenderSettings()
    if mode.kind is FractalKind.MONTAGE:
        raise RenderError("montages are assembled by render_daily_montage")
    julia = mode.kind is FractalKind.JULIA
    c = as_parameter(mode.c) if julia else 0j

    shape = (viewport.height, viewport.width)
    iterations = np.zeros(shape, dtype=np.int32)
    escaped = np.zeros(shape, dtype=bool)
    smooth = np.full(shape, np.nan, dtype=np.float64)

    tiles = tile_grid(viewport.width, viewport.height, settings.tile_size)
    args = (
        viewport.re_min,
        viewport.im_max,
        viewport.pixel_width,
        viewport.pixel_height,
        julia,
        c.real,
        c.imag,
        cfg.max_iter,
        cfg.escape_radius * cfg.escape_radius,
    )

    def run(batch: list[Tile]) -> None:
        for x0, x1, y0, y1 in batch:
            kernels.escape_tile(iterations, escaped, smooth, x0, x1, y0, y1, *args)

    workers = min(settings.workers, len(tiles))
    logger.debug(
        "rendering %s %dx%d: %d tiles on %d workers",
        mode.label(),
        viewport.width,
        viewport.height,
        len(tiles),
        workers,
    )
    if workers <= 1:
        run(tiles)
    else:
        batches = [tiles[i::workers] for i in range(workers)]
        with ThreadPoolExecutor(max_workers=workers) as executor:
            for future in [executor.submit(run, batch) for batch in batches]:
                future.result()

    return EscapeRaster(
        viewport=viewport,
        cfg=cfg,
        mode=mode,
        iterations=iterations,
        escaped=escaped,
        smooth=smooth,
    )


def render_julia_for(
    c: complex,
    viewport: Viewport,
    cfg: IterationConfig | None = None,
    settings: RenderSettings | None = None,
) -> EscapeRaster:
    return render_raster(RenderMode.julia(as_parameter(c)), viewport, cfg, settings)


def _smooth_palette(values: np.ndarray, max_iter: int) -> np.ndarray:
    # cosine gradient, three cycles over the iteration range
    phase = 3.0 * np.clip(values, 0.0, None) / max_iter
    offsets = np.array([0.0, 0.33, 0.67])
    channels = 0.5 + 0.5 * np.cos(2.0 * np.pi * (phase[..., None] + offsets))
    return np.floor(255.0 * channels).astype(np.uint8)


def rgb_image(raster: EscapeRaster, cmap: ColorMap | None = None) -> np.ndarray:
    """Colors of every pixel as a (height, width, 3) uint8 array."""
    cmap = cmap or ColorMap()
    max_iter = raster.cfg.max_iter
    image = np.empty((raster.height, raster.width, 3), dtype=np.uint8)

    if cmap.palette is PaletteType.GRAYSCALE:
        gray = (255 * raster.iterations.astype(np.int64)) // max_iter
        image[...] = np.clip(gray, 0, 255).astype(np.uint8)[..., None]
    else:
        image[...] = _smooth_palette(np.nan_to_num(raster.smooth), max_iter)

    image[~raster.escaped] = cmap.interior_color
    image[raster.markers] = cmap.marker_color
    image[raster.separators] = cmap.separator_color
    return image


def write_ppm(
    raster: EscapeRaster, cmap: ColorMap | None, sink: IO[bytes]
) -> int:
    """Write a binary P6 image; returns the number of bytes written."""
    image = rgb_image(raster, cmap)
    header = f"P6\n{raster.width} {raster.height}\n255\n".encode("ascii")
    payload = image.tobytes(order="C")
    sink.write(header)
    sink.write(payload)
    return len(header) + len(payload)


def default_mandelbrot_viewport(size: int = 512) -> Viewport:
    re_min, re_max, im_min, im_max = DEFAULT_MANDELBROT_VIEWPORT
    return Viewport(re_min, re_max, im_min, im_max, size, size)


def _mark_cross(markers: np.ndarray, x: int, y: int) -> None:
    height, width = markers.shape
    markers[y, max(0, x - MARKER_ARM) : min(width, x + MARKER_ARM + 1)] = True
    markers[max(0, y - MARKER_ARM) : min(height, y + MARKER_ARM + 1), x] = True


def render_demand_overlay(
    points: Sequence[DemandPoint],
    viewport: Viewport,
    cfg: IterationConfig | None = None,
    settings: RenderSettings | None = None,
) -> EscapeRaster:
    """Mandelbrot raster with each demand point drawn as a 5x5 cross.

    Points outside the window are skipped; ``metadata`` reports
    ``markers`` and ``skipped`` counts.
    """
    if not points:
        raise RenderError("overlay needs at least one demand point")
    raster = render_raster(RenderMode.mandelbrot(), viewport, cfg, settings)
    placed = 0
    skipped = 0
    for point in points:
        pixel = viewport.pixel_of(point.c)
        if pixel is None:
            skipped += 1
            logger.info("hour %d (c=%r) lies outside the viewport", point.hour, point.c)
            continue
        _mark_cross(raster.markers, *pixel)
        placed += 1
    raster.metadata.update({"markers": placed, "skipped": skipped})
    return raster


def render_daily_montage(
    points: Sequence[DemandPoint],
    per_panel: Viewport,
    cfg: IterationConfig | None = None,
    hours: Sequence[int] | None = None,
    settings: RenderSettings | None = None,
) -> EscapeRaster:
    """Julia panels of the requested hours, 4 per row, in hour order.

    Panels are separated by 2-pixel white bands; unused cells of the last
    row are filled with the separator color. The returned raster keeps
    ``per_panel`` as its viewport: every panel shares that window, so its
    size is the panel size rather than the montage size.
    """
    cfg = cfg or IterationConfig()
    by_hour = {point.hour: point for point in points}
    selected = sorted(by_hour) if hours is None else sorted(set(hours))
    if not selected:
        raise RenderError("montage needs at least one hour")
    for hour in selected:
        if hour not in by_hour:
            raise RenderError(f"hour {hour} is not in the demand data")

    count = len(selected)
    columns = min(MONTAGE_COLUMNS, count)
    rows = math.ceil(count / columns)
    pw, ph = per_panel.width, per_panel.height
    width = columns * pw + (columns - 1) * SEPARATOR_WIDTH
    height = rows * ph + (rows - 1) * SEPARATOR_WIDTH

    iterations = np.zeros((height, width), dtype=np.int32)
    escaped = np.ones((height, width), dtype=bool)
    smooth = np.full((height, width), np.nan, dtype=np.float64)
    separators = np.ones((height, width), dtype=bool)
    layout = []

    for index, hour in enumerate(selected):
        row, col = divmod(index, columns)
        x0 = col * (pw + SEPARATOR_WIDTH)
        y0 = row * (ph + SEPARATOR_WIDTH)
        panel = render_raster(
            RenderMode.julia(by_hour[hour].c), per_panel, cfg, settings
        )
        region = (slice(y0, y0 + ph), slice(x0, x0 + pw))
        iterations[region] = panel.iterations
        escaped[region] = panel.escaped
        smooth[region] = panel.smooth
        separators[region] = False
        layout.append({"hour": hour, "x": x0, "y": y0})

    return EscapeRaster(
        viewport=per_panel,
        cfg=cfg,
        mode=RenderMode(FractalKind.MONTAGE),
        iterations=iterations,
        escaped=escaped,
        smooth=smooth,
        separators=separators,
        metadata={"panels": layout, "columns": columns, "rows": rows},
    )


def plot_demand_curves(records: Sequence[DemandRecord], sink: IO[bytes]) -> int:
    """Standalone SVG line chart of P, Q and S over the hours of the day.

    Each series is one line whose ``gid`` is ``demand-p``, ``demand-q`` or
    ``demand-s``. The output carries no date and uses a fixed id salt, so
    equal records give equal bytes. Returns the number of bytes written.
    """
    if len(records) < 2:
        raise RenderError(f"demand curves need at least 2 records, got {len(records)}")
    ordered = sorted(records, key=lambda r: r.hour)
    hours = [r.hour for r in ordered]

    fig = Figure(figsize=(SVG_WIDTH / SVG_DPI, SVG_HEIGHT / SVG_DPI), dpi=SVG_DPI)
    FigureCanvasAgg(fig)
    ax = fig.add_subplot()
    series = (
        ("p", "P (MW)", "#1f77b4", [r.p_mw for r in ordered]),
        ("q", "Q (MVAr)", "#d62728", [r.q_mvar for r in ordered]),
        ("s", "S (MVA)", "#2ca02c", [r.s_mva for r in ordered]),
    )
    for key, label, color, values in series:
        ax.plot(hours, values, color=color, label=label, gid=f"demand-{key}")
    ax.set_xlabel("hour")
    ax.set_ylabel("demand")
    ax.set_xticks(hours)
    ax.grid()
    ax.legend()
    fig.tight_layout()

    buffer = io.BytesIO()
    with matplotlib.rc_context(SVG_RC):
        fig.savefig(buffer, format="svg", metadata={"Date": None})
    data = buffer.getvalue()
    sink.write(data)
    logger.debug("demand chart: %d records, %d bytes", len(ordered), len(data))
    return len(data)
