"""Command line pipeline: demand data -> per-unit parameters -> fractals.

Exit codes: 0 success, 1 usage error, 2 input/validation error, 3 I/O error.
"""

from __future__ import annotations

import logging
import sys
import warnings
from collections.abc import Sequence
from dataclasses import dataclass
from pathlib import Path
from typing import Callable, Optional

import click
import pandas as pd

from demand_fractal.dynamics import (
    DEFAULT_BOUNDARY_EPSILON,
    as_parameter,
    boundary_distance,
    classify_parameter,
    julia_connected,
)
from demand_fractal.errors import DemandFractalError, RenderError
from demand_fractal.ingest import demand_table, load_demand, to_per_unit_all
from demand_fractal.metrics import fold_report, write_report_csv
from demand_fractal.models import (
    HOURS_PER_DAY,
    BasePower,
    ColorMap,
    DemandPoint,
    DemandRecord,
    EscapeRaster,
    IterationConfig,
    PaletteType,
    RenderMode,
    RenderSettings,
    Viewport,
)
from demand_fractal.raster import (
    DEFAULT_MANDELBROT_VIEWPORT,
    plot_demand_curves,
    render_daily_montage,
    render_demand_overlay,
    render_julia_for,
    render_raster,
    write_ppm,
)

EXIT_OK = 0
EXIT_USAGE = 1
EXIT_INPUT = 2
EXIT_IO = 3

JULIA_VIEWPORT = (-1.6, 1.6, -1.6, 1.6)

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class RunConfig:
    """Validated options shared by every subcommand."""

    input_path: Optional[Path] = None
    builtin_table1: bool = False
    base_power: BasePower = BasePower()
    iteration: IterationConfig = IterationConfig()
    render: RenderSettings = RenderSettings()
    width: int = 512
    height: int = 512
    bounds: Optional[tuple[float, float, float, float]] = None
    output: Optional[Path] = None

    def has_input(self) -> bool:
        return self.input_path is not None or self.builtin_table1

    def records(self) -> list[DemandRecord]:
        if self.input_path is not None and self.builtin_table1:
            raise click.UsageError("--input and --builtin-table1 are exclusive")
        if not self.has_input():
            raise click.UsageError("give --input PATH or --builtin-table1")
        with warnings.catch_warnings(record=True) as caught:
            warnings.simplefilter("always")
            records = load_demand(self.input_path, builtin=self.builtin_table1)
        for warning in caught:
            logger.warning("%s", warning.message)
        return records

    def points(self) -> list[DemandPoint]:
        return to_per_unit_all(self.records(), self.base_power)

    def viewport(self, default: tuple[float, float, float, float]) -> Viewport:
        re_min, re_max, im_min, im_max = self.bounds or default
        return Viewport(re_min, re_max, im_min, im_max, self.width, self.height)


def _input_options(func: Callable) -> Callable:
    func = click.option(
        "--base-power",
        type=float,
        default=BasePower().value,
        show_default=True,
        help="Base power in MVA for the per-unit conversion",
    )(func)
    func = click.option(
        "--builtin-table1",
        is_flag=True,
        help="Use the built-in 24-hour demand curve",
    )(func)
    func = click.option(
        "--input",
        "input_path",
        type=click.Path(dir_okay=False, path_type=Path),
        default=None,
        help="Demand CSV (hour,p_mw,q_mvar[,s_mva])",
    )(func)
    return func


def _iteration_options(func: Callable) -> Callable:
    func = click.option(
        "--escape-radius", type=float, default=2.0, show_default=True
    )(func)
    func = click.option("--max-iter", type=int, default=1000, show_default=True)(func)
    return func


def _parallel_options(func: Callable) -> Callable:
    func = click.option(
        "--tile-size", type=int, default=64, show_default=True, help="Tile edge (px)"
    )(func)
    func = click.option(
        "--workers",
        type=int,
        default=None,
        help="Worker threads (default: available CPUs)",
    )(func)
    return func


def _render_options(func: Callable) -> Callable:
    func = click.option(
        "--palette",
        type=click.Choice([p.value for p in PaletteType]),
        default=PaletteType.GRAYSCALE.value,
        show_default=True,
    )(func)
    func = click.option(
        "--bounds",
        type=(float, float, float, float),
        default=None,
        metavar="RE_MIN RE_MAX IM_MIN IM_MAX",
        help="Complex-plane window",
    )(func)
    func = click.option("--height", type=int, default=512, show_default=True)(func)
    func = click.option("--width", type=int, default=512, show_default=True)(func)
    func = click.option(
        "--output",
        type=click.Path(dir_okay=False, path_type=Path),
        default=None,
        help="Output file",
    )(func)
    return _parallel_options(_iteration_options(func))


def _run_config(**options) -> RunConfig:
    workers = options.get("workers")
    render = RenderSettings(
        tile_size=options.get("tile_size", 64),
        **({"workers": workers} if workers is not None else {}),
    )
    return RunConfig(
        input_path=options.get("input_path"),
        builtin_table1=options.get("builtin_table1", False),
        base_power=BasePower(options.get("base_power", BasePower().value)),
        iteration=IterationConfig(
            max_iter=options.get("max_iter", 1000),
            escape_radius=options.get("escape_radius", 2.0),
        ),
        render=render,
        width=options.get("width", 512),
        height=options.get("height", 512),
        bounds=options.get("bounds"),
        output=options.get("output"),
    )


def _emit_csv(frame: pd.DataFrame, output: Optional[Path]) -> None:
    text = frame.to_csv(index=False, float_format="%.6g", lineterminator="\n")
    if output is None:
        click.echo(text, nl=False)
    else:
        output.write_text(text, encoding="utf-8")


def _write_ppm(raster: EscapeRaster, palette: str, output: Path) -> None:
    cmap = ColorMap(palette=PaletteType(palette))
    with open(output, "wb") as sink:
        write_ppm(raster, cmap, sink)
    logger.info("wrote %s (%dx%d)", output, raster.width, raster.height)


def parse_hours(text: str) -> list[int]:
    """Hours from 'odd', 'even', 'all' or a comma-separated list."""
    keyword = text.strip().lower()
    if keyword == "odd":
        return list(range(1, HOURS_PER_DAY, 2))
    if keyword == "even":
        return list(range(0, HOURS_PER_DAY, 2))
    if keyword == "all":
        return list(range(HOURS_PER_DAY))
    try:
        return [int(part) for part in keyword.split(",") if part.strip()]
    except ValueError as exc:
        raise click.BadParameter(f"invalid hour list: {text!r}") from exc


@click.group()
@click.option("--verbose", "-v", is_flag=True, help="Log progress to stderr")
def cli(verbose: bool) -> None:
    """Fractal analysis of a daily real/reactive power demand curve."""
    if verbose:
        logging.basicConfig(
            level=logging.DEBUG,
            stream=sys.stderr,
            format="%(levelname)s %(name)s: %(message)s",
        )


@cli.command()
@_input_options
@_iteration_options
@click.option("--c", "parameter", type=str, default=None, help="Classify RE,IM")
@click.option(
    "--epsilon",
    type=float,
    default=DEFAULT_BOUNDARY_EPSILON,
    show_default=True,
    help="Boundary band width in the parameter plane",
)
def classify(parameter: Optional[str], epsilon: float, **options) -> None:
    """Place each hour's parameter inside, on, or outside the Mandelbrot set."""
    config = _run_config(**options)
    if parameter is not None:
        if config.has_input():
            raise click.UsageError("--c cannot be combined with demand input")
        rows = [("-", as_parameter(parameter))]
    else:
        rows = [(p.hour, p.c) for p in config.points()]

    table = []
    for hour, c in rows:
        kind = classify_parameter(c, config.iteration, epsilon)
        table.append(
            {
                "hour": hour,
                "c_re": c.real,
                "c_im": c.imag,
                "class": kind.region.value,
                "connected": str(julia_connected(c, config.iteration)).lower(),
                "m_distance": boundary_distance(c, config.iteration),
            }
        )
    _emit_csv(pd.DataFrame(table), config.output)


@cli.group()
def render() -> None:
    """Render Mandelbrot, Julia, overlay, montage and demand-curve images."""


@render.command()
@_render_options
def mandelbrot(palette: str, **options) -> None:
    """The Mandelbrot set."""
    config = _run_config(**options)
    raster = render_raster(
        RenderMode.mandelbrot(),
        config.viewport(DEFAULT_MANDELBROT_VIEWPORT),
        config.iteration,
        config.render,
    )
    _write_ppm(raster, palette, config.output or Path("mandelbrot.ppm"))


@render.command()
@_input_options
@_render_options
@click.option("--hour", type=int, default=None, help="Demand hour to render")
@click.option("--c", "parameter", type=str, default=None, help="Parameter RE,IM")
def julia(
    hour: Optional[int], parameter: Optional[str], palette: str, **options
) -> None:
    """The Julia set of one demand hour or of an explicit parameter."""
    config = _run_config(**options)
    if (hour is None) == (parameter is None):
        raise click.UsageError("give exactly one of --hour or --c")
    if parameter is not None:
        c = as_parameter(parameter)
    else:
        by_hour = {p.hour: p for p in config.points()}
        if hour not in by_hour:
            raise RenderError(f"hour {hour} is not in the demand data")
        c = by_hour[hour].c
    raster = render_julia_for(
        c, config.viewport(JULIA_VIEWPORT), config.iteration, config.render
    )
    _write_ppm(raster, palette, config.output or Path("julia.ppm"))


@render.command()
@_input_options
@_render_options
def overlay(palette: str, **options) -> None:
    """Demand parameters marked on the Mandelbrot set."""
    config = _run_config(**options)
    raster = render_demand_overlay(
        config.points(),
        config.viewport(DEFAULT_MANDELBROT_VIEWPORT),
        config.iteration,
        config.render,
    )
    logger.info(
        "%d markers, %d skipped", raster.metadata["markers"], raster.metadata["skipped"]
    )
    _write_ppm(raster, palette, config.output or Path("overlay.ppm"))


@render.command()
@_input_options
@_render_options
@click.option(
    "--hours",
    "hours_spec",
    default="odd",
    show_default=True,
    help="odd, even, all or a list like 1,3,19",
)
def montage(hours_spec: str, palette: str, **options) -> None:
    """Julia panels of several hours, four per row."""
    config = _run_config(**options)
    raster = render_daily_montage(
        config.points(),
        config.viewport(JULIA_VIEWPORT),
        config.iteration,
        parse_hours(hours_spec),
        config.render,
    )
    _write_ppm(raster, palette, config.output or Path("montage.ppm"))


@render.command()
@_input_options
@click.option(
    "--output",
    type=click.Path(dir_okay=False, path_type=Path),
    default=None,
    help="Output SVG",
)
def curves(**options) -> None:
    """Daily P, Q and S curves as SVG."""
    config = _run_config(**options)
    output = config.output or Path("curves.svg")
    records = config.records()
    with open(output, "wb") as sink:
        plot_demand_curves(records, sink)


@cli.command()
@_input_options
@_iteration_options
@_parallel_options
@click.option("--resolution", type=int, default=512, show_default=True)
@click.option(
    "--output",
    type=click.Path(dir_okay=False, path_type=Path),
    default=None,
    help="Report CSV (default: stdout)",
)
def metrics(resolution: int, **options) -> None:
    """Per-hour fold metrics of the Julia sets as CSV."""
    config = _run_config(**options)
    report = fold_report(config.points(), config.iteration, resolution, config.render)
    if config.output is None:
        write_report_csv(report, sys.stdout)
    else:
        with open(config.output, "w", encoding="utf-8", newline="") as sink:
            write_report_csv(report, sink)


@cli.command()
@_input_options
@click.option(
    "--output",
    type=click.Path(dir_okay=False, path_type=Path),
    default=None,
    help="Table CSV (default: stdout)",
)
def table(**options) -> None:
    """Demand data with recomputed per-unit columns and load character."""
    config = _run_config(**options)
    frame = demand_table(config.records(), config.base_power).reset_index()
    _emit_csv(frame, config.output)


def main(argv: Sequence[str] | None = None) -> int:
    try:
        result = cli.main(
            args=list(argv) if argv is not None else None,
            prog_name="demand-fractal",
            standalone_mode=False,
        )
    except click.UsageError as exc:
        click.echo(f"error: {exc.format_message()}", err=True)
        return EXIT_USAGE
    except click.Abort:
        click.echo("error: aborted", err=True)
        return EXIT_USAGE
    except DemandFractalError as exc:
        click.echo(f"error: {exc}", err=True)
        return EXIT_INPUT
    except OSError as exc:
        click.echo(f"error: {exc}", err=True)
        return EXIT_IO
    return result if isinstance(result, int) else EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
