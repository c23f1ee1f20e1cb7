"""Hourly demand ingestion and per-unit conversion.

Demand arrives as a small CSV (``hour,p_mw,q_mvar[,s_mva]``) or from the
built-in daily curve. Each row becomes a ``DemandRecord`` in physical units
and then a ``DemandPoint`` whose per-unit real and reactive powers form the
complex parameter c = P/base + i*Q/base.
"""

from __future__ import annotations

import io
import logging
import math
import warnings
from collections.abc import Iterable, Sequence
from pathlib import Path
from typing import IO

import pandas as pd

from demand_fractal.dataset import DemandDatasetLoader
from demand_fractal.errors import DemandParseError, InvalidDemandInput
from demand_fractal.models import (
    BasePower,
    DemandPoint,
    DemandRecord,
    LoadCharacter,
)

logger = logging.getLogger(__name__)

REQUIRED_COLUMNS = ("hour", "p_mw", "q_mvar")
OPTIONAL_COLUMNS = ("s_mva",)
APPARENT_POWER_TOLERANCE_MVA = 1.0

_TABLE1_LOADER = DemandDatasetLoader()


def _read_text(text: str | IO[str]) -> str:
    if isinstance(text, str):
        return text
    return text.read()


def _data_lines(text: str) -> list[tuple[int, str]]:
    lines = []
    for number, raw in enumerate(text.splitlines(), start=1):
        stripped = raw.strip()
        if not stripped or stripped.startswith("#"):
            continue
        lines.append((number, stripped))
    return lines


def _parse_header(number: int, header: str) -> tuple[str, ...]:
    columns = tuple(name.strip() for name in header.split(","))
    if columns not in (REQUIRED_COLUMNS, REQUIRED_COLUMNS + OPTIONAL_COLUMNS):
        raise DemandParseError(
            f"expected header 'hour,p_mw,q_mvar[,s_mva]', got {header!r}", number
        )
    return columns


def parse_demand_csv(text: str | IO[str]) -> list[DemandRecord]:
    """Parse demand CSV text into records, in file order.

    Args:
        text: CSV content or a readable text stream. Lines starting with
            ``#`` and blank lines are ignored.

    Returns:
        One DemandRecord per data row. A missing ``s_mva`` column is filled
        with sqrt(p^2 + q^2).

    Raises:
        DemandParseError: If the header or a row is malformed (carries line).
        InvalidDemandInput: If the input is empty, an hour repeats, or a row
            fails the record checks (e.g. negative real power).
    """
    lines = _data_lines(_read_text(text))
    if not lines:
        raise InvalidDemandInput("demand input is empty")

    header_number, header = lines[0]
    columns = _parse_header(header_number, header)
    rows = lines[1:]
    if not rows:
        raise InvalidDemandInput("demand input has a header but no rows")

    for number, row in rows:
        fields = row.split(",")
        if len(fields) != len(columns):
            raise DemandParseError(
                f"expected {len(columns)} fields, got {len(fields)}", number
            )

    body = "\n".join([",".join(columns)] + [row for _, row in rows])
    raw = pd.read_csv(io.StringIO(body), dtype=str, keep_default_na=False)
    frame = raw.apply(lambda col: pd.to_numeric(col.str.strip(), errors="coerce"))
    line_numbers = [number for number, _ in rows]

    invalid = frame.isna().any(axis=1).to_numpy()
    if invalid.any():
        position = int(invalid.argmax())
        raise DemandParseError(
            f"non-numeric value in row {rows[position][1]!r}", line_numbers[position]
        )
    fractional = (frame["hour"] % 1 != 0).to_numpy()
    if fractional.any():
        position = int(fractional.argmax())
        raise DemandParseError(
            f"hour must be an integer: {raw['hour'].iloc[position]!r}",
            line_numbers[position],
        )

    records: list[DemandRecord] = []
    seen: dict[int, int] = {}
    for number, values in zip(line_numbers, frame.itertuples(index=False)):
        row = values._asdict()
        hour = int(row["hour"])
        if hour in seen:
            raise InvalidDemandInput(
                f"line {number}: duplicate hour {hour} (first at line {seen[hour]})"
            )
        seen[hour] = number
        p_mw = float(row["p_mw"])
        q_mvar = float(row["q_mvar"])
        s_mva = float(row["s_mva"]) if "s_mva" in row else math.hypot(p_mw, q_mvar)
        try:
            record = DemandRecord(hour=hour, p_mw=p_mw, q_mvar=q_mvar, s_mva=s_mva)
        except InvalidDemandInput as exc:
            raise InvalidDemandInput(f"line {number}: {exc}") from exc
        if not validate_apparent_power(record, APPARENT_POWER_TOLERANCE_MVA):
            warnings.warn(
                f"line {number}: apparent power {s_mva} MVA differs from "
                f"sqrt(P^2+Q^2)={math.hypot(p_mw, q_mvar):.3f} MVA",
                UserWarning,
                stacklevel=2,
            )
        records.append(record)

    logger.debug("parsed %d demand rows", len(records))
    return records


def validate_apparent_power(
    rec: DemandRecord, tol: float = APPARENT_POWER_TOLERANCE_MVA
) -> bool:
    """True iff |S - sqrt(P^2 + Q^2)| <= tol (MVA)."""
    if tol < 0:
        raise InvalidDemandInput(f"tolerance must be >= 0, got {tol}")
    return abs(rec.s_mva - math.hypot(rec.p_mw, rec.q_mvar)) <= tol


def to_per_unit(rec: DemandRecord, base: BasePower | None = None) -> DemandPoint:
    base = base or BasePower()
    return DemandPoint(
        hour=rec.hour,
        c_re=rec.p_mw / base.value,
        c_im=rec.q_mvar / base.value,
    )


def to_per_unit_all(
    records: Iterable[DemandRecord], base: BasePower | None = None
) -> list[DemandPoint]:
    base = base or BasePower()
    return [to_per_unit(rec, base) for rec in records]


def load_character(rec: DemandRecord) -> LoadCharacter:
    if rec.q_mvar > 0:
        return LoadCharacter.INDUCTIVE
    if rec.q_mvar < 0:
        return LoadCharacter.CAPACITIVE
    return LoadCharacter.RESISTIVE


def builtin_table1() -> list[DemandRecord]:
    """The built-in 24-hour demand curve (integer MW/MVAr/MVA columns)."""
    frame = _TABLE1_LOADER.load()
    return [
        DemandRecord(
            hour=int(hour),
            p_mw=float(row.p_mw),
            q_mvar=float(row.q_mvar),
            s_mva=float(row.s_mva),
        )
        for hour, row in frame.iterrows()
    ]


def builtin_table1_printed_pu() -> pd.DataFrame:
    """Per-unit columns as printed with the built-in curve (rounded values)."""
    frame = _TABLE1_LOADER.load()
    return frame[["p_pu_printed", "q_pu_printed", "s_pu_printed"]]


def write_demand_csv(records: Sequence[DemandRecord], sink: IO[str]) -> None:
    frame = pd.DataFrame(
        [(r.hour, r.p_mw, r.q_mvar, r.s_mva) for r in records],
        columns=["hour", "p_mw", "q_mvar", "s_mva"],
    )
    frame.to_csv(sink, index=False, lineterminator="\n")


def demand_table(
    records: Sequence[DemandRecord], base: BasePower | None = None
) -> pd.DataFrame:
    """Demand records with recomputed per-unit columns, indexed by hour."""
    base = base or BasePower()
    frame = pd.DataFrame(
        {
            "hour": [r.hour for r in records],
            "p_mw": [r.p_mw for r in records],
            "q_mvar": [r.q_mvar for r in records],
            "s_mva": [r.s_mva for r in records],
            "load": [load_character(r).value for r in records],
        }
    ).set_index("hour")
    frame.insert(3, "p_pu", frame["p_mw"] / base.value)
    frame.insert(4, "q_pu", frame["q_mvar"] / base.value)
    frame.insert(5, "s_pu", frame["s_mva"] / base.value)
    return frame


def demand_extremes(records: Sequence[DemandRecord]) -> tuple[int, int]:
    """Hours of lowest and highest real power; ties go to the earliest hour."""
    if not records:
        raise InvalidDemandInput("no demand records")
    ordered = sorted(records, key=lambda r: r.hour)
    lowest = min(ordered, key=lambda r: r.p_mw)
    highest = max(ordered, key=lambda r: r.p_mw)
    return lowest.hour, highest.hour


def load_demand(
    path: str | Path | None = None, builtin: bool = False
) -> list[DemandRecord]:
    """Select the demand source: a CSV path or the built-in curve.

    Raises:
        InvalidDemandInput: If both or neither source is given.
        OSError: If the path cannot be read.
    """
    if builtin and path is not None:
        raise InvalidDemandInput("give either an input path or the built-in table")
    if builtin:
        return builtin_table1()
    if path is None:
        raise InvalidDemandInput("no demand input given")
    with warnings.catch_warnings(record=True) as caught:
        warnings.simplefilter("always")
        with open(path, encoding="utf-8") as f:
            records = parse_demand_csv(f)
    for warning in caught:
        warnings.warn(warning.message, warning.category, stacklevel=2)
    return records
