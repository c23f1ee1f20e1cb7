from __future__ import annotations

import sys
from pathlib import Path

import pytest

ROOT = Path(__file__).resolve().parents[1]
SRC = ROOT / "src"
if SRC.as_posix() not in sys.path:
    sys.path.insert(0, SRC.as_posix())

from demand_fractal.ingest import builtin_table1, to_per_unit_all  # noqa: E402
from demand_fractal.models import IterationConfig  # noqa: E402


@pytest.fixture
def table1_records():
    return builtin_table1()


@pytest.fixture
def table1_points(table1_records):
    return to_per_unit_all(table1_records)


@pytest.fixture
def by_hour(table1_points):
    return {point.hour: point for point in table1_points}


@pytest.fixture
def cfg1000() -> IterationConfig:
    return IterationConfig(max_iter=1000)
