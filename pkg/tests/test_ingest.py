import io
import math

import pytest

from demand_fractal.errors import DemandParseError, InvalidDemandInput
from demand_fractal.ingest import (
    builtin_table1,
    builtin_table1_printed_pu,
    demand_extremes,
    demand_table,
    load_character,
    load_demand,
    parse_demand_csv,
    to_per_unit,
    validate_apparent_power,
    write_demand_csv,
)
from demand_fractal.models import BasePower, DemandRecord, LoadCharacter


def test_parse_row_with_apparent_power() -> None:
    records = parse_demand_csv("hour,p_mw,q_mvar,s_mva\n0,889,371,963\n")
    assert records == [DemandRecord(0, 889, 371, 963)]


def test_parse_computes_missing_apparent_power() -> None:
    records = parse_demand_csv("hour,p_mw,q_mvar\n0,0,0\n19,1420,683\n")

    assert records[0] == DemandRecord(0, 0, 0, 0)
    assert records[1].hour == 19
    assert records[1].s_mva == pytest.approx(1575.7186, abs=1e-3)
    assert records[1].s_mva == math.hypot(1420, 683)


def test_parse_keeps_file_order_and_skips_comments() -> None:
    text = "# daily curve\nhour,p_mw,q_mvar\n\n5,10,1\n# note\n2,20,2\n"
    records = parse_demand_csv(io.StringIO(text))
    assert [r.hour for r in records] == [5, 2]


@pytest.mark.parametrize(
    "text, line",
    [
        ("hour,p_mw\n0,1\n", 1),
        ("hour,p_mw,q_mvar\n0,1,2\n1,x,2\n", 3),
        ("# c\nhour,p_mw,q_mvar\n0,1,2\n# c\n1,2\n", 5),
        ("hour,p_mw,q_mvar\n0.5,1,2\n", 2),
        ("hour,p_mw,q_mvar\n0,1,\n", 2),
    ],
)
def test_parse_error_names_line(text: str, line: int) -> None:
    with pytest.raises(DemandParseError) as excinfo:
        parse_demand_csv(text)
    assert excinfo.value.line == line
    assert f"line {line}" in str(excinfo.value)


def test_parse_rejects_duplicate_hour() -> None:
    with pytest.raises(InvalidDemandInput, match="duplicate hour 3"):
        parse_demand_csv("hour,p_mw,q_mvar\n3,1,1\n3,2,2\n")


def test_parse_rejects_negative_real_power() -> None:
    with pytest.raises(InvalidDemandInput, match="line 2: negative real power"):
        parse_demand_csv("hour,p_mw,q_mvar\n0,-1,2\n")


def test_parse_rejects_hour_out_of_range() -> None:
    with pytest.raises(InvalidDemandInput, match="hour out of range"):
        parse_demand_csv("hour,p_mw,q_mvar\n24,1,2\n")


@pytest.mark.parametrize("text", ["", "# only a comment\n", "hour,p_mw,q_mvar\n"])
def test_parse_rejects_empty_input(text: str) -> None:
    with pytest.raises(InvalidDemandInput):
        parse_demand_csv(text)


def test_parse_warns_on_inconsistent_apparent_power() -> None:
    with pytest.warns(UserWarning, match="apparent power"):
        records = parse_demand_csv("hour,p_mw,q_mvar,s_mva\n0,100,0,200\n")
    assert records[0].s_mva == 200


@pytest.mark.parametrize(
    "record, tol, expected",
    [
        (DemandRecord(0, 889, 371, 963), 1.0, True),
        (DemandRecord(1, 0, 0, 0), 0.0, True),
        (DemandRecord(2, 100, 0, 200), 1.0, False),
    ],
)
def test_validate_apparent_power(record, tol, expected) -> None:
    assert validate_apparent_power(record, tol) is expected


def test_validate_apparent_power_rejects_negative_tolerance() -> None:
    with pytest.raises(InvalidDemandInput):
        validate_apparent_power(DemandRecord(0, 1, 1, 1.4), -0.1)


@pytest.mark.parametrize(
    "p, q, c_re, c_im",
    [
        (889, 371, 0.22225, 0.09275),
        (0, 0, 0.0, 0.0),
        (1420, 683, 0.355, 0.17075),
    ],
)
def test_to_per_unit_exact_quotients(p, q, c_re, c_im) -> None:
    point = to_per_unit(DemandRecord(0, p, q, math.hypot(p, q)), BasePower(4000))
    assert point.c_re == c_re
    assert point.c_im == c_im


def test_to_per_unit_is_linear() -> None:
    base = BasePower()
    rec = DemandRecord(7, 1105, 556, 1237)
    for k in (0.5, 2.0, 3.0):
        scaled = DemandRecord(7, rec.p_mw * k, rec.q_mvar * k, rec.s_mva * k)
        assert to_per_unit(scaled, base).c_re == pytest.approx(
            k * to_per_unit(rec, base).c_re
        )
        assert to_per_unit(scaled, base).c_im == pytest.approx(
            k * to_per_unit(rec, base).c_im
        )


def test_base_power_must_be_positive() -> None:
    with pytest.raises(InvalidDemandInput):
        BasePower(0)


class TestBuiltinTable:
    """The built-in 24-hour demand curve."""

    def test_rows(self, table1_records) -> None:
        assert len(table1_records) == 24
        assert table1_records[3] == DemandRecord(3, 790, 324, 854)
        assert table1_records[12] == DemandRecord(12, 1385, 793, 1595)
        assert [r.hour for r in table1_records] == list(range(24))

    def test_apparent_power_consistent(self, table1_records) -> None:
        assert all(validate_apparent_power(r, 1.0) for r in table1_records)

    def test_printed_per_unit_columns_within_tolerance(self, table1_points) -> None:
        printed = builtin_table1_printed_pu()
        for point in table1_points:
            row = printed.loc[point.hour]
            assert abs(point.c_re - row["p_pu_printed"]) <= 0.004
            assert abs(point.c_im - row["q_pu_printed"]) <= 0.004

    def test_points_in_first_quadrant(self, table1_points) -> None:
        assert all(0 < p.c_re < 0.5 and 0 < p.c_im < 0.5 for p in table1_points)

    def test_csv_round_trip(self, table1_records) -> None:
        sink = io.StringIO()
        write_demand_csv(table1_records, sink)
        assert parse_demand_csv(sink.getvalue()) == table1_records

    def test_all_loads_inductive(self, table1_records) -> None:
        assert {load_character(r) for r in table1_records} == {LoadCharacter.INDUCTIVE}

    def test_extremes(self, table1_records) -> None:
        assert demand_extremes(table1_records) == (3, 19)

    def test_demand_table(self, table1_records) -> None:
        frame = demand_table(table1_records)
        assert len(frame) == 24
        assert list(frame.columns) == [
            "p_mw",
            "q_mvar",
            "s_mva",
            "p_pu",
            "q_pu",
            "s_pu",
            "load",
        ]
        assert frame.loc[19, "p_pu"] == 0.355
        assert frame.loc[19, "s_pu"] == pytest.approx(0.39375)
        assert frame.loc[0, "load"] == "inductive"

    def test_builtin_is_a_fresh_copy(self) -> None:
        assert builtin_table1() == builtin_table1()


@pytest.mark.parametrize(
    "q, expected",
    [
        (5.0, LoadCharacter.INDUCTIVE),
        (-5.0, LoadCharacter.CAPACITIVE),
        (0.0, LoadCharacter.RESISTIVE),
    ],
)
def test_load_character(q, expected) -> None:
    assert load_character(DemandRecord(0, 100, q, math.hypot(100, q))) is expected


def test_load_demand_sources(tmp_path) -> None:
    path = tmp_path / "day.csv"
    path.write_text("hour,p_mw,q_mvar\n0,2000,840\n", encoding="utf-8")

    assert load_demand(path)[0].p_mw == 2000
    assert len(load_demand(builtin=True)) == 24
    with pytest.raises(InvalidDemandInput):
        load_demand(path, builtin=True)
    with pytest.raises(InvalidDemandInput):
        load_demand()
    with pytest.raises(OSError):
        load_demand(tmp_path / "missing.csv")


def test_load_demand_warning_points_at_caller(tmp_path) -> None:
    path = tmp_path / "day.csv"
    path.write_text("hour,p_mw,q_mvar,s_mva\n0,100,0,200\n", encoding="utf-8")
    with pytest.warns(UserWarning, match="apparent power") as record:
        load_demand(path)
    assert record[0].filename == __file__
