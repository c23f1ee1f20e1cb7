import logging
import warnings

import click
import pytest

from demand_fractal.cli import (
    EXIT_INPUT,
    EXIT_IO,
    EXIT_OK,
    EXIT_USAGE,
    main,
    parse_hours,
)


@pytest.fixture
def single_hour_csv(tmp_path):
    path = tmp_path / "day.csv"
    path.write_text("hour,p_mw,q_mvar\n0,2000,840\n", encoding="utf-8")
    return path


def _render_julia(tmp_path, name: str, *extra: str) -> bytes:
    output = tmp_path / name
    code = main(
        [
            "render",
            "julia",
            "--builtin-table1",
            "--hour",
            "19",
            "--width",
            "64",
            "--height",
            "48",
            "--max-iter",
            "200",
            "--output",
            str(output),
            *extra,
        ]
    )
    assert code == EXIT_OK
    return output.read_bytes()


class TestClassify:
    """The classify subcommand."""

    def test_builtin_table(self, capsys) -> None:
        assert main(["classify", "--builtin-table1"]) == EXIT_OK
        lines = capsys.readouterr().out.splitlines()
        assert lines[0] == "hour,c_re,c_im,class,connected,m_distance"
        assert len(lines) == 25
        assert all(line.split(",")[4] == "true" for line in lines[1:])
        assert lines[20].startswith("19,0.355,0.17075,BOUNDARY,true,")

    def test_exterior_hour(self, single_hour_csv, capsys) -> None:
        assert main(["classify", "--input", str(single_hour_csv)]) == EXIT_OK
        lines = capsys.readouterr().out.splitlines()
        assert lines[1] == "0,0.5,0.21,EXTERIOR,false,0.0683247"

    def test_explicit_parameter(self, capsys) -> None:
        assert main(["classify", "--c", "0.3,0.21"]) == EXIT_OK
        row = capsys.readouterr().out.splitlines()[1]
        assert row.startswith("-,0.3,0.21,INTERIOR,true,")

    def test_parameter_and_input_exclusive(self, capsys) -> None:
        assert main(["classify", "--c", "0,0", "--builtin-table1"]) == EXIT_USAGE
        assert "error:" in capsys.readouterr().err

    def test_missing_input(self, capsys) -> None:
        assert main(["classify"]) == EXIT_USAGE
        assert "--builtin-table1" in capsys.readouterr().err

    def test_both_inputs(self, single_hour_csv) -> None:
        args = ["classify", "--input", str(single_hour_csv), "--builtin-table1"]
        assert main(args) == EXIT_USAGE

    def test_empty_input(self, tmp_path, capsys) -> None:
        path = tmp_path / "empty.csv"
        path.write_text("", encoding="utf-8")
        assert main(["classify", "--input", str(path)]) == EXIT_INPUT
        assert "empty" in capsys.readouterr().err

    def test_parse_error_reports_line(self, tmp_path, capsys) -> None:
        path = tmp_path / "bad.csv"
        path.write_text("hour,p_mw,q_mvar\n0,1,2\n1,oops,2\n", encoding="utf-8")
        assert main(["classify", "--input", str(path)]) == EXIT_INPUT
        assert "line 3" in capsys.readouterr().err

    def test_inconsistent_apparent_power_keeps_stderr_clean(
        self, tmp_path, capsys
    ) -> None:
        path = tmp_path / "day.csv"
        path.write_text("hour,p_mw,q_mvar,s_mva\n0,100,0,200\n", encoding="utf-8")
        with warnings.catch_warnings():
            warnings.simplefilter("error")
            assert main(["classify", "--input", str(path)]) == EXIT_OK
        captured = capsys.readouterr()
        assert captured.err == ""
        assert captured.out.splitlines()[1].startswith("0,0.025,0,INTERIOR,true,")

    def test_inconsistent_apparent_power_is_logged(self, tmp_path, caplog) -> None:
        path = tmp_path / "day.csv"
        path.write_text("hour,p_mw,q_mvar,s_mva\n0,100,0,200\n", encoding="utf-8")
        with caplog.at_level(logging.WARNING, logger="demand_fractal.cli"):
            assert main(["classify", "--input", str(path)]) == EXIT_OK
        assert "apparent power" in caplog.text

    def test_missing_file(self, tmp_path) -> None:
        assert main(["classify", "--input", str(tmp_path / "nope.csv")]) == EXIT_IO


class TestRender:
    """Image subcommands."""

    @pytest.mark.parametrize(
        "extra",
        [
            ("--workers", "1", "--tile-size", "64"),
            ("--workers", "4", "--tile-size", "16"),
            ("--workers", "8", "--tile-size", "1"),
        ],
    )
    def test_julia_bytes_independent_of_scheduling(self, tmp_path, extra) -> None:
        reference = _render_julia(tmp_path, "ref.ppm", "--workers", "1")
        assert reference.startswith(b"P6\n64 48\n255\n")
        assert _render_julia(tmp_path, "out.ppm", *extra) == reference

    def test_julia_explicit_parameter(self, tmp_path) -> None:
        output = tmp_path / "c.ppm"
        args = ["render", "julia", "--c", "0.355,0.17075", "--max-iter", "200"]
        args += ["--width", "64", "--height", "48", "--output", str(output)]
        assert main(args) == EXIT_OK
        assert output.read_bytes() == _render_julia(tmp_path, "hour.ppm")

    def test_julia_unknown_hour(self, tmp_path) -> None:
        args = ["render", "julia", "--builtin-table1", "--hour", "25"]
        args += ["--output", str(tmp_path / "x.ppm")]
        assert main(args) == EXIT_INPUT

    def test_julia_needs_one_source(self, tmp_path) -> None:
        args = ["render", "julia", "--builtin-table1", "--hour", "1", "--c", "0,0"]
        assert main(args + ["--output", str(tmp_path / "x.ppm")]) == EXIT_USAGE

    def test_mandelbrot_smooth_palette(self, tmp_path) -> None:
        output = tmp_path / "m.ppm"
        args = ["render", "mandelbrot", "--width", "30", "--height", "20"]
        args += ["--max-iter", "100", "--palette", "smooth", "--output", str(output)]
        assert main(args) == EXIT_OK
        data = output.read_bytes()
        assert data.startswith(b"P6\n30 20\n255\n")
        assert len(data) == len(b"P6\n30 20\n255\n") + 30 * 20 * 3

    def test_overlay(self, tmp_path) -> None:
        output = tmp_path / "overlay.ppm"
        args = ["render", "overlay", "--builtin-table1", "--width", "96"]
        args += ["--height", "96", "--max-iter", "100", "--output", str(output)]
        assert main(args) == EXIT_OK
        assert output.read_bytes().startswith(b"P6\n96 96\n255\n")

    def test_montage(self, tmp_path) -> None:
        output = tmp_path / "montage.ppm"
        args = ["render", "montage", "--builtin-table1", "--hours", "3,19"]
        args += ["--width", "16", "--height", "16", "--max-iter", "50"]
        assert main(args + ["--output", str(output)]) == EXIT_OK
        assert output.read_bytes().startswith(b"P6\n34 16\n255\n")

    def test_montage_odd_hours(self, tmp_path) -> None:
        output = tmp_path / "montage.ppm"
        args = ["render", "montage", "--builtin-table1", "--width", "8"]
        args += ["--height", "8", "--max-iter", "50", "--output", str(output)]
        assert main(args) == EXIT_OK
        assert output.read_bytes().startswith(b"P6\n38 28\n255\n")

    def test_curves(self, tmp_path) -> None:
        output = tmp_path / "curves.svg"
        args = ["render", "curves", "--builtin-table1", "--output", str(output)]
        assert main(args) == EXIT_OK
        svg = output.read_text(encoding="utf-8")
        assert all(f'<g id="demand-{key}">' in svg for key in "pqs")

    def test_zero_workers_rejected(self, tmp_path, capsys) -> None:
        args = ["render", "mandelbrot", "--width", "8", "--height", "8"]
        args += ["--workers", "0", "--output", str(tmp_path / "m.ppm")]
        assert main(args) == EXIT_INPUT
        assert "workers" in capsys.readouterr().err
        assert not (tmp_path / "m.ppm").exists()

    def test_unwritable_output(self, tmp_path, capsys) -> None:
        output = tmp_path / "missing" / "m.ppm"
        args = ["render", "mandelbrot", "--width", "8", "--height", "8"]
        args += ["--max-iter", "10", "--output", str(output)]
        assert main(args) == EXIT_IO
        assert capsys.readouterr().err.startswith("error:")


def test_metrics(tmp_path, capsys) -> None:
    path = tmp_path / "day.csv"
    path.write_text("hour,p_mw,q_mvar\n7,1200,840\n", encoding="utf-8")
    args = ["metrics", "--input", str(path), "--resolution", "64"]
    assert main(args + ["--max-iter", "100", "--workers", "1"]) == EXIT_OK
    lines = capsys.readouterr().out.splitlines()
    assert lines[0] == "hour,boundary_fraction,box_dim,box_dim_stderr,m_distance"
    assert len(lines) == 2
    assert lines[1].startswith("7,")


def test_metrics_missing_input() -> None:
    assert main(["metrics"]) == EXIT_USAGE


def test_table(capsys) -> None:
    assert main(["table", "--builtin-table1"]) == EXIT_OK
    lines = capsys.readouterr().out.splitlines()
    assert lines[0] == "hour,p_mw,q_mvar,s_mva,p_pu,q_pu,s_pu,load"
    assert len(lines) == 25
    assert lines[20].endswith(",0.355,0.17075,0.39375,inductive")


def test_invalid_base_power() -> None:
    assert main(["table", "--builtin-table1", "--base-power", "0"]) == EXIT_INPUT


@pytest.mark.parametrize(
    "text, expected",
    [
        ("odd", list(range(1, 24, 2))),
        ("even", list(range(0, 24, 2))),
        ("all", list(range(24))),
        ("3, 19", [3, 19]),
    ],
)
def test_parse_hours(text, expected) -> None:
    assert parse_hours(text) == expected


def test_parse_hours_rejects_garbage() -> None:
    with pytest.raises(click.BadParameter):
        parse_hours("noon")
