from __future__ import annotations

import math
from pathlib import Path

import pandas as pd

ROOT = Path(__file__).resolve().parent.parent
TABLE_PATH = ROOT / "src" / "demand_fractal" / "data" / "table1.csv"
SUMMARY_PATH = ROOT / "src" / "demand_fractal" / "data" / "table1_summary.md"
BASE_POWER_MVA = 4000.0


def _format_rows(frame: pd.DataFrame) -> list[str]:
    lines: list[str] = []
    lines.append("## Rows")
    lines.append("")
    lines.append(
        "| hour | P (MW) | Q (MVAr) | S (MVA) | P pu | Q pu | S check (MVA) "
        "| P pu printed | max pu deviation |"
    )
    lines.append("| --- | --- | --- | --- | --- | --- | --- | --- | --- |")
    for hour, row in frame.iterrows():
        p_pu = row.p_mw / BASE_POWER_MVA
        q_pu = row.q_mvar / BASE_POWER_MVA
        s_pu = row.s_mva / BASE_POWER_MVA
        deviation = max(
            abs(p_pu - row.p_pu_printed),
            abs(q_pu - row.q_pu_printed),
            abs(s_pu - row.s_pu_printed),
        )
        s_check = row.s_mva - math.hypot(row.p_mw, row.q_mvar)
        lines.append(
            "| "
            + " | ".join(
                [
                    f"{hour:02d}:00",
                    f"{row.p_mw:.0f}",
                    f"{row.q_mvar:.0f}",
                    f"{row.s_mva:.0f}",
                    f"{p_pu:.5f}",
                    f"{q_pu:.5f}",
                    f"{s_check:+.3f}",
                    f"{row.p_pu_printed:.3f}",
                    f"{deviation:.4f}",
                ]
            )
            + " |"
        )
    lines.append("")
    return lines


def main() -> None:
    frame = pd.read_csv(TABLE_PATH, comment="#").set_index("hour")
    lines: list[str] = []

    lines.append("# table1.csv Summary")
    lines.append("")
    lines.append(f"Base power: {BASE_POWER_MVA:.0f} MVA")
    lines.append("")
    lines.append(
        "Per-unit columns are recomputed from the integer MW/MVAr columns; "
        "the printed pu columns are kept for comparison only."
    )
    lines.append("")
    lines.extend(_format_rows(frame))

    SUMMARY_PATH.write_text("\n".join(lines), encoding="utf-8")


if __name__ == "__main__":
    main()
