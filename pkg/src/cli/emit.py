"""CSV / JSON / text rendering of tables and reports, written to stdout or a file with LF line endings."""

from __future__ import annotations

import json
import sys
from pathlib import Path
from typing import Any

import pandas as pd

from src.common.interfaces.report import ConditionReport, OutputFormat, StabilityReport
from src.common.util.strings import format_complex, format_fixed


def frame_to_csv(df: pd.DataFrame) -> str:
    return df.to_csv(index=False, lineterminator="\n")


def frame_to_json(df: pd.DataFrame, metadata: dict[str, Any] | None = None) -> str:
    records = json.loads(df.to_json(orient="records", double_precision=15))
    return json.dumps({"metadata": metadata or {}, "data": records}, indent=2) + "\n"


def frame_to_text(df: pd.DataFrame) -> str:
    return df.to_string(index=False) + "\n"


def render_frame(df: pd.DataFrame, fmt: OutputFormat, metadata: dict[str, Any] | None = None) -> str:
    if fmt is OutputFormat.JSON:
        return frame_to_json(df, metadata)
    if fmt is OutputFormat.TEXT:
        return frame_to_text(df)
    return frame_to_csv(df)


def stability_frame(report: StabilityReport) -> pd.DataFrame:
    """One row per root: real and imaginary parts, amplification modulus and the verdict."""
    return pd.DataFrame(
        {
            "root_index": range(1, len(report.roots) + 1),
            "re": report.roots.real,
            "im": report.roots.imag,
            "amplification_modulus": report.amplification_moduli,
            "verdict": report.verdict.value,
        }
    )


def stability_text(report: StabilityReport) -> str:
    lines = [f"N = {report.N}, theta = {report.theta:g}"]
    for index, (root, modulus) in enumerate(zip(report.roots, report.amplification_moduli), start=1):
        lines.append(f"  root {index}: {format_complex(root)}  |g| = {format_fixed(modulus, 6)}")
    lines.append(f"min real part: {format_fixed(report.min_real_part)}")
    lines.append(f"spectral radius: {format_fixed(report.spectral_radius, 6)}")
    if report.degree_deficit:
        lines.append(f"degree deficit: {report.degree_deficit}")
    if report.unmatched_roots.size:
        lines.append("unmatched roots: " + ", ".join(format_complex(r) for r in report.unmatched_roots))
    lines.extend(f"note: {note}" for note in report.notes)
    lines.append(report.verdict.label)
    return "\n".join(lines) + "\n"


def render_stability(report: StabilityReport, fmt: OutputFormat) -> str:
    if fmt is OutputFormat.JSON:
        return report.to_json() + "\n"
    if fmt is OutputFormat.TEXT:
        return stability_text(report)
    return frame_to_csv(stability_frame(report))


def condition_frame(report: ConditionReport, N: int, M: int) -> pd.DataFrame:
    row = {"N": N, "M": M, **report.to_dict()}
    row.pop("norm", None)
    row.update(report.norm.to_dict())
    return pd.DataFrame([row])


def render_condition(report: ConditionReport, N: int, M: int, fmt: OutputFormat) -> str:
    if fmt is OutputFormat.JSON:
        return report.to_json() + "\n"
    return render_frame(condition_frame(report, N, M), fmt)


def write(text: str, output: Path | str | None = None) -> None:
    """Write to ``output``, or to stdout when it is None."""
    if output is None:
        sys.stdout.write(text)
        sys.stdout.flush()
        return
    path = Path(output)
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(text)
