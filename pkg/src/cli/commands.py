"""
Command implementations and the exit-code contract.

Usage:
    from src.cli.commands import main
    sys.exit(main(["stability", "--N", "6", "--gate"]))

Exit codes:
    0  success
    2  configuration, expression syntax or problem specification error
    3  any other numerical failure
    4  ``stability --gate`` (or ``constant-check --gate``) without a certificate
"""

from __future__ import annotations

import logging
import sys
from collections.abc import Callable
from pathlib import Path

import matplotlib.pyplot as plt
import pandas as pd

from src.analysis.tables.characteristic_roots import CharacteristicRootsAnalysis
from src.analysis.tables.condition_numbers import ConditionNumbersAnalysis
from src.analysis.tables.inverse_norms import InverseNormsAnalysis
from src.analysis.tables.y_norms import YNormsAnalysis
from src.analysis.verification.constant_certificate import ConstantCertificateAnalysis
from src.cli import emit
from src.cli.config import RunConfig, build_parser, load_config
from src.common.analysis import Analysis
from src.common.interfaces.report import OutputFormat
from src.common.logging import configure_logging
from src.common.util.strings import format_fixed, snake_to_title
from src.compact.charpoly import analyze_stability
from src.compact.conditioning import condition_report
from src.compact.convergence import spatial_ladder, temporal_ladder
from src.compact.discretization import build_stencil
from src.compact.errors import (
    CompactSchemeError,
    ConfigError,
    ExpressionSyntaxError,
    ProblemSpecError,
)
from src.compact.linalg import MAX_DENSE_ORDER
from src.compact.timestepper import solve_ibvp

logger = logging.getLogger(__name__)

EXIT_OK = 0
EXIT_CONFIG = 2
EXIT_NUMERICAL = 3
EXIT_NOT_CERTIFIED = 4

CONFIG_ERRORS = (ConfigError, ExpressionSyntaxError, ProblemSpecError)

TABLES: dict[int, Callable[[RunConfig], Analysis]] = {
    1: lambda config: CharacteristicRootsAnalysis(),
    2: lambda config: InverseNormsAnalysis(),
    3: lambda config: YNormsAnalysis(),
    4: lambda config: ConditionNumbersAnalysis(theta=config.theta),
}

ANALYSIS_FORMATS = ["png", "pdf", "csv", "json"]


def solve(config: RunConfig) -> int:
    spec = config.problem()
    grid = config.grid(spec)
    history = solve_ibvp(spec, grid, config.pr_form)

    levels = config.levels if config.levels is not None else (grid.M,)
    for m in levels:
        if not 0 <= m <= grid.M:
            raise ConfigError(f"time level {m} outside 0..{grid.M}", flag="levels")

    if len(levels) == 1:
        df = history.profile(levels[0])
    else:
        df = pd.concat(
            [history.profile(m).assign(m=m, v=grid.time(m))[["m", "v", "z", "u"]] for m in levels],
            ignore_index=True,
        )
    metadata = {"problem": spec.describe(), "N": grid.N, "M": grid.M, "delta_v": grid.delta_v, "theta": grid.theta}
    emit.write(emit.render_frame(df, config.format, metadata), config.output)
    return EXIT_OK


def stability(config: RunConfig) -> int:
    spec = config.problem()
    grid = config.grid(spec)
    st = build_stencil(spec, grid, config.pr_form)
    report = analyze_stability(st, config.theta, with_oracle=grid.N - 1 <= MAX_DENSE_ORDER)
    emit.write(emit.render_stability(report, config.format), config.output)
    if config.gate and not report.stable:
        return EXIT_NOT_CERTIFIED
    return EXIT_OK


def condition(config: RunConfig) -> int:
    spec = config.problem()
    grid = config.grid(spec)
    report = condition_report(build_stencil(spec, grid, config.pr_form), config.theta)
    emit.write(emit.render_condition(report, grid.N, grid.M, config.format), config.output)
    return EXIT_OK


def tables(config: RunConfig) -> int:
    numbers = [config.table] if config.table is not None else sorted(TABLES)
    outputs = []
    for number in numbers:
        analysis = TABLES[number](config)
        logger.info("table %d: %s", number, analysis.description)
        outputs.append((analysis.name, analysis.run()))

    if config.format is OutputFormat.JSON:
        if len(outputs) == 1:
            text = outputs[0][1].to_json() + "\n"
        else:
            text = "{\n" + ",\n".join(f'"{name}": {output.to_json()}' for name, output in outputs) + "\n}\n"
    else:
        text = "\n".join(emit.render_frame(output.table, config.format) for _, output in outputs)
    emit.write(text, config.output)
    return EXIT_OK


def convergence(config: RunConfig) -> int:
    studies = [spatial_ladder(theta=0.5), temporal_ladder(theta=config.theta)]
    frames = [study.rows.assign(kind=study.kind, theta=study.theta) for study in studies]
    df = pd.concat(frames, ignore_index=True)[["kind", "theta", "N", "M", "delta_z", "delta_v", "error", "order"]]
    fitted = {f"{s.kind}/theta={s.theta:g}": s.fitted for s in studies}

    text = emit.render_frame(df, config.format, {"fitted_orders": fitted})
    if config.format is OutputFormat.TEXT:
        text += "".join(f"fitted order {key}: {format_fixed(value, 3)}\n" for key, value in fitted.items())
    emit.write(text, config.output)
    return EXIT_OK


def constant_check(config: RunConfig) -> int:
    output = ConstantCertificateAnalysis().run()
    emit.write(emit.render_frame(output.data, config.format, output.metadata), config.output)
    failed = int((output.data["verdict"] != "stable").sum())
    if failed:
        logger.warning("%d constant-coefficient cells were not certified", failed)
    if config.gate and failed:
        return EXIT_NOT_CERTIFIED
    return EXIT_OK


def analyze(config: RunConfig) -> int:
    """Run analysis by name (or 'all') and save its outputs under output/."""
    analyses = Analysis.load()
    if not analyses:
        print("No analyses found in src/analysis/")
        return EXIT_OK

    output_dir = Path("output")
    name = config.analysis
    if name is None:
        print("Available analyses:")
        for analysis_cls in analyses:
            instance = analysis_cls()
            print(f"  {instance.name:<24} {snake_to_title(instance.name)}: {instance.description}")
        return EXIT_OK

    selected = Analysis.select(name)
    if not selected:
        raise ConfigError(f"analysis {name!r} not found", flag="analysis")

    for instance in selected:
        print(f"Running: {instance.name}")
        saved = instance.save(output_dir, formats=ANALYSIS_FORMATS)
        for fmt, path in saved.items():
            print(f"  {fmt}: {path}")
    plt.close("all")
    return EXIT_OK


COMMANDS: dict[str, Callable[[RunConfig], int]] = {
    "solve": solve,
    "stability": stability,
    "condition": condition,
    "tables": tables,
    "convergence": convergence,
    "constant-check": constant_check,
    "analyze": analyze,
}


def _report_failure(exc: CompactSchemeError) -> None:
    print(f"error ({exc.module}): {exc}", file=sys.stderr)


def run(config: RunConfig) -> int:
    """Execute one command and map failures to exit codes."""
    try:
        return COMMANDS[config.command](config)
    except CONFIG_ERRORS as exc:
        _report_failure(exc)
        return EXIT_CONFIG
    except CompactSchemeError as exc:
        _report_failure(exc)
        return EXIT_NUMERICAL


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        config = load_config(args)
    except CONFIG_ERRORS as exc:
        _report_failure(exc)
        return EXIT_CONFIG

    configure_logging("DEBUG" if config.verbose else None)
    return run(config)
