"""
Run configuration: built-in defaults, an optional KEY=value file, then flags.

Usage:
    parser = build_parser()
    config = load_config(parser.parse_args(["stability", "--N", "6"]))
    spec, grid = config.problem(), config.grid()

A config file mirrors the flags without their dashes; keys are
case-insensitive and ``-``/``_`` are interchangeable:

    a_expr=z+1
    B-EXPR=(z+1)^2
    N=6
    dv=0.1
"""

from __future__ import annotations

import argparse
import logging
from collections.abc import Callable
from dataclasses import dataclass, fields
from pathlib import Path
from typing import Any

from dotenv import dotenv_values

from src.common.interfaces.report import OutputFormat
from src.common.util.strings import kebab_to_snake
from src.compact.discretization import DerivativeExpressions, GridSpec, PRForm, ProblemSpec
from src.compact.errors import ConfigError, ExpressionSyntaxError
from src.compact.exprparse import parse

logger = logging.getLogger(__name__)

COMMANDS = ("solve", "stability", "condition", "tables", "convergence", "constant-check", "analyze")
DV_TOLERANCE = 1e-12
DEFAULT_DV = 0.1

# commands not listed default to csv
COMMAND_FORMATS = {"stability": OutputFormat.TEXT}


def _levels(text: str) -> tuple[int, ...]:
    return tuple(int(part) for part in text.split(",") if part.strip())


def _flag(text: str) -> bool:
    lowered = str(text).strip().lower()
    if lowered in ("1", "true", "yes", "on"):
        return True
    if lowered in ("0", "false", "no", "off", ""):
        return False
    raise ValueError(f"not a boolean: {text!r}")


def _table(text: str) -> int:
    value = int(text)
    if value not in (1, 2, 3, 4):
        raise ValueError(f"table must be 1..4, got {value}")
    return value


def _theta(text: str) -> float:
    value = float(text)
    if value not in (1.0, 0.5):
        raise ValueError(f"theta must be 1 or 0.5, got {value}")
    return value


@dataclass(frozen=True)
class Option:
    """One configurable flag: its name, the RunConfig field it fills and its converter."""

    flag: str
    field: str
    convert: Callable[[str], Any]
    help: str
    switch: bool = False


OPTIONS = (
    Option("a-expr", "a_expr", str, "convection coefficient a(z)"),
    Option("b-expr", "b_expr", str, "diffusion coefficient b(z) > 0"),
    Option("k-expr", "k_expr", str, "initial datum k(z)"),
    Option("h1-expr", "h1_expr", str, "left boundary datum h1(v)"),
    Option("h2-expr", "h2_expr", str, "right boundary datum h2(v)"),
    Option("zl", "z_l", float, "left end of the space interval"),
    Option("zr", "z_r", float, "right end of the space interval"),
    Option("T", "T", float, "time horizon"),
    Option("N", "N", int, "number of space steps"),
    Option("M", "M", int, "number of time steps (delta_v = T/M)"),
    Option("dv", "delta_v", float, "time step"),
    Option("theta", "theta", _theta, "1 for backward Euler, 0.5 for Crank-Nicolson"),
    Option("table", "table", _table, "table to reproduce (1..4); all when absent"),
    Option("output", "output", str, "output file (stdout when absent)"),
    Option("format", "output_format", OutputFormat, "csv, json or text"),
    Option("levels", "levels", _levels, "comma-separated time levels for solve (default: final)"),
    Option("gate", "gate", _flag, "exit 4 when stability is not certified", switch=True),
    Option("verbose", "verbose", _flag, "debug logging", switch=True),
    Option("da-expr", "da_expr", str, "exact a'(z)"),
    Option("dda-expr", "dda_expr", str, "exact a''(z)"),
    Option("db-expr", "db_expr", str, "exact b'(z)"),
    Option("ddb-expr", "ddb_expr", str, "exact b''(z)"),
    Option("pr-form", "pr_form", PRForm, argparse.SUPPRESS),
)

EXPRESSION_FLAGS = {
    "a_expr": ("a-expr", "z"),
    "b_expr": ("b-expr", "z"),
    "k_expr": ("k-expr", "z"),
    "h1_expr": ("h1-expr", "v"),
    "h2_expr": ("h2-expr", "v"),
    "da_expr": ("da-expr", "z"),
    "dda_expr": ("dda-expr", "z"),
    "db_expr": ("db-expr", "z"),
    "ddb_expr": ("ddb-expr", "z"),
}


def _normalize_key(key: str) -> str:
    return kebab_to_snake(key.strip().lower())


OPTIONS_BY_KEY = {_normalize_key(option.flag): option for option in OPTIONS}


@dataclass(frozen=True)
class RunConfig:
    """Everything one command needs. Expression fields hold the raw text."""

    command: str = "stability"
    a_expr: str = "z+1"
    b_expr: str = "(z+1)^2"
    k_expr: str = "0"
    h1_expr: str = "0"
    h2_expr: str = "0"
    z_l: float = 0.0
    z_r: float = 1.0
    T: float = 1.0
    N: int = 8
    M: int | None = None
    delta_v: float | None = None
    theta: float = 1.0
    table: int | None = None
    output: str | None = None
    output_format: OutputFormat | None = None
    levels: tuple[int, ...] | None = None
    gate: bool = False
    verbose: bool = False
    da_expr: str | None = None
    dda_expr: str | None = None
    db_expr: str | None = None
    ddb_expr: str | None = None
    pr_form: PRForm = PRForm.DERIVED
    analysis: str | None = None

    def __post_init__(self) -> None:
        if self.command not in COMMANDS:
            raise ConfigError(f"unknown command {self.command!r}")
        if self.N < 2:
            raise ConfigError(f"need at least 2 space steps, got {self.N}", flag="N")
        if self.M is not None and self.M < 1:
            raise ConfigError(f"need at least 1 time step, got {self.M}", flag="M")
        if self.delta_v is not None and not self.delta_v > 0:
            raise ConfigError(f"time step must be positive, got {self.delta_v}", flag="dv")
        if not self.T > 0:
            raise ConfigError(f"horizon must be positive, got {self.T}", flag="T")
        if not self.z_l < self.z_r:
            raise ConfigError(f"need zl < zr, got [{self.z_l}, {self.z_r}]", flag="zr")
        if self.M is not None and self.delta_v is not None:
            implied = self.T / self.M
            if abs(self.delta_v - implied) > DV_TOLERANCE * self.delta_v:
                raise ConfigError(f"dv = {self.delta_v!r} disagrees with T/M = {implied!r}", flag="dv")
        derivative_fields = (self.da_expr, self.dda_expr, self.db_expr, self.ddb_expr)
        if any(d is not None for d in derivative_fields) and any(d is None for d in derivative_fields):
            raise ConfigError("exact derivatives need all of --da-expr --dda-expr --db-expr --ddb-expr", flag="da-expr")
        for name, (flag, variable) in EXPRESSION_FLAGS.items():
            text = getattr(self, name)
            if text is None:
                continue
            try:
                parse(text, variable)
            except ExpressionSyntaxError as exc:
                raise ConfigError(str(exc), flag=flag) from exc

    @property
    def format(self) -> OutputFormat:
        if self.output_format is not None:
            return self.output_format
        return COMMAND_FORMATS.get(self.command, OutputFormat.CSV)

    @property
    def resolved_dv(self) -> float:
        if self.delta_v is not None:
            return self.delta_v
        if self.M is not None:
            return self.T / self.M
        return DEFAULT_DV

    def derivatives(self) -> DerivativeExpressions | None:
        if self.da_expr is None:
            return None
        return DerivativeExpressions.from_text(self.da_expr, self.dda_expr, self.db_expr, self.ddb_expr)

    def problem(self) -> ProblemSpec:
        return ProblemSpec.from_text(
            a=self.a_expr,
            b=self.b_expr,
            k=self.k_expr,
            h1=self.h1_expr,
            h2=self.h2_expr,
            derivatives=self.derivatives(),
            z_l=self.z_l,
            z_r=self.z_r,
            T=self.T,
        )

    def grid(self, spec: ProblemSpec | None = None) -> GridSpec:
        spec = spec or self.problem()
        if self.M is not None:
            return GridSpec.build(spec, N=self.N, M=self.M, theta=self.theta)
        return GridSpec.build(spec, N=self.N, delta_v=self.resolved_dv, theta=self.theta)


def read_config_file(path: Path | str) -> dict[str, Any]:
    """Parse a KEY=value file into RunConfig field values.

    Raises:
        ConfigError: for a missing file, an unknown key or a value that does not convert.
    """
    path = Path(path)
    if not path.is_file():
        raise ConfigError(f"no such file: {path}", flag="config")

    values: dict[str, Any] = {}
    for key, raw in dotenv_values(path).items():
        option = OPTIONS_BY_KEY.get(_normalize_key(key))
        if option is None:
            raise ConfigError(f"unknown key {key!r} in {path}", flag="config")
        values[option.field] = _convert(option, "" if raw is None else raw)
    logger.debug("read %d settings from %s", len(values), path)
    return values


def _convert(option: Option, raw: str) -> Any:
    try:
        return option.convert(raw)
    except ValueError as exc:
        raise ConfigError(str(exc), flag=option.flag) from exc


def _argument_type(option: Option) -> Callable[[str], Any]:
    def convert(raw: str) -> Any:
        try:
            return option.convert(raw)
        except ValueError as exc:
            raise argparse.ArgumentTypeError(str(exc)) from exc

    convert.__name__ = option.flag
    return convert


def _common_flags() -> argparse.ArgumentParser:
    parent = argparse.ArgumentParser(add_help=False)
    for option in OPTIONS:
        if option.switch:
            parent.add_argument(f"--{option.flag}", dest=option.field, action="store_true", default=None, help=option.help)
        else:
            parent.add_argument(
                f"--{option.flag}", dest=option.field, type=_argument_type(option), default=None, help=option.help
            )
    parent.add_argument("--config", default=None, help="KEY=value file; flags override its values")
    return parent


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="main.py",
        description="Fourth-order compact schemes for u_v + a(z) u_z - b(z) u_zz = 0",
    )
    commands = parser.add_subparsers(dest="command", metavar="command", required=True)
    parent = _common_flags()
    descriptions = {
        "solve": "march the scheme and write the solution profile(s)",
        "stability": "roots of the characteristic polynomial and the stability verdict",
        "condition": "norm bounds and the condition number of I + theta W",
        "tables": "reproduce the reference tables (--table 1..4)",
        "convergence": "observed orders on the refinement ladders",
        "constant-check": "stability certificate sweep for constant coefficients",
    }
    for name, text in descriptions.items():
        commands.add_parser(name, parents=[parent], help=text, description=text)

    analyze = commands.add_parser("analyze", help="run a saved analysis into output/", description="run analyses")
    analyze.add_argument("analysis", nargs="?", default=None, help="analysis name, or 'all'")
    analyze.add_argument("--verbose", action="store_true", default=None)
    return parser


def load_config(args: argparse.Namespace) -> RunConfig:
    """Merge defaults < config file < flags into a RunConfig."""
    values: dict[str, Any] = {}
    config_path = getattr(args, "config", None)
    if config_path:
        values.update(read_config_file(config_path))

    known = {f.name for f in fields(RunConfig)}
    for name, value in vars(args).items():
        if name in known and value is not None:
            values[name] = value

    # a time step given on the command line replaces both dv and M from the file
    if getattr(args, "M", None) is not None and getattr(args, "delta_v", None) is None:
        values.pop("delta_v", None)
    if getattr(args, "delta_v", None) is not None and getattr(args, "M", None) is None:
        values.pop("M", None)

    config = RunConfig(**values)
    logger.debug("configuration: %s", config)
    return config
