"""
Base class for analyses that generate tables, figures and data outputs.

Usage:
    from src.common.analysis import Analysis, AnalysisOutput

    class MyAnalysis(Analysis):
        def run(self) -> AnalysisOutput:
            df = pd.DataFrame({"N": [2, 3], "root": [2.06, 7.9419]})
            return AnalysisOutput(data=df, display=df.round(4))

    analysis = MyAnalysis("my_analysis", "Two characteristic roots")
    analysis.save("output/", formats=["csv", "json"])
"""

from __future__ import annotations

import importlib
import inspect
import json
import logging
import sys
from abc import ABC, abstractmethod
from collections.abc import Generator
from contextlib import contextmanager
from dataclasses import dataclass
from pathlib import Path

import matplotlib.pyplot as plt
import pandas as pd
from matplotlib.figure import Figure
from tqdm import tqdm

logger = logging.getLogger(__name__)

FIGURE_FORMATS = ("png", "pdf", "svg")
DEFAULT_FORMATS = ("csv", "json")


@dataclass
class AnalysisOutput:
    """Output from an analysis run.

    ``data`` holds full-precision values; ``display`` (when present) is the
    same table formatted for reading and is what the CSV carries.
    """

    figure: Figure | None = None
    data: pd.DataFrame | None = None
    display: pd.DataFrame | None = None
    metadata: dict | None = None

    @property
    def table(self) -> pd.DataFrame | None:
        return self.display if self.display is not None else self.data

    def to_json(self) -> str:
        records = [] if self.data is None else json.loads(self.data.to_json(orient="records", double_precision=15))
        return json.dumps({"metadata": self.metadata or {}, "data": records}, indent=2)


class Analysis(ABC):
    """Base class for the table and verification analyses.

    Subclasses implement `run()`; `save()` writes whatever it returns.
    """

    def __init__(self, name: str, description: str):
        self.name = name
        self.description = description

    @contextmanager
    def progress(self, description: str) -> Generator[None, None, None]:
        """Show a spinner on stderr while a block runs.

        Usage:
            with self.progress("Forming W"):
                W = pencil_operator(X, Y)
        """
        with tqdm(
            total=None,
            desc=description,
            bar_format="{desc}: {elapsed}",
            file=sys.stderr,
            leave=False,
        ) as pbar:
            yield
            pbar.update()

    @abstractmethod
    def run(self) -> AnalysisOutput:
        """Compute the analysis. Implementations must not write files."""

    def save(
        self,
        output_dir: Path | str,
        formats: list[str] | None = None,
        dpi: int = 300,
    ) -> dict[str, Path]:
        """Run the analysis and write ``<name>.<fmt>`` files into ``output_dir``.

        Args:
            output_dir: Created when missing.
            formats: Any of png, pdf, svg, csv, json. Defaults to csv and json.
            dpi: Resolution for raster figures.

        Returns:
            Dict mapping format to saved file path. Formats the output has
            nothing for (a figure format without a figure) are skipped.
        """
        wanted = list(DEFAULT_FORMATS) if formats is None else formats
        output_dir = Path(output_dir)
        output_dir.mkdir(parents=True, exist_ok=True)

        output = self.run()
        saved: dict[str, Path] = {}

        if output.figure is not None:
            saved.update(self._save_figure(output.figure, output_dir, wanted, dpi))

        if output.table is not None and "csv" in wanted:
            path = output_dir / f"{self.name}.csv"
            output.table.to_csv(path, index=False, lineterminator="\n")
            saved["csv"] = path

        if output.data is not None and "json" in wanted:
            path = output_dir / f"{self.name}.json"
            path.write_text(output.to_json())
            saved["json"] = path

        logger.debug("%s wrote %s", self.name, ", ".join(sorted(saved)) or "nothing")
        return saved

    def _save_figure(self, figure: Figure, output_dir: Path, formats: list[str], dpi: int) -> dict[str, Path]:
        saved: dict[str, Path] = {}
        try:
            for fmt in (f for f in formats if f in FIGURE_FORMATS):
                path = output_dir / f"{self.name}.{fmt}"
                figure.savefig(path, dpi=dpi, bbox_inches="tight")
                saved[fmt] = path
        finally:
            plt.close(figure)
        return saved

    @classmethod
    def load(cls, analysis_dir: Path | str = "src/analysis") -> list[type[Analysis]]:
        """Concrete Analysis subclasses defined in modules under ``analysis_dir``.

        Modules whose name starts with ``_`` are skipped, as are modules that
        fail to import (logged as a warning). Order follows the sorted paths.
        """
        analysis_dir = Path(analysis_dir)
        if not analysis_dir.is_dir():
            return []

        found: list[type[Analysis]] = []
        for py_file in sorted(analysis_dir.glob("**/*.py")):
            if py_file.name.startswith("_"):
                continue
            module_name = ".".join(("src", "analysis", *py_file.relative_to(analysis_dir).with_suffix("").parts))
            try:
                module = importlib.import_module(module_name)
            except ImportError:
                logger.warning("skipping %s: import failed", module_name, exc_info=True)
                continue

            for _, obj in inspect.getmembers(module, inspect.isclass):
                if issubclass(obj, cls) and obj is not cls and not inspect.isabstract(obj) and obj not in found:
                    found.append(obj)

        return found

    @classmethod
    def select(cls, name: str, analysis_dir: Path | str = "src/analysis") -> list[Analysis]:
        """Instances of the analysis called ``name``, or of every analysis for ``"all"``.

        Returns an empty list when nothing matches.
        """
        instances = [analysis_cls() for analysis_cls in cls.load(analysis_dir)]
        if name == "all":
            return instances
        return [instance for instance in instances if instance.name == name]
