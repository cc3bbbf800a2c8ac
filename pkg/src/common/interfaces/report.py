"""
Serializable verdict and norm records.

Usage:
    from src.common.interfaces.report import StabilityReport, Verdict

    report = StabilityReport(N=3, theta=1.0, roots=[7.94, 2.12], ...)
    payload = report.to_json()
    StabilityReport.from_dict(json.loads(payload)) == report  # values round-trip
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from enum import Enum
from typing import Any

import numpy as np


class Verdict(str, Enum):
    STABLE = "stable"
    NOT_CERTIFIED = "not-certified"

    @property
    def label(self) -> str:
        """Verdict line printed by the CLI."""
        return "STABLE" if self is Verdict.STABLE else "NOT CERTIFIED"


class OutputFormat(str, Enum):
    CSV = "csv"
    JSON = "json"
    TEXT = "text"


def complex_pairs(values: Any) -> list[list[float]]:
    """Complex values as [re, im] pairs."""
    return [[float(np.real(v)), float(np.imag(v))] for v in values]


def from_pairs(pairs: list[list[float]]) -> np.ndarray:
    return np.array([complex(re, im) for re, im in pairs], dtype=complex)


@dataclass
class StabilityReport:
    """
    Stability verdict for one (N, theta).

    Attributes:
        roots: Roots of D1_N, i.e. eigenvalues of W = X^-1 Y.
        amplification_moduli: One modulus per root of the amplification factor.
        degree_deficit: How far the degree of D1_N fell below N - 1.
        excluded_values: Lambda values that solve A = 0 or C = 0 and are never eigenvalues.
        unmatched_roots: Roots with no counterpart in the dense eigenvalue oracle.
        failed_k: Family indices whose sign checks failed (constant case).
    """

    N: int
    theta: float
    roots: np.ndarray
    min_real_part: float
    amplification_moduli: np.ndarray
    spectral_radius: float
    verdict: Verdict
    degree_deficit: int = 0
    excluded_values: list[float] = field(default_factory=list)
    unmatched_roots: np.ndarray = field(default_factory=lambda: np.array([], dtype=complex))
    failed_k: list[int] = field(default_factory=list)
    notes: list[str] = field(default_factory=list)

    @property
    def stable(self) -> bool:
        return self.verdict is Verdict.STABLE

    def to_dict(self) -> dict[str, Any]:
        return {
            "N": self.N,
            "theta": self.theta,
            "roots": complex_pairs(self.roots),
            "min_real_part": self.min_real_part,
            "amplification_moduli": [float(x) for x in self.amplification_moduli],
            "spectral_radius": self.spectral_radius,
            "verdict": self.verdict.value,
            "degree_deficit": self.degree_deficit,
            "excluded_values": [float(x) for x in self.excluded_values],
            "unmatched_roots": complex_pairs(self.unmatched_roots),
            "failed_k": list(self.failed_k),
            "notes": list(self.notes),
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2)

    @classmethod
    def from_dict(cls, data: dict[str, Any]) -> StabilityReport:
        return cls(
            N=int(data["N"]),
            theta=float(data["theta"]),
            roots=from_pairs(data["roots"]),
            min_real_part=float(data["min_real_part"]),
            amplification_moduli=np.array(data["amplification_moduli"], dtype=float),
            spectral_radius=float(data["spectral_radius"]),
            verdict=Verdict(data["verdict"]),
            degree_deficit=int(data.get("degree_deficit", 0)),
            excluded_values=list(data.get("excluded_values", [])),
            unmatched_roots=from_pairs(data.get("unmatched_roots", [])),
            failed_k=list(data.get("failed_k", [])),
            notes=list(data.get("notes", [])),
        )


@dataclass
class NormReport:
    """Bounds and exact values of ||X^-1||_2 and ||Y||_2."""

    xinv_bound: float
    xinv_exact: float
    y_inf: float
    y_one: float
    y2_bound: float
    y2_exact: float

    def to_dict(self) -> dict[str, Any]:
        return {
            "xinv_bound": self.xinv_bound,
            "xinv_exact": self.xinv_exact,
            "y_inf": self.y_inf,
            "y_one": self.y_one,
            "y2_bound": self.y2_bound,
            "y2_exact": self.y2_exact,
        }

    @classmethod
    def from_dict(cls, data: dict[str, Any]) -> NormReport:
        return cls(**{key: float(data[key]) for key in cls.__dataclass_fields__})


@dataclass
class ConditionReport:
    """Condition number of I + W (theta = 1) or I + W/2 (theta = 1/2)."""

    norm: NormReport
    theta: float
    kappa_bound: float
    kappa_exact: float

    def to_dict(self) -> dict[str, Any]:
        return {
            "norm": self.norm.to_dict(),
            "theta": self.theta,
            "kappa_bound": self.kappa_bound,
            "kappa_exact": self.kappa_exact,
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2)

    @classmethod
    def from_dict(cls, data: dict[str, Any]) -> ConditionReport:
        return cls(
            norm=NormReport.from_dict(data["norm"]),
            theta=float(data["theta"]),
            kappa_bound=float(data["kappa_bound"]),
            kappa_exact=float(data["kappa_exact"]),
        )
