from .report import (
    ConditionReport,
    NormReport,
    OutputFormat,
    StabilityReport,
    Verdict,
)

__all__ = [
    "ConditionReport",
    "NormReport",
    "OutputFormat",
    "StabilityReport",
    "Verdict",
]
