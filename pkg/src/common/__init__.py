from src.common.analysis import Analysis, AnalysisOutput

__all__ = ["Analysis", "AnalysisOutput"]
