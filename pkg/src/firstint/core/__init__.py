"""Core engine and orchestration for firstint."""

from firstint.core.config import AnalysisConfig
from firstint.core.engine import AnalysisEngine, AnalysisResult
from firstint.core.report import SCHEMA_VERSION, AnalysisReport

__all__ = [
    "AnalysisEngine",
    "AnalysisResult",
    "AnalysisConfig",
    "AnalysisReport",
    "SCHEMA_VERSION",
]
