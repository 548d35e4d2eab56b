"""
firstint: first integrals of constant-coefficient linear differential systems.

This package builds autonomous and nonautonomous first integrals of ordinary,
total differential (Pfaffian) and R-linear systems from the common spectral
structure of their matrices, and verifies them numerically.
"""

__version__ = "1.0.0"

from firstint.core.config import AnalysisConfig
from firstint.core.engine import AnalysisEngine, AnalysisResult
from firstint.systems.spec import SystemSpec, parse_spec

__all__ = [
    "AnalysisConfig",
    "AnalysisEngine",
    "AnalysisResult",
    "SystemSpec",
    "parse_spec",
    "__version__",
]
