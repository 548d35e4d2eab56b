"""Pytest configuration and shared fixtures."""

from collections.abc import Callable
from pathlib import Path

import numpy as np
import pytest

from firstint.core.config import AnalysisConfig
from firstint.core.engine import AnalysisEngine
from firstint.systems.spec import SystemKind, SystemSpec
from firstint.utils.config import Settings

SPECS_DIR = Path(__file__).resolve().parents[1] / "specs"


@pytest.fixture
def specs_dir() -> Path:
    """Directory of the shipped example systems."""
    return SPECS_DIR


@pytest.fixture
def load_spec() -> Callable[[str], SystemSpec]:
    """Load a shipped example system by name."""

    def _load(name: str) -> SystemSpec:
        return SystemSpec.from_file(SPECS_DIR / f"{name}.json")

    return _load


@pytest.fixture
def rng() -> np.random.Generator:
    """Seeded generator."""
    return np.random.default_rng(7)


@pytest.fixture
def ode_3_2(load_spec: Callable[[str], SystemSpec]) -> SystemSpec:
    """Four-dimensional ODE with eigenvalues 0, 1, 1, 2."""
    return load_spec("sys_3_2")


@pytest.fixture
def total_2_3(load_spec: Callable[[str], SystemSpec]) -> SystemSpec:
    """Commuting total system in four unknowns and two variables."""
    return load_spec("sys_2_3")


@pytest.fixture
def jordan_3_17(load_spec: Callable[[str], SystemSpec]) -> SystemSpec:
    """ODE with a single real Jordan block of size 3."""
    return load_spec("sys_3_17")


@pytest.fixture
def rotation_spec() -> SystemSpec:
    """dx1/dt = x2, dx2/dt = -x1."""
    return SystemSpec(SystemKind.ODE, 2, 1, (np.array([[0.0, 1.0], [-1.0, 0.0]]),))


@pytest.fixture
def fast_config() -> AnalysisConfig:
    """A configuration with reduced sampling for quick end-to-end runs."""
    return AnalysisConfig(
        trajectories=4,
        lie_samples=40,
        psi_samples=40,
        reference_samples=20,
    )


@pytest.fixture
def engine(fast_config: AnalysisConfig) -> AnalysisEngine:
    """Engine with the fast configuration and single-threaded settings."""
    return AnalysisEngine(fast_config, Settings(threads=1))
