from __future__ import annotations

import sys
from pathlib import Path

import numpy as np
import pytest

sys.path.insert(0, str(Path(__file__).parent))

from cocosim.intention import FilterParams, GoalRegion

REPO = Path(__file__).resolve().parents[1]


@pytest.fixture(scope="session")
def square_goals():
    """The four-fixture layout used across scenarios and trials."""
    return [
        GoalRegion(0, np.array([0.55, 0.20, 0.02]), 0.06),
        GoalRegion(1, np.array([0.35, 0.20, 0.02]), 0.06),
        GoalRegion(2, np.array([0.55, -0.20, 0.02]), 0.06),
        GoalRegion(3, np.array([0.35, -0.20, 0.02]), 0.06),
    ]


@pytest.fixture(scope="session")
def filter_params():
    return FilterParams()


@pytest.fixture(scope="session")
def golden_run():
    """Golden scenario executed once per session; several tests share it."""
    from cocosim.runner import run_scenario
    from cocosim.scenarios import coco_demo
    import time

    cfg = coco_demo()
    t0 = time.perf_counter()
    trace, metrics = run_scenario(cfg)
    wall = time.perf_counter() - t0
    return cfg, trace, metrics, wall
