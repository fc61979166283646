"""Shared fixtures: the bundled demo scenario and derived artifacts.

The expensive pieces (coverage grids, KPI batches) are session-scoped;
everything downstream treats them as read-only.
"""

import dataclasses

import pytest

from rfplan import coverage, twin
from rfplan.cli import demo_scenario_path
from rfplan.scenario import load_scenario


@pytest.fixture(scope="session")
def demo_scenario():
    return load_scenario(demo_scenario_path())


@pytest.fixture(scope="session")
def quiet_scenario(demo_scenario):
    """Demo scenario with every external interferer removed."""
    return dataclasses.replace(demo_scenario, interferers=())


@pytest.fixture(scope="session")
def demo_grid(demo_scenario):
    return coverage.compute_grid(demo_scenario, interferers_active=True)


@pytest.fixture(scope="session")
def demo_grid_off(demo_scenario):
    return coverage.compute_grid(demo_scenario, interferers_active=False)


@pytest.fixture(scope="session")
def demo_batch(demo_scenario):
    return twin.synthesize_kpi(demo_scenario, duration_s=3600.0, dt_s=60.0)
