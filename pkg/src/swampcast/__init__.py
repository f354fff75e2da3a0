"""Initialise swampcast package.

Public API surface: the `Scenario` class and sweep helpers from `swampcast.api`.
"""

from swampcast.api import Scenario, ScenarioRun, load_sweep, run_scenario, sweep

__all__ = ["Scenario", "ScenarioRun", "load_sweep", "run_scenario", "sweep"]
