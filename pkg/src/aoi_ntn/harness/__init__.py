"""Scenario loading, parameter sweeps, CSV output and the CLI."""
from .config import ScenarioConfig, build_scenario, load_scenario, shipped_scenarios
from .report import DiscrepancyReport, compare_analytic_vs_des
from .sweep import COLUMNS, ResultRow, emit_csv, estimate_psj, read_csv, run_sweep

__all__ = [
    "COLUMNS",
    "DiscrepancyReport",
    "ResultRow",
    "ScenarioConfig",
    "build_scenario",
    "compare_analytic_vs_des",
    "emit_csv",
    "estimate_psj",
    "load_scenario",
    "read_csv",
    "run_sweep",
    "shipped_scenarios",
]
