from .config import ScenarioConfig
from .generator import generate_scenario
from .runner import (
    ComparisonRow,
    SchemeResult,
    SchemeSummary,
    TrialRecord,
    compare_schemes,
    run_trials,
    summarize,
)
from .sweep import SweepRow, panel_sweep, sweep_bids

__all__ = [
    "ScenarioConfig",
    "generate_scenario",
    "ComparisonRow",
    "SchemeResult",
    "SchemeSummary",
    "TrialRecord",
    "compare_schemes",
    "run_trials",
    "summarize",
    "SweepRow",
    "panel_sweep",
    "sweep_bids",
]
