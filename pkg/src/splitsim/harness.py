"""Run orchestration: wire a scenario to its strategy and execute it.

The split between scenario (validated inputs), strategy (per-construction
behavior) and engine (the stage loop) meets here.  run is a pure function
of the scenario; two calls produce identical event lists.
"""

from __future__ import annotations

from .engine import Run
from .robinson import RobinsonStrategy, TablePolicy, TruthfulDelayPolicy
from .sacks import SacksStrategy
from .scenario import Scenario


def build_policy(scenario: Scenario):
    """The external approximation p for a robinson scenario."""
    if scenario.p_policy_kind == "table":
        return TablePolicy(scenario.p_policy_params["values"])
    return TruthfulDelayPolicy(
        scenario.p_policy_params["d"], scenario.c_schedule.entry_stage()
    )


def build_strategy(scenario: Scenario):
    if scenario.construction == "sacks":
        return SacksStrategy(scenario.functionals)
    return RobinsonStrategy(
        scenario.functionals,
        build_policy(scenario),
        scenario.q_default,
        scenario.q_overrides,
    )


def run(scenario: Scenario):
    """Execute the scenario over its horizon.

    Returns (events, final_state).  Internal invariant violations raise
    ConstructionInvariantError; a valid scenario never triggers one.
    """
    r = Run(scenario, build_strategy(scenario))
    events = r.execute()
    return events, r.final_state()
