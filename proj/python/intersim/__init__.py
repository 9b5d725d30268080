"""Intersection crossing simulator: CBAA-M priority auction plus per-agent MPC."""

from ._intersim import (
    AgentState,
    DiscreteModel,
    PathSample,
    PathSpec,
    Scenario,
    ScenarioError,
    SimulationResult,
    area_overlap,
    build_path,
    cbaam_time_bound,
    compute_bid,
    compute_regions,
    discretize,
    graph_ell,
    load_scenario,
    preset,
    resolve_scenario,
    rollout,
    run_cbaam,
    simulate,
    solve_ocp,
    step,
)

__all__ = [
    "AgentState",
    "DiscreteModel",
    "PathSample",
    "PathSpec",
    "Scenario",
    "ScenarioError",
    "SimulationResult",
    "area_overlap",
    "build_path",
    "cbaam_time_bound",
    "compute_bid",
    "compute_regions",
    "discretize",
    "graph_ell",
    "load_scenario",
    "preset",
    "resolve_scenario",
    "rollout",
    "run_cbaam",
    "simulate",
    "solve_ocp",
    "step",
]
