"""Event-triggered leader-follower consensus with adaptive edge weights."""

from .config import Campaign, Pairing, parse_config
from .graph import (
    SystemMatrix,
    Topology,
    assemble_system_matrix,
    build_topology,
    spectral_monitor,
)
from .metrics import compare_runs, compute_effort, compute_rmse, stability_trace, summarize_run
from .runner import run_campaign
from .signals import CommandSpec, command_derivative, command_trace, command_value
from .sim import RunArtifacts, ScenarioConfig, run_scenario

__all__ = [
    "Campaign",
    "CommandSpec",
    "Pairing",
    "RunArtifacts",
    "ScenarioConfig",
    "SystemMatrix",
    "Topology",
    "assemble_system_matrix",
    "build_topology",
    "command_derivative",
    "command_trace",
    "command_value",
    "compare_runs",
    "compute_effort",
    "compute_rmse",
    "parse_config",
    "run_campaign",
    "run_scenario",
    "spectral_monitor",
    "stability_trace",
    "summarize_run",
]

__version__ = "0.1.0"
