"""Shared fixtures: small topologies and scenario builders."""

from pathlib import Path

import pytest

from etcnet.graph import build_topology
from etcnet.signals import CommandSpec
from etcnet.sim import ScenarioConfig

CONFIG_DIR = Path(__file__).resolve().parent.parent / "configs"


@pytest.fixture
def path4():
    """4-node path, node 0 is the leader."""
    return build_topology(4, [(0, 1), (1, 2), (2, 3)], [0])


@pytest.fixture
def pair2():
    """2-node graph, node 0 is the leader."""
    return build_topology(2, [(0, 1)], [0])


def make_config(topology, **overrides):
    """Short-horizon scenario with the default thresholds."""
    defaults = dict(
        name="test",
        topology=topology,
        mode="petc",
        delta=0.05,
        epsilon=0.08,
        a_min=0.2,
        a_max=3.0,
        dt=1e-3,
        horizon=2.0,
        seed=0,
        command=CommandSpec(kind="filtered_square", amplitude=1.0, period=90.0,
                            tau=0.5, offset=0.0),
    )
    defaults.update(overrides)
    return ScenarioConfig(**defaults)
