"""Adaptive edge-weight machinery.

Each directed pair (i -> j) carries a weight ``a``, a filter state
``theta``, and a priority coefficient ``gamma``.  While a node is active
its weight targets are ``gamma * a_max`` (priority set by relative
neighbor broadcast counts); while idle they decay to ``a_min``.  The
target passes through a two-stage first-order cascade (theta, then a),
integrated by explicit Euler.

Leader rows mirror their neighbors' opposite weights instead of running
the dynamics, and a non-leader node with a single neighbor copies the
maximum weight found on that neighbor's own edges.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .graph import Topology
from .triggering import MonitorState


@dataclass
class CouplingState:
    """Per directed pair: weight a, filter state theta, priority gamma,
    and the exclusion flag used by the frequency comparison."""

    a: np.ndarray
    theta: np.ndarray
    gamma: np.ndarray
    excluded: np.ndarray


def init_coupling(
    topology: Topology,
    a0: float = 1.0,
    theta0: float = 1.0,
    gamma0: float = 1.0,
) -> CouplingState:
    mask = topology.edge_mask()
    n = topology.n
    return CouplingState(
        a=np.where(mask, a0, 0.0),
        theta=np.where(mask, theta0, 0.0),
        gamma=np.where(mask, gamma0, 0.0),
        excluded=np.zeros((n, n), dtype=bool),
    )


def dynamic_nodes(topology: Topology) -> list[int]:
    """Nodes whose rows run the weight dynamics: non-leaders with >= 2
    neighbors.  Leader rows mirror; single-neighbor rows copy."""
    return [
        i
        for i in range(topology.n)
        if not topology.is_leader(i) and topology.degree(i) >= 2
    ]


def select_rho(active: bool, gamma: float, a_min: float, a_max: float) -> float:
    """Weight target for one directed pair: a_min when idle, gamma*a_max
    when the node is in its active phase."""
    return gamma * a_max if active else a_min


def update_exclusions(
    node: int,
    topology: Topology,
    cs: CouplingState,
    monitor: MonitorState,
    gamma_lower: float,
    tolerance: float,
) -> None:
    """Flag neighbors whose gamma has been driven to the lower bound.

    Only evaluated during the node's active phase; flags persist until the
    caller clears them at phase end (see triggering.update_monitoring).
    """
    if not monitor.active[node]:
        return
    for nb in topology.neighbor_lists[node]:
        if cs.gamma[node, nb] <= gamma_lower + tolerance:
            cs.excluded[node, nb] = True


def update_gamma(
    node: int,
    topology: Topology,
    cs: CouplingState,
    monitor: MonitorState,
    psi: float,
    gamma_lower: float,
    gamma_upper: float,
    dt: float,
    freeze_excluded: bool = True,
) -> None:
    """One Euler step of the priority dynamics for one node's row.

    An edge whose phi count is strictly below some non-excluded
    competitor's is driven toward the lower bound; all other edges (ties
    included) are driven toward the upper bound.  With ``freeze_excluded``
    the excluded edges' gammas hold their value and only the rest update;
    otherwise exclusion merely removes an edge from the competitor set.
    """
    neighbors = topology.neighbor_lists[node]
    updated = [
        nb for nb in neighbors if not (freeze_excluded and cs.excluded[node, nb])
    ]
    competitors = [nb for nb in neighbors if not cs.excluded[node, nb]]
    for nb in updated:
        target = gamma_upper
        for other in competitors:
            if other != nb and monitor.phi[node, nb] < monitor.phi[node, other]:
                target = gamma_lower
                break
        g = cs.gamma[node, nb]
        cs.gamma[node, nb] = g - dt * psi * (g - target)


def integrate_weights(
    cs: CouplingState,
    rho: np.ndarray,
    mask: np.ndarray,
    zeta1: float,
    zeta2: float,
    dt: float,
) -> None:
    """Euler step of the theta/a cascade on the masked pairs.

    The a update reads the pre-update theta; the theta update reads this
    step's rho, so both states advance from step-k values.
    """
    theta_old = cs.theta[mask]
    cs.a[mask] = cs.a[mask] - dt * zeta1 * (cs.a[mask] - theta_old)
    cs.theta[mask] = theta_old - dt * zeta2 * (theta_old - rho[mask])


def apply_single_neighbor_rule(topology: Topology, cs: CouplingState) -> None:
    """Non-leader nodes with one neighbor copy the largest weight found
    on that neighbor's own edges (read this step, post-update)."""
    for i in range(topology.n):
        if topology.is_leader(i) or topology.degree(i) != 1:
            continue
        (j,) = topology.neighbor_lists[i]
        cs.a[i, j] = max(cs.a[j, r] for r in topology.neighbor_lists[j])


def apply_leader_mirror(topology: Topology, cs: CouplingState) -> None:
    """Leaders copy each neighbor's opposite weight: a[i,j] <- a[j,i].

    Copies read a snapshot taken before any mirroring, so two adjacent
    leaders exchange (equal initial) values instead of chasing each other.
    """
    snapshot = cs.a.copy()
    for i in topology.leaders:
        for j in topology.neighbor_lists[i]:
            cs.a[i, j] = snapshot[j, i]


def weight_hull(a0: float, theta0: float, a_min: float, a_max: float,
                gamma_upper: float) -> tuple[float, float]:
    """Interval that a and theta can never leave under the cascade."""
    lo = min(a0, theta0, a_min)
    hi = max(a0, theta0, gamma_upper * a_max)
    return lo, hi
