"""Event conditions and broadcast bookkeeping.

Three thresholds drive the closed loop:

* broadcast rule: node i re-broadcasts when |x_i - x_si| exceeds delta
  (the boundary itself does not trigger);
* monitoring rule: node i counts neighbor broadcasts (phi) while some
  held-state gap |x_si - x_sj| exceeds delta;
* active rule: node i raises its edge weights while some held-state gap
  exceeds epsilon, and decays them otherwise.

The monitoring and active rules read only the held broadcast values,
never the continuous states.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .graph import Topology


@dataclass
class BroadcastStore:
    """Zero-order-hold broadcast values and last event times."""

    x_s: np.ndarray
    last_event_time: np.ndarray

    @classmethod
    def initial(cls, x0: np.ndarray) -> "BroadcastStore":
        # every node announces its initial state once at t=0; this
        # initializing broadcast is not logged as an event
        return cls(x_s=x0.copy(), last_event_time=np.zeros(len(x0)))


@dataclass
class EventLog:
    """Append-only (time, node) log of broadcast events."""

    times: list[float] = field(default_factory=list)
    nodes: list[int] = field(default_factory=list)

    def append(self, t: float, node: int) -> None:
        if self.times and t < self.times[-1]:
            raise ValueError("event times must be non-decreasing")
        self.times.append(t)
        self.nodes.append(node)

    def count(self, node: int | None = None) -> int:
        if node is None:
            return len(self.nodes)
        return sum(1 for v in self.nodes if v == node)

    def node_times(self, node: int) -> list[float]:
        return [t for t, v in zip(self.times, self.nodes) if v == node]


@dataclass
class MonitorState:
    """Per-node monitoring/active flags and phi broadcast counters.

    ``phi[i, j]`` counts broadcasts of neighbor j received while node i
    was monitoring (and j not excluded from counting).
    """

    monitoring: np.ndarray
    phi: np.ndarray
    active: np.ndarray

    @classmethod
    def initial(cls, n: int) -> "MonitorState":
        return cls(
            monitoring=np.zeros(n, dtype=bool),
            phi=np.zeros((n, n), dtype=np.int64),
            active=np.zeros(n, dtype=bool),
        )


def check_broadcast_trigger(x_i: float, x_si: float, delta: float) -> bool:
    """True iff the broadcast rule is violated (strict: |dev| > delta)."""
    return abs(x_i - x_si) > delta


def fire_broadcast(
    node: int,
    t: float,
    x: np.ndarray,
    topology: Topology,
    store: BroadcastStore,
    log: EventLog,
    monitor: MonitorState,
    excluded: np.ndarray | None = None,
) -> None:
    """Broadcast node's current state and update neighbor phi counters.

    Counting uses the neighbors' monitoring flags as they stand when the
    event fires; excluded directions are skipped entirely.
    """
    store.x_s[node] = x[node]
    store.last_event_time[node] = t
    log.append(t, node)
    for nb in topology.neighbor_lists[node]:
        if monitor.monitoring[nb] and (excluded is None or not excluded[nb, node]):
            monitor.phi[nb, node] += 1


def update_monitoring(
    node: int,
    topology: Topology,
    store: BroadcastStore,
    delta: float,
    monitor: MonitorState,
    excluded: np.ndarray | None = None,
    clear_exclusions_on_end: bool = True,
) -> None:
    """Re-evaluate the monitoring flag; reset counters when it drops.

    On the true -> false transition all phi counters of this node reset to
    zero and (by default) its exclusion flags clear, ending the phase.
    """
    violated = any(
        abs(store.x_s[node] - store.x_s[nb]) > delta
        for nb in topology.neighbor_lists[node]
    )
    if monitor.monitoring[node] and not violated:
        monitor.phi[node, :] = 0
        if clear_exclusions_on_end and excluded is not None:
            excluded[node, :] = False
    monitor.monitoring[node] = violated


def update_active_phase(
    node: int,
    topology: Topology,
    store: BroadcastStore,
    epsilon: float,
    monitor: MonitorState,
) -> None:
    monitor.active[node] = any(
        abs(store.x_s[node] - store.x_s[nb]) > epsilon
        for nb in topology.neighbor_lists[node]
    )


def min_inter_event_gap(log: EventLog, n: int) -> np.ndarray:
    """Per-node minimum gap between consecutive events; +inf below 2 events."""
    gaps = np.full(n, math.inf)
    for i in range(n):
        ts = log.node_times(i)
        if len(ts) >= 2:
            gaps[i] = min(b - a for a, b in zip(ts, ts[1:]))
    return gaps


def gap_stats(log: EventLog, n: int) -> list[tuple[int, int, float, float]]:
    """Rows of (node, events, min_gap_s, mean_gap_s) for export."""
    rows = []
    for i in range(n):
        ts = log.node_times(i)
        if len(ts) >= 2:
            diffs = [b - a for a, b in zip(ts, ts[1:])]
            rows.append((i, len(ts), min(diffs), sum(diffs) / len(diffs)))
        else:
            rows.append((i, len(ts), math.inf, math.inf))
    return rows
