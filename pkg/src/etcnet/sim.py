"""Closed-loop fixed-step simulator.

``run_scenario`` is the single entry point: it draws seeded initial
conditions, integrates the network with explicit Euler at the configured
step, and returns the full state/weight/event traces.  Two engines exist:
``fast`` (numba kernel, the production path) and ``reference`` (plain
Python composed from the triggering/coupling module functions).  Both
produce bit-identical trajectories; the suite asserts this.
"""

from __future__ import annotations

from dataclasses import dataclass, field, replace

import numpy as np

from . import coupling as cp
from . import triggering as tg
from ._kernel import run_loop
from .graph import Topology
from .signals import CommandSpec, command_trace

MODES = ("setc", "petc")
EXCLUSION_CLEAR_MODES = ("phase-end", "eq3")


class ConfigError(ValueError):
    """A scenario configuration violates one of its invariants."""


class NumericalDivergenceError(RuntimeError):
    def __init__(self, scenario: str, step: int, t: float, x: np.ndarray):
        self.step = step
        self.t = t
        self.x = x.copy()
        super().__init__(
            f"scenario {scenario!r} diverged at step {step} (t={t:.6f}): x={x!r}"
        )


@dataclass(frozen=True)
class ScenarioConfig:
    """All knobs of a single run.

    ``mode`` selects constant weights (``setc``, using ``a_const``) or the
    adaptive weight machinery (``petc``, using ``a_min``/``a_max`` and the
    gamma/theta dynamics).
    """

    name: str
    topology: Topology
    mode: str = "petc"
    delta: float = 0.05
    epsilon: float = 0.08
    zeta1: float = 500.0
    zeta2: float = 500.0
    psi: float = 500.0
    gamma_lower: float = 0.3
    gamma_upper: float = 1.0
    a_min: float = 0.2
    a_max: float = 3.0
    a_const: float = 1.0
    a_init: float = 1.0
    theta_init: float = 1.0
    dt: float = 1e-3
    horizon: float = 90.0
    seed: int = 0
    command: CommandSpec = field(default_factory=CommandSpec)
    init_low: float = -1.0
    init_high: float = 1.0
    exclusion_tolerance: float = 1e-2
    exclusion_clear: str = "phase-end"

    def __post_init__(self):
        self.validate()

    def validate(self) -> None:
        if self.mode not in MODES:
            raise ConfigError(f"mode must be one of {MODES}, got {self.mode!r}")
        if self.exclusion_clear not in EXCLUSION_CLEAR_MODES:
            raise ConfigError(
                f"exclusion_clear must be one of {EXCLUSION_CLEAR_MODES}"
            )
        if self.dt <= 0:
            raise ConfigError("dt must be > 0")
        if self.horizon < 0:
            raise ConfigError("horizon must be >= 0")
        if self.delta <= 0 or self.epsilon <= 0:
            raise ConfigError("delta and epsilon must be > 0")
        if self.init_high < self.init_low:
            raise ConfigError("init_high must be >= init_low")
        if self.seed < 0:
            raise ConfigError("seed must be a non-negative integer")
        if self.mode == "setc":
            if self.a_const <= 0:
                raise ConfigError("a_const must be > 0")
            return
        if not (0 < self.a_min < self.a_max):
            raise ConfigError("need 0 < a_min < a_max")
        if not (0 < self.gamma_lower < self.gamma_upper):
            raise ConfigError("need 0 < gamma_lower < gamma_upper")
        for label, z in (("zeta1", self.zeta1), ("zeta2", self.zeta2), ("psi", self.psi)):
            if not (0 < z * self.dt <= 1):
                raise ConfigError(
                    f"euler stability: {label}*dt must be in (0, 1], got {z * self.dt}"
                )
        if self.exclusion_tolerance <= 0:
            raise ConfigError("exclusion_tolerance must be > 0")

    @property
    def n_samples(self) -> int:
        return int(round(self.horizon / self.dt)) + 1

    def with_seed(self, seed: int) -> "ScenarioConfig":
        return replace(self, seed=seed)


def initial_states(config: ScenarioConfig) -> np.ndarray:
    """Seeded initial conditions, one PCG64 substream per node.

    Stream layout: node i draws one uniform from
    PCG64(SeedSequence(entropy=seed, spawn_key=(i,))), so runs reproduce
    across platforms and are insensitive to node evaluation order.
    """
    n = config.topology.n
    x0 = np.empty(n)
    for i in range(n):
        ss = np.random.SeedSequence(entropy=config.seed, spawn_key=(i,))
        rng = np.random.Generator(np.random.PCG64(ss))
        x0[i] = rng.uniform(config.init_low, config.init_high)
    return x0


def control_input(
    node: int,
    topology: Topology,
    x_s: np.ndarray,
    a: np.ndarray,
    k_i: float,
    c: float,
) -> float:
    """u_i = -sum_j a_ij * ((x_si - x_sj) + k_i * (x_si - c)).

    The command term sits inside the sum, so it is scaled by each edge
    weight (leaders with large weights push harder toward the command).
    """
    s = 0.0
    for j in topology.neighbor_lists[node]:
        s += a[node, j] * ((x_s[node] - x_s[j]) + k_i * (x_s[node] - c))
    return -s


@dataclass
class SimState:
    """Mutable per-step state bundle used by the reference engine."""

    t: float
    x: np.ndarray
    store: tg.BroadcastStore
    log: tg.EventLog
    monitor: tg.MonitorState
    couplings: cp.CouplingState
    u: np.ndarray


def step(
    state: SimState, config: ScenarioConfig, c_k: float, dense: bool = False
) -> np.ndarray:
    """Advance one sample: evaluate triggers/flags/weights and compute
    controls at the current time, then integrate x by one Euler step.

    Returns the boolean fired mask for the sample.  Mirrors the numba
    kernel op for op.  ``dense`` refreshes every held state after the
    natural broadcasts, removing zero-order-hold staleness while leaving
    the event log and phi counters untouched (the continuous-limit
    oracle).
    """
    top = config.topology
    n = top.n
    cs = state.couplings
    mon = state.monitor
    petc = config.mode == "petc"

    fired = np.zeros(n, dtype=bool)
    for i in range(n):
        if tg.check_broadcast_trigger(state.x[i], state.store.x_s[i], config.delta):
            fired[i] = True
    # phi counting reads the pre-update monitoring flags, so fire all
    # broadcasts before re-evaluating any flag; under the eq3 rule an
    # exclusion only prunes the frequency comparison, never the counting
    count_block = None if config.exclusion_clear == "eq3" else cs.excluded
    for i in range(n):
        if fired[i]:
            tg.fire_broadcast(
                i, state.t, state.x, top, state.store, state.log, mon, count_block
            )
    if dense:
        state.store.x_s[:] = state.x
    clear_on_end = config.exclusion_clear == "phase-end"
    for i in range(n):
        tg.update_monitoring(
            i, top, state.store, config.delta, mon, cs.excluded, clear_on_end
        )
        tg.update_active_phase(i, top, state.store, config.epsilon, mon)
    if config.exclusion_clear == "eq3":
        for i in range(n):
            if not fired[i]:
                cs.excluded[i, :] = False

    if petc:
        rho = np.zeros((n, n))
        mask = np.zeros((n, n), dtype=bool)
        for i in cp.dynamic_nodes(top):
            cp.update_exclusions(
                i, top, cs, mon, config.gamma_lower, config.exclusion_tolerance
            )
            cp.update_gamma(
                i, top, cs, mon, config.psi, config.gamma_lower,
                config.gamma_upper, config.dt,
                freeze_excluded=clear_on_end,
            )
            for j in top.neighbor_lists[i]:
                rho[i, j] = cp.select_rho(
                    bool(mon.active[i]), cs.gamma[i, j], config.a_min, config.a_max
                )
                mask[i, j] = True
        cp.integrate_weights(cs, rho, mask, config.zeta1, config.zeta2, config.dt)
        cp.apply_single_neighbor_rule(top, cs)
        cp.apply_leader_mirror(top, cs)

    k_flags = top.leader_flags()
    for i in range(n):
        state.u[i] = control_input(i, top, state.store.x_s, cs.a, k_flags[i], c_k)
    return fired


@dataclass
class RunArtifacts:
    """Complete traces of one run.  Sample k is taken at t = k*dt, with
    the control u[k] applied over [t_k, t_k + dt)."""

    config: ScenarioConfig
    times: np.ndarray
    x: np.ndarray
    xs: np.ndarray
    u: np.ndarray
    c: np.ndarray
    cdot: np.ndarray
    fired: np.ndarray
    a_tr: np.ndarray
    theta_tr: np.ndarray
    gamma_tr: np.ndarray
    excl_tr: np.ndarray
    record_weights: bool

    @property
    def errors(self) -> np.ndarray:
        return self.x - self.c[:, None]

    @property
    def n_samples(self) -> int:
        return len(self.times)

    def weights_at(self, k: int) -> np.ndarray:
        return self.a_tr[k] if self.record_weights else self.a_tr[0]

    def event_arrays(self) -> tuple[np.ndarray, np.ndarray]:
        """(time, node) pairs for every logged event, in step order."""
        ks, nodes = np.nonzero(self.fired)
        return ks * self.config.dt, nodes

    def event_log(self) -> tg.EventLog:
        log = tg.EventLog()
        ts, nodes = self.event_arrays()
        for t, i in zip(ts, nodes):
            log.append(float(t), int(i))
        return log

    def total_events(self) -> int:
        return int(self.fired.sum())


def _initial_weight_matrix(config: ScenarioConfig) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    mask = config.topology.edge_mask()
    if config.mode == "setc":
        a = np.where(mask, config.a_const, 0.0)
        theta = a.copy()
        gamma = np.where(mask, config.gamma_upper, 0.0)
    else:
        a = np.where(mask, config.a_init, 0.0)
        theta = np.where(mask, config.theta_init, 0.0)
        gamma = np.where(mask, config.gamma_upper, 0.0)
    return a, theta, gamma


def run_scenario(
    config: ScenarioConfig,
    engine: str = "fast",
    dense_broadcast: bool = False,
    record_weights: bool | None = None,
) -> RunArtifacts:
    """Simulate t in [0, horizon] and return all traces.

    ``dense_broadcast`` refreshes every held state at every step, so no
    node ever acts on stale neighbor data (the continuous-limit oracle);
    weight traces default to full recording in petc mode and a single
    frame in setc mode.
    """
    if engine not in ("fast", "reference"):
        raise ValueError(f"unknown engine {engine!r}")
    top = config.topology
    n = top.n
    m = config.n_samples
    if record_weights is None:
        record_weights = config.mode == "petc"

    c, cdot = command_trace(config.command, config.dt, m)
    x0 = initial_states(config)
    a, theta, gamma = _initial_weight_matrix(config)

    x_tr = np.empty((m, n))
    xs_tr = np.empty((m, n))
    u_tr = np.empty((m, n))
    fired_tr = np.zeros((m, n), dtype=bool)
    wm = m if record_weights else 1
    a_tr = np.zeros((wm, n, n))
    th_tr = np.zeros((wm, n, n))
    ga_tr = np.zeros((wm, n, n))
    ex_tr = np.zeros((wm, n, n), dtype=bool)

    if engine == "fast":
        status = _run_fast(
            config, x0, c, a, theta, gamma, dense_broadcast,
            x_tr, xs_tr, u_tr, fired_tr, a_tr, th_tr, ga_tr, ex_tr,
            record_weights,
        )
    else:
        status = _run_reference(
            config, x0, c, a, theta, gamma, dense_broadcast,
            x_tr, xs_tr, u_tr, fired_tr, a_tr, th_tr, ga_tr, ex_tr,
            record_weights,
        )
    if status >= 0:
        raise NumericalDivergenceError(
            config.name, status, status * config.dt, x_tr[min(status, m - 1)]
        )
    if not record_weights:
        a_tr[0], th_tr[0], ga_tr[0] = a, theta, gamma

    return RunArtifacts(
        config=config,
        times=np.arange(m) * config.dt,
        x=x_tr,
        xs=xs_tr,
        u=u_tr,
        c=c,
        cdot=cdot,
        fired=fired_tr,
        a_tr=a_tr,
        theta_tr=th_tr,
        gamma_tr=ga_tr,
        excl_tr=ex_tr,
        record_weights=record_weights,
    )


def _padded_neighbors(top: Topology) -> tuple[np.ndarray, np.ndarray]:
    max_deg = max(top.degree(i) for i in range(top.n))
    neigh = np.full((top.n, max_deg), -1, dtype=np.int64)
    deg = np.zeros(top.n, dtype=np.int64)
    for i in range(top.n):
        nbrs = top.neighbor_lists[i]
        deg[i] = len(nbrs)
        neigh[i, : len(nbrs)] = nbrs
    return neigh, deg


def _run_fast(
    config, x0, c, a, theta, gamma, dense_broadcast,
    x_tr, xs_tr, u_tr, fired_tr, a_tr, th_tr, ga_tr, ex_tr, record_weights,
) -> int:
    top = config.topology
    neigh, deg = _padded_neighbors(top)
    leader = top.leader_flags()
    dyn = np.zeros(top.n, dtype=np.bool_)
    dyn[cp.dynamic_nodes(top)] = True
    return int(
        run_loop(
            x0.copy(), c, config.delta, config.epsilon, config.dt, config.n_samples,
            neigh, deg, leader, dyn, config.mode == "petc",
            a, theta, gamma,
            config.zeta1, config.zeta2, config.psi,
            config.gamma_lower, config.gamma_upper, config.a_min, config.a_max,
            config.exclusion_tolerance, config.exclusion_clear == "eq3",
            dense_broadcast,
            x_tr, xs_tr, u_tr, fired_tr, a_tr, th_tr, ga_tr, ex_tr,
            record_weights,
        )
    )


def _run_reference(
    config, x0, c, a, theta, gamma, dense_broadcast,
    x_tr, xs_tr, u_tr, fired_tr, a_tr, th_tr, ga_tr, ex_tr, record_weights,
) -> int:
    top = config.topology
    n = top.n
    m = config.n_samples
    state = SimState(
        t=0.0,
        x=x0.copy(),
        store=tg.BroadcastStore.initial(x0),
        log=tg.EventLog(),
        monitor=tg.MonitorState.initial(n),
        couplings=cp.CouplingState(a=a, theta=theta, gamma=gamma,
                                   excluded=np.zeros((n, n), dtype=bool)),
        u=np.zeros(n),
    )
    for k in range(m):
        state.t = k * config.dt
        fired = step(state, config, c[k], dense=dense_broadcast)
        fired_tr[k] = fired
        x_tr[k] = state.x
        xs_tr[k] = state.store.x_s
        u_tr[k] = state.u
        if record_weights:
            a_tr[k] = state.couplings.a
            th_tr[k] = state.couplings.theta
            ga_tr[k] = state.couplings.gamma
            ex_tr[k] = state.couplings.excluded
        if k < m - 1:
            state.x = state.x + config.dt * state.u
            if not np.all(np.isfinite(state.x)) or np.any(np.abs(state.x) > 1e9):
                return k
    return -1
