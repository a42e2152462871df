"""Closed-loop simulator: configuration, single steps, engine parity."""

import numpy as np
import pytest

from etcnet import coupling as cp
from etcnet import triggering as tg
from etcnet.graph import build_topology
from etcnet.signals import CommandSpec
from etcnet.sim import (
    ConfigError,
    NumericalDivergenceError,
    ScenarioConfig,
    SimState,
    control_input,
    initial_states,
    run_scenario,
    step,
)
from conftest import make_config


class TestConfigValidation:
    def test_bad_mode(self, path4):
        with pytest.raises(ConfigError):
            make_config(path4, mode="adaptive")

    def test_bad_exclusion_clear(self, path4):
        with pytest.raises(ConfigError):
            make_config(path4, exclusion_clear="never")

    def test_nonpositive_dt(self, path4):
        with pytest.raises(ConfigError):
            make_config(path4, dt=0.0)

    def test_negative_horizon(self, path4):
        with pytest.raises(ConfigError):
            make_config(path4, horizon=-1.0)

    def test_nonpositive_delta(self, path4):
        with pytest.raises(ConfigError):
            make_config(path4, delta=0.0)

    def test_inverted_init_range(self, path4):
        with pytest.raises(ConfigError):
            make_config(path4, init_low=1.0, init_high=-1.0)

    def test_negative_seed(self, path4):
        with pytest.raises(ConfigError):
            make_config(path4, seed=-1)

    def test_setc_needs_positive_gain(self, path4):
        with pytest.raises(ConfigError):
            make_config(path4, mode="setc", a_const=0.0)

    def test_weight_bounds_ordered(self, path4):
        with pytest.raises(ConfigError):
            make_config(path4, a_min=3.0, a_max=3.0)

    def test_gamma_bounds_ordered(self, path4):
        with pytest.raises(ConfigError):
            make_config(path4, gamma_lower=1.0, gamma_upper=0.3)

    def test_euler_stability_guard(self, path4):
        with pytest.raises(ConfigError, match="euler stability"):
            make_config(path4, zeta1=5000.0, dt=1e-3)
        with pytest.raises(ConfigError, match="euler stability"):
            make_config(path4, psi=2000.0, dt=1e-3)

    def test_n_samples(self, path4):
        assert make_config(path4, horizon=0.0).n_samples == 1
        assert make_config(path4, horizon=1.0, dt=1e-3).n_samples == 1001

    def test_with_seed(self, path4):
        cfg = make_config(path4, seed=0)
        assert cfg.with_seed(7).seed == 7


class TestInitialStates:
    def test_deterministic_and_bounded(self, path4):
        cfg = make_config(path4, seed=3, init_low=-1.0, init_high=1.0)
        x0 = initial_states(cfg)
        assert np.array_equal(x0, initial_states(cfg))
        assert np.all(x0 >= -1.0) and np.all(x0 <= 1.0)

    def test_seed_changes_draw(self, path4):
        a = initial_states(make_config(path4, seed=0))
        b = initial_states(make_config(path4, seed=1))
        assert not np.array_equal(a, b)

    def test_per_node_streams_independent_of_n(self, path4):
        # node i's draw comes from its own substream, so adding nodes
        # does not disturb existing initial conditions
        six = build_topology(6, [(i, i + 1) for i in range(5)], [0])
        a = initial_states(make_config(path4, seed=5))
        b = initial_states(make_config(six, seed=5))
        assert np.array_equal(a, b[:4])


class TestControlInput:
    def test_leader_tracks_command(self, pair2):
        x_s = np.array([1.0, 0.0])
        a = pair2.edge_mask().astype(float)
        # -1 * ((1 - 0) + 1 * (1 - 0)) = -2
        assert control_input(0, pair2, x_s, a, 1.0, 0.0) == -2.0

    def test_follower_ignores_command(self, pair2):
        x_s = np.array([1.0, 0.0])
        a = pair2.edge_mask().astype(float)
        assert control_input(1, pair2, x_s, a, 0.0, 99.0) == 1.0

    def test_zero_at_consensus(self, path4):
        x_s = np.full(4, 0.8)
        a = path4.edge_mask().astype(float)
        for i in range(4):
            k = 1.0 if path4.is_leader(i) else 0.0
            assert control_input(i, path4, x_s, a, k, 0.8) == 0.0

    def test_weights_scale_command_term(self, pair2):
        x_s = np.array([1.0, 0.0])
        a = pair2.edge_mask().astype(float) * 3.0
        assert control_input(0, pair2, x_s, a, 1.0, 0.0) == -6.0


class TestSingleStep:
    def _state(self, top, x0):
        n = top.n
        return SimState(
            t=0.0,
            x=x0.copy(),
            store=tg.BroadcastStore.initial(x0),
            log=tg.EventLog(),
            monitor=tg.MonitorState.initial(n),
            couplings=cp.init_coupling(top),
            u=np.zeros(n),
        )

    def test_euler_update(self, pair2):
        cfg = make_config(pair2, mode="setc", a_const=1.0, delta=2.0, epsilon=3.0)
        state = self._state(pair2, np.array([1.0, 0.0]))
        fired = step(state, cfg, 0.0)
        assert not fired.any()  # held gaps are zero at t=0
        assert state.u[0] == -2.0
        assert state.u[1] == 1.0
        state.x = state.x + cfg.dt * state.u
        assert state.x == pytest.approx([0.998, 0.001])

    def test_trigger_refreshes_held_state(self, pair2):
        cfg = make_config(pair2, mode="setc", a_const=1.0, delta=0.05)
        state = self._state(pair2, np.array([1.0, 0.0]))
        state.x[1] = 0.06  # drifted past delta since the initial broadcast
        fired = step(state, cfg, 0.0)
        assert fired[1] and not fired[0]
        assert state.store.x_s[1] == 0.06
        assert state.log.count(1) == 1

    def test_boundary_does_not_fire(self, pair2):
        cfg = make_config(pair2, mode="setc", a_const=1.0, delta=0.05)
        state = self._state(pair2, np.array([1.0, 0.0]))
        state.x[1] = 0.05
        fired = step(state, cfg, 0.0)
        assert not fired[1]
        assert state.store.x_s[1] == 0.0


class TestRunScenario:
    def test_unknown_engine(self, path4):
        with pytest.raises(ValueError):
            run_scenario(make_config(path4, horizon=0.0), engine="warp")

    def test_zero_horizon_single_sample(self, path4):
        run = run_scenario(make_config(path4, horizon=0.0))
        assert run.n_samples == 1
        assert np.array_equal(run.x[0], initial_states(run.config))

    def test_determinism(self, path4):
        cfg = make_config(path4, horizon=1.0, seed=4)
        r1 = run_scenario(cfg)
        r2 = run_scenario(cfg)
        assert np.array_equal(r1.x, r2.x)
        assert np.array_equal(r1.u, r2.u)
        assert np.array_equal(r1.fired, r2.fired)
        assert np.array_equal(r1.a_tr, r2.a_tr)

    @pytest.mark.parametrize("clear", ["phase-end", "eq3"])
    @pytest.mark.parametrize("dense", [False, True])
    def test_engines_bit_identical(self, path4, clear, dense):
        cfg = make_config(path4, horizon=2.0, seed=1, exclusion_clear=clear)
        fast = run_scenario(cfg, engine="fast", dense_broadcast=dense)
        ref = run_scenario(cfg, engine="reference", dense_broadcast=dense)
        assert np.array_equal(fast.x, ref.x)
        assert np.array_equal(fast.xs, ref.xs)
        assert np.array_equal(fast.u, ref.u)
        assert np.array_equal(fast.fired, ref.fired)
        assert np.array_equal(fast.a_tr, ref.a_tr)
        assert np.array_equal(fast.theta_tr, ref.theta_tr)
        assert np.array_equal(fast.gamma_tr, ref.gamma_tr)
        assert np.array_equal(fast.excl_tr, ref.excl_tr)

    def test_engines_bit_identical_setc(self, path4):
        cfg = make_config(path4, mode="setc", a_const=1.0, horizon=2.0, seed=2)
        fast = run_scenario(cfg, engine="fast")
        ref = run_scenario(cfg, engine="reference")
        assert np.array_equal(fast.x, ref.x)
        assert np.array_equal(fast.u, ref.u)
        assert np.array_equal(fast.fired, ref.fired)

    def test_held_state_semantics(self, path4):
        run = run_scenario(make_config(path4, horizon=2.0, seed=6))
        fired = run.fired
        # a firing step publishes the current state; otherwise the held
        # value carries over unchanged
        assert np.array_equal(run.xs[fired], run.x[fired])
        carried = ~fired[1:]
        assert np.array_equal(run.xs[1:][carried], run.xs[:-1][carried])

    def test_dense_broadcast_removes_hold(self, path4):
        run = run_scenario(make_config(path4, horizon=0.5, seed=6),
                           dense_broadcast=True)
        assert np.array_equal(run.xs, run.x)

    def test_event_gaps_at_least_dt(self, path4):
        run = run_scenario(make_config(path4, horizon=2.0, seed=7))
        gaps = tg.min_inter_event_gap(run.event_log(), 4)
        assert np.all(gaps >= run.config.dt - 1e-12)

    def test_setc_weights_constant(self, path4):
        cfg = make_config(path4, mode="setc", a_const=5.0, horizon=0.5)
        run = run_scenario(cfg)
        assert not run.record_weights
        assert np.array_equal(
            run.a_tr[0], np.where(path4.edge_mask(), 5.0, 0.0)
        )

    def test_divergence_raises(self, path4):
        cfg = make_config(path4, mode="setc", a_const=10000.0, horizon=1.0)
        with pytest.raises(NumericalDivergenceError) as err:
            run_scenario(cfg)
        assert err.value.step >= 0

    def test_event_arrays_match_fired(self, path4):
        run = run_scenario(make_config(path4, horizon=1.0, seed=9))
        times, nodes = run.event_arrays()
        assert len(times) == run.total_events()
        for t, i in zip(times, nodes):
            assert run.fired[int(round(t / run.config.dt)), i]


class TestCommandInLoop:
    def test_constant_command_reaches_consensus(self, path4):
        cfg = make_config(
            path4,
            mode="setc",
            a_const=1.0,
            horizon=60.0,
            command=CommandSpec(kind="constant", offset=0.5),
            seed=0,
        )
        run = run_scenario(cfg)
        assert np.all(np.abs(run.x[-1] - 0.5) <= 3 * cfg.delta)
