"""Topology construction and system matrix assembly."""

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from etcnet.graph import (
    DisconnectedError,
    GraphError,
    InconsistentWeightsError,
    IndexOutOfRangeError,
    NoLeaderError,
    SelfLoopError,
    SystemMatrix,
    assemble_system_matrix,
    build_topology,
    spectral_monitor,
    spectral_monitor_from_weights,
    validate_weights,
)


class TestBuildTopology:
    def test_path4(self, path4):
        assert path4.n == 4
        assert path4.edges == ((0, 1), (1, 2), (2, 3))
        assert path4.leaders == (0,)
        assert path4.neighbor_lists == ((1,), (0, 2), (1, 3), (2,))
        assert path4.degree(0) == 1 and path4.degree(1) == 2
        assert path4.is_leader(0) and not path4.is_leader(2)

    def test_edge_order_and_duplicates_collapse(self):
        t = build_topology(3, [(1, 0), (0, 1), (2, 1)], [0])
        assert t.edges == ((0, 1), (1, 2))

    def test_leader_flags(self, path4):
        assert np.array_equal(path4.leader_flags(), [1.0, 0.0, 0.0, 0.0])

    def test_edge_mask_symmetric(self, path4):
        m = path4.edge_mask()
        assert np.array_equal(m, m.T)
        assert not m.diagonal().any()
        assert m.sum() == 6

    def test_self_loop_rejected(self):
        with pytest.raises(SelfLoopError):
            build_topology(2, [(0, 0), (0, 1)], [0])

    def test_disconnected_rejected(self):
        with pytest.raises(DisconnectedError):
            build_topology(4, [(0, 1), (2, 3)], [0])

    def test_no_leader_rejected(self):
        with pytest.raises(NoLeaderError):
            build_topology(2, [(0, 1)], [])

    def test_out_of_range_edge_rejected(self):
        with pytest.raises(IndexOutOfRangeError):
            build_topology(2, [(0, 5)], [0])

    def test_out_of_range_leader_rejected(self):
        with pytest.raises(IndexOutOfRangeError):
            build_topology(2, [(0, 1)], [7])

    def test_empty_graph_rejected(self):
        with pytest.raises(GraphError):
            build_topology(0, [], [])


class TestSystemMatrix:
    def test_path4_unit_weights(self, path4):
        a = path4.edge_mask().astype(float)
        sysm = assemble_system_matrix(path4, a)
        assert np.array_equal(np.diag(sysm.D), [1.0, 2.0, 2.0, 1.0])
        expected_l = np.array(
            [
                [1.0, -1.0, 0.0, 0.0],
                [-1.0, 2.0, -1.0, 0.0],
                [0.0, -1.0, 2.0, -1.0],
                [0.0, 0.0, -1.0, 1.0],
            ]
        )
        assert np.array_equal(sysm.L, expected_l)
        assert np.array_equal(np.diag(sysm.K), [1.0, 0.0, 0.0, 0.0])
        # leader row gains its degree on the diagonal: F[0,0] = 1 + 1
        expected_f = expected_l.copy()
        expected_f[0, 0] = 2.0
        assert np.array_equal(sysm.F, expected_f)

    def test_laplacian_rows_sum_to_zero(self, path4):
        rng = np.random.default_rng(3)
        a = np.where(path4.edge_mask(), rng.uniform(0.1, 5.0, (4, 4)), 0.0)
        sysm = assemble_system_matrix(path4, a)
        assert np.allclose(sysm.L.sum(axis=1), 0.0, atol=1e-12)

    def test_asymmetric_weights_allowed(self, path4):
        a = path4.edge_mask().astype(float)
        a[1, 0] = 2.5
        sysm = assemble_system_matrix(path4, a)
        assert sysm.L[1, 0] == -2.5
        assert sysm.D[1, 1] == 3.5

    def test_off_edge_weight_rejected(self, path4):
        a = path4.edge_mask().astype(float)
        a[0, 3] = 1.0
        with pytest.raises(InconsistentWeightsError):
            validate_weights(path4, a)

    def test_negative_weight_rejected(self, path4):
        a = path4.edge_mask().astype(float)
        a[0, 1] = -1.0
        with pytest.raises(InconsistentWeightsError):
            validate_weights(path4, a)

    def test_nonfinite_weight_rejected(self, path4):
        a = path4.edge_mask().astype(float)
        a[0, 1] = np.nan
        with pytest.raises(InconsistentWeightsError):
            validate_weights(path4, a)

    def test_wrong_shape_rejected(self, path4):
        with pytest.raises(InconsistentWeightsError):
            validate_weights(path4, np.ones((3, 3)))


class TestSpectralMonitor:
    def test_path4_stable(self, path4):
        a = path4.edge_mask().astype(float)
        val = spectral_monitor_from_weights(path4, a)
        assert val < 0

    def test_scales_linearly_with_weights(self, path4):
        a = path4.edge_mask().astype(float)
        v1 = spectral_monitor_from_weights(path4, a)
        v5 = spectral_monitor_from_weights(path4, 5.0 * a)
        assert v5 == pytest.approx(5.0 * v1, rel=1e-9)

    def test_leaderless_matrix_is_marginal(self, path4):
        # without the leader term the row-sum Laplacian has a zero mode
        a = path4.edge_mask().astype(float)
        sysm = assemble_system_matrix(path4, a)
        bare = SystemMatrix(F=sysm.L, L=sysm.L, D=sysm.D, K=np.zeros((4, 4)))
        assert spectral_monitor(bare) == pytest.approx(0.0, abs=1e-9)


@st.composite
def weighted_path(draw):
    n = draw(st.integers(min_value=2, max_value=7))
    leader = draw(st.integers(min_value=0, max_value=n - 1))
    top = build_topology(n, [(i, i + 1) for i in range(n - 1)], [leader])
    vals = draw(
        st.lists(
            st.floats(min_value=0.01, max_value=10.0),
            min_size=2 * (n - 1),
            max_size=2 * (n - 1),
        )
    )
    a = np.zeros((n, n))
    for k, (i, j) in enumerate(top.edges):
        a[i, j] = vals[2 * k]
        a[j, i] = vals[2 * k + 1]
    return top, a


@given(weighted_path())
@settings(max_examples=60, deadline=None)
def test_assembly_identities(tw):
    top, a = tw
    sysm = assemble_system_matrix(top, a)
    assert np.allclose(sysm.L.sum(axis=1), 0.0, atol=1e-9)
    assert np.array_equal(sysm.D, np.diag(a.sum(axis=1)))
    assert np.allclose(sysm.F, sysm.L + sysm.K @ sysm.D)
    # one leader with positive weights keeps the spectrum strictly stable
    assert spectral_monitor(sysm) < 0
