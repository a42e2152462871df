"""Network topology and the weighted-graph matrix algebra.

The communication graph has a fixed undirected edge set; only the edge
weights vary over time.  Weights are stored as a general nonnegative
matrix, so ``a[i, j]`` and ``a[j, i]`` may differ even though the edge
itself is bidirectional.  The Laplacian is built from row sums.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np


class GraphError(ValueError):
    """Base class for topology construction failures."""


class SelfLoopError(GraphError):
    pass


class DisconnectedError(GraphError):
    pass


class NoLeaderError(GraphError):
    pass


class IndexOutOfRangeError(GraphError):
    pass


class InconsistentWeightsError(ValueError):
    """A positive weight was placed on a non-edge (or on the diagonal)."""


class EigenFailureError(RuntimeError):
    """The dense eigensolver did not converge; the run must abort."""


@dataclass(frozen=True)
class Topology:
    """Immutable undirected graph with per-node leader flags.

    ``edges`` holds unordered pairs as sorted 0-based tuples.
    ``neighbor_lists[i]`` is the sorted tuple of neighbors of node i.
    """

    n: int
    edges: tuple[tuple[int, int], ...]
    leaders: tuple[int, ...]
    neighbor_lists: tuple[tuple[int, ...], ...]

    def is_leader(self, i: int) -> bool:
        return i in self.leaders

    def degree(self, i: int) -> int:
        return len(self.neighbor_lists[i])

    def leader_flags(self) -> np.ndarray:
        k = np.zeros(self.n)
        k[list(self.leaders)] = 1.0
        return k

    def edge_mask(self) -> np.ndarray:
        """Boolean n x n mask, True where an undirected edge exists."""
        m = np.zeros((self.n, self.n), dtype=bool)
        for i, j in self.edges:
            m[i, j] = m[j, i] = True
        return m


def _union_find_connected(n: int, edges: list[tuple[int, int]]) -> bool:
    parent = list(range(n))

    def find(a: int) -> int:
        while parent[a] != a:
            parent[a] = parent[parent[a]]
            a = parent[a]
        return a

    for i, j in edges:
        parent[find(i)] = find(j)
    return len({find(i) for i in range(n)}) == 1


def build_topology(n: int, edges, leaders) -> Topology:
    """Validate and freeze a topology.

    Rejects self-loops, out-of-range indices, empty leader sets, and
    disconnected graphs.  Edge pairs may be given in any order; duplicates
    collapse.
    """
    if n < 1:
        raise GraphError(f"need at least one node, got n={n}")
    canon = set()
    for i, j in edges:
        if not (0 <= i < n and 0 <= j < n):
            raise IndexOutOfRangeError(f"edge ({i},{j}) out of range for n={n}")
        if i == j:
            raise SelfLoopError(f"self-loop on node {i} not allowed")
        canon.add((min(i, j), max(i, j)))
    leaders = tuple(sorted(set(leaders)))
    if not leaders:
        raise NoLeaderError("at least one leader node is required")
    for i in leaders:
        if not (0 <= i < n):
            raise IndexOutOfRangeError(f"leader index {i} out of range for n={n}")
    edge_list = sorted(canon)
    if not _union_find_connected(n, edge_list):
        raise DisconnectedError("graph is not connected")
    nbrs: list[list[int]] = [[] for _ in range(n)]
    for i, j in edge_list:
        nbrs[i].append(j)
        nbrs[j].append(i)
    return Topology(
        n=n,
        edges=tuple(edge_list),
        leaders=leaders,
        neighbor_lists=tuple(tuple(sorted(x)) for x in nbrs),
    )


def validate_weights(topology: Topology, a: np.ndarray) -> None:
    """Check that a weight matrix is consistent with the topology."""
    n = topology.n
    if a.shape != (n, n):
        raise InconsistentWeightsError(f"weight matrix shape {a.shape} != ({n},{n})")
    if not np.all(np.isfinite(a)):
        raise InconsistentWeightsError("weight matrix has non-finite entries")
    if np.any(a < 0):
        raise InconsistentWeightsError("weight matrix has negative entries")
    off_edge = a * ~topology.edge_mask()
    if np.any(off_edge != 0):
        i, j = np.argwhere(off_edge != 0)[0]
        raise InconsistentWeightsError(f"positive weight on non-edge ({i},{j})")


@dataclass(frozen=True)
class SystemMatrix:
    """Closed-loop system matrix F = L + K*D with its factors."""

    F: np.ndarray
    L: np.ndarray
    D: np.ndarray
    K: np.ndarray


def assemble_system_matrix(topology: Topology, a: np.ndarray) -> SystemMatrix:
    """Build L (row-sum Laplacian), D, K, and F = L + K*D from weights."""
    validate_weights(topology, a)
    d = a.sum(axis=1)
    D = np.diag(d)
    L = D - a
    K = np.diag(topology.leader_flags())
    F = L + K @ D
    return SystemMatrix(F=F, L=L, D=D, K=K)


def spectral_monitor(system: SystemMatrix) -> float:
    """Max real part over the eigenvalues of -F.

    Stability of the unforced error dynamics requires this to be < 0 at
    every sampled instant; the caller asserts the sign.
    """
    try:
        lam = np.linalg.eigvals(-system.F)
    except np.linalg.LinAlgError as exc:
        raise EigenFailureError(f"eigensolve failed: {exc}") from exc
    return float(np.max(lam.real))


def spectral_monitor_from_weights(topology: Topology, a: np.ndarray) -> float:
    return spectral_monitor(assemble_system_matrix(topology, a))
