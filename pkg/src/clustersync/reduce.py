"""Quotient networks: one node per cluster, valid on the cluster synchronization manifold."""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .graph import ClusteredNetwork, check_cluster_input_equivalence
from .simulate import DEFAULT_DT, CoupledSystem, integrate, integrate_system, manifold_state


class QuotientError(ValueError):
    """The cluster-input-equivalence condition fails, so no quotient exists."""

    def __init__(self, report):
        bad = ", ".join(f"({pc.target},{pc.source}) nodes {list(pc.offending)}" for pc in report.failures())
        super().__init__(f"cluster-input-equivalence fails for pairs {bad}")
        self.report = report


@dataclass(frozen=True)
class QuotientNetwork:
    """``X_r' = F_r(X_r) + sum_s eta[r, s] D (X_s - X_r)``.

    ``eta[r, s]`` is the weight each node of cluster ``r`` receives from
    cluster ``s``; it need not be symmetric.
    """

    eta: tuple
    cluster_params: tuple
    diffusion: tuple
    cluster_names: tuple

    def __post_init__(self):
        eta = np.asarray(self.eta, dtype=np.float64)
        K = len(self.cluster_params)
        if eta.shape != (K, K):
            raise ValueError(f"eta must be {K}x{K}")
        if np.any(eta < 0.0) or not np.all(np.isfinite(eta)):
            raise ValueError("eta entries must be finite and nonnegative")
        eta = eta.copy()
        np.fill_diagonal(eta, 0.0)
        object.__setattr__(self, "eta", tuple(tuple(float(v) for v in row) for row in eta))
        object.__setattr__(self, "cluster_params", tuple(self.cluster_params))
        object.__setattr__(self, "diffusion", tuple(float(d) for d in self.diffusion))
        object.__setattr__(self, "cluster_names", tuple(self.cluster_names))

    @property
    def n_clusters(self):
        return len(self.cluster_params)

    @property
    def state_dim(self):
        return len(self.diffusion)

    @property
    def eta_matrix(self):
        return np.array(self.eta)

    def is_symmetric(self):
        return self.eta_matrix.tolist() == self.eta_matrix.T.tolist()

    def adjacency_csr(self):
        eta = self.eta_matrix
        indptr = [0]
        indices, weights = [], []
        for r in range(self.n_clusters):
            for s in range(self.n_clusters):
                if s != r and eta[r, s] > 0.0:
                    indices.append(s)
                    weights.append(eta[r, s])
            indptr.append(len(indices))
        return (np.array(indptr, dtype=np.int64), np.array(indices, dtype=np.int64),
                np.array(weights, dtype=np.float64))

    def system(self):
        return CoupledSystem(self.n_clusters, self.state_dim,
                             tuple((r, r + 1) for r in range(self.n_clusters)),
                             self.cluster_params, self.adjacency_csr(), self.diffusion)

    def as_network(self):
        """Singleton-cluster network; only possible for symmetric ``eta``."""
        if not self.is_symmetric():
            raise ValueError("an asymmetric quotient is not an undirected network")
        eta = self.eta_matrix
        edges = [(r, s, eta[r, s]) for r in range(self.n_clusters)
                 for s in range(r + 1, self.n_clusters) if eta[r, s] > 0.0]
        return ClusteredNetwork(self.n_clusters, edges, [[r] for r in range(self.n_clusters)],
                                self.cluster_params, self.diffusion, self.cluster_names)


def build_quotient(net, cie=None, tol=1e-9):
    """Quotient of a CIE-passing network. A quotient maps to an equal copy of itself."""
    if isinstance(net, QuotientNetwork):
        return QuotientNetwork(net.eta, net.cluster_params, net.diffusion, net.cluster_names)
    cie = check_cluster_input_equivalence(net, tol) if cie is None else cie
    if not cie.passed:
        raise QuotientError(cie)
    return QuotientNetwork(cie.eta, net.cluster_params, net.diffusion, net.cluster_names)


def simulate_quotient(q, ic, t_end, dt=DEFAULT_DT, save_every=1, backend=None, metadata=None):
    """Integrate the quotient from the stacked state ``ic`` (``K * n`` entries)."""
    return integrate_system(q.system(), ic, t_end, dt, save_every, backend, metadata)


@dataclass(frozen=True)
class EquivalenceReport:
    max_deviation: float
    max_deviation_time: float
    t_end: float
    dt: float
    within_cluster_spread: float

    def as_dict(self):
        return {k: getattr(self, k) for k in
                ("max_deviation", "max_deviation_time", "t_end", "dt", "within_cluster_spread")}


def compare_with_quotient(net, cluster_states, t_end, dt=DEFAULT_DT, save_every=1, backend=None, cie=None):
    """Run the full network from the manifold point given by ``cluster_states``
    and the quotient from the same cluster values; report the largest
    node-wise absolute difference.
    """
    q = build_quotient(net, cie)
    cs = np.asarray(cluster_states, dtype=np.float64).reshape(net.n_clusters, net.state_dim)
    full = integrate(net, None, manifold_state(net, cs), t_end, dt, save_every, backend)
    red = simulate_quotient(q, cs.reshape(-1), t_end, dt, save_every, backend)
    lifted = np.repeat(red.node_states(), net.cluster_sizes, axis=1)
    diff = np.abs(full.node_states() - lifted).max(axis=(1, 2))
    spread = 0.0
    X = full.node_states()
    for s, e in net.cluster_ranges:
        spread = max(spread, float(np.abs(X[:, s:e, :] - X[:, s:s + 1, :]).max()))
    k = int(np.argmax(diff))
    return EquivalenceReport(float(diff[k]), float(full.times[k]), t_end, dt, spread)
