"""Fixed-step RK4 integration, cluster errors and the exponential envelope check."""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import NamedTuple

import numpy as np

from . import _backend
from .dynamics import FNParams, _edge_accumulate
from .measures import WeightMatrix

DEFAULT_DT = 0.01


class IntegrationError(RuntimeError):
    """Non-finite state; ``t_blowup`` is the first offending time."""

    def __init__(self, t_blowup):
        super().__init__(f"non-finite state at t = {t_blowup:.17g}")
        self.t_blowup = t_blowup


class CoupledSystem(NamedTuple):
    """Nodes grouped into ranges sharing a model, coupled through an incoming CSR."""

    n_nodes: int
    state_dim: int
    ranges: tuple
    models: tuple
    csr: tuple
    diffusion: tuple

    @classmethod
    def from_network(cls, net):
        return cls(net.n_nodes, net.state_dim, net.cluster_ranges, net.cluster_params,
                   net.adjacency_csr, net.diffusion)

    def rhs(self, X, t=0.0):
        nodes = X.reshape(self.n_nodes, self.state_dim)
        out = np.empty_like(nodes)
        for (s, e), model in zip(self.ranges, self.models):
            out[s:e] = model.vector_field(nodes[s:e], t)
        out += _edge_accumulate(*self.csr, nodes) * np.asarray(self.diffusion)
        return out.reshape(-1)

    def is_fn(self):
        return self.state_dim == 2 and all(isinstance(m, FNParams) for m in self.models)


@dataclass(frozen=True)
class Trajectory:
    """Sampled solution; ``states[k]`` is the stacked canonical state at ``times[k]``."""

    times: np.ndarray
    states: np.ndarray
    n_nodes: int
    state_dim: int
    metadata: dict = field(default_factory=dict)

    def __post_init__(self):
        if self.states.shape != (len(self.times), self.n_nodes * self.state_dim):
            raise ValueError("state rows must match the time grid")
        if len(self.times) > 1 and not np.all(np.diff(self.times) > 0):
            raise ValueError("times must be strictly increasing")

    def node_states(self):
        """View with shape ``(T, N, n)``."""
        return self.states.reshape(len(self.times), self.n_nodes, self.state_dim)

    @property
    def final(self):
        return self.states[-1]


def step_count(t_end, dt):
    if not (dt > 0.0 and t_end > 0.0):
        raise ValueError("dt and t_end must be positive")
    n = int(round(t_end / dt))
    if n < 1 or abs(n * dt - t_end) > 1e-9 * max(1.0, t_end):
        raise ValueError(f"t_end={t_end} is not a whole number of steps of dt={dt}")
    return n


def rk4(rhs, x0, dt, n_steps, save_every=1):
    """Classical RK4. Returns ``(saved_steps, states, failed_step)``."""
    steps = list(range(0, n_steps + 1, save_every))
    if steps[-1] != n_steps:
        steps.append(n_steps)
    x = np.array(x0, dtype=np.float64, copy=True)
    out = np.empty((len(steps), len(x)))
    out[0] = x
    slot = 1
    half, sixth = 0.5 * dt, dt / 6.0
    for step in range(1, n_steps + 1):
        t = (step - 1) * dt
        k1 = rhs(x, t)
        k2 = rhs(x + half * k1, t + half)
        k3 = rhs(x + half * k2, t + half)
        k4 = rhs(x + dt * k3, t + dt)
        x = x + sixth * (k1 + 2.0 * k2 + 2.0 * k3 + k4)
        if not np.all(np.isfinite(x)):
            return np.asarray(steps[:slot]), out[:slot], step
        if step % save_every == 0 or step == n_steps:
            out[slot] = x
            slot += 1
    return np.asarray(steps[:slot]), out[:slot], -1


def integrate_system(system, ic, t_end, dt=DEFAULT_DT, save_every=1, backend=None, metadata=None):
    n_steps = step_count(t_end, dt)
    if save_every < 1:
        raise ValueError("save_every must be >= 1")
    x0 = np.asarray(ic, dtype=np.float64).reshape(-1)
    if x0.shape != (system.n_nodes * system.state_dim,):
        raise ValueError(f"initial state must have {system.n_nodes * system.state_dim} entries, got {x0.size}")
    if not np.all(np.isfinite(x0)):
        raise ValueError("initial state is not finite")

    if system.is_fn():
        used = _backend.resolve(backend)
        kern = _backend.get_kernels(used)
        per_node = [np.repeat([getattr(m, f) for m in system.models],
                              [e - s for s, e in system.ranges]) for f in ("a", "b", "epsilon", "I")]
        nodes = x0.reshape(system.n_nodes, 2)
        indptr, indices, weights = system.csr
        steps, states, failed = kern.fn_rk4(
            indptr, indices, weights, *per_node, system.diffusion[0], system.diffusion[1],
            np.ascontiguousarray(nodes[:, 0]), np.ascontiguousarray(nodes[:, 1]),
            float(dt), int(n_steps), int(save_every))
        states = states.reshape(len(steps), -1)
    else:
        used = "python"
        steps, states, failed = rk4(system.rhs, x0, dt, n_steps, save_every)
    if failed >= 0:
        raise IntegrationError(failed * dt)

    meta = {"integrator": "rk4", "dt": dt, "t_end": t_end, "n_steps": n_steps,
            "save_every": save_every, "backend": used}
    meta.update(metadata or {})
    return Trajectory(np.asarray(steps) * dt, np.ascontiguousarray(states),
                      system.n_nodes, system.state_dim, meta)


def integrate(net, split, ic, t_end, dt=DEFAULT_DT, save_every=1, backend=None, metadata=None):
    """Integrate the full network from the stacked canonical state ``ic``."""
    if split is not None and split.L.shape[0] != net.n_nodes:
        raise ValueError("Laplacian split does not match the network")
    meta = {"network_sha256": net.digest()}
    meta.update(metadata or {})
    return integrate_system(CoupledSystem.from_network(net), ic, t_end, dt, save_every, backend, meta)


# ---------------------------------------------------------------------------
# initial conditions (canonical, stacked)

def random_state(net, box=(-2.0, 2.0), seed=0):
    """Uniform in ``box`` for every coordinate; drawn in original node order."""
    rng = np.random.default_rng(seed)
    lo, hi = box
    nodes = rng.uniform(lo, hi, size=(net.n_nodes, net.state_dim))
    return net.to_canonical_states(nodes).reshape(-1)


def manifold_state(net, cluster_states):
    """State on the cluster synchronization manifold from one state per cluster."""
    cs = np.asarray(cluster_states, dtype=np.float64).reshape(net.n_clusters, net.state_dim)
    return np.repeat(cs, net.cluster_sizes, axis=0).reshape(-1)


def random_manifold_state(net, box=(-2.0, 2.0), seed=0):
    rng = np.random.default_rng(seed)
    lo, hi = box
    return manifold_state(net, rng.uniform(lo, hi, size=(net.n_clusters, net.state_dim)))


# ---------------------------------------------------------------------------
# diagnostics

@dataclass(frozen=True)
class ClusterErrorSeries:
    """Per-sample synchronization diagnostics.

    ``pairwise[:, r]`` is ``max_{i,j in C_r} ||X^i - X^j||_2``.
    ``deviation_P2`` is ``sqrt(sum_i ||P^2 (X^i - xbar_{r(i)})||^2)`` and
    ``deviation_P`` the same with ``P`` in place of ``P^2``; ``xbar`` are the
    instantaneous cluster means.
    """

    times: np.ndarray
    pairwise: np.ndarray
    deviation_P2: np.ndarray
    deviation_P: np.ndarray

    def deviation(self, weighting="P"):
        if weighting == "P":
            return self.deviation_P
        if weighting == "P2":
            return self.deviation_P2
        raise ValueError(f"weighting must be 'P' or 'P2', got {weighting!r}")


def _max_pairwise(block):
    # block: (T, c, n)
    T, c, _ = block.shape
    best = np.zeros(T)
    for i in range(c - 1):
        d = block[:, i + 1:, :] - block[:, i:i + 1, :]
        best = np.maximum(best, np.sqrt(np.einsum("tjk,tjk->tj", d, d)).max(axis=1))
    return best


def cluster_errors(traj, net, P):
    Pm = P.P if isinstance(P, WeightMatrix) else np.atleast_2d(np.asarray(P, dtype=np.float64))
    X = traj.node_states()
    T = len(traj.times)
    pairwise = np.zeros((T, net.n_clusters))
    sq_p = np.zeros(T)
    sq_p2 = np.zeros(T)
    P2 = Pm @ Pm
    for r, (s, e) in enumerate(net.cluster_ranges):
        block = X[:, s:e, :]
        pairwise[:, r] = _max_pairwise(block)
        w = block - block.mean(axis=1, keepdims=True)
        wp = w @ Pm.T
        wp2 = w @ P2.T
        sq_p += np.einsum("tjk,tjk->t", wp, wp)
        sq_p2 += np.einsum("tjk,tjk->t", wp2, wp2)
    return ClusterErrorSeries(traj.times, pairwise, np.sqrt(sq_p2), np.sqrt(sq_p))


@dataclass(frozen=True)
class EnvelopeReport:
    mu: float
    weighting: str
    initial: float
    max_ratio: float
    n_violations: int
    first_violation: float
    vacuous: bool

    @property
    def holds(self):
        return self.n_violations == 0

    def as_dict(self):
        return {k: getattr(self, k) for k in
                ("mu", "weighting", "initial", "max_ratio", "n_violations", "first_violation", "vacuous")} | {
                    "holds": self.holds}


def check_envelope(traj, net, cert, rel_slack=1e-3, abs_slack=1e-9, weighting="P"):
    """Compare the deviation from cluster means with ``e^{mu t}`` times its start value.

    A sample violates the bound when ``dev(t) > e^{mu t} dev(0) (1 + rel_slack)
    + abs_slack``. With ``mu >= 0`` the report is flagged ``vacuous``: it
    still counts violations but certifies nothing.
    """
    err = cluster_errors(traj, net, cert.P)
    dev = err.deviation(weighting)
    t = traj.times - traj.times[0]
    bound = np.exp(cert.mu * t) * dev[0] * (1.0 + rel_slack) + abs_slack
    ratio = dev / bound
    bad = np.flatnonzero(dev > bound)
    return EnvelopeReport(
        mu=cert.mu,
        weighting=weighting,
        initial=float(dev[0]),
        max_ratio=float(ratio.max()),
        n_violations=int(len(bad)),
        first_violation=float(traj.times[bad[0]]) if len(bad) else math.nan,
        vacuous=not cert.mu < 0.0,
    )
