"""Clustered networks, Laplacian splits and the cluster-input-equivalence check.

Nodes are labelled ``0..N-1`` in the caller's ("original") numbering. Internally
every array is in canonical order: clusters occupy contiguous index ranges in
the order they were declared, and nodes inside a cluster keep their listed
order. ``ClusteredNetwork.canonical_order`` maps canonical -> original.
"""
from __future__ import annotations

import hashlib
import json
import math
from dataclasses import dataclass, field, fields
from functools import cached_property

import numpy as np

from . import eigen


class NetworkError(ValueError):
    """Invalid network description."""


@dataclass(frozen=True)
class ClusteredNetwork:
    """Weighted undirected graph partitioned into clusters of identical nodes.

    Parameters
    ----------
    n_nodes : int
        Number of nodes ``N``.
    edges : iterable of (i, j, weight)
        Undirected edges in original labels. Stored as ``(min, max, w)``
        tuples sorted by endpoints; duplicates are an error.
    clusters : iterable of iterables of int
        Partition of ``range(n_nodes)``.
    cluster_params : sequence
        One node model per cluster (e.g. :class:`~clustersync.dynamics.FNParams`).
    diffusion : sequence of float
        Diagonal of the diffusion matrix ``D``.
    cluster_names : sequence of str, optional
        Defaults to ``C1..CK``.
    """

    n_nodes: int
    edges: tuple
    clusters: tuple
    cluster_params: tuple
    diffusion: tuple
    cluster_names: tuple = field(default=None)

    def __post_init__(self):
        n = int(self.n_nodes)
        if n < 1:
            raise NetworkError("n_nodes must be positive")
        clusters = tuple(tuple(int(i) for i in c) for c in self.clusters)
        if not clusters:
            raise NetworkError("at least one cluster is required")
        for r, c in enumerate(clusters):
            if not c:
                raise NetworkError(f"cluster {r} is empty")
        seen = [i for c in clusters for i in c]
        if sorted(seen) != list(range(n)):
            dup = sorted({i for i in seen if seen.count(i) > 1})
            missing = sorted(set(range(n)) - set(seen))
            extra = sorted(set(seen) - set(range(n)))
            raise NetworkError(
                f"clusters must partition 0..{n - 1} (duplicated {dup}, missing {missing}, out of range {extra})"
            )

        norm = {}
        for e in self.edges:
            i, j, w = int(e[0]), int(e[1]), float(e[2])
            if i == j:
                raise NetworkError(f"self loop on node {i}")
            if not (0 <= i < n and 0 <= j < n):
                raise NetworkError(f"edge ({i}, {j}) references a node outside 0..{n - 1}")
            if not (w > 0.0 and math.isfinite(w)):
                raise NetworkError(f"edge ({i}, {j}) has non-positive or non-finite weight {w}")
            key = (min(i, j), max(i, j))
            if key in norm:
                raise NetworkError(f"duplicate edge {key}")
            norm[key] = w
        edges = tuple((i, j, norm[(i, j)]) for i, j in sorted(norm))

        params = tuple(self.cluster_params)
        if len(params) != len(clusters):
            raise NetworkError(f"{len(clusters)} clusters but {len(params)} parameter records")
        dims = {getattr(p, "n", None) for p in params}
        diffusion = tuple(float(d) for d in self.diffusion)
        if len(dims) != 1 or None in dims:
            raise NetworkError("all cluster models must share one state dimension")
        if len(diffusion) != dims.pop():
            raise NetworkError("diffusion length must equal the node state dimension")
        if any(d < 0.0 or not math.isfinite(d) for d in diffusion):
            raise NetworkError("diffusion entries must be finite and nonnegative")

        names = self.cluster_names
        names = tuple(f"C{r + 1}" for r in range(len(clusters))) if names is None else tuple(str(s) for s in names)
        if len(names) != len(clusters) or len(set(names)) != len(names):
            raise NetworkError("cluster_names must be unique, one per cluster")

        object.__setattr__(self, "n_nodes", n)
        object.__setattr__(self, "clusters", clusters)
        object.__setattr__(self, "edges", edges)
        object.__setattr__(self, "cluster_params", params)
        object.__setattr__(self, "diffusion", diffusion)
        object.__setattr__(self, "cluster_names", names)

    def __eq__(self, other):
        if not isinstance(other, ClusteredNetwork):
            return NotImplemented
        return all(getattr(self, f.name) == getattr(other, f.name) for f in fields(self))

    def __hash__(self):
        return hash(self.digest())

    @property
    def n_clusters(self):
        return len(self.clusters)

    @property
    def state_dim(self):
        return len(self.diffusion)

    @property
    def cluster_sizes(self):
        return tuple(len(c) for c in self.clusters)

    @property
    def diffusion_matrix(self):
        return np.diag(self.diffusion)

    @cached_property
    def canonical_order(self):
        """Original label of each canonical index."""
        out = np.array([i for c in self.clusters for i in c], dtype=np.int64)
        out.setflags(write=False)
        return out

    @cached_property
    def to_canonical(self):
        """Canonical index of each original label."""
        out = np.empty(self.n_nodes, dtype=np.int64)
        out[self.canonical_order] = np.arange(self.n_nodes)
        out.setflags(write=False)
        return out

    @cached_property
    def cluster_ranges(self):
        """``(start, stop)`` of each cluster in canonical indexing."""
        stops = np.cumsum(self.cluster_sizes)
        return tuple((int(s - c), int(s)) for s, c in zip(stops, self.cluster_sizes))

    @cached_property
    def cluster_of(self):
        """Cluster index of each canonical node."""
        out = np.repeat(np.arange(self.n_clusters), self.cluster_sizes)
        out.setflags(write=False)
        return out

    @cached_property
    def canonical_edges(self):
        """``(i, j, w)`` arrays in canonical labels with ``i < j``, sorted."""
        if not self.edges:
            return np.zeros(0, np.int64), np.zeros(0, np.int64), np.zeros(0)
        e = np.array([(self.to_canonical[i], self.to_canonical[j]) for i, j, _ in self.edges], dtype=np.int64)
        w = np.array([x for _, _, x in self.edges])
        lo, hi = e.min(axis=1), e.max(axis=1)
        order = np.lexsort((hi, lo))
        return lo[order], hi[order], w[order]

    @cached_property
    def adjacency_csr(self):
        """Incoming-neighbour CSR ``(indptr, indices, weights)``, canonical, sorted by neighbour."""
        i, j, w = self.canonical_edges
        rows = np.concatenate([i, j])
        cols = np.concatenate([j, i])
        ws = np.concatenate([w, w])
        order = np.lexsort((cols, rows))
        rows, cols, ws = rows[order], cols[order], ws[order]
        indptr = np.zeros(self.n_nodes + 1, dtype=np.int64)
        np.add.at(indptr, rows + 1, 1)
        indptr = np.cumsum(indptr)
        return indptr, cols, ws

    def weight_matrix(self):
        """Dense symmetric weight matrix in canonical order."""
        i, j, w = self.canonical_edges
        W = np.zeros((self.n_nodes, self.n_nodes))
        W[i, j] = w
        W[j, i] = w
        return W

    def to_canonical_states(self, X):
        """Reorder a per-node array ``(N, ...)`` from original to canonical order."""
        return np.asarray(X)[self.canonical_order]

    def to_original_states(self, X):
        """Reorder a per-node array ``(N, ...)`` from canonical to original order."""
        return np.asarray(X)[self.to_canonical]

    def as_dict(self):
        """JSON-ready description used for hashing and serialization."""
        return {
            "n_nodes": self.n_nodes,
            "clusters": [
                {"name": name, "nodes": list(c), "model": _model_record(p)}
                for name, c, p in zip(self.cluster_names, self.clusters, self.cluster_params)
            ],
            "edges": [[i, j, w] for i, j, w in self.edges],
            "diffusion": list(self.diffusion),
        }

    def digest(self):
        payload = json.dumps(self.as_dict(), sort_keys=True, separators=(",", ":"))
        return hashlib.sha256(payload.encode()).hexdigest()

    def relabel(self, perm):
        """Copy with original label ``i`` renamed to ``perm[i]``."""
        perm = [int(p) for p in perm]
        if sorted(perm) != list(range(self.n_nodes)):
            raise NetworkError("perm must be a permutation of the node labels")
        return ClusteredNetwork(
            n_nodes=self.n_nodes,
            edges=[(perm[i], perm[j], w) for i, j, w in self.edges],
            clusters=[[perm[i] for i in c] for c in self.clusters],
            cluster_params=self.cluster_params,
            diffusion=self.diffusion,
            cluster_names=self.cluster_names,
        )

    def with_diffusion(self, diffusion):
        return ClusteredNetwork(self.n_nodes, self.edges, self.clusters, self.cluster_params,
                                diffusion, self.cluster_names)

    def without_edge(self, i, j):
        key = (min(i, j), max(i, j))
        kept = [e for e in self.edges if (e[0], e[1]) != key]
        if len(kept) == len(self.edges):
            raise NetworkError(f"no edge {key} to remove")
        return ClusteredNetwork(self.n_nodes, kept, self.clusters, self.cluster_params,
                                self.diffusion, self.cluster_names)


def _model_record(model):
    if hasattr(model, "as_dict"):
        return model.as_dict()
    return {"type": type(model).__name__, "repr": repr(model)}


# ---------------------------------------------------------------------------
# edge generators

def complete_edges(nodes, weight=1.0):
    nodes = list(nodes)
    return [(nodes[a], nodes[b], weight) for a in range(len(nodes)) for b in range(a + 1, len(nodes))]


def star_edges(nodes, weight=1.0, center=0):
    """Star on ``nodes``; ``center`` indexes into ``nodes``."""
    nodes = list(nodes)
    hub = nodes[center]
    return [(hub, v, weight) for v in nodes if v != hub]


def ring_edges(nodes, weight=1.0):
    nodes = list(nodes)
    m = len(nodes)
    if m < 2:
        return []
    if m == 2:
        return [(nodes[0], nodes[1], weight)]
    return [(nodes[k], nodes[(k + 1) % m], weight) for k in range(m)]


def matching_edges(nodes_a, nodes_b, weight=1.0):
    nodes_a, nodes_b = list(nodes_a), list(nodes_b)
    if len(nodes_a) != len(nodes_b):
        raise NetworkError(f"matching needs equal sizes, got {len(nodes_a)} and {len(nodes_b)}")
    return [(u, v, weight) for u, v in zip(nodes_a, nodes_b)]


def complete_bipartite_edges(nodes_a, nodes_b, weight=1.0):
    return [(u, v, weight) for u in nodes_a for v in nodes_b]


# ---------------------------------------------------------------------------
# Laplacians

def laplacian_from_edges(n, i, j, w):
    """Dense Laplacian ``diag(W 1) - W`` from canonical edge arrays."""
    W = np.zeros((n, n))
    W[i, j] = w
    W[j, i] = w
    return np.diag(W.sum(axis=1)) - W


@dataclass(frozen=True)
class LaplacianSplit:
    """``L = L_C + L_bar`` with spectra, all in canonical order."""

    L: np.ndarray
    L_C: np.ndarray
    L_bar: np.ndarray
    eigenvalues: np.ndarray
    cluster_eigenvalues: tuple
    bar_eigenvalues: np.ndarray
    cluster_ranges: tuple
    singletons: tuple = ()

    @property
    def lambda2(self):
        return float(self.eigenvalues[1]) if len(self.eigenvalues) > 1 else 0.0

    @property
    def cluster_lambda2(self):
        return tuple(float(ev[1]) if len(ev) > 1 else math.nan for ev in self.cluster_eigenvalues)

    @property
    def bar_lambda2(self):
        if len(self.cluster_eigenvalues) == 1:
            return 0.0
        return float(self.bar_eigenvalues[1])

    @property
    def Lambda(self):
        """Per-cluster effective connectivity ``lambda2(C_r) + lambda2(bar)``."""
        return tuple(l2 + self.bar_lambda2 for l2 in self.cluster_lambda2)

    def cluster_block(self, r):
        s, e = self.cluster_ranges[r]
        return self.L_C[s:e, s:e]

    def n_components(self, tol=1e-9):
        """Zero-eigenvalue multiplicity of ``L``."""
        return int(np.sum(np.abs(self.eigenvalues) <= tol))


def build_laplacian(net, allow_singletons=False, backend=None):
    """Full, within-cluster and between-cluster Laplacians with their spectra.

    Size-1 clusters are rejected unless ``allow_singletons`` (quotient use);
    their second eigenvalue is reported as NaN and they are listed in
    ``split.singletons``.
    """
    singletons = tuple(r for r, c in enumerate(net.clusters) if len(c) < 2)
    if singletons and not allow_singletons:
        names = [net.cluster_names[r] for r in singletons]
        raise NetworkError(f"clusters {names} have fewer than 2 nodes; certificates need c_r >= 2")

    n = net.n_nodes
    i, j, w = net.canonical_edges
    cl = net.cluster_of
    intra = cl[i] == cl[j]
    L_C = laplacian_from_edges(n, i[intra], j[intra], w[intra])
    L_bar = laplacian_from_edges(n, i[~intra], j[~intra], w[~intra])
    L = L_C + L_bar

    cluster_eigs = []
    for s, e in net.cluster_ranges:
        cluster_eigs.append(eigen.eigvalsh(L_C[s:e, s:e], backend=backend))
    return LaplacianSplit(
        L=L,
        L_C=L_C,
        L_bar=L_bar,
        eigenvalues=eigen.eigvalsh(L, backend=backend),
        cluster_eigenvalues=tuple(cluster_eigs),
        bar_eigenvalues=eigen.eigvalsh(L_bar, backend=backend),
        cluster_ranges=net.cluster_ranges,
        singletons=singletons,
    )


def algebraic_connectivity(matrix, backend=None):
    """Second-smallest eigenvalue of a symmetric matrix."""
    a = eigen.check_symmetric(matrix)
    if a.shape[0] < 2:
        raise ValueError("algebraic connectivity needs at least a 2x2 matrix")
    return float(eigen.eigvalsh(a, backend=backend)[1])


# ---------------------------------------------------------------------------
# cluster-input-equivalence

@dataclass(frozen=True)
class PairCheck:
    """Incoming weight from cluster ``source`` to each node of ``target``."""

    target: int
    source: int
    passed: bool
    eta: float
    incoming: tuple
    offending: tuple


@dataclass(frozen=True)
class CIEReport:
    passed: bool
    eta: np.ndarray
    pairs: dict
    tol: float

    def failures(self):
        return [pc for pc in self.pairs.values() if not pc.passed]


def _agreeing_groups(values, tol):
    groups = []
    for k, v in enumerate(values):
        for g in groups:
            if math.isclose(v, values[g[0]], rel_tol=tol, abs_tol=0.0):
                g.append(k)
                break
        else:
            groups.append([k])
    return groups


def check_cluster_input_equivalence(net, tol=1e-9):
    """Check that every node of ``C_r`` receives the same total weight from ``C_s``.

    Returns a :class:`CIEReport`. For a failing pair the offending nodes are
    those outside the largest agreeing group (all nodes when the largest
    group is not unique); they are reported in original labels and ``eta``
    for that pair is NaN.
    """
    K = net.n_clusters
    indptr, cols, ws = net.adjacency_csr
    cl = net.cluster_of
    # incoming[i][s]: sum of weights into canonical node i from cluster s
    incoming = np.zeros((net.n_nodes, K))
    for node in range(net.n_nodes):
        lo, hi = indptr[node], indptr[node + 1]
        for s in range(K):
            sel = cl[cols[lo:hi]] == s
            incoming[node, s] = math.fsum(ws[lo:hi][sel])

    eta = np.zeros((K, K))
    pairs = {}
    for r, (start, stop) in enumerate(net.cluster_ranges):
        for s in range(K):
            if s == r:
                continue
            vals = [float(v) for v in incoming[start:stop, s]]
            groups = _agreeing_groups(vals, tol)
            sizes = sorted((len(g) for g in groups), reverse=True)
            if len(groups) == 1:
                offending = ()
                value = vals[0]
            else:
                if len(sizes) > 1 and sizes[0] == sizes[1]:
                    bad = range(len(vals))
                else:
                    best = max(groups, key=len)
                    bad = [k for k in range(len(vals)) if k not in best]
                offending = tuple(int(net.canonical_order[start + k]) for k in bad)
                value = math.nan
            pairs[(r, s)] = PairCheck(r, s, not offending, value, tuple(vals), offending)
            eta[r, s] = value
    passed = all(pc.passed for pc in pairs.values())
    eta.setflags(write=False)
    return CIEReport(passed=passed, eta=eta, pairs=pairs, tol=tol)
