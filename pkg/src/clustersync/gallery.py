"""Ready-made network-spec documents.

In the 17-node networks the cluster sizes, node parameters and coupling gain
are fixed, and the adjacency is one concrete choice (rings inside
clusters, complete tripartite wiring between them) so that the intra-cluster
connectivities come out as 1.83, 2 and 2 and the inter-cluster one as 13.1.
"""
import json
import math

import numpy as np

from . import graph
from .certify import fn_certificate_mu, fn_gamma_threshold, fn_weight_matrix
from .dynamics import FNParams
from .specfile import parse_spec

FN_C1 = {"a": 0.1, "b": 0.1, "epsilon": 0.08, "I": 0.9}
FN_C2 = {"a": 0.5, "b": 0.7, "epsilon": 0.08, "I": 3.0}
FN_C3 = {"a": 0.9, "b": 0.3, "epsilon": 0.08, "I": 0.1}
FN_C3_ALT = {"a": 0.8, "b": 0.9, "epsilon": 0.08, "I": 0.7}

# A ring of n nodes with weight w has algebraic connectivity w (2 - 2 cos(2 pi / n)).
RING6_WEIGHT = 1.83
RING7_WEIGHT = 2.0 / (2.0 - 2.0 * math.cos(2.0 * math.pi / 7.0))
RING4_WEIGHT = 1.0
# Complete tripartite K(6, 7, 4) with weight w has algebraic connectivity 10 w.
TRIPARTITE_WEIGHT = 1.31

BOX = [-2.0, 2.0]


def _ring(nodes, w):
    return [[nodes[k], nodes[(k + 1) % len(nodes)], w] for k in range(len(nodes))]


def _tripartite(groups, w):
    edges = []
    for a in range(len(groups)):
        for b in range(a + 1, len(groups)):
            edges += [[i, j, w] for i in groups[a] for j in groups[b]]
    return edges


def _three_cluster_edges():
    c1, c2, c3 = list(range(0, 6)), list(range(6, 13)), list(range(13, 17))
    return (_ring(c1, RING6_WEIGHT) + _ring(c2, RING7_WEIGHT) + _ring(c3, RING4_WEIGHT)
            + _tripartite([c1, c2, c3], TRIPARTITE_WEIGHT))


def three_clusters():
    """Three heterogeneous FN clusters (6, 7, 4 nodes) with gamma = 0.12."""
    return {
        "format_version": 1,
        "name": "three-clusters",
        "description": "17 FN oscillators in three clusters; ring clusters, complete tripartite wiring",
        "gamma": 0.12,
        "clusters": [
            {"id": "C1", "nodes": list(range(0, 6)), "model": "fitzhugh-nagumo", "params": FN_C1},
            {"id": "C2", "nodes": list(range(6, 13)), "model": "fitzhugh-nagumo", "params": FN_C2},
            {"id": "C3", "nodes": list(range(13, 17)), "model": "fitzhugh-nagumo", "params": FN_C3},
        ],
        "edges": _three_cluster_edges(),
        "simulation": {"t_end": 100, "dt": 0.01, "save_every": 10,
                       "ic": {"mode": "random", "seed": 1, "box": BOX}},
    }


def three_clusters_cut():
    """``three-clusters`` with the inter-cluster edge 0-6 removed, which breaks input equivalence."""
    doc = three_clusters()
    doc["name"] = "three-clusters-cut"
    doc["description"] = "three-clusters with one inter-cluster edge removed"
    doc["edges"] = [e for e in doc["edges"] if (e[0], e[1]) != (0, 6)]
    doc["simulation"]["ic"] = {"mode": "on_manifold", "seed": 1, "box": BOX}
    return doc


def five_clusters():
    """``three-clusters`` after two nodes of C3 change parameters.

    C3 splits into two pairs and C1 splits into two triples of alternating
    ring nodes; both splits keep input equivalence.
    """
    doc = three_clusters()
    doc["name"] = "five-clusters"
    doc["description"] = "three-clusters with C3 made heterogeneous: five clusters"
    doc["clusters"] = [
        {"id": "C1a", "nodes": [0, 2, 4], "model": "fitzhugh-nagumo", "params": FN_C1},
        {"id": "C1b", "nodes": [1, 3, 5], "model": "fitzhugh-nagumo", "params": FN_C1},
        {"id": "C2", "nodes": list(range(6, 13)), "model": "fitzhugh-nagumo", "params": FN_C2},
        {"id": "C3a", "nodes": [13, 15], "model": "fitzhugh-nagumo", "params": FN_C3},
        {"id": "C3b", "nodes": [14, 16], "model": "fitzhugh-nagumo", "params": FN_C3_ALT},
    ]
    return doc


def _complete_star(m, gamma, t_end, save_every):
    return {
        "format_version": 1,
        "name": f"complete-star-{m}",
        "description": (f"complete graph and star graph of {m} FN nodes each, joined by a perfect "
                        "matching; a star of weight w has connectivity w"),
        "gamma": gamma,
        "clusters": [
            {"id": "C1", "size": m, "model": "fitzhugh-nagumo",
             "params": {"a": 0.9, "b": 0.5, "epsilon": 0.08, "I": 2.0}},
            {"id": "C2", "size": m, "model": "fitzhugh-nagumo",
             "params": {"a": 0.7, "b": 0.8, "epsilon": 0.08, "I": 0.3}},
        ],
        "generators": [
            {"kind": "complete", "cluster": "C1", "weight": 1.0},
            {"kind": "star", "cluster": "C2", "weight": 0.04},
            {"kind": "matching", "clusters": ["C1", "C2"], "weight": 0.25},
        ],
        "simulation": {"t_end": t_end, "dt": 0.01, "save_every": save_every,
                       "ic": {"mode": "random", "seed": 7, "box": BOX}},
    }


def complete_star():
    """200 nodes, gamma = 0.02: certified for the complete cluster only."""
    doc = _complete_star(100, 0.02, 200, 100)
    doc["name"] = "complete-star"
    return doc


def complete_star_20():
    """20 + 20 node version of ``complete-star`` with gamma = 0.1."""
    doc = _complete_star(20, 0.1, 200, 100)
    doc["name"] = "complete-star-20"
    return doc


def k4():
    """Single FN cluster on the complete graph K4, gamma = 0.3 (threshold 0.25)."""
    return {
        "format_version": 1,
        "name": "k4",
        "description": "one FN cluster on K4",
        "gamma": 0.3,
        "clusters": [{"id": "C1", "size": 4, "model": "fitzhugh-nagumo", "params": FN_C1}],
        "generators": [{"kind": "complete", "cluster": "C1", "weight": 1.0}],
        "simulation": {"t_end": 50, "dt": 0.01, "save_every": 10,
                       "ic": {"mode": "random", "seed": 3, "box": BOX}},
    }


def asymmetric():
    """Six nodes whose quotient weights are 2 (C1 from C2) and 1 (C2 from C1)."""
    return {
        "format_version": 1,
        "name": "asymmetric",
        "description": "two clusters of 2 and 4 nodes with an asymmetric quotient",
        "gamma": 0.8,
        "clusters": [
            {"id": "C1", "nodes": [0, 1], "model": "fitzhugh-nagumo", "params": FN_C1},
            {"id": "C2", "nodes": [2, 3, 4, 5], "model": "fitzhugh-nagumo", "params": FN_C2},
        ],
        "edges": [[0, 1, 1.0], [0, 2, 1.0], [0, 3, 1.0], [1, 4, 1.0], [1, 5, 1.0]]
        + _ring([2, 3, 4, 5], 1.0),
        "simulation": {"t_end": 100, "dt": 0.01, "save_every": 10,
                       "ic": {"mode": "cluster_values", "values": [[1.0, 0.5], [-1.5, 0.2]]}},
    }


GALLERY = {
    "three-clusters": three_clusters,
    "three-clusters-cut": three_clusters_cut,
    "five-clusters": five_clusters,
    "complete-star": complete_star,
    "complete-star-20": complete_star_20,
    "k4": k4,
    "asymmetric": asymmetric,
}


def document(name):
    """Fresh copy of the named document as a dict."""
    try:
        return GALLERY[name]()
    except KeyError:
        raise KeyError(f"unknown gallery entry {name!r}; choose from {sorted(GALLERY)}") from None


def spec(name):
    """The named document parsed and validated."""
    return parse_spec(json.dumps(document(name)), source=f"gallery:{name}")


def random_fn_network(seed, n_clusters=None, max_nodes=24, gamma_factor=None):
    """Seeded random FN network that passes input equivalence, with gamma above every threshold.

    Each cluster is a weighted ring plus random chords; every pair of clusters
    is either unconnected or joined by a complete bipartite graph of one
    weight. Per-cluster epsilon varies, so the weight matrix is not the
    identity. ``gamma`` is ``gamma_factor`` (default drawn from [1.1, 3])
    times the largest threshold.
    """
    rng = np.random.default_rng(seed)
    K = int(rng.integers(1, 4)) if n_clusters is None else int(n_clusters)
    sizes = []
    budget = max_nodes
    for r in range(K):
        hi = min(8, budget - 2 * (K - r - 1))
        sizes.append(int(rng.integers(2, hi + 1)))
        budget -= sizes[-1]
    groups, start = [], 0
    for m in sizes:
        groups.append(list(range(start, start + m)))
        start += m
    edges = []
    for g in groups:
        if len(g) == 2:
            edges.append((g[0], g[1], float(rng.uniform(0.5, 2.0))))
            continue
        edges += [(i, j, float(rng.uniform(0.5, 2.0))) for i, j, _ in graph.ring_edges(g)]
        have = {(min(i, j), max(i, j)) for i, j, _ in edges}
        for a in range(len(g)):
            for b in range(a + 2, len(g)):
                if (g[a], g[b]) not in have and rng.random() < 0.3:
                    edges.append((g[a], g[b], float(rng.uniform(0.1, 1.0))))
    for r in range(K):
        for s in range(r + 1, K):
            if rng.random() < 0.7:
                edges += graph.complete_bipartite_edges(groups[r], groups[s], float(rng.uniform(0.05, 0.5)))
    params = [FNParams(a=float(rng.uniform(0.1, 0.9)), b=float(rng.uniform(0.1, 0.9)),
                       epsilon=float(rng.uniform(0.05, 0.3)), I=float(rng.uniform(0.0, 2.0)))
              for _ in range(K)]
    net = graph.ClusteredNetwork(sum(sizes), edges, groups, params, (1.0, 0.0))
    split = graph.build_laplacian(net)
    p = fn_weight_matrix(params)
    thr = max(fn_gamma_threshold(par, p, Lam) for par, Lam in zip(params, split.Lambda))
    factor = float(rng.uniform(1.1, 3.0)) if gamma_factor is None else float(gamma_factor)
    net = net.with_diffusion((factor * thr, 0.0))
    cert = fn_certificate_mu(net, split)
    return net, split, cert
