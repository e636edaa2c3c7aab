"""Network-spec documents: strict, versioned JSON.

Example::

    {
      "format_version": 1,
      "name": "two-clusters",
      "gamma": 0.5,
      "clusters": [
        {"id": "A", "size": 3, "params": {"a": 0.1, "b": 0.1, "epsilon": 0.08, "I": 0.9}},
        {"id": "B", "size": 3, "params": {"a": 0.5, "b": 0.7, "epsilon": 0.08, "I": 3.0}}
      ],
      "generators": [
        {"kind": "complete", "cluster": "A", "weight": 1.0},
        {"kind": "ring", "cluster": "B", "weight": 1.0},
        {"kind": "matching", "clusters": ["A", "B"], "weight": 0.25}
      ],
      "edges": [],
      "simulation": {"t_end": 50, "dt": 0.01, "ic": {"mode": "random", "seed": 1, "box": [-2, 2]}}
    }

Clusters either all give ``size`` (nodes numbered consecutively in declaration
order) or all give explicit 0-based ``nodes``. Generators expand in document
order, before the explicit ``edges``. ``gamma`` sets ``D = diag(gamma, 0)``.
A ``quotient`` block (``eta`` matrix, rows receive) replaces edges for
singleton-cluster quotient networks.
"""
from __future__ import annotations

import hashlib
import json
from typing import Literal, Optional

import numpy as np
from pydantic import BaseModel, ConfigDict, Field, ValidationError, model_validator

from . import graph
from .dynamics import FNParams
from .graph import ClusteredNetwork, NetworkError

FORMAT_VERSION = 1


class SpecError(ValueError):
    """Unreadable or invalid spec document; the message carries location details."""


class _Strict(BaseModel):
    model_config = ConfigDict(extra="forbid", frozen=True)


class FNParamsDoc(_Strict):
    a: float
    b: float = Field(gt=0)
    epsilon: float = Field(gt=0)
    I: float


class ClusterDoc(_Strict):
    id: str
    size: Optional[int] = Field(default=None, ge=1)
    nodes: Optional[list[int]] = None
    model: Literal["fitzhugh-nagumo"] = "fitzhugh-nagumo"
    params: FNParamsDoc

    @model_validator(mode="after")
    def _size_or_nodes(self):
        if (self.size is None) == (self.nodes is None):
            raise ValueError("give exactly one of 'size' or 'nodes'")
        return self


class GeneratorDoc(_Strict):
    kind: Literal["complete", "star", "ring", "matching", "complete_bipartite"]
    cluster: Optional[str] = None
    clusters: Optional[list[str]] = None
    weight: float = Field(gt=0)
    center: Optional[int] = Field(default=None, ge=0)

    @model_validator(mode="after")
    def _targets(self):
        within = self.kind in ("complete", "star", "ring")
        if within and (self.cluster is None or self.clusters is not None):
            raise ValueError(f"'{self.kind}' takes a single 'cluster'")
        if not within and (self.clusters is None or len(self.clusters) != 2 or self.cluster is not None):
            raise ValueError(f"'{self.kind}' takes 'clusters': [first, second]")
        if self.center is not None and self.kind != "star":
            raise ValueError("'center' only applies to star generators")
        return self


class InitialConditionDoc(_Strict):
    mode: Literal["random", "on_manifold", "explicit", "cluster_values"]
    seed: Optional[int] = None
    box: tuple[float, float] = (-2.0, 2.0)
    values: Optional[list[list[float]]] = None

    @model_validator(mode="after")
    def _mode_fields(self):
        if self.mode in ("random", "on_manifold") and self.seed is None:
            raise ValueError(f"ic mode '{self.mode}' requires a seed")
        if self.mode in ("explicit", "cluster_values") and self.values is None:
            raise ValueError(f"ic mode '{self.mode}' requires 'values'")
        if self.box[1] < self.box[0]:
            raise ValueError("box must be [low, high]")
        return self


class SimulationDoc(_Strict):
    t_end: float = Field(gt=0)
    dt: float = Field(default=0.01, gt=0)
    save_every: int = Field(default=1, ge=1)
    ic: InitialConditionDoc


class QuotientDoc(_Strict):
    eta: list[list[float]]


class NetworkSpecDocument(_Strict):
    format_version: Literal[1]
    name: str = ""
    description: str = ""
    gamma: float = Field(ge=0)
    clusters: list[ClusterDoc] = Field(min_length=1)
    edges: list[tuple[int, int, float]] = []
    generators: list[GeneratorDoc] = []
    simulation: Optional[SimulationDoc] = None
    quotient: Optional[QuotientDoc] = None

    @model_validator(mode="after")
    def _consistent(self):
        ids = [c.id for c in self.clusters]
        if len(set(ids)) != len(ids):
            raise ValueError("cluster ids must be unique")
        sized = {c.size is not None for c in self.clusters}
        if len(sized) != 1:
            raise ValueError("clusters must all use 'size' or all use 'nodes'")
        for g in self.generators:
            for cid in ([g.cluster] if g.cluster else g.clusters):
                if cid not in ids:
                    raise ValueError(f"generator refers to unknown cluster '{cid}'")
        if self.quotient is not None:
            if self.edges or self.generators:
                raise ValueError("a quotient document cannot also list edges or generators")
            K = len(self.clusters)
            if len(self.quotient.eta) != K or any(len(row) != K for row in self.quotient.eta):
                raise ValueError(f"quotient.eta must be {K}x{K}")
            if any((c.size or len(c.nodes)) != 1 for c in self.clusters):
                raise ValueError("quotient documents need singleton clusters")
        return self


# ---------------------------------------------------------------------------
# parsing

def _format_validation(err, source):
    lines = []
    for e in err.errors():
        loc = ".".join(str(p) for p in e["loc"]) or "<document>"
        lines.append(f"{source}: field '{loc}': {e['msg']}")
    return "\n".join(lines)


def parse_spec(text, source="<spec>"):
    try:
        raw = json.loads(text)
    except json.JSONDecodeError as exc:
        raise SpecError(f"{source}:{exc.lineno}:{exc.colno}: invalid JSON: {exc.msg}") from None
    if isinstance(raw, dict) and raw.get("format_version") not in (None, FORMAT_VERSION):
        raise SpecError(f"{source}: unsupported format_version {raw.get('format_version')!r} "
                        f"(this tool reads version {FORMAT_VERSION})")
    try:
        return NetworkSpecDocument.model_validate(raw)
    except ValidationError as exc:
        raise SpecError(_format_validation(exc, source)) from None


def load_spec(path):
    with open(path, encoding="utf-8") as fh:
        text = fh.read()
    return parse_spec(text, source=str(path)), text


def text_digest(text):
    return hashlib.sha256(text.encode("utf-8")).hexdigest()


# ---------------------------------------------------------------------------
# expansion

def cluster_nodes(doc):
    if doc.clusters[0].size is not None:
        out, start = [], 0
        for c in doc.clusters:
            out.append(list(range(start, start + c.size)))
            start += c.size
        return out
    return [list(c.nodes) for c in doc.clusters]


def _params(doc):
    return [FNParams(c.params.a, c.params.b, c.params.epsilon, c.params.I) for c in doc.clusters]


def expand_edges(doc):
    nodes = dict(zip((c.id for c in doc.clusters), cluster_nodes(doc)))
    edges = []
    for g in doc.generators:
        if g.kind == "complete":
            edges += graph.complete_edges(nodes[g.cluster], g.weight)
        elif g.kind == "star":
            if g.center is not None and g.center >= len(nodes[g.cluster]):
                raise SpecError(f"star center {g.center} is outside cluster '{g.cluster}'")
            edges += graph.star_edges(nodes[g.cluster], g.weight, g.center or 0)
        elif g.kind == "ring":
            edges += graph.ring_edges(nodes[g.cluster], g.weight)
        elif g.kind == "matching":
            edges += graph.matching_edges(nodes[g.clusters[0]], nodes[g.clusters[1]], g.weight)
        else:
            edges += graph.complete_bipartite_edges(nodes[g.clusters[0]], nodes[g.clusters[1]], g.weight)
    edges += [tuple(e) for e in doc.edges]
    return edges


def is_quotient(doc):
    return doc.quotient is not None


def build_network(doc):
    """Expand generators and return a :class:`ClusteredNetwork`."""
    if is_quotient(doc):
        raise SpecError("document describes a quotient network; use build_quotient_from_spec")
    nodes = cluster_nodes(doc)
    try:
        return ClusteredNetwork(
            n_nodes=sum(len(c) for c in nodes),
            edges=expand_edges(doc),
            clusters=nodes,
            cluster_params=_params(doc),
            diffusion=(doc.gamma, 0.0),
            cluster_names=[c.id for c in doc.clusters],
        )
    except (NetworkError, ValueError) as exc:
        raise SpecError(f"invalid network: {exc}") from None


def build_quotient_from_spec(doc):
    from .reduce import QuotientNetwork

    if not is_quotient(doc):
        raise SpecError("document has no quotient block")
    try:
        return QuotientNetwork(doc.quotient.eta, _params(doc), (doc.gamma, 0.0), [c.id for c in doc.clusters])
    except ValueError as exc:
        raise SpecError(f"invalid quotient: {exc}") from None


def initial_state(doc, net, seed=None):
    """Stacked canonical initial state from the simulation block. Returns ``(state, seed_used)``."""
    from . import simulate

    if doc.simulation is None:
        raise SpecError("document has no 'simulation' block")
    ic = doc.simulation.ic
    seed = ic.seed if seed is None else seed
    if ic.mode == "random":
        return simulate.random_state(net, ic.box, seed), seed
    if ic.mode == "on_manifold":
        return simulate.random_manifold_state(net, ic.box, seed), seed
    vals = np.asarray(ic.values, dtype=np.float64)
    if ic.mode == "explicit":
        if vals.shape != (net.n_nodes, net.state_dim):
            raise SpecError(f"explicit ic needs {net.n_nodes} rows of {net.state_dim} values")
        return net.to_canonical_states(vals).reshape(-1), None
    if vals.shape != (net.n_clusters, net.state_dim):
        raise SpecError(f"cluster_values ic needs {net.n_clusters} rows of {net.state_dim} values")
    return simulate.manifold_state(net, vals), None


def cluster_state_values(doc, net, seed=None):
    """One state per cluster, for manifold starts and quotient runs."""
    ic = doc.simulation.ic if doc.simulation else None
    if ic is not None and ic.mode == "cluster_values":
        return np.asarray(ic.values, dtype=np.float64), None
    seed = (ic.seed if ic is not None and ic.seed is not None else 0) if seed is None else seed
    box = ic.box if ic is not None else (-2.0, 2.0)
    rng = np.random.default_rng(seed)
    return rng.uniform(box[0], box[1], size=(net.n_clusters, net.state_dim)), seed


# ---------------------------------------------------------------------------
# serialization

def _fn_params_record(p):
    if not isinstance(p, FNParams):
        raise SpecError("only FitzHugh-Nagumo clusters can be written to a spec document")
    return {"a": p.a, "b": p.b, "epsilon": p.epsilon, "I": p.I}


def _gamma_of(diffusion):
    if len(diffusion) != 2 or diffusion[1] != 0.0:
        raise SpecError("spec documents encode D = diag(gamma, 0) only")
    return diffusion[0]


def network_to_document(net, name="", description="", simulation=None):
    """Expanded document (explicit nodes and edges, no generators)."""
    doc = {
        "format_version": FORMAT_VERSION,
        "name": name,
        "description": description,
        "gamma": _gamma_of(net.diffusion),
        "clusters": [
            {"id": cid, "nodes": list(nodes), "model": "fitzhugh-nagumo", "params": _fn_params_record(p)}
            for cid, nodes, p in zip(net.cluster_names, net.clusters, net.cluster_params)
        ],
        "edges": [[i, j, w] for i, j, w in net.edges],
    }
    if simulation is not None:
        doc["simulation"] = simulation
    return doc


def quotient_to_document(q, name="", description="", simulation=None):
    doc = {
        "format_version": FORMAT_VERSION,
        "name": name,
        "description": description,
        "gamma": _gamma_of(q.diffusion),
        "clusters": [
            {"id": cid, "size": 1, "model": "fitzhugh-nagumo", "params": _fn_params_record(p)}
            for cid, p in zip(q.cluster_names, q.cluster_params)
        ],
        "quotient": {"eta": [list(row) for row in q.eta]},
    }
    if simulation is not None:
        doc["simulation"] = simulation
    return doc


def dump_document(doc):
    """Deterministic JSON text for a document dict (or model)."""
    if isinstance(doc, BaseModel):
        doc = doc.model_dump(exclude_none=True)
    return json.dumps(doc, indent=2) + "\n"
