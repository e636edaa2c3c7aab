"""Node vector fields, Jacobians and the assembled network right-hand side.

A node model is any object with

* ``n``: state dimension,
* ``time_invariant``: whether ``vector_field``/``jacobian`` ignore ``t``,
* ``vector_field(x, t)``: derivative, vectorized over leading axes of ``x``,
* ``jacobian(x, t)``: ``n x n`` Jacobian at a single state.
"""
from __future__ import annotations

import warnings
from dataclasses import dataclass
from typing import ClassVar, Protocol

import numpy as np


class NodeModel(Protocol):
    n: int
    time_invariant: bool

    def vector_field(self, x, t=0.0): ...

    def jacobian(self, x, t=0.0): ...


@dataclass(frozen=True)
class FNParams:
    """FitzHugh-Nagumo parameters shared by every node of a cluster.

    ``y' = y - y^3/3 - a - z + I``, ``z' = epsilon (y - b z)``.
    """

    a: float
    b: float
    epsilon: float
    I: float

    n: ClassVar[int] = 2
    time_invariant: ClassVar[bool] = True
    model_name: ClassVar[str] = "fitzhugh-nagumo"

    def __post_init__(self):
        for name in ("a", "b", "epsilon", "I"):
            object.__setattr__(self, name, float(getattr(self, name)))
        if not self.b > 0.0:
            raise ValueError(f"FitzHugh-Nagumo b must be positive, got {self.b}")
        if not self.epsilon > 0.0:
            raise ValueError(f"FitzHugh-Nagumo epsilon must be positive, got {self.epsilon}")
        if self.epsilon >= 0.5:
            warnings.warn(f"epsilon={self.epsilon} is not small; the FN timescale separation assumes epsilon << 1",
                          stacklevel=3)

    def vector_field(self, x, t=0.0):
        return fn_vector_field(self, x, t)

    def jacobian(self, x, t=0.0):
        return fn_jacobian(self, x)

    def as_dict(self):
        return {"type": self.model_name, "a": self.a, "b": self.b, "epsilon": self.epsilon, "I": self.I}


def fn_vector_field(params, state, t=0.0):
    x = np.asarray(state, dtype=np.float64)
    y = x[..., 0]
    z = x[..., 1]
    dy = y - y * y * y / 3.0 - params.a - z + params.I
    dz = params.epsilon * (y - params.b * z)
    return np.stack([dy, dz], axis=-1)


def fn_jacobian(params, state):
    y = float(np.asarray(state, dtype=np.float64)[0])
    eps = params.epsilon
    return np.array([[1.0 - y * y, -1.0], [eps, -params.b * eps]])


@dataclass(frozen=True)
class LinearModel:
    """``x' = A x``; mostly useful for exercising the generic paths."""

    A: tuple
    time_invariant: ClassVar[bool] = True
    model_name: ClassVar[str] = "linear"

    def __post_init__(self):
        A = np.asarray(self.A, dtype=np.float64)
        if A.ndim != 2 or A.shape[0] != A.shape[1]:
            raise ValueError("LinearModel needs a square matrix")
        object.__setattr__(self, "A", tuple(tuple(float(v) for v in row) for row in A))

    @property
    def n(self):
        return len(self.A)

    def vector_field(self, x, t=0.0):
        return np.asarray(x, dtype=np.float64) @ np.asarray(self.A).T

    def jacobian(self, x, t=0.0):
        return np.array(self.A)

    def as_dict(self):
        return {"type": self.model_name, "A": [list(r) for r in self.A]}


def finite_difference_jacobian(model, x, t=0.0, h=1e-6):
    """Central-difference Jacobian of ``model.vector_field`` at ``x``."""
    x = np.asarray(x, dtype=np.float64)
    J = np.empty((len(x), len(x)))
    for k in range(len(x)):
        step = np.zeros_like(x)
        step[k] = h
        J[:, k] = (model.vector_field(x + step, t) - model.vector_field(x - step, t)) / (2 * h)
    return J


# ---------------------------------------------------------------------------
# network assembly (canonical node order, X stacked node-major)

def intrinsic_field(net, X, t=0.0):
    """Stacked ``F^i(X^i, t)`` for every node."""
    nodes = np.asarray(X, dtype=np.float64).reshape(net.n_nodes, net.state_dim)
    out = np.empty_like(nodes)
    for (s, e), model in zip(net.cluster_ranges, net.cluster_params):
        out[s:e] = model.vector_field(nodes[s:e], t)
    return out.reshape(-1)


def _edge_accumulate(indptr, indices, weights, nodes):
    n = len(indptr) - 1
    out = np.zeros_like(nodes)
    if len(indices) == 0:
        return out
    rows = np.repeat(np.arange(n), np.diff(indptr))
    terms = weights[:, None] * (nodes[indices] - nodes[rows])
    nonempty = np.flatnonzero(np.diff(indptr))
    out[nonempty] = np.add.reduceat(terms, indptr[nonempty], axis=0)
    return out


def coupling(net, X):
    """``-(L kron D) X`` accumulated edge by edge: ``sum_j w_ij D (X^j - X^i)``."""
    nodes = np.asarray(X, dtype=np.float64).reshape(net.n_nodes, net.state_dim)
    indptr, indices, weights = net.adjacency_csr
    acc = _edge_accumulate(indptr, indices, weights, nodes)
    return (acc * np.asarray(net.diffusion)).reshape(-1)


def coupling_kron(L, D, X):
    """``-(L kron D) X`` through the explicit Kronecker product."""
    return -(np.kron(L, D) @ np.asarray(X, dtype=np.float64))


def network_rhs(net, split, X, t=0.0):
    """``F(X, t) - (L kron D) X`` for the stacked canonical state ``X``."""
    X = np.asarray(X, dtype=np.float64)
    if X.shape != (net.n_nodes * net.state_dim,):
        raise ValueError(f"state must have length {net.n_nodes * net.state_dim}, got shape {X.shape}")
    if split is not None and split.L.shape[0] != net.n_nodes:
        raise ValueError("Laplacian split does not match the network")
    return intrinsic_field(net, X, t) + coupling(net, X)
