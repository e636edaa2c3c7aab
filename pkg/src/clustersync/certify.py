"""Contraction certificates for cluster synchronization.

For cluster ``r`` with effective connectivity ``Lambda_r = lambda2(L_{C_r}) +
lambda2(L_bar)`` the cluster rate is ``sup_x mu_{2,P}[J_r(x) - Lambda_r D]``
and the network rate ``mu`` is the maximum over clusters. ``mu < 0`` certifies
exponential convergence to the cluster synchronization manifold.
"""
from __future__ import annotations

import itertools
import math
from dataclasses import dataclass

import numpy as np

from . import eigen
from .dynamics import FNParams
from .measures import WeightMatrix, mu_2_weighted


class CertificateUnavailable(ValueError):
    """A cluster cannot be certified (e.g. zero effective connectivity)."""


@dataclass(frozen=True)
class ClusterCertificate:
    name: str
    Lambda: float
    mu: float
    gamma_threshold: float
    certified: bool

    def as_dict(self):
        return {
            "name": self.name,
            "Lambda": self.Lambda,
            "mu": self.mu,
            "gamma_threshold": self.gamma_threshold,
            "certified": self.certified,
        }


@dataclass(frozen=True)
class Certificate:
    """Weight matrix, per-cluster rates and the overall verdict.

    ``sampled`` marks grid-based rates, which are lower bounds on the true
    supremum: usable to falsify, never to certify.
    """

    P: WeightMatrix
    per_cluster: tuple
    mu: float
    sampled: bool = False

    def __post_init__(self):
        if self.per_cluster and self.mu != max(c.mu for c in self.per_cluster):
            raise ValueError("overall mu must equal the largest cluster rate")

    @property
    def contractive(self):
        return self.mu < 0.0 and not self.sampled

    @property
    def verdict(self):
        if self.sampled:
            return "sampled" if self.mu < 0.0 else "falsified"
        return "contractive" if self.mu < 0.0 else "inconclusive"

    def as_dict(self):
        return {
            "P": self.P.P.tolist(),
            "mu": self.mu,
            "verdict": self.verdict,
            "sampled": self.sampled,
            "clusters": [c.as_dict() for c in self.per_cluster],
        }


def check_weight_compatible(P, D, tol=1e-10):
    """``P^2 D + D P^2`` must be positive semidefinite."""
    P2 = P.P2
    D = np.atleast_2d(np.asarray(D, dtype=np.float64))
    if D.ndim == 2 and D.shape[0] == 1 and P2.shape[0] > 1:
        D = np.diag(D[0])
    S = P2 @ D + D @ P2
    lo = eigen.eigvalsh(0.5 * (S + S.T))[0]
    if lo < -tol:
        raise CertificateUnavailable(f"P^2 D + D P^2 is not positive semidefinite (smallest eigenvalue {lo:.3g})")


# ---------------------------------------------------------------------------
# FitzHugh-Nagumo

def fn_weight_matrix(clusters):
    """``P = diag(1, p)`` with ``p = max_r epsilon_r^{-1/2}``."""
    eps = [c.epsilon for c in clusters]
    if not eps or min(eps) <= 0.0:
        raise ValueError("every cluster needs epsilon > 0")
    p = max(1.0 / math.sqrt(e) for e in eps)
    return WeightMatrix(np.diag([1.0, p]))


def _p_of(P):
    if isinstance(P, WeightMatrix):
        return float(P.P[1, 1])
    return float(P)


def fn_alpha(params, p):
    """Penalty ``(epsilon p - 1/p)^2 / (4 b epsilon)``; zero when ``p = epsilon^{-1/2}``."""
    return (params.epsilon * p - 1.0 / p) ** 2 / (4.0 * params.b * params.epsilon)


def fn_gamma_threshold(params, p, Lambda, name=None):
    """Smallest certified FN coupling gain: ``gamma > (1 + alpha_r) / Lambda_r``."""
    if not Lambda > 0.0:
        label = f"cluster {name}" if name is not None else "cluster"
        raise CertificateUnavailable(
            f"{label} has effective connectivity {Lambda:.3g} <= 0; its subgraph plus the "
            "inter-cluster graph is not connected enough to certify"
        )
    return (1.0 + fn_alpha(params, _p_of(p))) / Lambda


def legacy_fn_threshold(lambda2, epsilon, beta):
    """Earlier single-cluster FN bound ``(1 + epsilon + beta^2/3) / lambda2``.

    ``beta`` is the ultimate bound on the membrane potential.
    """
    return (1.0 + epsilon + beta * beta / 3.0) / lambda2


def fn_block_matrix(params, p, gamma, Lambda, y=0.0):
    """Symmetric part of ``P (J(y) - Lambda D) P^{-1}`` for ``D = diag(gamma, 0)``."""
    p = _p_of(p)
    off = 0.5 * (params.epsilon * p - 1.0 / p)
    return np.array([[1.0 - y * y - gamma * Lambda, off], [off, -params.b * params.epsilon]])


def lambda_max_2x2(B):
    """Largest eigenvalue of a symmetric 2x2 matrix in closed form."""
    a, c, d = float(B[0, 0]), float(B[0, 1]), float(B[1, 1])
    return 0.5 * (a + d) + math.hypot(0.5 * (a - d), c)


def fn_certificate_mu(net, split, gamma=None):
    """Analytic FN certificate, global in the state.

    ``1 - y^2`` is the only state-dependent Jacobian entry and is maximal at
    ``y = 0``, so the supremum over states is the value there. ``gamma``
    defaults to the network's membrane-potential diffusion gain.
    """
    if not all(isinstance(m, FNParams) for m in net.cluster_params):
        raise TypeError("fn_certificate_mu needs FitzHugh-Nagumo clusters")
    if net.diffusion[1] != 0.0:
        raise CertificateUnavailable("the FN certificate assumes D = diag(gamma, 0)")
    if split.singletons:
        names = [net.cluster_names[r] for r in split.singletons]
        raise CertificateUnavailable(f"clusters {names} have fewer than 2 nodes")
    gamma = net.diffusion[0] if gamma is None else float(gamma)

    P = fn_weight_matrix(net.cluster_params)
    check_weight_compatible(P, np.diag([gamma, 0.0]))
    p = _p_of(P)
    rows = []
    for name, params, Lam in zip(net.cluster_names, net.cluster_params, split.Lambda):
        mu_r = lambda_max_2x2(fn_block_matrix(params, p, gamma, Lam))
        try:
            thr = fn_gamma_threshold(params, p, Lam, name)
        except CertificateUnavailable:
            thr = math.inf
        rows.append(ClusterCertificate(name, Lam, mu_r, thr, mu_r < 0.0))
    return Certificate(P=P, per_cluster=tuple(rows), mu=max(r.mu for r in rows))


# ---------------------------------------------------------------------------
# generic sampled path

def grid_points(box, grid):
    """Corner-inclusive regular grid; ``grid == 1`` uses the box centre."""
    if grid < 1:
        raise ValueError("grid must have at least one sample per dimension")
    axes = []
    for lo, hi in box:
        if hi < lo:
            raise ValueError(f"empty interval [{lo}, {hi}]")
        axes.append(np.array([0.5 * (lo + hi)]) if grid == 1 else np.linspace(lo, hi, grid))
    return itertools.product(*axes)


def numeric_certificate_mu(models, split, D, P, box, grid, names=None):
    """Grid-sampled cluster rates for arbitrary time-invariant node models."""
    if not isinstance(P, WeightMatrix):
        P = WeightMatrix(P)
    D = np.asarray(D, dtype=np.float64)
    D = np.diag(D) if D.ndim == 1 else D
    if any(not getattr(m, "time_invariant", False) for m in models):
        raise ValueError("sampled certificates need time-invariant models")
    if len(models) != len(split.cluster_eigenvalues):
        raise ValueError("one model per cluster is required")
    check_weight_compatible(P, D)
    names = names or [f"C{r + 1}" for r in range(len(models))]
    box = [tuple(map(float, b)) for b in box]
    rows = []
    for name, model, Lam in zip(names, models, split.Lambda):
        best = -math.inf
        for x in grid_points(box, grid):
            J = np.asarray(model.jacobian(np.array(x), 0.0), dtype=np.float64)
            best = max(best, mu_2_weighted(J - Lam * D, P))
        rows.append(ClusterCertificate(name, Lam, best, math.nan, False))
    return Certificate(P=P, per_cluster=tuple(rows), mu=max(r.mu for r in rows), sampled=True)
