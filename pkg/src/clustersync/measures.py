"""Logarithmic norms (matrix measures) for the 1, 2, infinity and weighted 2 norms."""
import numpy as np

from . import eigen

MAX_CONDITION = 1e12


class WeightMatrix:
    """Symmetric positive definite state weighting ``P``."""

    def __init__(self, P):
        P = eigen.check_symmetric(np.atleast_2d(np.asarray(P, dtype=np.float64)))
        w = eigen.eigvalsh(P)
        if w[0] <= 0.0:
            raise ValueError(f"weight matrix is not positive definite (smallest eigenvalue {w[0]:.3g})")
        if w[-1] / w[0] > MAX_CONDITION:
            raise ValueError(f"weight matrix condition number {w[-1] / w[0]:.3g} exceeds {MAX_CONDITION:g}")
        self.P = P
        self.P.setflags(write=False)

    @property
    def n(self):
        return self.P.shape[0]

    @property
    def P2(self):
        return self.P @ self.P

    def __array__(self, dtype=None, copy=None):
        return np.array(self.P, dtype=dtype)

    def __eq__(self, other):
        return isinstance(other, WeightMatrix) and np.array_equal(self.P, other.P)

    def __repr__(self):
        return f"WeightMatrix({self.P.tolist()})"


def _square(A):
    A = np.asarray(A, dtype=np.float64)
    if A.ndim != 2 or A.shape[0] != A.shape[1]:
        raise ValueError(f"expected a square matrix, got shape {A.shape}")
    return A


def mu_1(A):
    """Column form: ``max_j a_jj + sum_{i != j} |a_ij|``."""
    A = _square(A)
    off = np.abs(A - np.diag(np.diag(A))).sum(axis=0)
    return float(np.max(np.diag(A) + off))


def mu_inf(A):
    """Row form: ``max_i a_ii + sum_{j != i} |a_ij|``."""
    A = _square(A)
    off = np.abs(A - np.diag(np.diag(A))).sum(axis=1)
    return float(np.max(np.diag(A) + off))


def mu_2(A):
    """Largest eigenvalue of the symmetric part."""
    A = _square(A)
    return float(eigen.eigvalsh(0.5 * (A + A.T))[-1])


def similarity(A, P):
    """``P A P^{-1}``, with the inverse applied by a linear solve."""
    A = _square(A)
    Pm = P.P if isinstance(P, WeightMatrix) else WeightMatrix(P).P
    if Pm.shape != A.shape:
        raise ValueError(f"weight matrix shape {Pm.shape} does not match {A.shape}")
    # (P A) P^{-1} = (P^{-T} (P A)^T)^T
    return np.linalg.solve(Pm.T, (Pm @ A).T).T


def mu_2_weighted(A, P):
    """Measure induced by ``||x||_{2,P} = ||P x||_2``."""
    return mu_2(similarity(A, P))
