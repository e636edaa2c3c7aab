"""Dense symmetric eigenvalues via cyclic Jacobi rotations."""
import numpy as np

from . import _backend

#: Off-diagonal Frobenius norm at convergence, relative to ``||A||_F``.
JACOBI_TOL = 1e-12


def check_symmetric(matrix, atol=1e-12):
    a = np.asarray(matrix, dtype=np.float64)
    if a.ndim != 2 or a.shape[0] != a.shape[1]:
        raise ValueError(f"expected a square matrix, got shape {a.shape}")
    scale = max(1.0, float(np.max(np.abs(a)))) if a.size else 1.0
    if a.size and float(np.max(np.abs(a - a.T))) > atol * scale:
        raise ValueError("matrix is not symmetric")
    return a


def eigvalsh(matrix, backend=None, tol=JACOBI_TOL):
    """Ascending eigenvalues of a symmetric matrix.

    Deterministic for a given backend. The strictly upper and lower triangles
    are averaged first so tiny asymmetries do not bias the rotations.
    """
    a = check_symmetric(matrix)
    if a.shape[0] == 0:
        return np.zeros(0)
    a = 0.5 * (a + a.T)
    w, _ = _backend.get_kernels(backend).jacobi_eigvalsh(a, tol)
    return np.sort(w)
