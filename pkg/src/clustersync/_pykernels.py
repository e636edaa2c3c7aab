"""Pure numpy versions of the compiled kernels in ``_kernels.pyx``.

Same algorithms and stopping rules; results agree with the compiled path to
rounding, not bit for bit.
"""
import numpy as np


def jacobi_eigvalsh(a_in, tol=1e-12, max_sweeps=100):
    """Cyclic Jacobi eigenvalues of a symmetric matrix, unsorted.

    Returns ``(eigenvalues, sweeps)``. Stops once the off-diagonal Frobenius
    norm falls below ``tol * ||A||_F``.
    """
    a = np.array(a_in, dtype=np.float64, copy=True)
    n = a.shape[0]
    scale = np.sqrt(np.sum(a * a))
    if scale == 0.0:
        return np.zeros(n), 0
    iu = np.triu_indices(n, 1)

    sweep = 0
    while True:
        upper = a[iu]
        off = np.sqrt(2.0 * np.dot(upper, upper))
        if off <= tol * scale:
            break
        if sweep >= max_sweeps:
            raise RuntimeError(f"Jacobi iteration did not converge in {max_sweeps} sweeps")
        thresh = 0.2 * np.sum(np.abs(upper)) / (n * n) if sweep < 3 else 0.0
        for p in range(n - 1):
            for q in range(p + 1, n):
                apq = a[p, q]
                if apq == 0.0:
                    continue
                g = 100.0 * abs(apq)
                app = a[p, p]
                aqq = a[q, q]
                if sweep > 3 and abs(app) + g == abs(app) and abs(aqq) + g == abs(aqq):
                    a[p, q] = 0.0
                    a[q, p] = 0.0
                    continue
                if abs(apq) <= thresh or apq == 0.0:
                    continue
                h = aqq - app
                if abs(h) + g == abs(h):
                    t = apq / h
                else:
                    theta = 0.5 * h / apq
                    t = 1.0 / (abs(theta) + np.sqrt(1.0 + theta * theta))
                    if theta < 0.0:
                        t = -t
                c = 1.0 / np.sqrt(1.0 + t * t)
                s = t * c
                col_p = a[:, p].copy()
                col_q = a[:, q]
                new_p = c * col_p - s * col_q
                new_q = s * col_p + c * col_q
                a[:, p] = new_p
                a[:, q] = new_q
                a[p, :] = new_p
                a[q, :] = new_q
                a[p, p] = app - t * apq
                a[q, q] = aqq + t * apq
                a[p, q] = 0.0
                a[q, p] = 0.0
        sweep += 1

    return np.diag(a).copy(), sweep


def _csr_coupling(indptr, indices, weights, x):
    """``sum_k w_k (x[j_k] - x[i])`` per CSR row, in index order."""
    n = len(indptr) - 1
    out = np.zeros(n)
    if len(indices) == 0:
        return out
    rows = np.repeat(np.arange(n), np.diff(indptr))
    terms = weights * (x[indices] - x[rows])
    nonempty = np.flatnonzero(np.diff(indptr))
    out[nonempty] = np.add.reduceat(terms, indptr[nonempty])
    return out


# blow-up is detected and reported through ``failed_step``, not warnings
@np.errstate(over="ignore", invalid="ignore")
def fn_rk4(indptr, indices, weights, a, b, eps, cur, dy_gain, dz_gain,
           y0, z0, dt, n_steps, save_every):
    """Fixed-step RK4 for a network of FitzHugh-Nagumo nodes.

    See ``_kernels.fn_rk4`` for the contract.
    """
    indptr = np.asarray(indptr, dtype=np.int64)
    indices = np.asarray(indices, dtype=np.int64)
    weights = np.asarray(weights, dtype=np.float64)
    a, b, eps, cur = (np.asarray(v, dtype=np.float64) for v in (a, b, eps, cur))
    n = len(a)

    def rhs(y, z):
        cy = _csr_coupling(indptr, indices, weights, y)
        fy = y - y * y * y / 3.0 - a - z + cur + dy_gain * cy
        fz = eps * (y - b * z)
        if dz_gain != 0.0:
            fz = fz + dz_gain * _csr_coupling(indptr, indices, weights, z)
        return fy, fz

    steps = list(range(0, n_steps + 1, save_every))
    if steps[-1] != n_steps:
        steps.append(n_steps)
    out = np.empty((len(steps), n, 2))
    y = np.array(y0, dtype=np.float64, copy=True)
    z = np.array(z0, dtype=np.float64, copy=True)
    out[0, :, 0] = y
    out[0, :, 1] = z
    slot = 1
    half = 0.5 * dt
    sixth = dt / 6.0
    failed = -1
    for step in range(1, n_steps + 1):
        k1y, k1z = rhs(y, z)
        k2y, k2z = rhs(y + half * k1y, z + half * k1z)
        k3y, k3z = rhs(y + half * k2y, z + half * k2z)
        k4y, k4z = rhs(y + dt * k3y, z + dt * k3z)
        y = y + sixth * (k1y + 2.0 * k2y + 2.0 * k3y + k4y)
        z = z + sixth * (k1z + 2.0 * k2z + 2.0 * k3z + k4z)
        if not (np.all(np.isfinite(y)) and np.all(np.isfinite(z))):
            failed = step
            break
        if step % save_every == 0 or step == n_steps:
            out[slot, :, 0] = y
            out[slot, :, 1] = z
            slot += 1
    return np.asarray(steps[:slot], dtype=np.int64), out[:slot], failed
