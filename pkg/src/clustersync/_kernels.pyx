# cython: boundscheck=False, wraparound=False, cdivision=True, initializedcheck=False
"""Compiled hot loops. Mirrors ``_pykernels`` operation for operation."""

import numpy as np
cimport numpy as cnp
from libc.math cimport fabs, sqrt, isfinite

cnp.import_array()


def jacobi_eigvalsh(a_in, double tol=1e-12, int max_sweeps=100):
    """Cyclic Jacobi eigenvalues of a symmetric matrix, unsorted.

    Returns ``(eigenvalues, sweeps)``. Stops once the off-diagonal Frobenius
    norm falls below ``tol * ||A||_F``.
    """
    cdef cnp.ndarray[cnp.float64_t, ndim=2] arr = np.array(a_in, dtype=np.float64, order="C", copy=True)
    cdef double[:, ::1] a = arr
    cdef Py_ssize_t n = a.shape[0]
    cdef Py_ssize_t p, q, k
    cdef int sweep = 0
    cdef double scale = 0.0, off, sm, thresh, apq, app, aqq, g, h, theta, t, c, s, akp, akq
    for p in range(n):
        for q in range(n):
            scale += a[p, q] * a[p, q]
    scale = sqrt(scale)
    if scale == 0.0:
        return np.zeros(n), 0

    while True:
        off = 0.0
        sm = 0.0
        for p in range(n - 1):
            for q in range(p + 1, n):
                off += a[p, q] * a[p, q]
                sm += fabs(a[p, q])
        off = sqrt(2.0 * off)
        if off <= tol * scale:
            break
        if sweep >= max_sweeps:
            raise RuntimeError("Jacobi iteration did not converge in %d sweeps" % max_sweeps)
        thresh = 0.2 * sm / (n * n) if sweep < 3 else 0.0
        for p in range(n - 1):
            for q in range(p + 1, n):
                apq = a[p, q]
                g = 100.0 * fabs(apq)
                if sweep > 3 and fabs(a[p, p]) + g == fabs(a[p, p]) and fabs(a[q, q]) + g == fabs(a[q, q]):
                    a[p, q] = 0.0
                    a[q, p] = 0.0
                    continue
                if fabs(apq) <= thresh or apq == 0.0:
                    continue
                app = a[p, p]
                aqq = a[q, q]
                h = aqq - app
                if fabs(h) + g == fabs(h):
                    t = apq / h
                else:
                    theta = 0.5 * h / apq
                    t = 1.0 / (fabs(theta) + sqrt(1.0 + theta * theta))
                    if theta < 0.0:
                        t = -t
                c = 1.0 / sqrt(1.0 + t * t)
                s = t * c
                for k in range(n):
                    akp = a[k, p]
                    akq = a[k, q]
                    a[k, p] = c * akp - s * akq
                    a[k, q] = s * akp + c * akq
                for k in range(n):
                    a[p, k] = a[k, p]
                    a[q, k] = a[k, q]
                a[p, p] = app - t * apq
                a[q, q] = aqq + t * apq
                a[p, q] = 0.0
                a[q, p] = 0.0
        sweep += 1

    out = np.empty(n)
    for p in range(n):
        out[p] = a[p, p]
    return out, sweep


cdef inline void _fn_rhs(
    Py_ssize_t n,
    const cnp.int64_t* indptr,
    const cnp.int64_t* indices,
    const double* weights,
    const double* a,
    const double* b,
    const double* eps,
    const double* cur,
    double dy_gain,
    double dz_gain,
    const double* y,
    const double* z,
    double* fy,
    double* fz,
) noexcept nogil:
    cdef Py_ssize_t i, k, j
    cdef double yi, zi, cy, cz
    for i in range(n):
        yi = y[i]
        zi = z[i]
        cy = 0.0
        cz = 0.0
        for k in range(indptr[i], indptr[i + 1]):
            j = indices[k]
            cy += weights[k] * (y[j] - yi)
            cz += weights[k] * (z[j] - zi)
        fy[i] = yi - yi * yi * yi / 3.0 - a[i] - zi + cur[i] + dy_gain * cy
        fz[i] = eps[i] * (yi - b[i] * zi) + dz_gain * cz


def fn_rk4(indptr, indices, weights, a, b, eps, cur, double dy_gain, double dz_gain,
           y0, z0, double dt, cnp.int64_t n_steps, cnp.int64_t save_every):
    """Fixed-step RK4 for a network of FitzHugh-Nagumo nodes.

    Coupling for node ``i`` is ``sum_k w_k (x[j_k] - x[i])`` over the CSR row,
    accumulated in index order. Returns ``(saved_steps, states, failed_step)``
    where ``states`` has shape ``(n_saved, N, 2)`` and ``failed_step`` is -1
    unless a non-finite value appeared.
    """
    cdef const cnp.int64_t[::1] ip = np.ascontiguousarray(indptr, dtype=np.int64)
    cdef const cnp.int64_t[::1] ix = np.ascontiguousarray(indices, dtype=np.int64)
    cdef const double[::1] w = np.ascontiguousarray(weights, dtype=np.float64)
    cdef const double[::1] av = np.ascontiguousarray(a, dtype=np.float64)
    cdef const double[::1] bv = np.ascontiguousarray(b, dtype=np.float64)
    cdef const double[::1] ev = np.ascontiguousarray(eps, dtype=np.float64)
    cdef const double[::1] iv = np.ascontiguousarray(cur, dtype=np.float64)
    cdef Py_ssize_t n = av.shape[0]
    cdef double[::1] y = np.array(y0, dtype=np.float64, copy=True)
    cdef double[::1] z = np.array(z0, dtype=np.float64, copy=True)
    cdef double[::1] ty = np.empty(n)
    cdef double[::1] tz = np.empty(n)
    cdef double[::1] k1y = np.empty(n), k1z = np.empty(n)
    cdef double[::1] k2y = np.empty(n), k2z = np.empty(n)
    cdef double[::1] k3y = np.empty(n), k3z = np.empty(n)
    cdef double[::1] k4y = np.empty(n), k4z = np.empty(n)
    if n == 0 or y.shape[0] != n or z.shape[0] != n or bv.shape[0] != n or ev.shape[0] != n \
            or iv.shape[0] != n or ip.shape[0] != n + 1 or ix.shape[0] != w.shape[0] \
            or ip[n] != ix.shape[0]:
        raise ValueError("inconsistent array sizes")
    if save_every < 1 or n_steps < 1:
        raise ValueError("n_steps and save_every must be positive")

    # saved steps 0, k, 2k, ... plus the final step (no negative indexing: wraparound is off)
    steps = list(range(0, n_steps + 1, save_every))
    if n_steps % save_every != 0:
        steps.append(n_steps)
    cdef Py_ssize_t n_saved = len(steps)
    out_arr = np.empty((n_saved, n, 2))
    cdef double[:, :, ::1] out = out_arr
    cdef Py_ssize_t i, slot = 0
    cdef cnp.int64_t step
    cdef cnp.int64_t failed = -1
    cdef double half = 0.5 * dt, sixth = dt / 6.0
    cdef bint ok

    for i in range(n):
        out[0, i, 0] = y[i]
        out[0, i, 1] = z[i]
    slot = 1

    # raw pointers keep memoryview reference counting out of the nogil loop
    cdef const cnp.int64_t* pip = &ip[0]
    cdef const cnp.int64_t* pix = &ix[0] if ix.shape[0] > 0 else NULL
    cdef const double* pw = &w[0] if w.shape[0] > 0 else NULL
    cdef const double* pa = &av[0]
    cdef const double* pb = &bv[0]
    cdef const double* pe = &ev[0]
    cdef const double* pc = &iv[0]
    cdef double* py = &y[0]
    cdef double* pz = &z[0]
    cdef double* pty = &ty[0]
    cdef double* ptz = &tz[0]
    cdef double* p1y = &k1y[0]
    cdef double* p1z = &k1z[0]
    cdef double* p2y = &k2y[0]
    cdef double* p2z = &k2z[0]
    cdef double* p3y = &k3y[0]
    cdef double* p3z = &k3z[0]
    cdef double* p4y = &k4y[0]
    cdef double* p4z = &k4z[0]

    with nogil:
        for step in range(1, n_steps + 1):
            _fn_rhs(n, pip, pix, pw, pa, pb, pe, pc, dy_gain, dz_gain, py, pz, p1y, p1z)
            for i in range(n):
                ty[i] = y[i] + half * k1y[i]
                tz[i] = z[i] + half * k1z[i]
            _fn_rhs(n, pip, pix, pw, pa, pb, pe, pc, dy_gain, dz_gain, pty, ptz, p2y, p2z)
            for i in range(n):
                ty[i] = y[i] + half * k2y[i]
                tz[i] = z[i] + half * k2z[i]
            _fn_rhs(n, pip, pix, pw, pa, pb, pe, pc, dy_gain, dz_gain, pty, ptz, p3y, p3z)
            for i in range(n):
                ty[i] = y[i] + dt * k3y[i]
                tz[i] = z[i] + dt * k3z[i]
            _fn_rhs(n, pip, pix, pw, pa, pb, pe, pc, dy_gain, dz_gain, pty, ptz, p4y, p4z)
            ok = True
            for i in range(n):
                y[i] = y[i] + sixth * (k1y[i] + 2.0 * k2y[i] + 2.0 * k3y[i] + k4y[i])
                z[i] = z[i] + sixth * (k1z[i] + 2.0 * k2z[i] + 2.0 * k3z[i] + k4z[i])
                if not (isfinite(y[i]) and isfinite(z[i])):
                    ok = False
            if not ok:
                failed = step
                break
            if step % save_every == 0 or step == n_steps:
                for i in range(n):
                    out[slot, i, 0] = y[i]
                    out[slot, i, 1] = z[i]
                slot += 1

    return np.asarray(steps[:slot], dtype=np.int64), out_arr[:slot], failed
