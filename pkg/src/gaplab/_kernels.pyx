# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True, initializedcheck=False
"""Compiled numeric kernels.

Hot loops only: a cyclic Jacobi eigensolver for small dense symmetric
matrices and the two Schrodinger stepping loops (midpoint-exponential with a
warm-started eigenbasis, and the first-order split-step product).  The
NumPy fallback in ``gaplab.backends._py_kernels`` implements the identical
contract; ``gaplab.backends`` picks one at import time.

No BLAS/LAPACK calls here: plain C loops over typed memoryviews keep the
results deterministic and platform-independent.
"""

import numpy as np

from libc.math cimport cos, fabs, sin, sqrt

DEF MAX_SWEEPS = 64


cdef double _off_norm(double[:, ::1] a) noexcept:
    cdef Py_ssize_t d = a.shape[0], p, q
    cdef double s = 0.0
    for p in range(d):
        for q in range(p + 1, d):
            s += a[p, q] * a[p, q]
    return sqrt(2.0 * s)


cdef double _fro_norm(double[:, ::1] a) noexcept:
    cdef Py_ssize_t d = a.shape[0], p, q
    cdef double s = 0.0
    for p in range(d):
        for q in range(d):
            s += a[p, q] * a[p, q]
    return sqrt(s)


cdef int _jacobi(double[:, ::1] a, double[:, ::1] v, double tol) noexcept:
    """Cyclic-by-row Jacobi sweeps on symmetric ``a``.

    Rotations are accumulated into ``v`` (as ``v @ G``), so on entry ``v`` may
    hold a warm-start basis with ``a = v.T @ h @ v`` nearly diagonal.  Returns
    the sweep count on convergence (off-diagonal Frobenius norm <= tol) or -1.
    """
    cdef Py_ssize_t d = a.shape[0], p, q, i, sweep
    cdef double apq, app, aqq, theta, t, c, s, x, y, thresh
    if d <= 1:
        return 0
    thresh = tol / <double> (d * d)
    for sweep in range(MAX_SWEEPS):
        if _off_norm(a) <= tol:
            return sweep
        for p in range(d - 1):
            for q in range(p + 1, d):
                apq = a[p, q]
                if fabs(apq) <= thresh:
                    continue
                app = a[p, p]
                aqq = a[q, q]
                theta = 0.5 * (aqq - app) / apq
                t = 1.0 / (fabs(theta) + sqrt(theta * theta + 1.0))
                if theta < 0.0:
                    t = -t
                c = 1.0 / sqrt(t * t + 1.0)
                s = t * c
                for i in range(d):
                    x = a[i, p]
                    y = a[i, q]
                    a[i, p] = c * x - s * y
                    a[i, q] = s * x + c * y
                for i in range(d):
                    x = a[p, i]
                    y = a[q, i]
                    a[p, i] = c * x - s * y
                    a[q, i] = s * x + c * y
                for i in range(d):
                    x = v[i, p]
                    y = v[i, q]
                    v[i, p] = c * x - s * y
                    v[i, q] = s * x + c * y
    if _off_norm(a) <= tol:
        return MAX_SWEEPS
    return -1


cdef void _orthonormalize_columns(double[:, ::1] v) noexcept:
    """Modified Gram-Schmidt over columns, in place (drift repair)."""
    cdef Py_ssize_t d = v.shape[0], k, j, i
    cdef double r
    for k in range(d):
        for j in range(k):
            r = 0.0
            for i in range(d):
                r += v[i, j] * v[i, k]
            for i in range(d):
                v[i, k] -= r * v[i, j]
        r = 0.0
        for i in range(d):
            r += v[i, k] * v[i, k]
        r = sqrt(r)
        if r > 0.0:
            for i in range(d):
                v[i, k] /= r


def eigh_sym(h):
    """Eigendecomposition of a real symmetric matrix by cyclic Jacobi.

    Returns ``(w, v)`` with eigenvalues ascending and eigenvectors in the
    columns of ``v``.  Raises ``RuntimeError`` if the sweeps do not converge.
    """
    a = np.array(h, dtype=np.float64, order="C", copy=True)
    cdef Py_ssize_t d = a.shape[0]
    v = np.eye(d, dtype=np.float64)
    cdef double tol = 1e-13 * _fro_norm(a)
    cdef int sweeps = _jacobi(a, v, tol)
    if sweeps < 0:
        raise RuntimeError(
            "jacobi eigensolver did not converge within %d sweeps (dim %d)"
            % (MAX_SWEEPS, d)
        )
    w = np.diagonal(a).copy()
    order = np.argsort(w, kind="stable")
    return w[order], np.ascontiguousarray(v[:, order])


cdef void _similarity(double[:, ::1] h, double[:, ::1] v,
                      double[:, ::1] tmp, double[:, ::1] out) noexcept:
    """out = v.T @ h @ v using tmp = h @ v as scratch (contiguous inner loops)."""
    cdef Py_ssize_t d = h.shape[0], i, j, k
    cdef double x
    for i in range(d):
        for j in range(d):
            tmp[i, j] = 0.0
        for k in range(d):
            x = h[i, k]
            for j in range(d):
                tmp[i, j] += x * v[k, j]
    for i in range(d):
        for j in range(d):
            out[i, j] = 0.0
    for k in range(d):
        for i in range(d):
            x = v[k, i]
            for j in range(d):
                out[i, j] += x * tmp[k, j]


cdef void _apply_exp(double[:, ::1] v, double[::1] w, double dt,
                     double complex[::1] psi, double complex[::1] scratch) noexcept:
    """psi <- v @ diag(exp(-i dt w)) @ v.T @ psi."""
    cdef Py_ssize_t d = v.shape[0], i, k
    cdef double complex acc, x
    cdef double ang
    for k in range(d):
        scratch[k] = 0.0
    for i in range(d):
        x = psi[i]
        for k in range(d):
            scratch[k] += v[i, k] * x
    for k in range(d):
        ang = -dt * w[k]
        scratch[k] = scratch[k] * (cos(ang) + 1j * sin(ang))
    for i in range(d):
        acc = 0.0
        for k in range(d):
            acc += v[i, k] * scratch[k]
        psi[i] = acc


cdef double _norm(double complex[::1] psi) noexcept:
    cdef Py_ssize_t d = psi.shape[0], i
    cdef double s = 0.0
    for i in range(d):
        s += psi[i].real * psi[i].real + psi[i].imag * psi[i].imag
    return sqrt(s)


def midpoint_propagate(h0, h1, double tau, Py_ssize_t steps, psi0,
                       record_steps, double abort_drift=1e-6,
                       Py_ssize_t reorth_every=8):
    """Propagate i dpsi/dt = H(t/tau) psi with H(s) = (1-s) h0 + s h1.

    One exact exponential of the midpoint Hamiltonian per step; the
    eigenbasis of the previous step warm-starts the Jacobi sweep, so the
    per-step cost is a few d^3 multiplies instead of a cold eigensolve.

    ``record_steps`` is a sorted int64 array of step boundaries to record
    (0 = the initial state).  Returns ``(psi, recorded, rec_norms, bad_step)``
    where ``bad_step >= 0`` reports a norm drift beyond ``abort_drift`` (the
    caller raises).
    """
    cdef double[:, ::1] a0 = np.array(h0, dtype=np.float64, order="C", copy=True)
    cdef double[:, ::1] a1 = np.array(h1, dtype=np.float64, order="C", copy=True)
    cdef Py_ssize_t d = a0.shape[0]

    psi_arr = np.array(psi0, dtype=np.complex128, copy=True)
    cdef double complex[::1] psi = psi_arr
    scratch_arr = np.empty(d, dtype=np.complex128)
    cdef double complex[::1] scratch = scratch_arr

    hbuf_arr = np.empty((d, d), dtype=np.float64)
    abuf_arr = np.empty((d, d), dtype=np.float64)
    tmp_arr = np.empty((d, d), dtype=np.float64)
    v_arr = np.eye(d, dtype=np.float64)
    cdef double[:, ::1] hbuf = hbuf_arr
    cdef double[:, ::1] abuf = abuf_arr
    cdef double[:, ::1] tmp = tmp_arr
    cdef double[:, ::1] v = v_arr
    w_arr = np.empty(d, dtype=np.float64)
    cdef double[::1] w = w_arr

    cdef long long[::1] rec = np.array(record_steps, dtype=np.int64, copy=True)
    cdef Py_ssize_t nrec = rec.shape[0]
    recorded = np.zeros((nrec, d), dtype=np.complex128)
    rec_norms = np.zeros(nrec, dtype=np.float64)
    cdef Py_ssize_t rp = 0

    cdef double dt = tau / <double> steps
    cdef double smid, c0, nrm, tol
    cdef Py_ssize_t j, i, k
    cdef int sweeps
    cdef Py_ssize_t bad_step = -1

    if rp < nrec and rec[rp] == 0:
        recorded[0] = psi_arr
        rec_norms[0] = _norm(psi)
        rp += 1

    for j in range(steps):
        smid = (<double> j + 0.5) / <double> steps
        c0 = 1.0 - smid
        for i in range(d):
            for k in range(d):
                hbuf[i, k] = c0 * a0[i, k] + smid * a1[i, k]
        tol = 1e-13 * _fro_norm(hbuf)
        if j == 0:
            abuf_arr[:] = hbuf_arr
            sweeps = _jacobi(abuf, v, tol)
        else:
            _similarity(hbuf, v, tmp, abuf)
            sweeps = _jacobi(abuf, v, tol)
            if sweeps < 0:
                # cold restart once before giving up
                v_arr[:] = np.eye(d)
                abuf_arr[:] = hbuf_arr
                sweeps = _jacobi(abuf, v, tol)
        if sweeps < 0:
            raise RuntimeError(
                "jacobi eigensolver did not converge at step %d" % j
            )
        for k in range(d):
            w[k] = abuf[k, k]
        _apply_exp(v, w, dt, psi, scratch)

        nrm = _norm(psi)
        if fabs(nrm - 1.0) > abort_drift:
            bad_step = j
            break
        if (j + 1) % reorth_every == 0:
            _orthonormalize_columns(v)
        if rp < nrec and rec[rp] == j + 1:
            recorded[rp] = psi_arr
            rec_norms[rp] = nrm
            rp += 1

    return psi_arr, recorded, rec_norms, bad_step


def trotter_propagate(h0, h1, double tau, Py_ssize_t steps, psi0,
                      record_steps, double abort_drift=1e-6):
    """First-order split-step product for the same interpolated schedule.

    Step j (j = 1..steps) applies exp(-i dt (1-s_j) h0) exp(-i dt s_j h1)
    with s_j = j/steps; the h0/h1 eigenbases are computed once.
    """
    w0_arr, v0_arr = eigh_sym(h0)
    w1_arr, v1_arr = eigh_sym(h1)
    cdef double[:, ::1] v0 = v0_arr
    cdef double[:, ::1] v1 = v1_arr
    cdef double[::1] w0 = w0_arr
    cdef double[::1] w1 = w1_arr
    cdef Py_ssize_t d = v0_arr.shape[0]

    psi_arr = np.array(psi0, dtype=np.complex128, copy=True)
    cdef double complex[::1] psi = psi_arr
    scratch_arr = np.empty(d, dtype=np.complex128)
    cdef double complex[::1] scratch = scratch_arr

    cdef long long[::1] rec = np.array(record_steps, dtype=np.int64, copy=True)
    cdef Py_ssize_t nrec = rec.shape[0]
    recorded = np.zeros((nrec, d), dtype=np.complex128)
    rec_norms = np.zeros(nrec, dtype=np.float64)
    cdef Py_ssize_t rp = 0

    cdef double dt = tau / <double> steps
    cdef double sj, nrm
    cdef Py_ssize_t j
    cdef Py_ssize_t bad_step = -1

    if rp < nrec and rec[rp] == 0:
        recorded[0] = psi_arr
        rec_norms[0] = _norm(psi)
        rp += 1

    for j in range(1, steps + 1):
        sj = <double> j / <double> steps
        _apply_exp(v1, w1, dt * sj, psi, scratch)
        _apply_exp(v0, w0, dt * (1.0 - sj), psi, scratch)
        nrm = _norm(psi)
        if fabs(nrm - 1.0) > abort_drift:
            bad_step = j - 1
            break
        if rp < nrec and rec[rp] == j:
            recorded[rp] = psi_arr
            rec_norms[rp] = nrm
            rp += 1

    return psi_arr, recorded, rec_norms, bad_step
