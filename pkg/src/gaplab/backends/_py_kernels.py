"""NumPy fallback for the compiled kernels.

Same call signatures and semantics as ``gaplab._kernels``; the stepping
loops run in Python with a LAPACK eigensolve per step, which is fine for
module tests and small runs but considerably slower on long propagations
(see ``benchmarks/bench_kernels.py``).
"""

import numpy as np


def eigh_sym(h):
    """Eigendecomposition of a real symmetric matrix (ascending eigenvalues)."""
    a = np.asarray(h, dtype=np.float64)
    w, v = np.linalg.eigh(a)
    return w, np.ascontiguousarray(v)


def _record_setup(record_steps, d):
    rec = np.ascontiguousarray(record_steps, dtype=np.int64)
    recorded = np.zeros((rec.shape[0], d), dtype=np.complex128)
    rec_norms = np.zeros(rec.shape[0], dtype=np.float64)
    return rec, recorded, rec_norms


def midpoint_propagate(h0, h1, tau, steps, psi0, record_steps,
                       abort_drift=1e-6, reorth_every=8):
    """Midpoint-exponential stepping for H(s) = (1-s) h0 + s h1, s = t/tau."""
    a0 = np.asarray(h0, dtype=np.float64)
    a1 = np.asarray(h1, dtype=np.float64)
    d = a0.shape[0]
    psi = np.array(psi0, dtype=np.complex128, copy=True)
    rec, recorded, rec_norms = _record_setup(record_steps, d)
    rp = 0
    if rp < rec.shape[0] and rec[rp] == 0:
        recorded[0] = psi
        rec_norms[0] = np.linalg.norm(psi)
        rp += 1
    dt = tau / steps
    bad_step = -1
    for j in range(steps):
        smid = (j + 0.5) / steps
        w, v = np.linalg.eigh((1.0 - smid) * a0 + smid * a1)
        psi = v @ (np.exp(-1j * dt * w) * (v.T @ psi))
        nrm = np.linalg.norm(psi)
        if abs(nrm - 1.0) > abort_drift:
            bad_step = j
            break
        if rp < rec.shape[0] and rec[rp] == j + 1:
            recorded[rp] = psi
            rec_norms[rp] = nrm
            rp += 1
    return psi, recorded, rec_norms, bad_step


def trotter_propagate(h0, h1, tau, steps, psi0, record_steps, abort_drift=1e-6):
    """First-order split-step product; s_j = j/steps, h1 factor first."""
    w0, v0 = eigh_sym(h0)
    w1, v1 = eigh_sym(h1)
    d = v0.shape[0]
    psi = np.array(psi0, dtype=np.complex128, copy=True)
    rec, recorded, rec_norms = _record_setup(record_steps, d)
    rp = 0
    if rp < rec.shape[0] and rec[rp] == 0:
        recorded[0] = psi
        rec_norms[0] = np.linalg.norm(psi)
        rp += 1
    dt = tau / steps
    bad_step = -1
    for j in range(1, steps + 1):
        sj = j / steps
        psi = v1 @ (np.exp(-1j * dt * sj * w1) * (v1.T @ psi))
        psi = v0 @ (np.exp(-1j * dt * (1.0 - sj) * w0) * (v0.T @ psi))
        nrm = np.linalg.norm(psi)
        if abs(nrm - 1.0) > abort_drift:
            bad_step = j - 1
            break
        if rp < rec.shape[0] and rec[rp] == j:
            recorded[rp] = psi
            rec_norms[rp] = nrm
            rp += 1
    return psi, recorded, rec_norms, bad_step
