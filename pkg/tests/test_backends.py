"""Compiled-kernel vs NumPy-fallback parity and backend selection."""

import numpy as np
import pytest

import gaplab
from gaplab import rng as grng
from gaplab.backends import _py_kernels

compiled = pytest.importorskip("gaplab._kernels") if gaplab.BACKEND == "compiled" else None

pytestmark = pytest.mark.skipif(
    gaplab.BACKEND != "compiled",
    reason="compiled kernels unavailable; parity tests need both backends",
)


def _pair(gen, d):
    a0 = gen.standard_normal((d, d))
    a1 = gen.standard_normal((d, d))
    return (a0 + a0.T) / 2, (a1 + a1.T) / 2


def test_eigh_parity():
    for i in range(40):
        gen = grng.stream(13, f"eigh-{i}")
        d = int(gen.integers(1, 66))
        a, _ = _pair(gen, d)
        w_c, v_c = compiled.eigh_sym(a)
        w_p, _ = _py_kernels.eigh_sym(a)
        assert np.abs(w_c - w_p).max() <= 1e-11 * max(1.0, np.abs(w_p).max())
        assert np.abs(a @ v_c - v_c * w_c).max() <= 1e-11 * max(1.0, np.abs(w_c).max())
        assert np.abs(v_c.T @ v_c - np.eye(d)).max() <= 1e-12


def test_eigh_sorted_ascending():
    gen = grng.stream(13, "sorted")
    a, _ = _pair(gen, 33)
    w, _ = compiled.eigh_sym(a)
    assert np.all(np.diff(w) >= 0)


def test_midpoint_parity():
    for i in range(5):
        gen = grng.stream(13, f"mid-{i}")
        d = int(gen.integers(2, 40))
        a0, a1 = _pair(gen, d)
        psi = gen.standard_normal(d) + 1j * gen.standard_normal(d)
        psi /= np.linalg.norm(psi)
        rec = np.array([0, 500, 1000], dtype=np.int64)
        out_c = compiled.midpoint_propagate(a0, a1, 4.0, 1000, psi, rec)
        out_p = _py_kernels.midpoint_propagate(a0, a1, 4.0, 1000, psi, rec)
        assert out_c[3] == out_p[3] == -1
        assert np.linalg.norm(out_c[0] - out_p[0]) <= 1e-8
        assert np.abs(out_c[1] - out_p[1]).max() <= 1e-8


def test_trotter_parity():
    gen = grng.stream(13, "trotter")
    a0, a1 = _pair(gen, 21)
    psi = gen.standard_normal(21) + 1j * gen.standard_normal(21)
    psi /= np.linalg.norm(psi)
    rec = np.array([2000], dtype=np.int64)
    out_c = compiled.trotter_propagate(a0, a1, 4.0, 2000, psi, rec)
    out_p = _py_kernels.trotter_propagate(a0, a1, 4.0, 2000, psi, rec)
    assert np.linalg.norm(out_c[0] - out_p[0]) <= 1e-9


def test_norm_abort_flag():
    # a deliberately non-symmetric generator cannot occur through the public
    # API; instead check the abort path via an absurd threshold
    gen = grng.stream(13, "abort")
    a0, a1 = _pair(gen, 9)
    psi = np.zeros(9, complex)
    psi[0] = 1.0
    rec = np.array([100], dtype=np.int64)
    _, _, _, bad = compiled.midpoint_propagate(a0, a1, 1.0, 100, psi, rec, 1e-18)
    assert bad >= 0


def test_backend_selection_env():
    import os
    import subprocess
    import sys

    env = dict(os.environ, GAPLAB_BACKEND="python")
    out = subprocess.run(
        [sys.executable, "-c", "import gaplab; print(gaplab.BACKEND)"],
        env=env,
        capture_output=True,
        text=True,
    )
    assert out.stdout.strip() == "python"
