"""Full-space reference checks: everything weight-basis must match it."""

import math

import numpy as np
import pytest

from gaplab import oracle
from gaplab import rng as grng
from gaplab.evolution import EvolutionSpec, propagate
from gaplab.model import SymmetricState, build_theta_model, dicke_state, uniform_superposition


def test_full_hamiltonians_n1():
    h0, h1 = oracle.full_theta_hamiltonians(1, 1)
    assert np.allclose(h1, np.diag([0.0, 1.0]))
    assert np.allclose(h0, [[0.5, -0.5], [-0.5, 0.5]], atol=1e-15)


def test_full_h0_from_single_qubit_terms():
    minus = np.array([[0.5, -0.5], [-0.5, 0.5]])
    eye = np.eye(2)
    expected = (
        np.kron(np.kron(minus, eye), eye)
        + np.kron(np.kron(eye, minus), eye)
        + np.kron(np.kron(eye, eye), minus)
    )
    h0, _ = oracle.full_theta_hamiltonians(3, 3)
    assert np.abs(h0 - expected).max() <= 1e-12


def test_full_trace_identity():
    for n, theta in ((4, 2), (6, 3), (8, 5)):
        _, h1 = oracle.full_theta_hamiltonians(n, theta)
        expected = sum(math.comb(n, k) * min(k, theta) for k in range(n + 1))
        assert np.trace(h1) == pytest.approx(expected, rel=1e-14)


def test_full_spectrum_diagonal_case():
    _, h1 = oracle.full_theta_hamiltonians(3, 2)
    assert np.allclose(oracle.full_spectrum(h1), [0, 1, 1, 1, 2, 2, 2, 2])


def test_endpoint_spectra_match_as_multisets():
    h0, h1 = oracle.full_theta_hamiltonians(6, 4)
    assert np.abs(oracle.full_spectrum(h0) - oracle.full_spectrum(h1)).max() <= 1e-8


def test_cap_enforced():
    with pytest.raises(ValueError):
        oracle.full_theta_hamiltonians(13, 3)


def test_embed_basic_states():
    zero = oracle.symmetric_sector_embed(dicke_state(4, 0))
    expected = np.zeros(16)
    expected[0] = 1.0
    assert np.abs(zero.amps - expected).max() <= 1e-15
    plus = oracle.symmetric_sector_embed(uniform_superposition(4))
    assert np.abs(plus.amps - np.full(16, 0.25)).max() <= 1e-14


def test_embed_project_roundtrip_random():
    for i in range(10):
        gen = grng.stream(6, f"roundtrip-{i}")
        n = int(gen.integers(1, 13))
        amps = gen.standard_normal(n + 1) + 1j * gen.standard_normal(n + 1)
        state = SymmetricState.normalized(n, amps)
        back, leak = oracle.symmetric_sector_project(oracle.symmetric_sector_embed(state))
        assert leak <= 1e-12
        assert np.abs(back.amps - state.amps).max() <= 1e-12


def test_weight_sector_spectrum_subset():
    worst = 0.0
    for n in range(1, 11):
        for theta in range(1, n + 1):
            model = build_theta_model(n, theta)
            h0f, h1f = oracle.full_theta_hamiltonians(n, theta)
            for s in (0.0, 0.25, 0.5, 0.75, 1.0):
                dicke = np.linalg.eigvalsh(model.op(s))
                full = oracle.full_spectrum((1 - s) * h0f + s * h1f)
                for lam in dicke:
                    worst = max(worst, np.abs(full - lam).min())
    assert worst <= 1e-8


def test_sector_gap_matches_weight_basis():
    """Two lowest symmetric-sector levels of the full problem reproduce the
    weight-basis gap (eigenvectors classified by their symmetric component)."""
    n, theta, s = 8, 3, 0.4
    model = build_theta_model(n, theta)
    h0f, h1f = oracle.full_theta_hamiltonians(n, theta)
    w, v = np.linalg.eigh((1 - s) * h0f + s * h1f)
    e = oracle.embedding_matrix(n)
    sym = np.linalg.norm(e.T @ v, axis=0) > 0.5
    lows = w[sym][:2]
    dicke = np.linalg.eigvalsh(model.op(s))
    assert abs((lows[1] - lows[0]) - (dicke[1] - dicke[0])) <= 1e-8


def test_full_propagate_identity_limit():
    state = oracle.symmetric_sector_embed(uniform_superposition(4))
    h0, h1 = oracle.full_theta_hamiltonians(4, 2)
    out = oracle.full_propagate((h0, h1), state, 1e-12, 1)
    assert np.abs(out.amps - state.amps).max() <= 1e-9


def test_full_propagate_eigenstate_phase():
    _, h1 = oracle.full_theta_hamiltonians(4, 4)
    zero = oracle.symmetric_sector_embed(dicke_state(4, 0))
    out = oracle.full_propagate((h1, h1), zero, 3.0, 50)
    assert abs(np.vdot(zero.amps, out.amps)) == pytest.approx(1.0, abs=1e-10)


def test_sector_closure_under_propagation():
    n, theta = 6, 3
    h0, h1 = oracle.full_theta_hamiltonians(n, theta)
    out = oracle.full_propagate(
        (h0, h1), oracle.symmetric_sector_embed(uniform_superposition(n)), 8.0, 800
    )
    _, leak = oracle.symmetric_sector_project(out)
    assert leak <= 1e-7


@pytest.mark.parametrize("theta", [1, 4, 8])
def test_propagation_agreement_n8(theta):
    """Weight-basis and full-space propagation agree on the shared grid."""
    n, tau = 8, 32.0
    model = build_theta_model(n, theta)
    steps = math.ceil(20 * tau * theta)
    psi0 = uniform_superposition(n)
    trace = propagate(EvolutionSpec(model, tau, steps, record_every=steps), psi0)
    h0f, h1f = oracle.full_theta_hamiltonians(n, theta)
    full = oracle.full_propagate((h0f, h1f), oracle.symmetric_sector_embed(psi0), tau, steps)
    lifted = oracle.symmetric_sector_embed(trace.final_state)
    assert np.linalg.norm(lifted.amps - full.amps) <= 1e-6
