"""Eigensystem contract, gap scans, and closed-form gap references."""

import math

import numpy as np
import pytest

from gaplab import rng as grng
from gaplab.model import build_theta_model
from gaplab.spectra import (
    closed_form_gap_theta1,
    closed_form_gap_thetan,
    eigensystem,
    gap_at,
    gap_scan,
    phase_diagram,
)

# regression table: measured minimal gaps for the 20-qubit sweep
# (grid=101, refine=6).  Comparison at rel=1e-5: refinement may bracket
# either member of a mirror-symmetric argmin pair depending on the
# eigensolver backend, shifting the sampled minimum by ~5e-7 relative.
PHASE_DIAGRAM_N20 = {
    1: 0.000976562499999889,
    2: 0.001953721123742702,
    3: 0.0029659157479877685,
    4: 0.004649673253348974,
    5: 0.014335604924257783,
    6: 0.1380150653948795,
    7: 0.2837889858158995,
    8: 0.4109858443448027,
    9: 0.5389124325949162,
    10: 0.6510896641426873,
    11: 0.7069294769339818,
    12: 0.7070858507126752,
    13: 0.7071047882563843,
    14: 0.707106626057624,
    15: 0.7071067719560538,
    16: 0.7071067807736631,
    17: 0.7071067811733771,
    18: 0.707106781186277,
    19: 0.7071067811865435,
    20: 0.7071067811865346,
}


def test_eigensystem_identity():
    w, v = eigensystem(np.eye(5))
    assert np.allclose(w, 1.0)
    assert np.allclose(v, np.eye(5))


def test_eigensystem_diagonal_cutoff():
    model = build_theta_model(5, 3)
    w, _ = eigensystem(model.h1)
    assert np.allclose(w, [0, 1, 2, 3, 3, 3], atol=1e-14)


def test_eigensystem_residual_and_phase():
    gen = grng.stream(11, "spectra-residual")
    for _ in range(50):
        d = int(gen.integers(2, 66))
        a = gen.standard_normal((d, d))
        a = (a + a.T) / 2
        w, v = eigensystem(a)
        scale = max(abs(w[0]), abs(w[-1]))
        assert np.abs(a @ v - v * w).max() <= 1e-9 * scale
        assert np.all(np.diff(w) >= -1e-12)
        for col in v.T:
            lead = col[np.abs(col) > 1e-12 * np.abs(col).max()][0]
            assert lead > 0


def test_gap_at_trivial_endpoint():
    model = build_theta_model(9, 9)
    assert gap_at(model, 0.0) == pytest.approx(1.0, abs=1e-10)


def test_gap_at_known_midpoints():
    assert gap_at(build_theta_model(4, 1), 0.5) == pytest.approx(0.25, abs=1e-10)
    assert gap_at(build_theta_model(6, 6), 0.5) == pytest.approx(
        1 / math.sqrt(2), abs=1e-10
    )


@pytest.mark.parametrize("n", [2, 4, 8, 16])
def test_closed_forms_match_solver(n):
    m1 = build_theta_model(n, 1)
    mn = build_theta_model(n, n)
    for s in np.linspace(0, 1, 21):
        s = float(s)
        assert gap_at(m1, s) == pytest.approx(closed_form_gap_theta1(n, s), abs=1e-9)
        assert gap_at(mn, s) == pytest.approx(closed_form_gap_thetan(n, s), abs=1e-9)


def test_closed_form_theta1_values():
    assert closed_form_gap_theta1(8, 0.5) == pytest.approx(2**-4, rel=1e-12)
    assert closed_form_gap_theta1(8, 0.0) == pytest.approx(1.0, abs=1e-15)
    assert closed_form_gap_theta1(8, 0.3) == pytest.approx(
        gap_at(build_theta_model(8, 1), 0.3), abs=1e-10
    )


def test_closed_form_thetan_values():
    assert closed_form_gap_thetan(10, 0.5) == pytest.approx(1 / math.sqrt(2), rel=1e-15)
    assert closed_form_gap_thetan(10, 0.0) == 1.0
    assert closed_form_gap_thetan(10, 0.7) == pytest.approx(
        gap_at(build_theta_model(10, 10), 0.7), abs=1e-10
    )


def test_gap_scan_theta1():
    scan = gap_scan(build_theta_model(4, 1), 101, 6)
    assert scan.min_gap == pytest.approx(0.25, abs=1e-9)
    assert scan.min_s == pytest.approx(0.5, abs=1e-4)


def test_gap_scan_thetan():
    scan = gap_scan(build_theta_model(12, 12), 101, 6)
    assert scan.min_gap == pytest.approx(1 / math.sqrt(2), abs=1e-9)
    assert scan.min_s == pytest.approx(0.5, abs=1e-4)


def test_gap_scan_min_not_above_samples():
    scan = gap_scan(build_theta_model(10, 4), 51, 4)
    assert scan.min_gap <= scan.samples[:, 3].min() + 1e-15
    assert np.all(scan.samples[:, 3] >= -1e-12)


def test_gap_scan_validates_grid():
    with pytest.raises(ValueError):
        gap_scan(build_theta_model(4, 2), initial_grid=2)


def test_phase_diagram_n20_regression():
    rows = phase_diagram(20, range(1, 21), 101, 6)
    for theta, min_gap, _ in rows:
        assert min_gap == pytest.approx(PHASE_DIAGRAM_N20[theta], rel=1e-5, abs=1e-12)


def test_phase_diagram_endpoints():
    rows = phase_diagram(20, [1, 20], 101, 6)
    assert rows[0][1] == pytest.approx(2**-10, rel=1e-8)
    assert rows[1][1] == pytest.approx(1 / math.sqrt(2), abs=1e-9)
