"""Eigensystems, gap scans over the interpolation parameter, and the two
closed-form gap references (cutoff 1 and cutoff n).

The eigensolver is the backend kernel (cyclic Jacobi when compiled); every
call is residual-checked against its contract, and eigenvectors get a
deterministic sign convention so overlap comparisons are reproducible.
"""

import math
from dataclasses import dataclass
from typing import Optional

import numpy as np

from gaplab import backends
from gaplab.errors import EigensolverError
from gaplab.model import SymmetricOperator, ThetaModel, interpolate

RESIDUAL_TOL = 1e-9


def _as_matrix(op):
    if isinstance(op, SymmetricOperator):
        return op.matrix
    return np.asarray(op, dtype=np.float64)


def phase_fix(v: np.ndarray) -> np.ndarray:
    """Flip eigenvector columns so the first non-negligible entry is positive."""
    v = np.array(v, copy=True)
    for col in range(v.shape[1]):
        column = v[:, col]
        thresh = 1e-12 * np.abs(column).max()
        for x in column:
            if abs(x) > thresh:
                if x < 0:
                    v[:, col] = -column
                break
    return v


def eigensystem(op):
    """Residual-checked eigendecomposition of a symmetric operator.

    Returns (eigenvalues ascending, orthonormal eigenvectors as columns,
    sign-fixed).  Raises EigensolverError if the backend fails to converge
    or the residual exceeds RESIDUAL_TOL * ||op||.
    """
    m = _as_matrix(op)
    try:
        w, v = backends.eigh_sym(m)
    except (RuntimeError, np.linalg.LinAlgError) as exc:
        raise EigensolverError(str(exc)) from exc
    scale = max(abs(w[0]), abs(w[-1]), 1e-300)
    residual = np.abs(m @ v - v * w).max()
    if residual > RESIDUAL_TOL * scale:
        raise EigensolverError(
            f"residual {residual:.3e} exceeds {RESIDUAL_TOL:.1e} * ||op|| = "
            f"{RESIDUAL_TOL * scale:.3e}"
        )
    return w, phase_fix(v)


def ground_state_vector(matrix) -> np.ndarray:
    """Sign-fixed ground eigenvector of a symmetric matrix."""
    _, v = eigensystem(matrix)
    return v[:, 0]


def operator_norm(matrix) -> float:
    """Spectral norm via the backend eigensolver."""
    w, _ = backends.eigh_sym(_as_matrix(matrix))
    return float(max(abs(w[0]), abs(w[-1])))


def _op_at(obj, s: float) -> np.ndarray:
    """Matrix of a ThetaModel or any schedule-like object at parameter s."""
    if hasattr(obj, "op"):
        return obj.op(s)
    return interpolate(obj, s).matrix


def gap_at(obj, s: float) -> float:
    """First spectral gap lambda_1 - lambda_0 of the interpolated operator."""
    if not 0.0 <= s <= 1.0:
        raise ValueError(f"s must lie in [0, 1], got {s}")
    w, _ = eigensystem(_op_at(obj, s))
    return float(w[1] - w[0])


@dataclass(frozen=True)
class GapScan:
    """Sampled gaps over s in [0, 1] plus the located minimum."""

    n: int
    theta: Optional[int]
    label: str
    samples: np.ndarray  # columns: s, lambda0, lambda1, gap
    min_s: float
    min_gap: float
    refinement_depth: int

    def summary(self) -> dict:
        return {
            "n": self.n,
            "theta": self.theta,
            "min_s": self.min_s,
            "min_gap": self.min_gap,
            "samples": int(self.samples.shape[0]),
            "refine_levels": self.refinement_depth,
        }


def gap_scan(obj, initial_grid: int = 101, refine_levels: int = 6) -> GapScan:
    """Uniform grid over [0, 1] followed by rounds of 10x local refinement.

    Each round re-grids the bracketing interval of the current minimum at a
    tenth of the local spacing (bracket-and-refine rather than derivative
    methods: the gap is non-smooth at level crossings).  Argmin ties break
    toward smaller s; fully deterministic.
    """
    if initial_grid < 3:
        raise ValueError(f"initial_grid must be >= 3, got {initial_grid}")
    if refine_levels < 0:
        raise ValueError(f"refine_levels must be >= 0, got {refine_levels}")
    cache = {}

    def evaluate(s: float):
        if s not in cache:
            w, _ = eigensystem(_op_at(obj, s))
            cache[s] = (float(w[0]), float(w[1]))

    for s in np.linspace(0.0, 1.0, initial_grid):
        evaluate(float(s))
    for _ in range(refine_levels):
        ordered = sorted(cache)
        gaps = [cache[s][1] - cache[s][0] for s in ordered]
        i = int(np.argmin(gaps))
        lo = ordered[max(i - 1, 0)]
        hi = ordered[min(i + 1, len(ordered) - 1)]
        if hi <= lo:
            break
        for s in np.linspace(lo, hi, 21):
            evaluate(float(s))

    ordered = sorted(cache)
    rows = np.array(
        [(s, cache[s][0], cache[s][1], cache[s][1] - cache[s][0]) for s in ordered]
    )
    if rows[:, 3].min() < -1e-12:
        raise AssertionError("negative gap encountered; eigenvalue ordering broken")
    i = int(np.argmin(rows[:, 3]))
    return GapScan(
        n=getattr(obj, "n", rows.shape[0] - 1),
        theta=getattr(obj, "theta", None),
        label=getattr(obj, "label", ""),
        samples=rows,
        min_s=float(rows[i, 0]),
        min_gap=float(rows[i, 3]),
        refinement_depth=refine_levels,
    )


def closed_form_gap_theta1(n: int, s: float, detail: bool = False):
    """Analytic first gap of the cutoff-1 model at parameter s.

    The interpolation acts nontrivially on a two-dimensional subspace with
    levels 1/2 +- sqrt(1/4 - (s - s^2)(1 - g^2)), g = 2^(-n/2); the rest of
    the spectrum is a flat band at 1, so the gap is clipped there when the
    band is closer.  With detail=True returns (gap, flat_band_limited).
    """
    if not 0.0 <= s <= 1.0:
        raise ValueError(f"s must lie in [0, 1], got {s}")
    g = 2.0 ** (-n / 2.0)
    root = math.sqrt(max(0.25 - (s - s * s) * (1.0 - g * g), 0.0))
    lam_minus = 0.5 - root
    lam_plus = 0.5 + root
    flat_band_limited = 1.0 < lam_plus
    gap = min(lam_plus, 1.0) - lam_minus
    if detail:
        return gap, flat_band_limited
    return gap


def closed_form_gap_thetan(n: int, s: float) -> float:
    """Analytic first gap of the cutoff-n model: per-qubit levels give
    gap(s) = sqrt(1 - 2(s - s^2)), minimized at s = 1/2 with value 1/sqrt(2)."""
    if not 0.0 <= s <= 1.0:
        raise ValueError(f"s must lie in [0, 1], got {s}")
    return math.sqrt(1.0 - 2.0 * (s - s * s))


def phase_diagram(n, theta_list, grid: int = 101, refine: int = 6):
    """GapScan summaries (theta, min_gap, min_s) in theta order."""
    from gaplab.model import build_theta_model

    rows = []
    for theta in theta_list:
        if not 1 <= theta <= n:
            raise ValueError(f"theta {theta} outside 1..{n}")
        scan = gap_scan(build_theta_model(n, theta), grid, refine)
        rows.append((int(theta), scan.min_gap, scan.min_s))
    return rows
