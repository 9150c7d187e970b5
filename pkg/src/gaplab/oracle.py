"""Brute-force full-Hilbert-space reference implementation (n <= 12).

Ground truth for every derived quantity: spectra, evolutions, escape rates
and projections are recomputed here in the raw 2^n computational basis with
dense LAPACK eigensolves, independently of the weight-basis machinery.
Exists for truth, not performance.
"""

import math
from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from gaplab.errors import NormDriftError
from gaplab.model import SymmetricState

FULL_CAP = 12


@dataclass(frozen=True)
class FullState:
    """Unit-norm amplitudes over all 2^n computational basis states."""

    n: int
    amps: np.ndarray

    def __post_init__(self):
        amps = np.ascontiguousarray(self.amps, dtype=np.complex128)
        if amps.shape != (2**self.n,):
            raise ValueError(f"amps must have shape (2^{self.n},), got {amps.shape}")
        nrm = np.linalg.norm(amps)
        if abs(nrm - 1.0) > 1e-10:
            raise ValueError(f"full state norm {nrm!r} deviates from 1")
        amps.flags.writeable = False
        object.__setattr__(self, "amps", amps)


def _check_cap(n):
    if not 1 <= n <= FULL_CAP:
        raise ValueError(f"oracle supports 1 <= n <= {FULL_CAP}, got {n}")


@lru_cache(maxsize=32)
def hamming_weights(n: int) -> np.ndarray:
    """Popcount of every index 0..2^n-1."""
    w = np.zeros(1, dtype=np.int64)
    for _ in range(n):
        w = np.concatenate([w, w + 1])
    w.flags.writeable = False
    return w


def fwht(a: np.ndarray) -> np.ndarray:
    """Unnormalized fast Walsh-Hadamard transform along axis 0."""
    a = np.array(a, dtype=np.float64, copy=True)
    m = a.shape[0]
    h = 1
    while h < m:
        a = a.reshape(m // (2 * h), 2, h, *a.shape[1:])
        top = a[:, 0].copy()
        bot = a[:, 1].copy()
        a[:, 0] = top + bot
        a[:, 1] = top - bot
        a = a.reshape(m, *a.shape[3:])
        h *= 2
    return a


def hadamard_conjugate(m: np.ndarray) -> np.ndarray:
    """(H^(x)n) m (H^(x)n) via two transforms and a 2^-n scaling."""
    return fwht(fwht(m).T).T / m.shape[0]


def full_theta_hamiltonians(n: int, theta: int):
    """Dense endpoint pair: h1 diagonal in min(popcount, theta), h0 its
    Hadamard conjugate."""
    _check_cap(n)
    if not 1 <= theta <= n:
        raise ValueError(f"theta must lie in 1..{n}, got {theta}")
    diag = np.minimum(hamming_weights(n), theta).astype(np.float64)
    h1 = np.diag(diag)
    h0 = hadamard_conjugate(h1)
    h0 = (h0 + h0.T) / 2.0
    return h0, h1


@lru_cache(maxsize=16)
def embedding_matrix(n: int) -> np.ndarray:
    """Isometry (2^n, n+1): weight-sector amplitude a_k spreads uniformly
    over the C(n,k) strings of weight k."""
    _check_cap(n)
    w = hamming_weights(n)
    e = np.zeros((2**n, n + 1), dtype=np.float64)
    for k in range(n + 1):
        count = math.comb(n, k)
        e[w == k, k] = 1.0 / math.sqrt(count)
    e.flags.writeable = False
    return e


def symmetric_sector_embed(state: SymmetricState) -> FullState:
    """Lift a weight-basis state into the full space."""
    _check_cap(state.n)
    return FullState(n=state.n, amps=embedding_matrix(state.n) @ state.amps)


def symmetric_sector_project(full: FullState):
    """Adjoint of the embedding: returns (renormalized symmetric component,
    leakage norm outside the symmetric sector)."""
    e = embedding_matrix(full.n)
    coeffs = e.T @ full.amps
    leakage = float(np.linalg.norm(full.amps - e @ coeffs))
    return SymmetricState.normalized(full.n, coeffs), leakage


def full_spectrum(h: np.ndarray) -> np.ndarray:
    """Ascending eigenvalues of a dense symmetric matrix."""
    return np.linalg.eigvalsh(np.asarray(h, dtype=np.float64))


def full_propagate(schedule, initial: FullState, tau: float, steps: int) -> FullState:
    """Midpoint-exponential propagation with a dense eigensolve per step.

    ``schedule`` is either an (h0, h1) pair interpolated linearly in
    s = t/tau or any object with an ``op(s)`` method.
    """
    if steps < 1:
        raise ValueError("steps must be >= 1")
    if isinstance(schedule, tuple):
        a0, a1 = (np.asarray(m, dtype=np.float64) for m in schedule)
        op = lambda s: (1.0 - s) * a0 + s * a1
    else:
        op = schedule.op
    psi = initial.amps.astype(np.complex128)
    dt = tau / steps
    for j in range(steps):
        smid = (j + 0.5) / steps
        w, v = np.linalg.eigh(op(smid))
        psi = v @ (np.exp(-1j * dt * w) * (v.conj().T @ psi))
    nrm = np.linalg.norm(psi)
    if abs(nrm - 1.0) > 1e-7:
        raise NormDriftError(f"full propagation norm drifted to {nrm!r}")
    return FullState(n=initial.n, amps=psi / nrm if abs(nrm - 1.0) > 1e-12 else psi)
