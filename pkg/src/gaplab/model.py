"""Cutoff-interpolation Hamiltonians and states in the weight (Dicke) basis.

The working representation is the (n+1)-dimensional permutation-symmetric
sector: index k is the Hamming-weight sector.  The final Hamiltonian h1 is
diagonal with entries min(k, theta); the initial one is its conjugate under
the weight-basis Hadamard matrix.  The full 2^n space exists only in
``gaplab.oracle``.
"""

import math
from dataclasses import dataclass

import numpy as np

from gaplab import backends
from gaplab.combinatorics import krawtchouk_matrix, log_binomial_table

MODEL_CAP = 64

STATE_NORM_TOL = 1e-10


@dataclass(frozen=True)
class SymmetricState:
    """Unit-norm complex amplitudes over the n+1 weight sectors."""

    n: int
    amps: np.ndarray

    def __post_init__(self):
        amps = np.ascontiguousarray(self.amps, dtype=np.complex128)
        if amps.shape != (self.n + 1,):
            raise ValueError(f"amps must have shape ({self.n + 1},), got {amps.shape}")
        nrm = np.linalg.norm(amps)
        if abs(nrm - 1.0) > STATE_NORM_TOL:
            raise ValueError(
                f"state norm {nrm!r} deviates from 1 beyond {STATE_NORM_TOL}; "
                "renormalize explicitly with SymmetricState.normalized"
            )
        amps.flags.writeable = False
        object.__setattr__(self, "amps", amps)

    @staticmethod
    def normalized(n: int, amps) -> "SymmetricState":
        """Explicitly renormalize raw amplitudes into a valid state."""
        amps = np.asarray(amps, dtype=np.complex128)
        nrm = np.linalg.norm(amps)
        if nrm == 0.0:
            raise ValueError("cannot normalize the zero vector")
        return SymmetricState(n=n, amps=amps / nrm)

    def overlap(self, other: "SymmetricState") -> complex:
        return complex(np.vdot(self.amps, other.amps))


@dataclass(frozen=True)
class SymmetricOperator:
    """Real symmetric operator on the weight basis (exact-symmetric storage)."""

    n: int
    matrix: np.ndarray

    def __post_init__(self):
        m = np.ascontiguousarray(self.matrix, dtype=np.float64)
        if m.shape != (self.n + 1, self.n + 1):
            raise ValueError(
                f"matrix must have shape ({self.n + 1}, {self.n + 1}), got {m.shape}"
            )
        upper = np.triu(m)
        m = upper + np.triu(m, 1).T
        if not np.isfinite(m).all():
            raise ValueError("operator entries must be finite")
        m.flags.writeable = False
        object.__setattr__(self, "matrix", m)

    def norm(self) -> float:
        """Spectral norm."""
        w, _ = backends.eigh_sym(self.matrix)
        return float(max(abs(w[0]), abs(w[-1])))

    def expectation(self, state: SymmetricState) -> float:
        return float(np.real(np.vdot(state.amps, self.matrix @ state.amps)))


@dataclass(frozen=True)
class ThetaModel:
    """The interpolation pair (h0, h1) for qubit count n and cutoff theta."""

    n: int
    theta: int
    h0: SymmetricOperator
    h1: SymmetricOperator

    def op(self, s: float) -> np.ndarray:
        """Interpolated matrix (1-s) h0 + s h1 (no range check; see interpolate)."""
        return (1.0 - s) * self.h0.matrix + s * self.h1.matrix


def build_theta_model(n: int, theta: int) -> ThetaModel:
    """Construct the cutoff model: h1 = diag(min(k, theta)), h0 = Q h1 Q.

    The conjugation is materialized densely (dimension <= 65) and the
    spectra of the two endpoints are cross-checked at build time, since a
    unitary conjugation must preserve the eigenvalue multiset.
    """
    if not 1 <= theta <= n <= MODEL_CAP:
        raise ValueError(
            f"require 1 <= theta <= n <= {MODEL_CAP}, got theta={theta}, n={n}"
        )
    diag = np.minimum(np.arange(n + 1, dtype=np.float64), float(theta))
    q = krawtchouk_matrix(n).entries
    h0m = q @ (diag[:, None] * q)
    h0 = SymmetricOperator(n=n, matrix=(h0m + h0m.T) / 2.0)
    h1 = SymmetricOperator(n=n, matrix=np.diag(diag))
    w0, _ = backends.eigh_sym(h0.matrix)
    if np.abs(w0 - diag).max() > 1e-8:
        raise AssertionError(
            "conjugated endpoint spectrum deviates from the diagonal one"
        )
    return ThetaModel(n=n, theta=int(theta), h0=h0, h1=h1)


def interpolate(model: ThetaModel, s: float) -> SymmetricOperator:
    """(1-s) h0 + s h1 for s in [0, 1]."""
    if not 0.0 <= s <= 1.0:
        raise ValueError(f"s must lie in [0, 1], got {s}")
    return SymmetricOperator(n=model.n, matrix=model.op(s))


def single_qubit_angle(s: float) -> float:
    """Ground-state Bloch angle of (1-s)|-><-| + s|1><1|, in [0, pi/4].

    Continuous in s with angle pi/4 at s=0 (ground |+>) and 0 at s=1.
    """
    if not 0.0 <= s <= 1.0:
        raise ValueError(f"s must lie in [0, 1], got {s}")
    return 0.5 * math.atan2(1.0 - s, s)


def product_ground_state(n: int, phi: float) -> SymmetricState:
    """Weight-basis amplitudes of (cos(phi)|0> + sin(phi)|1>)^(x)n.

    amps[k] = sqrt(C(n,k)) cos^(n-k)(phi) sin^k(phi); unit norm by the
    binomial theorem.
    """
    if not 0.0 <= phi <= math.pi / 4 + 1e-12:
        raise ValueError(f"phi must lie in [0, pi/4], got {phi}")
    lc = log_binomial_table(n).log_choose
    k = np.arange(n + 1, dtype=np.float64)
    amps = np.exp(0.5 * lc) * np.cos(phi) ** (n - k) * np.sin(phi) ** k
    return SymmetricState(n=n, amps=amps.astype(np.complex128))


def dicke_state(n: int, k: int) -> SymmetricState:
    """The weight-k basis state."""
    if not 0 <= k <= n:
        raise ValueError(f"k must lie in 0..{n}, got {k}")
    amps = np.zeros(n + 1, dtype=np.complex128)
    amps[k] = 1.0
    return SymmetricState(n=n, amps=amps)


def uniform_superposition(n: int) -> SymmetricState:
    """|+...+> in the weight basis: the shared initial ground state."""
    return product_ground_state(n, math.pi / 4)


def high_weight_projection(state: SymmetricState, cutoff: int, basis: str = "z") -> float:
    """Squared projection onto weight sectors k >= cutoff.

    basis="z" sums the amplitudes as stored; basis="x" first rotates with
    the weight-basis Hadamard matrix.
    """
    n = state.n
    if not 0 <= cutoff <= n:
        raise ValueError(f"cutoff must lie in 0..{n}, got {cutoff}")
    if basis == "z":
        amps = state.amps
    elif basis == "x":
        amps = krawtchouk_matrix(n).entries @ state.amps
    else:
        raise ValueError(f"basis must be 'z' or 'x', got {basis!r}")
    return float(np.sum(np.abs(amps[cutoff:]) ** 2))


def landscape_rows(n: int, theta: int):
    """Rows (k, energy, degeneracy) of the final-Hamiltonian landscape.

    Degeneracies are exact integers C(n, k); this is the CSV payload of the
    ``landscape`` subcommand.
    """
    if not 1 <= theta <= n:
        raise ValueError(f"require 1 <= theta <= n, got theta={theta}, n={n}")
    return [(k, min(k, theta), math.comb(n, k)) for k in range(n + 1)]
