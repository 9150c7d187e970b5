"""Log-domain binomial machinery and binomial tail bounds.

Everything downstream leans on these: binomial weights stay in log space
(C(n, n/2) overflows doubles near n = 1030 and loses precision much
earlier), and the weight-basis Hadamard matrix is built by a three-term
recurrence with log-scaled prefactors rather than factorial products.
"""

import math
from dataclasses import dataclass
from functools import lru_cache

import numpy as np

LOG_BINOMIAL_CAP = 100_000
KRAWTCHOUK_CAP = 64
EXACT_TAIL_CAP = 10_000

_LN2 = math.log(2.0)


@dataclass(frozen=True)
class LogBinomialTable:
    """Natural logs of C(n, k) for k = 0..n."""

    n: int
    log_choose: np.ndarray

    def weight(self, k: int) -> float:
        """C(n, k) as a float (may overflow for huge n; prefer log_choose)."""
        return math.exp(self.log_choose[k])


@dataclass(frozen=True)
class KrawtchoukMatrix:
    """Symmetric involutive matrix of the n-fold Hadamard on weight sectors.

    entries[j, k] = 2^(-n/2) K_k(j; n) sqrt(C(n,j)/C(n,k)) where K_k is the
    Krawtchouk polynomial; equivalently the matrix element of H^(x)n between
    the weight-j and weight-k Dicke states.
    """

    n: int
    entries: np.ndarray


@lru_cache(maxsize=256)
def log_binomial_table(n: int) -> LogBinomialTable:
    """Cumulative-log table of ln C(n, k); bit-exact symmetric, 0.0 endpoints."""
    if not isinstance(n, (int, np.integer)) or n < 1:
        raise ValueError(f"n must be a positive integer, got {n!r}")
    if n > LOG_BINOMIAL_CAP:
        raise ValueError(f"n = {n} exceeds the overflow guard {LOG_BINOMIAL_CAP}")
    lc = np.zeros(n + 1, dtype=np.float64)
    half = n // 2
    acc = 0.0
    for k in range(half):
        acc += math.log(n - k) - math.log(k + 1)
        lc[k + 1] = acc
    for k in range(half + 1, n + 1):
        lc[k] = lc[n - k]
    lc.flags.writeable = False
    return LogBinomialTable(n=int(n), log_choose=lc)


@lru_cache(maxsize=128)
def krawtchouk_matrix(n: int, cap: int = KRAWTCHOUK_CAP) -> KrawtchoukMatrix:
    """Weight-basis Hadamard matrix Q, built column-wise by the three-term
    recurrence in j and then symmetrized by averaging with its transpose.

    Row j of the conjugation operator satisfies
        sqrt((j+1)(n-j)) Q[j+1,k] = (n-2k) Q[j,k] - sqrt(j(n-j+1)) Q[j-1,k]
    with Q[0,k] = 2^(-n/2) sqrt(C(n,k)); the symmetrization restores the
    exact-symmetry invariant that the recurrence loses to rounding.
    """
    if not isinstance(n, (int, np.integer)) or n < 1:
        raise ValueError(f"n must be a positive integer, got {n!r}")
    if n > cap:
        raise ValueError(f"n = {n} exceeds the explicit-matrix cap {cap}")
    n = int(n)
    lc = log_binomial_table(n).log_choose
    q = np.zeros((n + 1, n + 1), dtype=np.float64)
    k = np.arange(n + 1, dtype=np.float64)
    q[0] = np.exp(0.5 * lc - 0.5 * n * _LN2)
    if n >= 1:
        q[1] = (n - 2.0 * k) / math.sqrt(n) * q[0]
    for j in range(1, n):
        up = math.sqrt((j + 1.0) * (n - j))
        down = math.sqrt(j * (n - j + 1.0))
        q[j + 1] = ((n - 2.0 * k) * q[j] - down * q[j - 1]) / up
    q = (q + q.T) / 2.0
    q.flags.writeable = False
    return KrawtchoukMatrix(n=n, entries=q)


def chernoff_upper_tail(n: int, p: float, threshold: float) -> float:
    """Multiplicative Chernoff bound on P(X >= threshold), X ~ B(n, p).

    Returns exp(-delta^2 mu / 3) with mu = n p and delta = threshold/mu - 1;
    returns 1.0 when the threshold sits below the mean.
    """
    _check_tail_args(n, p)
    mu = n * p
    if threshold < mu:
        return 1.0
    delta = threshold / mu - 1.0
    return math.exp(-delta * delta * mu / 3.0)


def chernoff_lower_tail(n: int, p: float, threshold: float) -> float:
    """Multiplicative Chernoff bound on P(X <= threshold): exp(-delta^2 mu / 2)."""
    _check_tail_args(n, p)
    mu = n * p
    if threshold > mu:
        return 1.0
    if threshold < 0:
        raise ValueError("threshold must be nonnegative for the lower tail")
    delta = 1.0 - threshold / mu
    return math.exp(-delta * delta * mu / 2.0)


def exact_binomial_tail(n: int, p: float, threshold: float, side: str) -> float:
    """Exact tail of B(n, p) by compensated log-space summation.

    side="upper" returns P(X >= threshold), side="lower" P(X <= threshold);
    a non-integer threshold includes exactly the integers beyond it.
    """
    _check_tail_args(n, p)
    if n > EXACT_TAIL_CAP:
        raise ValueError(f"n = {n} exceeds the exact-tail cap {EXACT_TAIL_CAP}")
    if side == "upper":
        lo, hi = max(math.ceil(threshold), 0), n
    elif side == "lower":
        lo, hi = 0, min(math.floor(threshold), n)
    else:
        raise ValueError(f"side must be 'upper' or 'lower', got {side!r}")
    if lo > hi:
        return 0.0
    if lo <= 0 and hi >= n:
        return 1.0
    lc = log_binomial_table(n).log_choose
    ks = np.arange(lo, hi + 1, dtype=np.float64)
    logs = lc[lo : hi + 1] + ks * math.log(p) + (n - ks) * math.log1p(-p)
    shift = logs.max()
    return float(math.exp(shift) * math.fsum(np.exp(logs - shift)))


def _check_tail_args(n, p):
    if not isinstance(n, (int, np.integer)) or n < 1:
        raise ValueError(f"n must be a positive integer, got {n!r}")
    if not 0.0 < p < 1.0:
        raise ValueError(f"p must lie strictly inside (0, 1), got {p!r}")
