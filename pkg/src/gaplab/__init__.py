"""gaplab: a numerical laboratory for adiabatic interpolation models.

Builds cutoff-Hamiltonian families in the permutation-symmetric (Dicke)
basis, scans their spectral gaps, propagates time-dependent Schrodinger
dynamics, computes escape rates, and machine-checks the associated bounds
and robustness claims at desk scale.  A brute-force full-Hilbert-space
oracle (n <= 12) backs every derived quantity.
"""

__version__ = "0.1.0"

from gaplab.backends import BACKEND

__all__ = ["BACKEND", "__version__"]
