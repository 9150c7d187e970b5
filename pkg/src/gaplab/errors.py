"""Exception types shared across modules."""


class EigensolverError(RuntimeError):
    """Eigensolver did not converge or violated its residual contract."""


class NormDriftError(RuntimeError):
    """A propagation lost unit norm beyond the abort threshold."""
