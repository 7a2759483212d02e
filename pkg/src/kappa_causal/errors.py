"""Exception hierarchy shared by every module of the package."""


class KappaError(Exception):
    """Base class for all errors raised by :mod:`kappa_causal`."""


class GridError(KappaError, ValueError):
    """Invalid grid parameters (non power-of-two size, nonpositive width...)."""


class GridMismatch(KappaError, ValueError):
    """Two operands live on incompatible grids or carry different kappa."""


class EdgeLeakage(KappaError):
    """Data does not decay at the grid edges, so a periodic transform is untrustworthy."""


class SupportOverflow(KappaError):
    """A function (or its image under a flow) does not fit inside the grid hull."""


class NotHermitian(KappaError, ValueError):
    """A matrix or element expected to be Hermitian is not, within tolerance."""


class DomainError(KappaError, ValueError):
    """A user supplied profile is undefined on the range where it must be evaluated."""
