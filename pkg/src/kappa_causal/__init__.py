"""Numerical toolkit for the kappa-Minkowski Lorentzian spectral triple and its causal order."""

from .algebra import AlgebraElement, Picture, involution, star, to_mixed, to_momentum, to_space
from .causality import CausalVerdict, OrderConfig, SplitFunction, VerdictKind, causal_order
from .config import RunConfig, load_config, parse_config
from .errors import (DomainError, EdgeLeakage, GridError, GridMismatch, KappaError, NotHermitian,
                     SupportOverflow)
from .numerics import Field1D, Field2D, Grid, make_grid
from .representation import RepLabel, StateVector, rep_matrix
from .triple import CONVENTIONS, Spinor, TripleReport, verify_triple

__version__ = "0.1.0"

__all__ = [
    "AlgebraElement", "Picture", "involution", "star", "to_mixed", "to_momentum", "to_space",
    "CausalVerdict", "OrderConfig", "SplitFunction", "VerdictKind", "causal_order",
    "RunConfig", "load_config", "parse_config",
    "DomainError", "EdgeLeakage", "GridError", "GridMismatch", "KappaError", "NotHermitian",
    "SupportOverflow",
    "Field1D", "Field2D", "Grid", "make_grid",
    "RepLabel", "StateVector", "rep_matrix",
    "CONVENTIONS", "Spinor", "TripleReport", "verify_triple",
]
