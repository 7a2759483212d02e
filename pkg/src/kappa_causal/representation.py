"""Representations ``pi_nu`` on ``L2(R, ds)`` and the vector states built from them.

In the mixed picture an element acts as the integral operator

    (pi_nu(f) phi)(s) = \\int du f~(u - s, nu e^{-s/kappa}) phi(u),    nu in {+1, 0, -1},

discretised on a uniform ``s`` grid as ``M[j, k] = ds f~(s_k - s_j, nu e^{-s_j/kappa})``.
When the ``p0`` grid of ``f`` has the same spacing as the ``s`` grid and a node
at zero, the ``p0`` differences fall on grid nodes and only the ``x1`` slot is
interpolated.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass
from typing import Callable

import numpy as np
from scipy.interpolate import make_interp_spline

from .algebra import AlgebraElement, Picture, to_mixed
from .errors import DomainError, EdgeLeakage, GridMismatch, NotHermitian, SupportOverflow
from .numerics import (SPLINE_ORDER, AxisResampler, Field1D, Grid, dft_array, edge_ratio, is_constant_along,
                       make_gaussian, make_grid)

NORM_TOL = 1e-10
EDGE_TOL = 1e-10
SPLIT_PAD = 8


class RepLabel(enum.IntEnum):
    PLUS = 1
    ZERO = 0
    MINUS = -1


def _label(nu) -> RepLabel:
    if isinstance(nu, str):
        return {"+": RepLabel.PLUS, "0": RepLabel.ZERO, "-": RepLabel.MINUS}[nu]
    return RepLabel(int(nu))


@dataclass(frozen=True)
class StateVector:
    """Unit vector ``Phi`` on the ``s`` grid, negligible at the edges."""

    phi: Field1D

    def __post_init__(self):
        n = self.phi.norm()
        if abs(n - 1.0) > NORM_TOL:
            raise ValueError(f"state norm {n:.12f} differs from 1")
        v = self.phi.values
        if max(abs(v[0]), abs(v[-1])) > EDGE_TOL:
            raise EdgeLeakage("state does not decay at the edges of the s grid")

    @property
    def grid(self) -> Grid:
        return self.phi.grid

    @property
    def values(self) -> np.ndarray:
        return self.phi.values

    @classmethod
    def normalized(cls, field: Field1D) -> "StateVector":
        n = field.norm()
        if n == 0:
            raise ValueError("cannot normalise the zero vector")
        return cls(field.with_values(field.values / n))

    @classmethod
    def gaussian(cls, grid: Grid, center: float = 0.0, width: float = 1.0,
                 momentum: float = 0.0) -> "StateVector":
        return cls(make_gaussian(center, width, momentum, grid))


@dataclass(frozen=True)
class OperatorMatrix:
    entries: np.ndarray
    grid: Grid
    label: str = ""

    def __post_init__(self):
        e = np.asarray(self.entries, dtype=complex)
        n = self.grid.n_points
        if e.shape != (n, n):
            raise ValueError(f"expected a {n}x{n} matrix, got {e.shape}")
        if not np.all(np.isfinite(e)):
            raise ValueError("operator entries must be finite")
        object.__setattr__(self, "entries", e)

    def __matmul__(self, other):
        if isinstance(other, OperatorMatrix):
            return OperatorMatrix(self.entries @ other.entries, self.grid,
                                  f"({self.label})({other.label})")
        return self.entries @ np.asarray(other)

    def adjoint(self) -> "OperatorMatrix":
        return OperatorMatrix(self.entries.conj().T, self.grid, f"({self.label})^dag")

    def op_norm(self) -> float:
        return float(np.linalg.norm(self.entries, 2))


def representation_grid(s_half_width: float, n_points: int) -> tuple[Grid, Grid]:
    """An ``s`` grid and the node-aligned ``p0`` grid covering every ``s_k - s_j``."""
    s = make_grid(s_half_width, n_points)
    return s, make_grid(2.0 * s_half_width, 2 * n_points)


def _slot_points(nu: RepLabel, s: np.ndarray, kappa: float) -> np.ndarray:
    return float(nu) * np.exp(-s / kappa)


def _aligned(grid_p0: Grid, grid_s: Grid) -> bool:
    r = grid_s.spacing / grid_p0.spacing
    return abs(r - round(r)) < 1e-9 and round(r) >= 1


def kernel_on_slots(f: AlgebraElement, grid_s: Grid, nu) -> np.ndarray:
    """``K[j, k] = f~(s_k - s_j, nu e^{-s_j/kappa})`` on the ``s`` grid."""
    nu = _label(nu)
    if f.picture != Picture.MIXED:
        raise GridMismatch("representations act on mixed-picture elements")
    s = grid_s.nodes
    n = s.size
    xs = _slot_points(nu, s, f.kappa)
    reach = np.abs(xs)
    beyond = reach > f.grid1.nodes[-1]
    if nu != RepLabel.ZERO and np.any(beyond) and not is_constant_along(f.values, 1):
        if edge_ratio(f.values, 1) > 1e-8:
            raise SupportOverflow(f"the x1 slot reaches {reach.max():.3g}, beyond the hull "
                                  f"{f.grid1.half_width:.3g}, where the element is not negligible")
    # columns C[:, j] = f~(p0, x_j) on the p0 nodes; constant data is clamped, decaying data zeroed
    if nu == RepLabel.ZERO:
        if abs(f.grid1.nodes[f.grid1.center_index]) > 1e-12:
            raise GridMismatch("the x1 grid has no node at zero")
        C = np.repeat(f.values[:, f.grid1.center_index][:, None], n, axis=1)
    else:
        C = AxisResampler(f.values, f.grid1, axis=1)(xs)
        if not is_constant_along(f.values, 1):
            C[:, beyond] = 0.0
    diffs = s[None, :] - s[:, None]
    span = diffs.max()
    p = f.grid0.nodes
    if span > p[-1] + 1e-12 and edge_ratio(f.values, 0) > 1e-8:
        raise SupportOverflow("the p0 grid does not cover all differences s_k - s_j")
    if _aligned(f.grid0, grid_s):
        step = int(round(grid_s.spacing / f.grid0.spacing))
        idx = f.grid0.center_index + step * (np.arange(n)[None, :] - np.arange(n)[:, None])
        valid = (idx >= 0) & (idx < f.grid0.n_points)
        K = np.zeros((n, n), dtype=complex)
        jj = np.broadcast_to(np.arange(n)[:, None], (n, n))
        K[valid] = C[idx[valid], jj[valid]]
        return K
    spline = make_interp_spline(p, C, k=SPLINE_ORDER, axis=0)
    K = np.empty((n, n), dtype=complex)
    for j in range(n):
        d = diffs[j]
        inside = (d >= p[0]) & (d <= p[-1])
        row = np.zeros(n, dtype=complex)
        row[inside] = spline(d[inside])[:, j]
        K[j] = row
    return K


def rep_matrix(nu, f: AlgebraElement, grid_s: Grid, tol: float = 1e-6) -> OperatorMatrix:
    nu = _label(nu)
    M = grid_s.spacing * kernel_on_slots(f, grid_s, nu)
    if f.hermitian:
        dev = np.max(np.abs(M - M.conj().T))
        scale = max(np.max(np.abs(M)), 1e-300)
        if dev > tol * scale:
            raise NotHermitian(f"representation of a hermitian element deviates by {dev / scale:.2e}")
    return OperatorMatrix(M, grid_s, f"pi_{int(nu):+d}")


def _sign(sign) -> RepLabel:
    nu = _label(sign)
    if nu == RepLabel.ZERO:
        raise ValueError("vector states use the + or - representation")
    return nu


def state_eval_mixed(sign, state: StateVector, f: AlgebraElement) -> complex:
    """``phi_pm(f) = <Phi, pi_pm(f) Phi>``."""
    M = rep_matrix(_sign(sign), f, state.grid)
    phi = state.values
    return complex(state.grid.spacing * np.vdot(phi, M.entries @ phi))


def state_eval_space(sign, state: StateVector, f: AlgebraElement) -> complex:
    if f.picture != Picture.SPACE:
        raise GridMismatch("expected a space-picture element")
    return state_eval_mixed(sign, state, to_mixed(f))


def state_eval_split(sign, state: StateVector, h: Callable, g: Callable) -> float:
    """State on ``h(x0) + g(x1)``: ``(1/2pi) \\int h(v) |F Phi(v)|^2 dv + \\int g(pm e^{-s}) |Phi(s)|^2 ds``."""
    nu = _sign(sign)
    grid = state.grid
    # zero padding refines the momentum grid without changing the hull of the state
    padded = make_grid(SPLIT_PAD * grid.half_width, SPLIT_PAD * grid.n_points)
    phi_pad = np.zeros(padded.n_points, dtype=complex)
    lo = padded.center_index - grid.center_index
    phi_pad[lo:lo + grid.n_points] = state.values
    dual = padded.dual()
    v = dual.nodes
    hv = np.asarray(h(v), dtype=float) if h is not None else np.zeros_like(v)
    xs = float(nu) * np.exp(-grid.nodes)
    with np.errstate(all="ignore"):
        gv = np.asarray(g(xs), dtype=float) if g is not None else np.zeros_like(xs)
    if gv.shape != xs.shape or not np.all(np.isfinite(gv)):
        raise DomainError("g is undefined on part of the range {pm e^{-s}}")
    if hv.shape != v.shape or not np.all(np.isfinite(hv)):
        raise DomainError("h is undefined on part of the momentum grid")
    Fphi = dft_array(phi_pad, padded)
    time_part = dual.spacing * np.sum(hv * np.abs(Fphi) ** 2) / (2 * np.pi)
    space_part = grid.spacing * np.sum(gv * np.abs(state.values) ** 2)
    return float(time_part + space_part)
