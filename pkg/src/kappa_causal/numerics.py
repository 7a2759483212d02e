"""Uniform grids, quadrature, continuum-normalised DFTs and spectral calculus.

Everything in this module is a pure function of immutable inputs.  The
transform convention is the continuum one used throughout the package::

    (F f)(v) = \\int ds e^{-i v s} f(s)        f(s) = (1/2pi) \\int dv e^{i v s} (F f)(v)

discretised on a grid of ``N`` nodes ``s_j = -L + j*h`` and its dual momentum
grid ``v_k = -pi/h + k*2pi/(N h)``.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import cached_property

import numpy as np
import scipy.linalg
from scipy.interpolate import RectBivariateSpline, make_interp_spline

from .errors import EdgeLeakage, GridError, NotHermitian, SupportOverflow

#: relative edge magnitude above which spectral differentiation is refused
EDGE_TOL = 1e-6
#: order of the splines used for dilations and resampling
SPLINE_ORDER = 5


@dataclass(frozen=True)
class Grid:
    """Uniform periodic grid on ``[-L, L)`` with ``N`` nodes (``N`` a power of two)."""

    half_width: float
    n_points: int

    def __post_init__(self):
        n = self.n_points
        if not isinstance(n, (int, np.integer)) or n < 8 or n & (n - 1):
            raise GridError(f"n_points must be a power of two >= 8, got {n!r}")
        if not np.isfinite(self.half_width) or self.half_width <= 0:
            raise GridError(f"half_width must be positive, got {self.half_width!r}")

    @property
    def spacing(self) -> float:
        return 2.0 * self.half_width / self.n_points

    @cached_property
    def nodes(self) -> np.ndarray:
        return -self.half_width + self.spacing * np.arange(self.n_points)

    @property
    def center_index(self) -> int:
        """Index of the node sitting at zero."""
        return self.n_points // 2

    def dual(self) -> "Grid":
        """Momentum grid conjugate to this one (same size, spacing 2pi/(N h))."""
        return Grid(np.pi / self.spacing, self.n_points)

    def refine(self, factor: int) -> "Grid":
        return Grid(self.half_width, self.n_points * factor)

    def covers(self, value: float) -> bool:
        return self.nodes[0] <= value <= self.nodes[-1]


def make_grid(L: float, N: int) -> Grid:
    return Grid(float(L), int(N))


def _check_finite(values: np.ndarray):
    if not np.all(np.isfinite(values)):
        raise ValueError("field values must be finite")


@dataclass(frozen=True)
class Field1D:
    grid: Grid
    values: np.ndarray

    def __post_init__(self):
        vals = np.asarray(self.values, dtype=complex)
        if vals.shape != (self.grid.n_points,):
            raise ValueError(f"expected {self.grid.n_points} samples, got shape {vals.shape}")
        _check_finite(vals)
        vals = vals.copy()
        vals.flags.writeable = False
        object.__setattr__(self, "values", vals)

    def norm(self) -> float:
        return float(np.sqrt(self.grid.spacing * np.sum(np.abs(self.values) ** 2)))

    def inner(self, other: "Field1D") -> complex:
        """L2 inner product, antilinear in ``self``."""
        return complex(self.grid.spacing * np.vdot(self.values, other.values))

    def with_values(self, values) -> "Field1D":
        return Field1D(self.grid, values)


@dataclass(frozen=True)
class Field2D:
    """Samples on a tensor grid; axis 0 is the first variable, axis 1 the second.

    The same container holds the space picture (x0, x1), the mixed picture
    (p0, x1) and the momentum picture (p0, p1).
    """

    grid0: Grid
    grid1: Grid
    values: np.ndarray

    def __post_init__(self):
        vals = np.asarray(self.values, dtype=complex)
        shape = (self.grid0.n_points, self.grid1.n_points)
        if vals.shape != shape:
            raise ValueError(f"expected shape {shape}, got {vals.shape}")
        _check_finite(vals)
        vals = vals.copy()
        vals.flags.writeable = False
        object.__setattr__(self, "values", vals)

    @cached_property
    def _splines(self):
        a, b = self.grid0.nodes, self.grid1.nodes
        re = RectBivariateSpline(a, b, self.values.real, kx=3, ky=3, s=0)
        im = RectBivariateSpline(a, b, self.values.imag, kx=3, ky=3, s=0)
        return re, im

    def with_values(self, values) -> "Field2D":
        return Field2D(self.grid0, self.grid1, values)


@dataclass(frozen=True)
class Spectrum:
    eigenvalues: np.ndarray
    eigenvectors: np.ndarray | None = field(default=None, repr=False)

    def __post_init__(self):
        ev = np.asarray(self.eigenvalues, dtype=float)
        if ev.size > 1 and np.any(np.diff(ev) < 0):
            raise ValueError("eigenvalues must be sorted ascending")
        object.__setattr__(self, "eigenvalues", ev)


# --------------------------------------------------------------------------
# quadrature and transforms


def quadrature(f: Field1D) -> complex:
    """Riemann sum ``h * sum f(s_j)``; spectrally accurate for decaying data."""
    return complex(f.grid.spacing * np.sum(f.values))


def dft_array(values: np.ndarray, grid: Grid, axis: int = -1) -> np.ndarray:
    """Continuum-normalised forward transform of samples on ``grid`` along ``axis``."""
    values = np.asarray(values, dtype=complex)
    v = grid.dual().nodes
    phase = grid.spacing * np.exp(-1j * v * grid.nodes[0])
    shape = [1] * values.ndim
    shape[axis] = -1
    out = np.fft.fftshift(np.fft.fft(values, axis=axis), axes=axis)
    return out * phase.reshape(shape)


def idft_array(values: np.ndarray, grid: Grid, axis: int = -1) -> np.ndarray:
    """Inverse of :func:`dft_array`; ``grid`` is the *spatial* grid."""
    values = np.asarray(values, dtype=complex)
    v = grid.dual().nodes
    phase = np.exp(1j * v * grid.nodes[0]) / grid.spacing
    shape = [1] * values.ndim
    shape[axis] = -1
    return np.fft.ifft(np.fft.ifftshift(values * phase.reshape(shape), axes=axis), axis=axis)


def dft(f: Field1D) -> Field1D:
    return Field1D(f.grid.dual(), dft_array(f.values, f.grid))


def idft(F: Field1D, grid: Grid | None = None) -> Field1D:
    """Inverse transform; ``grid`` defaults to the spatial grid dual to ``F.grid``."""
    if grid is None:
        grid = Grid(np.pi / F.grid.spacing, F.grid.n_points)
    return Field1D(grid, idft_array(F.values, grid))


def dft_matrix(grid: Grid) -> np.ndarray:
    """Unitary DFT matrix ``U`` with ``(F f)(v_k) = h sqrt(N) (U f)_k``."""
    n = grid.n_points
    v = grid.dual().nodes
    return np.exp(-1j * np.outer(v, grid.nodes)) / np.sqrt(n)


# --------------------------------------------------------------------------
# spectral differentiation


def edge_ratio(values: np.ndarray, axis: int = -1) -> float:
    """Largest boundary magnitude along ``axis`` relative to the global maximum."""
    values = np.asarray(values)
    peak = np.max(np.abs(values)) if values.size else 0.0
    if peak == 0.0:
        return 0.0
    first = np.take(values, 0, axis=axis)
    last = np.take(values, -1, axis=axis)
    return float(max(np.max(np.abs(first)), np.max(np.abs(last))) / peak)


def is_constant_along(values: np.ndarray, axis: int) -> bool:
    ref = np.take(values, [0], axis=axis)
    scale = max(np.max(np.abs(values)), 1e-300)
    return bool(np.max(np.abs(values - ref)) <= 1e-13 * scale)


def check_edges(values: np.ndarray, axis: int = -1, tol: float = EDGE_TOL):
    """Raise :class:`EdgeLeakage` unless data decays (or is constant) along ``axis``."""
    if is_constant_along(values, axis):
        return
    r = edge_ratio(values, axis)
    if r > tol:
        raise EdgeLeakage(f"boundary magnitude {r:.3e} of peak exceeds {tol:.1e}")


def spectral_derivative_array(values: np.ndarray, grid: Grid, axis: int = -1,
                              order: int = 1, check: bool = True) -> np.ndarray:
    values = np.asarray(values, dtype=complex)
    if check:
        check_edges(values, axis)
    v = grid.dual().nodes.copy()
    mult = (1j * v) ** order
    if order % 2:
        mult[0] = 0.0  # Nyquist mode has no odd derivative
    shape = [1] * values.ndim
    shape[axis] = -1
    return idft_array(dft_array(values, grid, axis) * mult.reshape(shape), grid, axis)


def derivative(f: Field1D) -> Field1D:
    return f.with_values(spectral_derivative_array(f.values, f.grid))


def derivative_matrix(grid: Grid) -> np.ndarray:
    """Dense matrix of the spectral first derivative (Nyquist mode removed)."""
    U = dft_matrix(grid)
    v = grid.dual().nodes.copy()
    v[0] = 0.0
    return (U.conj().T * (1j * v)) @ U


def momentum_matrix(grid: Grid, keep_nyquist: bool = False) -> np.ndarray:
    """Hermitian matrix of ``-i d/ds`` (spectral).

    By default the Nyquist mode is removed, matching :func:`spectral_derivative_array`.
    With ``keep_nyquist`` it carries the frequency ``-pi/h``, so the square of the
    matrix is the full spectral ``-d^2/ds^2`` with no spurious null mode.
    """
    U = dft_matrix(grid)
    v = grid.dual().nodes.copy()
    if not keep_nyquist:
        v[0] = 0.0
    M = (U.conj().T * v) @ U
    return 0.5 * (M + M.conj().T)


# --------------------------------------------------------------------------
# interpolation


def interpolate(f: Field2D, p0, x1):
    """Bicubic interpolation of ``f``; points outside the grid hull give 0.

    Accepts scalars or broadcastable arrays.  Grid nodes are reproduced exactly.
    """
    a = np.asarray(p0, dtype=float)
    b = np.asarray(x1, dtype=float)
    a, b = np.broadcast_arrays(a, b)
    g0, g1 = f.grid0.nodes, f.grid1.nodes
    inside = (a >= g0[0]) & (a <= g0[-1]) & (b >= g1[0]) & (b <= g1[-1])
    out = np.zeros(a.shape, dtype=complex)
    if np.any(inside):
        re, im = f._splines
        out[inside] = re.ev(a[inside], b[inside]) + 1j * im.ev(a[inside], b[inside])
        # exact node reproduction (spline equals data at nodes up to rounding)
        ia = np.rint((a - g0[0]) / f.grid0.spacing)
        ib = np.rint((b - g1[0]) / f.grid1.spacing)
        on_node = inside & np.isclose(a, g0[0] + ia * f.grid0.spacing, rtol=0, atol=1e-12) \
            & np.isclose(b, g1[0] + ib * f.grid1.spacing, rtol=0, atol=1e-12)
        if np.any(on_node):
            out[on_node] = f.values[ia[on_node].astype(int), ib[on_node].astype(int)]
    if out.ndim == 0:
        return complex(out)
    return out


def resample_axis(values: np.ndarray, grid: Grid, points: np.ndarray, axis: int = -1) -> np.ndarray:
    """Spline evaluation (order ``SPLINE_ORDER``) of ``values`` along ``axis`` at ``points``.

    Points beyond the hull are clamped to the edge, which equals zero extension
    for data decaying at the edges and is exact for data constant along the axis.
    """
    values = np.asarray(values, dtype=complex)
    nodes = grid.nodes
    pts = np.clip(np.asarray(points, dtype=float), nodes[0], nodes[-1])
    spline = make_interp_spline(nodes, values, k=SPLINE_ORDER, axis=axis)
    return spline(pts)


class AxisResampler:
    """Reusable spline along one axis, for many ``resample_axis`` calls on the same data."""

    def __init__(self, values: np.ndarray, grid: Grid, axis: int = -1):
        self.grid = grid
        self._lo, self._hi = grid.nodes[0], grid.nodes[-1]
        self._spline = make_interp_spline(grid.nodes, np.asarray(values, dtype=complex),
                                          k=SPLINE_ORDER, axis=axis)

    def __call__(self, points) -> np.ndarray:
        return self._spline(np.clip(np.asarray(points, dtype=float), self._lo, self._hi))


# --------------------------------------------------------------------------
# linear algebra


def hermitian_eigen(M: np.ndarray, tol: float = 1e-8, vectors: bool = True,
                    n_low: int | None = None) -> Spectrum:
    """Full (or lowest ``n_low``) spectrum of a Hermitian matrix."""
    M = np.asarray(M, dtype=complex)
    if M.ndim != 2 or M.shape[0] != M.shape[1]:
        raise ValueError(f"matrix must be square, got shape {M.shape}")
    scale = np.linalg.norm(M, ord=np.inf)
    dev = np.linalg.norm(M - M.conj().T, ord=np.inf)
    if dev > tol * max(scale, 1e-300):
        raise NotHermitian(f"Hermitian deviation {dev:.3e} exceeds {tol:.1e} * {scale:.3e}")
    H = 0.5 * (M + M.conj().T)
    subset = None if n_low is None else (0, min(n_low, H.shape[0]) - 1)
    if vectors:
        w, V = scipy.linalg.eigh(H, subset_by_index=subset)
        return Spectrum(w, V)
    w = scipy.linalg.eigh(H, eigvals_only=True, subset_by_index=subset)
    return Spectrum(w)


def min_eigenvalue(M: np.ndarray, tol: float = 1e-8) -> float:
    return float(hermitian_eigen(M, tol=tol, vectors=False, n_low=1).eigenvalues[0])


# --------------------------------------------------------------------------
# test functions


def make_gaussian(center: float, width: float, momentum: float, grid: Grid) -> Field1D:
    """Normalised ``C exp(-(s-c)^2 / 2w^2) exp(i k s)`` on ``grid``."""
    if width <= 0:
        raise ValueError("width must be positive")
    if abs(center) + 6.0 * width >= grid.half_width:
        raise SupportOverflow(
            f"|center| + 6*width = {abs(center) + 6 * width:g} does not fit in L={grid.half_width:g}")
    s = grid.nodes
    vals = np.exp(-((s - center) ** 2) / (2.0 * width ** 2) + 1j * momentum * s)
    vals /= np.sqrt(grid.spacing * np.sum(np.abs(vals) ** 2))
    return Field1D(grid, vals)
