"""The kappa-Minkowski algebra in the momentum, mixed and space pictures.

Conventions (kappa kept explicit; ``F_0`` is the continuum transform in ``x0``):

* mixed picture   ``f~(p0, x1) = (1/2pi) F_0 f (p0, x1)``
* momentum picture ``F(p0, p1) = (1/2pi)^2 F f (p0, p1)``

With these normalisations the units are ``delta(p0)`` in the mixed picture
and ``delta(p0) delta(p1)`` in the momentum picture, and the mixed product is

    (f~ * g~)(p0, x1) = \\int dq0 f~(q0, x1) g~(p0 - q0, e^{-q0/kappa} x1).

The mixed picture is the canonical one: ``p0`` differences are grid shifts
and the only interpolation needed is the dilation of the ``x1`` axis.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass, replace

import numpy as np
from scipy.interpolate import make_interp_spline
from scipy.signal import fftconvolve

from .errors import GridMismatch, NotHermitian, SupportOverflow
from .numerics import (
    SPLINE_ORDER,
    AxisResampler,
    Field2D,
    Grid,
    check_edges,
    dft_array,
    edge_ratio,
    is_constant_along,
    idft_array,
    spectral_derivative_array,
)

#: magnitude (relative to the peak) below which samples count as outside the support
SUPPORT_TOL = 1e-12


class Picture(str, enum.Enum):
    MOMENTUM = "momentum"
    MIXED = "mixed"
    SPACE = "space"


def same_grid(a: Grid, b: Grid) -> bool:
    return a.n_points == b.n_points and np.isclose(a.half_width, b.half_width, rtol=1e-12, atol=0)


@dataclass(frozen=True)
class AlgebraElement:
    picture: Picture
    data: Field2D
    kappa: float = 1.0
    hermitian: bool = False

    def __post_init__(self):
        if not self.kappa > 0:
            raise ValueError(f"kappa must be positive, got {self.kappa!r}")
        object.__setattr__(self, "picture", Picture(self.picture))

    @property
    def values(self) -> np.ndarray:
        return self.data.values

    @property
    def grid0(self) -> Grid:
        return self.data.grid0

    @property
    def grid1(self) -> Grid:
        return self.data.grid1

    def with_values(self, values, hermitian: bool = False) -> "AlgebraElement":
        return AlgebraElement(self.picture, self.data.with_values(values), self.kappa, hermitian)

    def with_kappa(self, kappa: float) -> "AlgebraElement":
        return replace(self, kappa=float(kappa))

    def sup_norm(self) -> float:
        return float(np.max(np.abs(self.values)))

    def _compatible(self, other: "AlgebraElement"):
        if self.picture != other.picture:
            raise GridMismatch(f"pictures differ: {self.picture.value} vs {other.picture.value}")
        if not (same_grid(self.grid0, other.grid0) and same_grid(self.grid1, other.grid1)):
            raise GridMismatch("elements live on different grids")
        if not np.isclose(self.kappa, other.kappa, rtol=1e-14, atol=0):
            raise GridMismatch(f"kappa differs: {self.kappa} vs {other.kappa}")

    def __add__(self, other: "AlgebraElement") -> "AlgebraElement":
        self._compatible(other)
        return self.with_values(self.values + other.values, self.hermitian and other.hermitian)

    def __sub__(self, other: "AlgebraElement") -> "AlgebraElement":
        self._compatible(other)
        return self.with_values(self.values - other.values, self.hermitian and other.hermitian)

    def __mul__(self, scalar) -> "AlgebraElement":
        scalar = complex(scalar)
        return self.with_values(self.values * scalar, self.hermitian and scalar.imag == 0)

    __rmul__ = __mul__

    def __neg__(self) -> "AlgebraElement":
        return self * -1.0

    def check_hermitian(self, tol: float = 1e-8) -> float:
        """Return the sup distance to the involution; raise if it exceeds ``tol``."""
        dev = (self - involution(self)).sup_norm()
        if dev > tol * max(self.sup_norm(), 1e-300):
            raise NotHermitian(f"element differs from its involution by {dev:.3e}")
        return dev


def _require(f: AlgebraElement, picture: Picture):
    if f.picture != picture:
        raise ValueError(f"expected a {picture.value}-picture element, got {f.picture.value}")


# --------------------------------------------------------------------------
# picture changes


def to_mixed(f: AlgebraElement) -> AlgebraElement:
    if f.picture == Picture.MIXED:
        return f
    if f.picture == Picture.SPACE:
        check_edges(f.values, axis=0)
        vals = dft_array(f.values, f.grid0, axis=0) / (2 * np.pi)
        data = Field2D(f.grid0.dual(), f.grid1, vals)
    else:
        x1 = f.grid1.dual()
        vals = 2 * np.pi * idft_array(f.values, x1, axis=1)
        data = Field2D(f.grid0, x1, vals)
    return AlgebraElement(Picture.MIXED, data, f.kappa, f.hermitian)


def to_space(f: AlgebraElement) -> AlgebraElement:
    if f.picture == Picture.SPACE:
        return f
    m = to_mixed(f)
    x0 = m.grid0.dual()
    vals = 2 * np.pi * idft_array(m.values, x0, axis=0)
    return AlgebraElement(Picture.SPACE, Field2D(x0, m.grid1, vals), f.kappa, f.hermitian)


def to_momentum(f: AlgebraElement) -> AlgebraElement:
    if f.picture == Picture.MOMENTUM:
        return f
    m = to_mixed(f)
    check_edges(m.values, axis=1)
    vals = dft_array(m.values, m.grid1, axis=1) / (2 * np.pi)
    return AlgebraElement(Picture.MOMENTUM, Field2D(m.grid0, m.grid1.dual(), vals),
                          f.kappa, f.hermitian)


def to_picture(f: AlgebraElement, picture: Picture) -> AlgebraElement:
    return {Picture.MIXED: to_mixed, Picture.SPACE: to_space,
            Picture.MOMENTUM: to_momentum}[Picture(picture)](f)


# --------------------------------------------------------------------------
# products


def _support_rows(values: np.ndarray) -> np.ndarray:
    mag = np.max(np.abs(values), axis=1)
    peak = mag.max() if mag.size else 0.0
    if peak == 0.0:
        return np.array([], dtype=int)
    return np.nonzero(mag > SUPPORT_TOL * peak)[0]


def _check_support_sum(f: AlgebraElement, g: AlgebraElement):
    rf, rg = _support_rows(f.values), _support_rows(g.values)
    if rf.size == 0 or rg.size == 0:
        return
    c = f.grid0.center_index
    lo = (rf[0] - c) + (rg[0] - c) + c
    hi = (rf[-1] - c) + (rg[-1] - c) + c
    if lo < 0 or hi > f.grid0.n_points - 1:
        raise SupportOverflow("p0 support of the product exceeds the grid hull")


def star_mixed(f: AlgebraElement, g: AlgebraElement) -> AlgebraElement:
    """Mixed-picture product: p0 convolution twisted by the x1 dilation."""
    _require(f, Picture.MIXED)
    f._compatible(g)
    _check_support_sum(f, g)
    n0 = f.grid0.n_points
    c = f.grid0.center_index
    q = f.grid0.nodes
    x1 = f.grid1.nodes
    dq = f.grid0.spacing
    out = np.zeros_like(f.values)
    rows_g = _support_rows(g.values)
    if rows_g.size == 0:
        return f.with_values(out)
    resample = AxisResampler(g.values[rows_g[0]:rows_g[-1] + 1], f.grid1, axis=1)
    for k in _support_rows(f.values):
        g_dil = np.zeros_like(g.values)
        g_dil[rows_g[0]:rows_g[-1] + 1] = resample(np.exp(-q[k] / f.kappa) * x1)
        # out[j] += dq f[k] g_dil[j - k + c]
        shift = k - c
        j0, j1 = max(0, shift), min(n0, n0 + shift)
        out[j0:j1] += dq * f.values[k][None, :] * g_dil[j0 - shift:j1 - shift]
    return f.with_values(out)


def star_space(f: AlgebraElement, g: AlgebraElement) -> AlgebraElement:
    """Space-picture product ``\\int dp0/2pi e^{i x0 p0} (F_0 f)(p0, x1) g(x0, e^{-p0/kappa} x1)``."""
    _require(f, Picture.SPACE)
    f._compatible(g)
    check_edges(f.values, axis=0)
    gx0 = f.grid0
    p = gx0.dual().nodes
    dp = gx0.dual().spacing
    x0 = gx0.nodes
    x1 = f.grid1.nodes
    F0 = dft_array(f.values, gx0, axis=0)
    resample = AxisResampler(g.values, f.grid1, axis=1)
    out = np.zeros_like(f.values)
    for k in _support_rows(F0):
        g_dil = resample(np.exp(-p[k] / f.kappa) * x1)
        out += (dp / (2 * np.pi)) * np.exp(1j * x0 * p[k])[:, None] * F0[k][None, :] * g_dil
    return f.with_values(out)


def convolve_momentum(F: AlgebraElement, G: AlgebraElement) -> AlgebraElement:
    """Group-algebra convolution with the left Haar measure ``e^{q0/kappa} dq0 dq1``."""
    _require(F, Picture.MOMENTUM)
    F._compatible(G)
    _check_support_sum(F, G)
    n0, n1 = F.grid0.n_points, F.grid1.n_points
    c0, c1 = F.grid0.center_index, F.grid1.center_index
    q0 = F.grid0.nodes
    p1 = F.grid1.nodes
    w = F.grid0.spacing * F.grid1.spacing
    out = np.zeros_like(F.values)
    rows_g = _support_rows(G.values)
    if rows_g.size == 0:
        return F.with_values(out)
    Gs = G.values[rows_g[0]:rows_g[-1] + 1]
    resample = AxisResampler(Gs, F.grid1, axis=1)
    for k in _support_rows(F.values):
        dil = np.exp(q0[k] / F.kappa)
        g_dil = np.zeros_like(G.values)
        g_dil[rows_g[0]:rows_g[-1] + 1] = resample(dil * p1)
        conv = fftconvolve(g_dil, F.values[k][None, :], axes=1)[:, c1:c1 + n1]
        shift = k - c0
        j0, j1 = max(0, shift), min(n0, n0 + shift)
        out[j0:j1] += w * dil * conv[j0 - shift:j1 - shift]
    return F.with_values(out)


def star(f: AlgebraElement, g: AlgebraElement) -> AlgebraElement:
    """Product in whatever picture the operands share."""
    return {Picture.MIXED: star_mixed, Picture.SPACE: star_space,
            Picture.MOMENTUM: convolve_momentum}[f.picture](f, g)


# --------------------------------------------------------------------------
# involutions, unit, modular data


def _reflect_rows(values: np.ndarray) -> np.ndarray:
    """``out[j] = values[index of -p_j]``; the row at ``-p_0 = +L`` (off grid) is zero."""
    out = np.zeros_like(values)
    out[1:] = values[:0:-1]
    return out


def _dilate_rows(values: np.ndarray, grid1: Grid, factors: np.ndarray) -> np.ndarray:
    """Row ``j`` of the result is row ``j`` of ``values`` evaluated at ``factors[j] * x1``."""
    x1 = grid1.nodes
    lo, hi = x1[0], x1[-1]
    out = np.zeros_like(values)
    for j in _support_rows(values):
        spline = make_interp_spline(x1, values[j], k=SPLINE_ORDER)
        out[j] = spline(np.clip(factors[j] * x1, lo, hi))
    return out


def involution(f: AlgebraElement) -> AlgebraElement:
    kappa = f.kappa
    p = f.grid0.nodes
    if f.picture == Picture.MIXED:
        # f~^dag(p0, x1) = conj f~(-p0, e^{-p0/kappa} x1)
        vals = _dilate_rows(_reflect_rows(f.values).conj(), f.grid1, np.exp(-p / kappa))
    elif f.picture == Picture.MOMENTUM:
        # F^dag(p0, p1) = e^{p0/kappa} conj F(-p0, -p1 e^{p0/kappa}); the Jacobian sign is
        # fixed by agreement with the mixed picture and the convolution measure
        vals = _dilate_rows(_reflect_rows(f.values).conj(), f.grid1, -np.exp(p / kappa))
        vals = vals * np.exp(p / kappa)[:, None]
    else:
        # f^dag(x0, x1) = \int dp0/2pi e^{i x0 p0} F_0[conj f](p0, e^{-p0/kappa} x1)
        check_edges(f.values, axis=0)
        gx0 = f.grid0
        pk = gx0.dual().nodes
        dp = gx0.dual().spacing
        F0 = dft_array(f.values.conj(), gx0, axis=0)
        F0 = _dilate_rows(F0, f.grid1, np.exp(-pk / kappa))
        vals = (dp / (2 * np.pi)) * np.exp(1j * np.outer(gx0.nodes, pk)) @ F0
    return AlgebraElement(f.picture, f.data.with_values(vals), kappa, f.hermitian)


def hermitian_part(f: AlgebraElement) -> AlgebraElement:
    h = (f + involution(f)) * 0.5
    return replace(h, hermitian=True)


def unit_element(grid0: Grid, grid1: Grid, picture: Picture = Picture.MIXED,
                 kappa: float = 1.0) -> AlgebraElement:
    """Unit of the unitised algebra: ``delta(p0)`` (mixed) or the constant 1 (space)."""
    picture = Picture(picture)
    vals = np.zeros((grid0.n_points, grid1.n_points), dtype=complex)
    if picture == Picture.MIXED:
        vals[grid0.center_index] = 1.0 / grid0.spacing
    elif picture == Picture.SPACE:
        vals[:] = 1.0
    else:
        raise NotImplementedError("the momentum-picture unit is a product of two deltas; "
                                  "use the mixed picture")
    return AlgebraElement(picture, Field2D(grid0, grid1, vals), kappa, True)


def modular_function(p0, kappa: float = 1.0):
    """Modular function of the affine group, ``Delta(p0, p1) = e^{p0/kappa}``."""
    return np.exp(np.asarray(p0, dtype=float) / kappa)


# --------------------------------------------------------------------------
# automorphism flows and derivations


def automorphism_sigma(f: AlgebraElement, t: float) -> AlgebraElement:
    """Modular flow: multiply by ``e^{i t p0/kappa}`` (x0 translation by t/kappa)."""
    _require(f, Picture.MIXED)
    phase = np.exp(1j * t * f.grid0.nodes / f.kappa)
    return f.with_values(f.values * phase[:, None], f.hermitian)


def automorphism_omega(f: AlgebraElement, t: float) -> AlgebraElement:
    """Dilation flow ``f~(p0, e^t x1)``."""
    _require(f, Picture.MIXED)
    x1 = f.grid1.nodes
    vals = AxisResampler(f.values, f.grid1, axis=1)(np.exp(t) * x1)
    if not is_constant_along(f.values, 1) and edge_ratio(f.values, 1) <= 1e-6 < edge_ratio(vals, 1):
        raise SupportOverflow(f"dilation by e^{t:g} pushes the x1 support out of the hull")
    return f.with_values(vals, f.hermitian)


class Derivation(str, enum.Enum):
    D0 = "D0"
    D1 = "D1"
    DPLUS = "Dplus"
    DMINUS = "Dminus"


def derivation(f: AlgebraElement, which: Derivation | str) -> AlgebraElement:
    """``D0 = i p0``, ``D1 = x1 d/dx1`` and ``D+- = D0 +- D1`` in the mixed picture."""
    _require(f, Picture.MIXED)
    which = Derivation(which)
    d0 = 1j * f.grid0.nodes[:, None] * f.values
    if which == Derivation.D0:
        return f.with_values(d0, f.hermitian)
    d1 = f.grid1.nodes[None, :] * spectral_derivative_array(f.values, f.grid1, axis=1)
    if which == Derivation.D1:
        return f.with_values(d1, f.hermitian)
    sign = 1.0 if which == Derivation.DPLUS else -1.0
    return f.with_values(d0 + sign * d1, f.hermitian)


# --------------------------------------------------------------------------
# windowed coordinate x0


def plateau_window(x: np.ndarray, half_width: float, ramp: float = 2.0) -> np.ndarray:
    """C-infinity window equal to 1 on [-W, W] and 0 beyond W + ramp."""
    t = np.clip((half_width + ramp - np.abs(np.asarray(x, dtype=float))) / ramp, 0.0, 1.0)
    with np.errstate(divide="ignore", over="ignore"):
        a = np.where(t > 0, np.exp(-1.0 / np.where(t > 0, t, 1.0)), 0.0)
        b = np.where(t < 1, np.exp(-1.0 / np.where(t < 1, 1.0 - t, 1.0)), 0.0)
    return a / (a + b)


def time_coordinate_space(grid_x0: Grid, grid_x1: Grid, window: float,
                          kappa: float = 1.0, ramp: float = 2.0) -> AlgebraElement:
    """Windowed coordinate ``x0 w(x0)`` in the space picture (constant in x1)."""
    if window + ramp >= grid_x0.half_width:
        raise SupportOverflow("window plus ramp must fit inside the x0 grid")
    x0 = grid_x0.nodes
    col = x0 * plateau_window(x0, window, ramp)
    vals = np.repeat(col[:, None], grid_x1.n_points, axis=1)
    return AlgebraElement(Picture.SPACE, Field2D(grid_x0, grid_x1, vals), kappa, True)


def time_coordinate_mixed(grid_p0: Grid, grid_x1: Grid, window: float,
                          kappa: float = 1.0, ramp: float = 2.0) -> AlgebraElement:
    """Mixed-picture image of ``x0 w(x0)`` on the x0 grid dual to ``grid_p0``."""
    return to_mixed(time_coordinate_space(grid_p0.dual(), grid_x1, window, kappa, ramp))


def inner_derivation_residual(f: AlgebraElement, window: float, ramp: float = 2.0) -> float:
    """Relative sup residual of ``i x1 d1 f = kappa [x0, f]`` with a windowed ``x0``."""
    _require(f, Picture.SPACE)
    x0 = f.grid0.nodes
    outside = np.abs(x0) >= window
    peak = max(f.sup_norm(), 1e-300)
    if np.any(outside) and np.max(np.abs(f.values[outside])) > 1e-10 * peak:
        raise SupportOverflow(f"element is not negligible outside the window |x0| < {window:g}")
    t = time_coordinate_space(f.grid0, f.grid1, window, f.kappa, ramp)
    d1 = f.grid1.nodes[None, :] * spectral_derivative_array(f.values, f.grid1, axis=1)
    lhs = 1j * d1
    rhs = f.kappa * (star_space(t, f).values - star_space(f, t).values)
    err = np.max(np.abs(lhs - rhs))
    scale = np.max(np.abs(d1))
    if scale < 1e-12 * peak:
        return float(err)
    return float(err / scale)


# --------------------------------------------------------------------------
# Hopf actions of the deformed translations and twisted derivations


@dataclass(frozen=True)
class HopfGenerator:
    """``P0``, ``P`` or a power ``E^gamma`` of ``E = exp(-P0/kappa)``."""

    kind: str
    gamma: float = 0.0

    def __post_init__(self):
        if self.kind not in ("P0", "P", "E"):
            raise ValueError(f"unknown generator {self.kind!r}")

    @classmethod
    def P0(cls) -> "HopfGenerator":
        return cls("P0")

    @classmethod
    def P(cls) -> "HopfGenerator":
        return cls("P")

    @classmethod
    def E(cls, gamma: float = 1.0) -> "HopfGenerator":
        return cls("E", float(gamma))


def _epower(f: AlgebraElement, gamma: float) -> np.ndarray:
    return np.exp(-gamma * f.grid0.nodes / f.kappa)[:, None]


def hopf_action(g: HopfGenerator, f: AlgebraElement) -> AlgebraElement:
    _require(f, Picture.MIXED)
    if g.kind == "P0":
        return f.with_values(f.grid0.nodes[:, None] * f.values)
    if g.kind == "P":
        return f.with_values(-1j * spectral_derivative_array(f.values, f.grid1, axis=1))
    return f.with_values(_epower(f, g.gamma) * f.values)


def twisted_derivation(f: AlgebraElement, which: str, gamma: float) -> AlgebraElement:
    """``X0 = kappa E^gamma (1 - E)`` and ``X1 = E^gamma P`` acting on a mixed element."""
    _require(f, Picture.MIXED)
    if which == "X0":
        k = f.kappa
        mult = k * _epower(f, gamma) * (1.0 - _epower(f, 1.0))
        return f.with_values(mult * f.values)
    if which == "X1":
        d = -1j * spectral_derivative_array(f.values, f.grid1, axis=1)
        return f.with_values(_epower(f, gamma) * d)
    raise ValueError(f"unknown twisted derivation {which!r}")


def _relative(err: float, scale: float, atol: float = 1e-12) -> float:
    return err if scale <= atol else err / scale


def twisted_leibniz_residual(f: AlgebraElement, g: AlgebraElement, which: str, gamma: float) -> float:
    lhs = twisted_derivation(star_mixed(f, g), which, gamma)
    r1 = star_mixed(twisted_derivation(f, which, gamma), hopf_action(HopfGenerator.E(gamma), g))
    r2 = star_mixed(hopf_action(HopfGenerator.E(1.0 + gamma), f), twisted_derivation(g, which, gamma))
    err = (lhs - r1 - r2).sup_norm()
    return _relative(err, lhs.sup_norm())


def twisted_reality_residual(f: AlgebraElement, which: str, gamma: float) -> float:
    """Residual of ``(X f)^dag = -E^{-2 gamma - 1} |> X(f^dag)``."""
    lhs = involution(twisted_derivation(f, which, gamma))
    rhs = -hopf_action(HopfGenerator.E(-2.0 * gamma - 1.0),
                       twisted_derivation(involution(f), which, gamma))
    err = (lhs - rhs).sup_norm()
    return _relative(err, max(lhs.sup_norm(), rhs.sup_norm()))


# --------------------------------------------------------------------------
# test-element builders and the commutative limit


def gaussian_mixed(grid_p0: Grid, grid_x1: Grid, p0_center: float = 0.0, p0_width: float = 0.5,
                   x1_center: float = 0.0, x1_width: float = 1.0, x1_momentum: float = 0.0,
                   amplitude: complex = 1.0, kappa: float = 1.0) -> AlgebraElement:
    p = grid_p0.nodes[:, None]
    x = grid_x1.nodes[None, :]
    vals = amplitude * np.exp(-(p - p0_center) ** 2 / (2 * p0_width ** 2)
                              - (x - x1_center) ** 2 / (2 * x1_width ** 2) + 1j * x1_momentum * x)
    vals = np.where(np.abs(vals) < 1e-300, 0.0, vals)
    return AlgebraElement(Picture.MIXED, Field2D(grid_p0, grid_x1, vals), kappa)


def gaussian_space(grid_x0: Grid, grid_x1: Grid, x0_center: float = 0.0, x0_width: float = 1.0,
                   x1_center: float = 0.0, x1_width: float = 1.0, k0: float = 0.0, k1: float = 0.0,
                   amplitude: complex = 1.0, kappa: float = 1.0) -> AlgebraElement:
    x0 = grid_x0.nodes[:, None]
    x1 = grid_x1.nodes[None, :]
    vals = amplitude * np.exp(-(x0 - x0_center) ** 2 / (2 * x0_width ** 2)
                              - (x1 - x1_center) ** 2 / (2 * x1_width ** 2)
                              + 1j * (k0 * x0 + k1 * x1))
    vals = np.where(np.abs(vals) < 1e-300, 0.0, vals)
    return AlgebraElement(Picture.SPACE, Field2D(grid_x0, grid_x1, vals), kappa)


def commutative_deviation(f: AlgebraElement, g: AlgebraElement) -> float:
    """``sup |f * g - f g|`` in the space picture."""
    return (star_space(f, g) - f.with_values(f.values * g.values)).sup_norm()


def star_commutator_norm(f: AlgebraElement, g: AlgebraElement) -> float:
    return (star(f, g) - star(g, f)).sup_norm()


def loglog_slope(x, y) -> float:
    """Least-squares slope of ``log y`` against ``log x``."""
    lx, ly = np.log(np.asarray(x, dtype=float)), np.log(np.asarray(y, dtype=float))
    return float(np.polyfit(lx, ly, 1)[0])
