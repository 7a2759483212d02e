"""Lorentzian spectral triple on ``L2(R, ds) (x) C^2``.

``A`` is multiplication by ``s`` and ``B = -i d/ds``; the Dirac operator is

    D = -i [[0, A - B], [A + B, 0]],      J = [[0, -1], [-1, 0]],

and the time operator acts as ``B`` on each component.  Identities are tested
weakly on smooth vectors supported away from the grid edges, because the
spectral derivative breaks ``[A, B] = i`` near the edges.
"""

from __future__ import annotations

import json
from dataclasses import asdict, dataclass, field

import numpy as np

from .algebra import AlgebraElement, Derivation, derivation
from .errors import GridMismatch
from .numerics import (
    Field1D,
    Grid,
    Spectrum,
    hermitian_eigen,
    make_gaussian,
    momentum_matrix,
    spectral_derivative_array,
)
from .representation import RepLabel, rep_matrix

CONVENTIONS = {"time_operator": "minus_i_dds", "mean_square": "symmetrized",
               "mean_square_block": "1 + s^2 - d^2/ds^2, spectrum 2 + 2n (not 1 - s^2 + d^2/ds^2)"}


@dataclass(frozen=True)
class Spinor:
    up: Field1D
    down: Field1D

    def __post_init__(self):
        if self.up.grid != self.down.grid:
            raise GridMismatch("spinor components live on different grids")

    @property
    def grid(self) -> Grid:
        return self.up.grid

    @classmethod
    def from_arrays(cls, grid: Grid, up, down) -> "Spinor":
        return cls(Field1D(grid, up), Field1D(grid, down))

    def stacked(self) -> np.ndarray:
        return np.concatenate([self.up.values, self.down.values])

    def norm(self) -> float:
        return float(np.sqrt(self.up.norm() ** 2 + self.down.norm() ** 2))

    def inner(self, other: "Spinor") -> complex:
        return self.up.inner(other.up) + self.down.inner(other.down)

    def __add__(self, other: "Spinor") -> "Spinor":
        return Spinor(self.up.with_values(self.up.values + other.up.values),
                      self.down.with_values(self.down.values + other.down.values))

    def __sub__(self, other: "Spinor") -> "Spinor":
        return self + (-1.0) * other

    def __rmul__(self, c: complex) -> "Spinor":
        return Spinor(self.up.with_values(c * self.up.values),
                      self.down.with_values(c * self.down.values))


def op_A(phi: Field1D) -> Field1D:
    return phi.with_values(phi.grid.nodes * phi.values)


def op_B(phi: Field1D) -> Field1D:
    return phi.with_values(-1j * spectral_derivative_array(phi.values, phi.grid))


def dirac_apply(psi: Spinor) -> Spinor:
    up, down = psi.up, psi.down
    new_up = -1j * (op_A(down).values - op_B(down).values)
    new_down = -1j * (op_A(up).values + op_B(up).values)
    return Spinor(up.with_values(new_up), down.with_values(new_down))


def fundamental_symmetry(psi: Spinor) -> Spinor:
    return Spinor(psi.up.with_values(-psi.down.values), psi.down.with_values(-psi.up.values))


def krein_product(phi: Spinor, psi: Spinor) -> complex:
    """``(Phi, Psi)_J = <Phi, J Psi>``."""
    if phi.grid != psi.grid:
        raise GridMismatch("spinors live on different grids")
    return phi.inner(fundamental_symmetry(psi))


def verify_krein_antisymmetry(spinors) -> float:
    """Largest normalised ``|(Phi, D Psi)_J + (D Phi, Psi)_J|`` over all ordered pairs.

    ``D^dag J = -J D`` makes ``J D`` anti-Hermitian, so the two Krein pairings
    are negatives of each other.
    """
    spinors = list(spinors)
    if not spinors:
        return 0.0
    images = [dirac_apply(s) for s in spinors]
    worst = 0.0
    for phi, dphi in zip(spinors, images):
        for psi, dpsi in zip(spinors, images):
            num = abs(krein_product(phi, dpsi) + krein_product(dphi, psi))
            den = phi.norm() * dpsi.norm() + dphi.norm() * psi.norm()
            if den > 0:
                worst = max(worst, num / den)
    return worst


def time_operator(phi: Field1D) -> Field1D:
    """``(T phi)(s) = -i phi'(s)``, self-adjoint."""
    return op_B(phi)


def time_operator_spinor(psi: Spinor) -> Spinor:
    return Spinor(time_operator(psi.up), time_operator(psi.down))


def dt_commutator_residual(spinors) -> float:
    """Largest ``||[D, T] Psi + J Psi|| / ||Psi||`` over the test spinors."""
    worst = 0.0
    for psi in spinors:
        comm = dirac_apply(time_operator_spinor(psi)) - time_operator_spinor(dirac_apply(psi))
        worst = max(worst, (comm + fundamental_symmetry(psi)).norm() / psi.norm())
    return worst


# --------------------------------------------------------------------------
# matrices


def dirac_matrix(grid: Grid) -> np.ndarray:
    A = np.diag(grid.nodes).astype(complex)
    B = momentum_matrix(grid, keep_nyquist=True)
    Z = np.zeros_like(A)
    return -1j * np.block([[Z, A - B], [A + B, Z]])


def mean_square_dirac(grid: Grid) -> np.ndarray:
    """``1 + (D^dag D + D D^dag) / 2`` as a dense ``2N x 2N`` matrix."""
    D = dirac_matrix(grid)
    Dh = D.conj().T
    return np.eye(D.shape[0]) + 0.5 * (Dh @ D + D @ Dh)


def mean_square_dirac_spectrum(grid: Grid, n_low: int) -> Spectrum:
    """Lowest ``n_low`` eigenvalues of one block of ``1 + <D>^2``.

    The symmetrised square is block diagonal with two identical blocks
    ``1 + A^2 + B^2``, so every level is doubly degenerate; one copy is returned.
    """
    n = grid.n_points
    if n_low > n // 4:
        raise ValueError(f"n_low={n_low} exceeds N/4={n // 4}")
    T = mean_square_dirac(grid)
    off = max(np.max(np.abs(T[:n, n:])), np.max(np.abs(T[n:, :n])))
    same = np.max(np.abs(T[:n, :n] - T[n:, n:]))
    scale = np.max(np.abs(T))
    if off > 1e-10 * scale or same > 1e-10 * scale:
        raise ArithmeticError("symmetrised square of D is not block diagonal with equal blocks")
    return hermitian_eigen(T[:n, :n], vectors=False, n_low=n_low)


def spectrum_slope(eigenvalues, n_min: int = 2) -> float:
    ev = np.asarray(eigenvalues, dtype=float)
    n = np.arange(ev.size)
    sel = n >= n_min
    return float(np.polyfit(n[sel], ev[sel], 1)[0])


def inverse_sqrt_block(grid: Grid) -> np.ndarray:
    """``(1 + A^2 + B^2)^(-1/2)`` on one component."""
    n = grid.n_points
    block = mean_square_dirac(grid)[:n, :n]
    spec = hermitian_eigen(block)
    V = spec.eigenvectors
    return (V * spec.eigenvalues ** -0.5) @ V.conj().T


# --------------------------------------------------------------------------
# commutators with the representation


@dataclass(frozen=True)
class CommutatorReport:
    norm: float
    residual_A: float
    residual_B: float


def interior_vectors(grid: Grid, count: int = 6) -> list[np.ndarray]:
    """Gaussians placed in the middle half of the grid."""
    L = grid.half_width
    centers = np.linspace(-0.3 * L, 0.3 * L, count)
    width = 0.08 * L
    return [make_gaussian(c, width, 0.5 * k, grid).values for k, c in enumerate(centers)]


def _weak(op: np.ndarray, ref: np.ndarray, vectors) -> float:
    worst = 0.0
    for v in vectors:
        den = np.linalg.norm(ref @ v)
        num = np.linalg.norm(op @ v - ref @ v)
        if den > 1e-14:
            worst = max(worst, num / den)
        else:
            worst = max(worst, num)
    return worst


def commutator_norm(a: AlgebraElement, grid_s: Grid, nu=RepLabel.PLUS) -> CommutatorReport:
    """Norm of ``[D, pi_nu(a) (x) 1]`` and the intertwining residuals.

    ``[A, pi(a)] = i pi(D0 a)`` and ``[B, pi(a)] = (i/kappa) pi(D1 a)``, so the
    commutator is off diagonal with blocks ``pi(D0 a -+ D1 a / kappa)``; its norm is
    the larger of their operator norms.  The residuals compare both sides on interior
    test vectors.
    """
    k = a.kappa
    d0 = derivation(a, Derivation.D0)
    d1 = derivation(a, Derivation.D1)
    P = rep_matrix(nu, a, grid_s).entries
    P0 = rep_matrix(nu, d0, grid_s).entries
    P1 = rep_matrix(nu, d1, grid_s).entries
    A = np.diag(grid_s.nodes).astype(complex)
    B = momentum_matrix(grid_s)
    vecs = interior_vectors(grid_s)
    res_a = _weak(A @ P - P @ A, 1j * P0, vecs)
    res_b = _weak(B @ P - P @ B, (1j / k) * P1, vecs)
    plus = np.linalg.norm(P0 + P1 / k, 2)
    minus = np.linalg.norm(P0 - P1 / k, 2)
    return CommutatorReport(float(max(plus, minus)), res_a, res_b)


def compactness_tail(a: AlgebraElement, grid_s: Grid, nu=RepLabel.PLUS, count: int = 20):
    """Leading singular values of ``pi(a) T^(-1/2)`` and of ``T^(-1/2)`` alone."""
    R = inverse_sqrt_block(grid_s)
    P = rep_matrix(nu, a, grid_s).entries
    sv_a = np.linalg.svd(P @ R, compute_uv=False)[:count]
    sv_r = np.linalg.svd(R, compute_uv=False)[:count]
    return sv_a, sv_r


# --------------------------------------------------------------------------
# report


def gaussian_spinor_set(grid: Grid) -> list[Spinor]:
    """Six interior Gaussian spinors with varied centres, widths, momenta and mixing."""
    L = grid.half_width
    params = [(-0.2, 0.10, 0.0, 1.0, 0.0), (0.0, 0.08, 1.0, 0.0, 1.0),
              (0.15, 0.12, -0.5, 1.0, 1.0j), (-0.1, 0.06, 2.0, 0.5, -1.0),
              (0.25, 0.09, 0.3, 1.0j, 0.7), (0.05, 0.15, -1.5, 0.3, 0.3 - 0.4j)]
    out = []
    for c, w, k, au, ad in params:
        g = make_gaussian(c * L, w * L, k, grid).values
        h = make_gaussian(-c * L, 0.8 * w * L, -k, grid).values
        out.append(Spinor.from_arrays(grid, au * g, ad * h))
    return out


@dataclass
class TripleReport:
    krein_antisym_residual: float
    dt_commutator_residual: float
    spectrum: list[float]
    spectrum_slope: float
    commutator_norms: dict[str, float] = field(default_factory=dict)
    compactness_tail: list[float] = field(default_factory=list)
    conventions: dict[str, str] = field(default_factory=lambda: dict(CONVENTIONS))

    def __post_init__(self):
        if min(self.krein_antisym_residual, self.dt_commutator_residual) < 0:
            raise ValueError("residuals are nonnegative")

    def to_dict(self) -> dict:
        return asdict(self)

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2, sort_keys=True)


def verify_triple(grid: Grid, n_low: int = 20, elements: dict | None = None,
                  rep_grid: Grid | None = None) -> TripleReport:
    """Run every triple check on ``grid``; ``elements`` maps names to mixed elements."""
    spinors = gaussian_spinor_set(grid)
    spec = mean_square_dirac_spectrum(grid, n_low)
    norms, tail = {}, []
    for name, a in (elements or {}).items():
        for nu in (RepLabel.PLUS, RepLabel.ZERO, RepLabel.MINUS):
            rep = commutator_norm(a, rep_grid, nu)
            norms[f"{name}[{int(nu):+d}]"] = rep.norm
        if not tail:
            sv_a, _ = compactness_tail(a, rep_grid)
            tail = [float(x) for x in sv_a]
    return TripleReport(
        krein_antisym_residual=verify_krein_antisymmetry(spinors),
        dt_commutator_residual=dt_commutator_residual(spinors),
        spectrum=[float(x) for x in spec.eigenvalues],
        spectrum_slope=spectrum_slope(spec.eigenvalues),
        commutator_norms=norms,
        compactness_tail=tail,
    )
