"""Causal cone, causal order between vector states and the transport certificate.

Split functions ``f = h(x0) + g(x1)`` act in ``pi_nu`` through

    U^dag diag(h'(v)) U  +-  diag(nu e^{-s} g'(nu e^{-s})),

and lie in the cone when all six matrices (``nu`` in {+1, 0, -1}, both signs) are
positive.  A pair of states is ordered ``Phi1 <= Phi2`` when every causal ``f``
satisfies ``phi_{Phi1}(f) <= phi_{Phi2}(f)``.  Only two families are decisive: the
phase-momentum transport certifies order, and the log family of split functions
witnesses its failure.  Anything else is reported as unknown.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass, field
from typing import Callable, Sequence

import numpy as np

from .algebra import AlgebraElement, Derivation, derivation
from .errors import DomainError, EdgeLeakage, NotHermitian, SupportOverflow
from .numerics import (
    Field1D,
    Grid,
    dft_array,
    dft_matrix,
    hermitian_eigen,
    idft_array,
    make_grid,
    min_eigenvalue,
    spectral_derivative_array,
)
from .representation import RepLabel, StateVector, kernel_on_slots, rep_matrix

MEMBERSHIP_TOL = 1e-8
FD_STEP = 1e-4
DEFAULT_EPSILONS = (1.0, 0.1, 0.01, 0.001)
BLOCKS = [(nu, sgn) for nu in (RepLabel.PLUS, RepLabel.ZERO, RepLabel.MINUS) for sgn in (1, -1)]


def _block_key(nu: RepLabel, sgn: int) -> str:
    return f"{int(nu):+d}{'+' if sgn > 0 else '-'}"


# --------------------------------------------------------------------------
# split functions


def _numeric_derivative(g: Callable) -> Callable:
    def gp(x):
        x = np.asarray(x, dtype=float)
        h = 1e-6 * (1.0 + np.abs(x))
        return (g(x + h) - g(x - h)) / (2 * h)
    return gp


@dataclass(frozen=True)
class SplitFunction:
    """``f(x0, x1) = h(x0) + g(x1)`` with the derivatives the cone test needs.

    ``mirror`` extends ``g'`` to ``x1 < 0`` by ``g'(-y) = g'(y)``; this keeps the
    bound ``|x1 g'(x1)|`` and is only consulted for the ``nu = -1`` blocks.
    """

    h_prime: Callable
    g: Callable | None = None
    g_prime: Callable | None = None
    h: Callable | None = None
    epsilon: float = 0.0
    beta: float = 0.0
    mirror: bool = True

    def gp(self, x) -> np.ndarray:
        x = np.asarray(x, dtype=float)
        if self.g is None and self.g_prime is None:
            return np.zeros_like(x)
        deriv = self.g_prime if self.g_prime is not None else _numeric_derivative(self.g)
        pts = np.abs(x) if self.mirror else x
        with np.errstate(all="ignore"):
            out = np.asarray(deriv(pts), dtype=float) * np.ones_like(x)
        if not np.all(np.isfinite(out)):
            raise DomainError("g' is undefined on part of the range nu e^{-s}")
        return out

    def hp(self, v) -> np.ndarray:
        v = np.asarray(v, dtype=float)
        with np.errstate(all="ignore"):
            out = np.asarray(self.h_prime(v), dtype=float) * np.ones_like(v)
        if not np.all(np.isfinite(out)):
            raise DomainError("h' is undefined on part of the momentum grid")
        return out

    def bound(self, grid: Grid) -> float:
        """``sup_s |e^{-s} g'(e^{-s})|`` on the grid."""
        x = np.exp(-grid.nodes)
        return float(np.max(np.abs(x * self.gp(x))))

    @classmethod
    def time(cls) -> "SplitFunction":
        """The global time ``f = x0``."""
        return cls(h_prime=np.ones_like, h=lambda v: np.asarray(v, dtype=float))

    @classmethod
    def log_family(cls, beta: float, epsilon: float, with_time: bool = True) -> "SplitFunction":
        """``x0 + beta ln(x1 + epsilon)``; ``beta = +-1`` are the functions ``f^+-_epsilon``."""
        if epsilon <= 0:
            raise ValueError("epsilon must be positive")
        hp = np.ones_like if with_time else np.zeros_like
        h = (lambda v: np.asarray(v, dtype=float)) if with_time else np.zeros_like
        return cls(h_prime=hp, h=h,
                   g=lambda x: beta * np.log(np.abs(x) + epsilon),
                   g_prime=lambda x: beta / (x + epsilon),
                   epsilon=float(epsilon), beta=float(beta))


@dataclass(frozen=True)
class MembershipResult:
    causal: bool
    min_eigenvalues: dict[str, float]

    def __bool__(self):
        return self.causal

    def __iter__(self):
        return iter((self.causal, self.min_eigenvalues))


def split_block(f: SplitFunction, grid: Grid, nu, sgn: int) -> np.ndarray:
    nu = RepLabel(int(nu))
    U = dft_matrix(grid)
    hv = f.hp(grid.dual().nodes)
    M = (U.conj().T * hv) @ U
    if nu != RepLabel.ZERO:
        x = float(nu) * np.exp(-grid.nodes)
        M = M + sgn * np.diag(x * f.gp(x))
    return M


def cone_membership_split(f: SplitFunction, grid: Grid) -> MembershipResult:
    mins, scale = {}, 1e-300
    for nu, sgn in BLOCKS:
        M = split_block(f, grid, nu, sgn)
        scale = max(scale, np.max(np.abs(M)))
        mins[_block_key(nu, sgn)] = min_eigenvalue(M)
    ok = all(m >= -MEMBERSHIP_TOL * max(scale, 1.0) for m in mins.values())
    return MembershipResult(ok, mins)


def _general_blocks(f: AlgebraElement, grid_s: Grid):
    if not f.hermitian:
        raise NotHermitian("cone membership is defined for hermitian elements")
    for nu, sgn in BLOCKS:
        which = Derivation.DPLUS if sgn > 0 else Derivation.DMINUS
        M = rep_matrix(nu, derivation(f, which), grid_s).entries
        dev = np.max(np.abs(M - M.conj().T))
        peak = np.max(np.abs(M))
        if dev > 1e-6 * max(peak, 1e-300):
            raise NotHermitian(f"pi_{int(nu):+d}(D f) deviates from Hermitian by {dev / peak:.2e}")
        yield _block_key(nu, sgn), 0.5 * (M + M.conj().T), peak


def cone_membership_general(f: AlgebraElement, grid_s: Grid) -> MembershipResult:
    """Positivity of ``pi_nu(D+- f)`` for all three representations."""
    mins, scale = {}, 1e-300
    for key, H, peak in _general_blocks(f, grid_s):
        scale = max(scale, peak)
        mins[key] = float(hermitian_eigen(H, vectors=False, n_low=1).eigenvalues[0])
    ok = all(m >= -MEMBERSHIP_TOL * max(scale, 1.0) for m in mins.values())
    return MembershipResult(ok, mins)


def sampled_form_minimum(f: AlgebraElement, grid_s: Grid, count: int = 200,
                         seed: int = 0) -> dict[str, float]:
    """Smallest ``<psi, pi(D+- f) psi> / ||psi||^2`` over random smooth ``psi``, per block.

    Each ``psi`` is a random superposition of three Gaussians inside the s window.
    The eigenvalue test bounds these from below, so a causal verdict must leave
    every sampled form nonnegative.
    """
    rng = np.random.default_rng(seed)
    L = grid_s.half_width
    s = grid_s.nodes
    vecs = np.zeros((count, s.size), dtype=complex)
    for i in range(count):
        for _ in range(3):
            c = rng.uniform(-0.6 * L, 0.6 * L)
            w = rng.uniform(0.03 * L, 0.12 * L)
            k = rng.uniform(-3.0, 3.0)
            vecs[i] += complex(*rng.normal(size=2)) * np.exp(-(s - c) ** 2 / (2 * w * w) + 1j * k * s)
    norms = np.sum(np.abs(vecs) ** 2, axis=1)
    out = {}
    for key, H, _ in _general_blocks(f, grid_s):
        forms = np.real(np.einsum("ij,jk,ik->i", vecs.conj(), H, vecs)) / norms
        out[key] = float(forms.min())
    return out


# --------------------------------------------------------------------------
# expectations and transport


def expectation_X(state: StateVector) -> float:
    s = state.grid.nodes
    return float(state.grid.spacing * np.sum(s * np.abs(state.values) ** 2))


def expectation_P(state: StateVector) -> float:
    """``<Phi, -i Phi'>`` by spectral differentiation."""
    d = spectral_derivative_array(state.values, state.grid)
    return float(np.real(state.grid.spacing * np.vdot(state.values, -1j * d)))


def expectation_P_fourier(state: StateVector) -> float:
    """``(1/2pi) \\int v |F Phi(v)|^2 dv``."""
    grid = state.grid
    F = dft_array(state.values, grid)
    v = grid.dual().nodes.copy()
    v[0] = 0.0  # match the derivative route, which drops the Nyquist mode
    return float(grid.dual().spacing * np.sum(v * np.abs(F) ** 2) / (2 * np.pi))


def necessary_condition(phi1: StateVector, phi2: StateVector) -> tuple[bool, float]:
    """Quantum speed-of-light bound ``delta <P> >= |delta <X>|``."""
    margin = (expectation_P(phi2) - expectation_P(phi1)) - abs(expectation_X(phi2) - expectation_X(phi1))
    return margin >= -1e-8, float(margin)


@dataclass(frozen=True)
class TransportParams:
    alpha: float
    t: float

    def __post_init__(self):
        if self.t < 0:
            raise ValueError("transport time must be nonnegative")

    @property
    def valid(self) -> bool:
        return abs(self.alpha) <= 1.0


def _transport_values(values: np.ndarray, grid: Grid, alpha: float, t: float) -> np.ndarray:
    v = grid.dual().nodes
    F = dft_array(values, grid)
    F = F * np.exp(1j * v * alpha * t)
    shifted = idft_array(F, grid)
    return shifted * np.exp(1j * t * grid.nodes)


def phase_momentum_transport(phi0: StateVector, params: TransportParams) -> StateVector:
    """``Phi_t(u) = Phi_0(u + alpha t) e^{i t u}``."""
    if params.t == 0:
        return phi0
    vals = _transport_values(phi0.values, phi0.grid, params.alpha, params.t)
    try:
        out = StateVector.normalized(phi0.phi.with_values(vals))
    except EdgeLeakage as exc:
        raise SupportOverflow("transported state leaves the s grid") from exc
    F = dft_array(out.values, out.grid)
    if max(abs(F[0]), abs(F[-1])) > 1e-8 * np.max(np.abs(F)):
        raise SupportOverflow("momentum boost pushes the state past the Nyquist frequency")
    return out


def _transport_raw(phi0: StateVector, alpha: float, t: float) -> np.ndarray:
    return _transport_values(phi0.values, phi0.grid, alpha, t)


def sufficient_residual(phi0: StateVector, alpha: float, t_samples: Sequence[float],
                        evolution: Callable[[float], np.ndarray] | None = None,
                        psi: Callable[[float], np.ndarray] | None = None) -> float:
    """Residual of the sufficient causal-evolution equation along a family ``Phi_t``.

    ``d/dt (conj Phi_t(s) Phi_t(u))`` (central difference) is compared with
    ``i(u-s) conj psi(s) psi(u) + alpha (conj psi'(s) psi(u) + conj psi(s) psi'(u))``.
    By default ``Phi_t`` is the transport of ``phi0`` and ``psi_t = Phi_t``.
    """
    grid = phi0.grid
    s = grid.nodes
    ds = grid.spacing
    evolve = evolution or (lambda t: _transport_raw(phi0, alpha, t))
    source = psi or evolve
    norm = ds * np.sum(np.abs(phi0.values) ** 2)  # ||conj Phi (x) Phi|| = ||Phi||^2
    worst = 0.0
    for t in t_samples:
        a, b = evolve(t + FD_STEP), evolve(t - FD_STEP)
        lhs = (np.outer(a.conj(), a) - np.outer(b.conj(), b)) / (2 * FD_STEP)
        p = np.asarray(source(t), dtype=complex)
        if not np.any(p):
            rhs = np.zeros_like(lhs)
        else:
            dp = spectral_derivative_array(p, grid)
            rhs = 1j * (s[None, :] - s[:, None]) * np.outer(p.conj(), p) \
                + alpha * (np.outer(dp.conj(), p) + np.outer(p.conj(), dp))
        err = np.sqrt(ds * ds * np.sum(np.abs(lhs - rhs) ** 2))
        worst = max(worst, err / norm)
    return float(worst)


def stokes_identity_residual(f: AlgebraElement, psi: Field1D) -> float:
    """Boundary-term identity for ``pi_+``: ``<psi, pi(D1 f) psi>`` against the derivative form."""
    grid = psi.grid
    p = psi.values
    if not np.any(p):
        return 0.0
    dp = spectral_derivative_array(p, grid)
    K = kernel_on_slots(f, grid, RepLabel.PLUS)
    K1 = kernel_on_slots(derivation(f, Derivation.D1), grid, RepLabel.PLUS)
    h2 = grid.spacing ** 2
    lhs = h2 * (p.conj() @ K1 @ p)
    rhs = h2 * (dp.conj() @ K @ p + p.conj() @ K @ dp)
    scale = max(abs(lhs), abs(rhs))
    if scale < 1e-12:
        return float(abs(lhs - rhs))
    return float(abs(lhs - rhs) / scale)


# --------------------------------------------------------------------------
# witness search and the order decision


@dataclass(frozen=True)
class Witness:
    function: SplitFunction
    pairing: float
    limit_pairing: float

    def to_dict(self) -> dict:
        return {"beta": self.function.beta, "epsilon": self.function.epsilon,
                "pairing": self.pairing, "limit_pairing": self.limit_pairing}


def _log_moment(phi1: StateVector, phi2: StateVector, eps: float, sign: int) -> float:
    s = phi1.grid.nodes
    x = sign * np.exp(-s)
    w = np.abs(phi2.values) ** 2 - np.abs(phi1.values) ** 2
    return float(phi1.grid.spacing * np.sum(np.log(np.abs(x) + eps) * w))


def witness_pairing(phi1: StateVector, phi2: StateVector, beta: float, eps: float,
                    sign: int = 1) -> float:
    """``phi_2(f) - phi_1(f)`` for ``f = x0 + beta ln(x1 + eps)``."""
    dP = expectation_P(phi2) - expectation_P(phi1)
    return dP + beta * _log_moment(phi1, phi2, eps, sign)


def richardson(p_coarse: float, p_fine: float, ratio: float = 10.0) -> float:
    """Linear extrapolation to zero from values at ``eps`` and ``eps / ratio``."""
    return (ratio * p_fine - p_coarse) / (ratio - 1.0)


def cone_search_witness(phi1: StateVector, phi2: StateVector,
                        eps_list: Sequence[float] = DEFAULT_EPSILONS,
                        beta_bounds: tuple[float, float] = (-1.0, 1.0),
                        sign: int = 1, tol: float = 1e-6) -> tuple[Witness | None, float]:
    """Scan the log family; return ``(witness or None, smallest pairing)``.

    The pairing is affine in ``beta``, so only the two endpoints are evaluated.
    The limit pairing is the Richardson extrapolation on the two smallest epsilons.
    """
    eps_list = sorted({float(e) for e in eps_list}, reverse=True)
    if any(e <= 0 for e in eps_list):
        raise ValueError("epsilons must be positive")
    dP = expectation_P(phi2) - expectation_P(phi1)
    moments = {e: _log_moment(phi1, phi2, e, sign) for e in eps_list}
    best = None
    for e in eps_list:
        for b in beta_bounds:
            val = dP + b * moments[e]
            if best is None or val < best[0]:
                best = (val, b, e)
    val, b, e = best
    if len(eps_list) >= 2:
        m_lim = richardson(moments[eps_list[-2]], moments[eps_list[-1]],
                           eps_list[-2] / eps_list[-1])
    else:
        m_lim = moments[eps_list[-1]]
    limit = dP + b * m_lim
    limit = min(limit, dP + min(beta_bounds) * m_lim, dP + max(beta_bounds) * m_lim)
    if val < -tol:
        return Witness(SplitFunction.log_family(b, e), float(val), float(limit)), float(val)
    return None, float(val)


class VerdictKind(str, enum.Enum):
    CAUSAL = "Causal"
    NOT_CAUSAL = "NotCausal"
    UNKNOWN = "Unknown"


@dataclass(frozen=True)
class CausalVerdict:
    kind: VerdictKind
    certificate: TransportParams | None = None
    witness: Witness | None = None
    margins: dict[str, float] = field(default_factory=dict)

    def __post_init__(self):
        if self.kind == VerdictKind.NOT_CAUSAL and self.witness is None:
            raise ValueError("a NotCausal verdict needs a witness")
        if self.kind == VerdictKind.CAUSAL and self.certificate is None:
            raise ValueError("a Causal verdict needs a certificate")

    def to_dict(self) -> dict:
        cert = None if self.certificate is None else {"alpha": self.certificate.alpha,
                                                       "t": self.certificate.t}
        wit = None if self.witness is None else self.witness.to_dict()
        return {"kind": self.kind.value, "certificate": cert, "witness": wit,
                "margins": {"necessary_margin": self.margins.get("necessary"),
                            "cone_min_pairing": self.margins.get("cone_min")}}


@dataclass(frozen=True)
class OrderConfig:
    eps_list: tuple[float, ...] = DEFAULT_EPSILONS
    beta_bounds: tuple[float, float] = (-1.0, 1.0)
    fit_tol: float = 1e-6
    witness_tol: float = 1e-6
    sign: int = 1
    exhaustive: bool = False


def fit_transport(phi1: StateVector, phi2: StateVector) -> tuple[TransportParams | None, float]:
    """Recover ``(alpha, t)`` from the shifts of ``<P>`` and ``<X>``; return the L2 fit residual."""
    t = expectation_P(phi2) - expectation_P(phi1)
    dX = expectation_X(phi2) - expectation_X(phi1)
    if t < -1e-12:
        return None, float("inf")
    if abs(t) <= 1e-12:
        if abs(dX) > 1e-10:
            return None, float("inf")
        t, alpha = 0.0, 0.0
    else:
        alpha = -dX / t
        if 1.0 < abs(alpha) <= 1.0 + 1e-9:  # round-off on the light cone
            alpha = float(np.sign(alpha))
    params = TransportParams(float(alpha), float(max(t, 0.0)))
    try:
        cand = phase_momentum_transport(phi1, params)
    except SupportOverflow:
        return None, float("inf")
    overlap = abs(phi1.grid.spacing * np.vdot(cand.values, phi2.values))
    return params, float(np.sqrt(max(0.0, 2.0 - 2.0 * overlap)))


def causal_order(phi1: StateVector, phi2: StateVector,
                 config: OrderConfig | None = None) -> CausalVerdict:
    """Staged decision: necessary bound, then transport certificate, else unknown.

    The witness scan always runs so its smallest pairing is reported, but by
    default it only decides the verdict when the necessary bound fails.  With
    ``exhaustive`` any witness found rules the pair out.
    """
    cfg = config or OrderConfig()
    ok, margin = necessary_condition(phi1, phi2)
    witness, cone_min = cone_search_witness(phi1, phi2, cfg.eps_list, cfg.beta_bounds,
                                            cfg.sign, cfg.witness_tol)
    margins = {"necessary": margin, "cone_min": cone_min}
    if not ok:
        if witness is not None:
            return CausalVerdict(VerdictKind.NOT_CAUSAL, witness=witness, margins=margins)
        return CausalVerdict(VerdictKind.UNKNOWN, margins=margins)
    if cfg.exhaustive and witness is not None:
        return CausalVerdict(VerdictKind.NOT_CAUSAL, witness=witness, margins=margins)
    params, residual = fit_transport(phi1, phi2)
    margins["fit_residual"] = residual
    if params is not None and residual <= cfg.fit_tol and params.valid:
        return CausalVerdict(VerdictKind.CAUSAL, certificate=params, margins=margins)
    return CausalVerdict(VerdictKind.UNKNOWN, margins=margins)


def standard_state_grid() -> Grid:
    return make_grid(10.0, 512)
