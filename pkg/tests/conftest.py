"""Shared grids, elements and independent reference computations."""

from __future__ import annotations

import numpy as np
import pytest

from kappa_causal import algebra as alg
from kappa_causal.numerics import make_grid
from kappa_causal.representation import StateVector, representation_grid


def rel(a, b) -> float:
    """Relative sup distance between two algebra elements."""
    return (a - b).sup_norm() / max(b.sup_norm(), 1e-300)


@pytest.fixture(scope="session")
def mixed_family():
    """Gaussian family in the mixed picture, used for every algebra law."""
    gp, gx = make_grid(8.0, 256), make_grid(12.0, 512)
    f = alg.gaussian_mixed(gp, gx, 0.2, 0.25, 0.5, 0.7, 0.7, amplitude=1 + 0.5j)
    g = alg.gaussian_mixed(gp, gx, -0.1, 0.25, -0.3, 0.8, -0.4)
    h = alg.gaussian_mixed(gp, gx, 0.0, 0.3, 0.2, 0.6, 0.3, amplitude=0.5j)
    return f, g, h


@pytest.fixture(scope="session")
def twisted_family():
    gp, gx = make_grid(8.0, 256), make_grid(16.0, 1024)
    f = alg.gaussian_mixed(gp, gx, 0.2, 0.25, 0.5, 0.7, 0.7, amplitude=1 + 0.5j)
    g = alg.gaussian_mixed(gp, gx, -0.1, 0.25, -0.3, 0.8, -0.4)
    return f, g


def space_pair(kappa: float, gx0=None, gx1=None):
    gx0 = gx0 or make_grid(16.0, 128)
    gx1 = gx1 or make_grid(16.0, 256)
    f = alg.gaussian_space(gx0, gx1, 0.3, 1.0, 0.5, 1.0, 0.4, 0.2, kappa=kappa)
    g = alg.gaussian_space(gx0, gx1, -0.2, 1.2, -0.3, 0.8, -0.3, 0.1, kappa=kappa)
    return f, g


@pytest.fixture(scope="session")
def rep_setup():
    """s grid, aligned p0 grid and a wide x1 grid for representation tests."""
    gs, gp = representation_grid(3.0, 64)
    gx = make_grid(20.0, 1024)
    f = alg.gaussian_mixed(gp, gx, 0.2, 0.3, 3.0, 0.35, 0.7)
    g = alg.gaussian_mixed(gp, gx, -0.1, 0.25, 2.5, 0.4, -0.4)
    return gs, gp, gx, f, g


@pytest.fixture(scope="session")
def state_grid():
    return make_grid(10.0, 512)


@pytest.fixture(scope="session")
def base_state(state_grid):
    return StateVector.gaussian(state_grid, 0.0, 1.0, 0.0)


def direct_state_eval(sign: int, state: StateVector, func) -> complex:
    """Reference for a vector state on the element ``func(x0, x1)``, by direct double quadrature.

    ``(1/2pi) sum_v sum_s f(v, sign e^{-s}) conj Phi(s) e^{i v s} F Phi(v)``, with ``v``
    on the momentum grid dual to the state grid and ``F Phi`` a plain Riemann sum.
    """
    grid = state.grid
    s = grid.nodes
    phi = state.values
    dual = grid.dual()
    v = dual.nodes
    Fphi = grid.spacing * np.exp(-1j * np.outer(v, s)) @ phi
    fvals = func(v[:, None], sign * np.exp(-s)[None, :])
    kern = fvals * np.exp(1j * np.outer(v, s))
    total = np.sum(kern * phi.conj()[None, :] * Fphi[:, None]) * grid.spacing * dual.spacing
    return complex(total / (2 * np.pi))


# acceptance lines are gathered here and printed after the run
_ACCEPTANCE_LINES: list[str] = []


@pytest.fixture
def acceptance_log():
    return _ACCEPTANCE_LINES


def pytest_terminal_summary(terminalreporter):
    if _ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in sorted(_ACCEPTANCE_LINES):
            terminalreporter.write_line(line)
