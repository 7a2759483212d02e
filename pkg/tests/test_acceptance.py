"""Acceptance criteria 1-11, one PASS/FAIL line each.

The lines appear in the "acceptance criteria" section of the pytest summary,
also when run directly with ``python tests/test_acceptance.py``.
"""

import sys
import time

import numpy as np
import pytest

from kappa_causal import algebra as alg
from kappa_causal.causality import (OrderConfig, SplitFunction, TransportParams, VerdictKind, causal_order,
                                    cone_membership_split, cone_search_witness, necessary_condition,
                                    phase_momentum_transport, stokes_identity_residual, sufficient_residual)
from kappa_causal.numerics import make_gaussian, make_grid
from kappa_causal.representation import StateVector, representation_grid
from kappa_causal.triple import (dt_commutator_residual, gaussian_spinor_set, mean_square_dirac_spectrum,
                                 spectrum_slope, verify_krein_antisymmetry)

N = 512


@pytest.fixture
def report(acceptance_log):
    def emit(number: int, ok: bool, seconds: float, limit: float, detail: str):
        passed = ok and seconds < limit
        acceptance_log.append(f"criterion {number:2d}: {'PASS' if passed else 'FAIL'}  "
                              f"({seconds:.2f} s, limit {limit:g} s)  {detail}")
        assert ok, detail
        assert seconds < limit, f"took {seconds:.2f} s"
    return emit


def rel(a, b):
    return (a - b).sup_norm() / b.sup_norm()


def space_pair(kappa, gx0, gx1):
    f = alg.gaussian_space(gx0, gx1, 0.3, 1.0, 0.5, 1.0, 0.4, 0.2, kappa=kappa)
    g = alg.gaussian_space(gx0, gx1, -0.2, 1.2, -0.3, 0.8, -0.3, 0.1, kappa=kappa)
    return f, g


def mixed_family(kappa=1.0, gx=(12.0, 512)):
    gp, g1 = make_grid(8.0, 256), make_grid(*gx)
    f = alg.gaussian_mixed(gp, g1, 0.2, 0.25, 0.5, 0.7, 0.7, amplitude=1 + 0.5j, kappa=kappa)
    g = alg.gaussian_mixed(gp, g1, -0.1, 0.25, -0.3, 0.8, -0.4, kappa=kappa)
    h = alg.gaussian_mixed(gp, g1, 0.0, 0.3, 0.2, 0.6, 0.3, amplitude=0.5j, kappa=kappa)
    return f, g, h


@pytest.fixture(scope="module")
def grid():
    return make_grid(10.0, N)


@pytest.fixture(scope="module")
def phi0(grid):
    return StateVector.gaussian(grid, 0.0, 1.0, 0.0)


def transport(phi, a, t):
    return phase_momentum_transport(phi, TransportParams(a, t))


def test_criterion_01_krein_antisymmetry(grid, report):
    t0 = time.perf_counter()
    spinors = gaussian_spinor_set(grid)
    r = verify_krein_antisymmetry(spinors)
    report(1, len(spinors) == 6 and r <= 1e-8, time.perf_counter() - t0, 5, f"residual {r:.2e}")


def test_criterion_02_time_function(grid, report):
    t0 = time.perf_counter()
    r = dt_commutator_residual(gaussian_spinor_set(grid))
    report(2, r <= 1e-6, time.perf_counter() - t0, 5, f"residual {r:.2e}")


def test_criterion_03_oscillator_spectrum(grid, report):
    t0 = time.perf_counter()
    ev = np.asarray(mean_square_dirac_spectrum(grid, 20).eigenvalues)
    dev = float(np.max(np.abs(ev - (2.0 + 2.0 * np.arange(20)))))
    slope = spectrum_slope(ev)
    ok = ev.size == 20 and dev <= 1e-3 and abs(slope - 2.0) <= 0.1
    report(3, ok, time.perf_counter() - t0, 30, f"max |lambda_n - (2+2n)| {dev:.2e}, slope {slope:.5f}")


def test_criterion_04_algebra_laws(report):
    t0 = time.perf_counter()
    f, g, h = mixed_family()
    one = alg.unit_element(f.grid0, f.grid1)
    star, inv = alg.star, alg.involution
    laws = {"assoc": rel(star(star(f, g), h), star(f, star(g, h))),
            "anti": rel(inv(star(f, g)), star(inv(g), inv(f))),
            "unit": max(rel(star(one, f), f), rel(star(f, one), f))}
    kappas = [1e2, 1e3, 1e4]
    gx0, gx1 = make_grid(16.0, 128), make_grid(16.0, 256)
    devs = [alg.commutative_deviation(*space_pair(k, gx0, gx1)) for k in kappas]
    slope = alg.loglog_slope(kappas, devs)
    ok = max(laws.values()) <= 1e-5 and abs(slope + 1.0) <= 0.1
    detail = ", ".join(f"{k} {v:.1e}" for k, v in laws.items()) + f", slope {slope:.4f}"
    report(4, ok, time.perf_counter() - t0, 120, detail)


def test_criterion_05_inner_derivation(report):
    t0 = time.perf_counter()
    window = 16.0
    res = {k: alg.inner_derivation_residual(space_pair(k, make_grid(2 * window, 256), make_grid(16.0, 256))[0],
                                            window) for k in (1.0, 2.0)}
    ok = max(res.values()) <= 1e-4
    report(5, ok, time.perf_counter() - t0, 60,
           ", ".join(f"kappa {k:g}: {v:.2e}" for k, v in res.items()) + f" (plateau {window:g})")


def test_criterion_06_cone_membership(grid, report):
    t0 = time.perf_counter()
    time_res = cone_membership_split(SplitFunction.time(), grid)
    ok = time_res.causal and len(time_res.min_eigenvalues) == 6
    ok &= all(abs(m - 1.0) <= 1e-8 for m in time_res.min_eigenvalues.values())
    for beta in (1.0, -1.0):
        for eps in (1.0, 0.1, 0.01):
            r = cone_membership_split(SplitFunction.log_family(beta, eps), grid)
            ok &= r.causal and len(r.min_eigenvalues) == 6
    bad = cone_membership_split(SplitFunction.log_family(1.5, 0.001), grid)
    worst = min(bad.min_eigenvalues.values())
    ok &= (not bad.causal) and worst < -0.05 and len(bad.min_eigenvalues) == 6
    report(6, ok, time.perf_counter() - t0, 60, f"time min {min(time_res.min_eigenvalues.values()):.10f}, "
                                                f"beta 1.5 min {worst:.3f}")


def test_criterion_07_sufficient_certificate(phi0, report):
    t0 = time.perf_counter()
    res = {a: sufficient_residual(phi0, a, [0.2, 0.5, 0.8]) for a in (-1.0, -0.5, 0.0, 0.5, 1.0)}
    report(7, max(res.values()) <= 1e-5, time.perf_counter() - t0, 60, f"max residual {max(res.values()):.2e}")


def test_criterion_08_necessary_constraint(phi0, report):
    t0 = time.perf_counter()
    worst = 0.0
    for a in (0.5, 1.0, 2.0):
        for i in range(1, 11):
            t = i / 10
            _, m = necessary_condition(phi0, transport(phi0, a, t))
            worst = max(worst, abs(m - t * (1 - abs(a))))
    w_bad, _ = cone_search_witness(phi0, transport(phi0, 2.0, 1.0))
    w_ok, _ = cone_search_witness(phi0, transport(phi0, 0.5, 1.0))
    ok = worst <= 1e-6 and w_bad is not None and w_bad.pairing <= -0.9 and w_bad.limit_pairing <= -0.9
    ok &= w_ok is None
    report(8, ok, time.perf_counter() - t0, 60,
           f"margin deviation {worst:.1e}, witness pairing {w_bad.pairing:.5f} (limit {w_bad.limit_pairing:.5f})")


def test_criterion_09_stokes(report):
    t0 = time.perf_counter()
    gs, gp = representation_grid(6.0, 256)
    gx = make_grid(20.0, 1024)
    pairs = [((0.2, 0.3, 1.5, 0.6, 0.7), (-0.5, 0.5, 0.8)), ((-0.1, 0.25, 2.0, 0.5, -0.4), (0.5, 0.7, -0.3)),
             ((0.0, 0.35, 1.0, 0.4, 0.0), (0.0, 0.8, 0.0))]
    worst = 0.0
    for fp, (c, w, k) in pairs:
        f = alg.gaussian_mixed(gp, gx, *fp, amplitude=1 + 0.5j)
        worst = max(worst, stokes_identity_residual(f, make_gaussian(c, w, k, gs)))
    report(9, worst <= 1e-5, time.perf_counter() - t0, 30, f"max residual {worst:.2e}")


def test_criterion_10_hopf_twisted(report):
    t0 = time.perf_counter()
    f, g, _ = mixed_family(gx=(16.0, 1024))
    P0, E = alg.HopfGenerator.P0(), alg.HopfGenerator.E()
    inv, act = alg.involution, alg.hopf_action
    hopf = max(rel(inv(act(P0, f)), -act(P0, inv(f))),
               rel(inv(act(E, f)), act(alg.HopfGenerator.E(-1.0), inv(f))))
    twisted = max(max(alg.twisted_leibniz_residual(f, g, w, gm), alg.twisted_reality_residual(f, w, gm))
                  for w in ("X0", "X1") for gm in (0.0, -0.5, 1.0))
    ok = hopf <= 1e-5 and twisted <= 1e-5
    report(10, ok, time.perf_counter() - t0, 60, f"Hopf relations {hopf:.1e}, twisted {twisted:.1e}")


def test_criterion_11_order_sanity(grid, phi0, report):
    t0 = time.perf_counter()
    refl = causal_order(phi0, phi0)
    ok = refl.kind == VerdictKind.CAUSAL and refl.certificate.t == 0.0
    others = [transport(phi0, a, t) for a, t in ((0.5, 1.0), (-1.0, 0.6), (2.0, 1.0), (0.0, 0.5))]
    others.append(StateVector.gaussian(grid, 0.0, 0.5, 0.0))
    for phi in others:
        fwd, back = causal_order(phi0, phi), causal_order(phi, phi0)
        both = all(v.kind == VerdictKind.CAUSAL and v.certificate.t > 0 for v in (fwd, back))
        ok &= not both
        for a, b in ((phi0, phi), (phi, phi0)):
            ok &= causal_order(a, b).kind == causal_order(a, b, OrderConfig(sign=-1)).kind
    report(11, ok, time.perf_counter() - t0, 30, f"{len(others)} pairs, reflexive t = {refl.certificate.t:g}")


if __name__ == "__main__":
    sys.exit(pytest.main([__file__, "-q"]))
