import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from scipy.integrate import quad

from kappa_causal import algebra as alg
from kappa_causal.algebra import (AlgebraElement, Derivation, HopfGenerator, Picture, automorphism_omega,
                                  automorphism_sigma, convolve_momentum, derivation, hopf_action,
                                  involution, star, star_mixed, star_space, to_mixed, to_momentum,
                                  to_space, twisted_derivation, unit_element)
from kappa_causal.errors import GridMismatch, NotHermitian, SupportOverflow
from kappa_causal.numerics import Field2D, interpolate, make_grid

from conftest import rel, space_pair

LAW_TOL = 1e-5


def _gauss2(p, x, pc, pw, xc, xw, k, amp=1.0):
    return amp * np.exp(-(p - pc) ** 2 / (2 * pw ** 2) - (x - xc) ** 2 / (2 * xw ** 2) + 1j * k * x)


# --------------------------------------------------------------------------
# pictures


def test_mixed_transform_of_space_gaussian():
    # (1/2pi) F0 of exp(-(x0-c)^2/2s^2) is (s/sqrt(2pi)) exp(-s^2 p^2/2 - i p c)
    gx0, gx1 = make_grid(16.0, 256), make_grid(8.0, 128)
    c, s = 0.3, 1.1
    f = alg.gaussian_space(gx0, gx1, c, s, 0.0, 1.0)
    m = to_mixed(f)
    p = m.grid0.nodes[:, None]
    x = m.grid1.nodes[None, :]
    exact = s / np.sqrt(2 * np.pi) * np.exp(-s ** 2 * p ** 2 / 2 - 1j * p * c) * np.exp(-x ** 2 / 2)
    assert np.max(np.abs(m.values - exact)) < 1e-12


def test_picture_roundtrips(mixed_family):
    f, _, _ = mixed_family
    assert rel(to_mixed(to_space(f)), f) < 1e-12
    assert rel(to_mixed(to_momentum(f)), f) < 1e-12
    assert to_mixed(f) is f


def test_hermitian_flag_survives_pictures(mixed_family):
    h = alg.hermitian_part(mixed_family[0])
    assert to_space(h).hermitian and to_momentum(h).hermitian
    assert h.check_hermitian() < 1e-8


def test_check_hermitian_rejects(mixed_family):
    with pytest.raises(NotHermitian):
        mixed_family[0].check_hermitian()


# --------------------------------------------------------------------------
# products


def test_star_mixed_matches_quadrature_oracle(mixed_family):
    f, g, _ = mixed_family
    fg = star_mixed(f, g)
    fp = (0.2, 0.25, 0.5, 0.7, 0.7, 1 + 0.5j)
    gp_ = (-0.1, 0.25, -0.3, 0.8, -0.4, 1.0)
    for p0, x1 in [(0.1, 0.4), (0.0, -0.2), (0.35, 1.1), (-0.2, 0.0), (0.3, -0.9)]:
        def integrand(q, part):
            val = _gauss2(q, x1, *fp) * _gauss2(p0 - q, np.exp(-q) * x1, *gp_)
            return val.real if part == 0 else val.imag
        ref = quad(integrand, -4, 4, args=(0,), epsabs=1e-14, limit=200)[0] \
            + 1j * quad(integrand, -4, 4, args=(1,), epsabs=1e-14, limit=200)[0]
        got = interpolate(fg.data, p0, x1)
        # bicubic readout limits the comparison away from nodes
        assert abs(got - ref) <= 1e-5 * fg.sup_norm()


def test_star_mixed_on_nodes_matches_quadrature(mixed_family):
    f, g, _ = mixed_family
    fg = star_mixed(f, g)
    fp = (0.2, 0.25, 0.5, 0.7, 0.7, 1 + 0.5j)
    gp_ = (-0.1, 0.25, -0.3, 0.8, -0.4, 1.0)
    for i, j in [(128, 256), (131, 270), (124, 240), (134, 300)]:
        p0, x1 = f.grid0.nodes[i], f.grid1.nodes[j]
        def integrand(q, part):
            val = _gauss2(q, x1, *fp) * _gauss2(p0 - q, np.exp(-q) * x1, *gp_)
            return val.real if part == 0 else val.imag
        ref = quad(integrand, -4, 4, args=(0,), epsabs=1e-15, limit=200)[0] \
            + 1j * quad(integrand, -4, 4, args=(1,), epsabs=1e-15, limit=200)[0]
        assert abs(fg.values[i, j] - ref) <= 1e-8 * fg.sup_norm()


def test_associativity(mixed_family):
    f, g, h = mixed_family
    assert rel(star(star(f, g), h), star(f, star(g, h))) <= LAW_TOL


def test_star_with_zero(mixed_family):
    f = mixed_family[0]
    zero = f * 0
    assert star(f, zero).sup_norm() == 0.0
    F = to_momentum(f)
    assert convolve_momentum(F, F * 0).sup_norm() == 0.0


def test_unit_laws(mixed_family):
    f = mixed_family[0]
    one = unit_element(f.grid0, f.grid1)
    assert one.values[f.grid0.center_index, 0] == pytest.approx(1.0 / f.grid0.spacing)
    assert rel(star(one, f), f) <= 1e-6
    assert rel(star(f, one), f) <= 1e-6
    assert rel(involution(one), one) <= 1e-8


def test_space_unit():
    f, _ = space_pair(1.0)
    one = unit_element(f.grid0, f.grid1, Picture.SPACE)
    assert rel(star_space(f, one), f) <= 1e-6
    with pytest.raises(NotImplementedError):
        unit_element(f.grid0, f.grid1, Picture.MOMENTUM)


def test_space_product_matches_mixed_route(mixed_family):
    f, g, _ = mixed_family
    lhs = star_space(to_space(f), to_space(g))
    assert rel(lhs, to_space(star_mixed(f, g))) <= 1e-6


def test_momentum_convolution_coherence(mixed_family):
    f, g, _ = mixed_family
    conv = convolve_momentum(to_momentum(f), to_momentum(g))
    assert rel(conv, to_momentum(star_mixed(f, g))) <= LAW_TOL


def test_momentum_associativity(mixed_family):
    F, G, H = (to_momentum(x) for x in mixed_family)
    c = convolve_momentum
    assert rel(c(c(F, G), H), c(F, c(G, H))) <= LAW_TOL


def test_mismatch_errors(mixed_family):
    f, g, _ = mixed_family
    with pytest.raises(GridMismatch):
        star(f, g.with_kappa(2.0))
    with pytest.raises(GridMismatch):
        f + to_space(g)
    other = alg.gaussian_mixed(make_grid(8.0, 128), g.grid1)
    with pytest.raises(GridMismatch):
        star(f, other)


def test_support_overflow():
    gp, gx = make_grid(2.0, 64), make_grid(8.0, 128)
    f = alg.gaussian_mixed(gp, gx, 1.0, 0.2)
    with pytest.raises(SupportOverflow):
        star_mixed(f, f)


# --------------------------------------------------------------------------
# involution


@pytest.mark.parametrize("picture", list(Picture))
def test_double_involution(mixed_family, picture):
    f = alg.to_picture(mixed_family[0], picture)
    assert rel(involution(involution(f)), f) <= 1e-6


def test_anti_homomorphism(mixed_family):
    f, g, _ = mixed_family
    assert rel(involution(star(f, g)), star(involution(g), involution(f))) <= LAW_TOL


@pytest.mark.parametrize("picture", [Picture.SPACE, Picture.MOMENTUM])
def test_involution_coherent_across_pictures(mixed_family, picture):
    f = mixed_family[0]
    lhs = involution(alg.to_picture(f, picture))
    assert rel(lhs, alg.to_picture(involution(f), picture)) <= LAW_TOL


def test_involution_commutative_limit():
    f, _ = space_pair(1e4)
    assert (involution(f) - f.with_values(f.values.conj())).sup_norm() <= 1e-3


def test_modular_function():
    assert alg.modular_function(0.0, 1.0) == 1.0
    assert alg.modular_function(1.0, 1.0) == pytest.approx(np.e)
    assert alg.modular_function(2.0, 2.0) == pytest.approx(np.e)


# --------------------------------------------------------------------------
# commutative limit


def test_commutative_limit_slope():
    kappas = [1e2, 1e3, 1e4]
    devs = [alg.commutative_deviation(*space_pair(k)) for k in kappas]
    assert alg.loglog_slope(kappas, devs) == pytest.approx(-1.0, abs=0.1)
    comms = [alg.star_commutator_norm(*space_pair(k)) for k in kappas]
    assert alg.loglog_slope(kappas, comms) == pytest.approx(-1.0, abs=0.1)


# --------------------------------------------------------------------------
# automorphisms and derivations


def test_sigma_group_law(mixed_family):
    f = mixed_family[0]
    assert automorphism_sigma(f, 0.0).values.tobytes() == f.values.tobytes()
    both = automorphism_sigma(automorphism_sigma(f, 0.3), 0.5)
    assert rel(both, automorphism_sigma(f, 0.8)) <= 1e-10


def test_sigma_generator(mixed_family):
    f = mixed_family[0]
    h = 1e-4
    fd = (automorphism_sigma(f, h) - automorphism_sigma(f, -h)) * (f.kappa / (2 * h))
    assert rel(fd, derivation(f, Derivation.D0)) <= 1e-5


def test_sigma_is_automorphism(mixed_family):
    f, g, _ = mixed_family
    t = 0.7
    lhs = automorphism_sigma(star(f, g), t)
    assert rel(lhs, star(automorphism_sigma(f, t), automorphism_sigma(g, t))) <= 1e-8


def test_omega_group_law_and_generator(mixed_family):
    f = mixed_family[0]
    assert rel(automorphism_omega(f, 0.0), f) <= 1e-14
    both = automorphism_omega(automorphism_omega(f, 0.1), 0.15)
    assert rel(both, automorphism_omega(f, 0.25)) <= 1e-5
    h = 1e-4
    fd = (automorphism_omega(f, h) - automorphism_omega(f, -h)) * (1 / (2 * h))
    assert rel(fd, derivation(f, Derivation.D1)) <= 1e-5


def test_omega_support_overflow(mixed_family):
    with pytest.raises(SupportOverflow):
        automorphism_omega(mixed_family[0], -3.0)


def test_derivation_examples(mixed_family):
    f = mixed_family[0]
    one = unit_element(f.grid0, f.grid1)
    assert derivation(one, Derivation.D0).sup_norm() == 0.0
    const = f.with_values(np.repeat(f.values[:, :1] * 0 + 1.0, f.grid1.n_points, axis=1))
    assert derivation(const, Derivation.D1).sup_norm() <= 1e-12
    plus, minus = derivation(f, "Dplus"), derivation(f, "Dminus")
    assert ((plus + minus) - derivation(f, "D0") * 2).sup_norm() <= 1e-12


@pytest.mark.parametrize("which", [Derivation.D0, Derivation.D1])
def test_leibniz_rule(mixed_family, which):
    f, g, _ = mixed_family
    lhs = derivation(star(f, g), which)
    rhs = star(derivation(f, which), g) + star(f, derivation(g, which))
    assert rel(lhs, rhs) <= 1e-6


# --------------------------------------------------------------------------
# inner derivation with a windowed x0


@pytest.mark.parametrize("kappa", [1.0, 2.0])
def test_inner_derivation(kappa):
    f, _ = space_pair(kappa, make_grid(32.0, 256), make_grid(16.0, 256))
    assert alg.inner_derivation_residual(f, 16.0) <= 1e-4


@pytest.mark.xfail(strict=True, reason="plateau of half width 8 leaves a tail of order exp(-2 pi) at kappa 1")
def test_inner_derivation_narrow_window():
    f, _ = space_pair(1.0, make_grid(16.0, 128), make_grid(16.0, 256))
    assert alg.inner_derivation_residual(f, 8.0) <= 1e-4


def test_inner_derivation_residual_shrinks_with_window():
    gx1 = make_grid(16.0, 256)
    narrow = alg.inner_derivation_residual(space_pair(1.0, make_grid(16.0, 128), gx1)[0], 8.0)
    wide = alg.inner_derivation_residual(space_pair(1.0, make_grid(32.0, 256), gx1)[0], 16.0)
    assert wide < narrow / 50


def test_inner_derivation_constant_in_x1():
    gx0, gx1 = make_grid(16.0, 128), make_grid(16.0, 256)
    x0 = gx0.nodes[:, None]
    vals = np.exp(-(x0 - 0.3) ** 2 / 2) * np.ones((1, gx1.n_points))
    f = AlgebraElement(Picture.SPACE, Field2D(gx0, gx1, vals))
    assert alg.inner_derivation_residual(f, 8.0) <= 1e-6


def test_inner_derivation_rejects_wide_support():
    f, _ = space_pair(1.0, make_grid(16.0, 128), make_grid(16.0, 256))
    with pytest.raises(SupportOverflow):
        alg.inner_derivation_residual(f, 3.0)


# --------------------------------------------------------------------------
# Hopf actions and twisted derivations


def test_hopf_counit_and_powers(mixed_family):
    f = mixed_family[0]
    one = unit_element(f.grid0, f.grid1)
    assert rel(hopf_action(HopfGenerator.E(), one), one) <= 1e-10
    assert rel(hopf_action(HopfGenerator.E(0.0), f), f) == 0.0
    a, b = 0.4, -1.3
    lhs = hopf_action(HopfGenerator.E(a), hopf_action(HopfGenerator.E(b), f))
    assert rel(lhs, hopf_action(HopfGenerator.E(a + b), f)) <= 1e-12
    with pytest.raises(ValueError):
        HopfGenerator("N")


def test_hopf_involution_relations(mixed_family):
    f = mixed_family[0]
    P0, E = HopfGenerator.P0(), HopfGenerator.E()
    assert rel(involution(hopf_action(P0, f)), -hopf_action(P0, involution(f))) <= 1e-6
    assert rel(involution(hopf_action(E, f)), hopf_action(HopfGenerator.E(-1.0), involution(f))) <= 1e-6


def test_twisted_on_unit(mixed_family):
    f = mixed_family[0]
    one = unit_element(f.grid0, f.grid1)
    assert twisted_derivation(one, "X0", 0.0).sup_norm() <= 1e-10
    assert alg.twisted_reality_residual(one, "X0", 0.0) <= 1e-10
    with pytest.raises(ValueError):
        twisted_derivation(f, "X2", 0.0)


def test_twisted_commutative_limit(mixed_family):
    f = mixed_family[0].with_kappa(1e4)
    x0 = twisted_derivation(f, "X0", 0.0)
    p0f = hopf_action(HopfGenerator.P0(), f)
    assert (x0 - p0f).sup_norm() <= 1e-3


@pytest.mark.parametrize("gamma", [0.0, -0.5, 1.0])
@pytest.mark.parametrize("which", ["X0", "X1"])
def test_twisted_leibniz(twisted_family, which, gamma):
    f, g = twisted_family
    assert alg.twisted_leibniz_residual(f, g, which, gamma) <= 1e-5


@pytest.mark.parametrize("gamma", [0.0, -0.5, 1.0])
@pytest.mark.parametrize("which", ["X0", "X1"])
def test_twisted_reality(twisted_family, which, gamma):
    f = twisted_family[0]
    assert alg.twisted_reality_residual(f, which, gamma) <= 1e-5
    h = alg.hermitian_part(f)
    assert alg.twisted_reality_residual(h, which, gamma) <= 1e-5


# --------------------------------------------------------------------------
# properties


@settings(max_examples=10, deadline=None)
@given(st.floats(-0.3, 0.3), st.floats(0.2, 0.35), st.floats(-1.0, 1.0), st.floats(-1.0, 1.0))
def test_unit_is_two_sided_property(pc, pw, xc, k):
    gp, gx = make_grid(8.0, 128), make_grid(12.0, 256)
    f = alg.gaussian_mixed(gp, gx, pc, pw, xc, 0.8, k)
    one = unit_element(gp, gx)
    assert rel(star(one, f), f) <= 1e-6 and rel(star(f, one), f) <= 1e-6


@settings(max_examples=10, deadline=None)
@given(st.floats(-0.3, 0.3), st.floats(-1.0, 1.0), st.floats(-2.0, 2.0))
def test_sigma_phase_property(pc, xc, t):
    gp, gx = make_grid(8.0, 128), make_grid(12.0, 256)
    f = alg.gaussian_mixed(gp, gx, pc, 0.3, xc, 0.8)
    assert automorphism_sigma(f, t).sup_norm() == pytest.approx(f.sup_norm(), rel=1e-14)
