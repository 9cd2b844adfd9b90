"""Potential families: values, exact partials, presets, profile laws."""

import math

import numpy as np
import pytest

from tdcentral import potentials as pot
from tdcentral import scalarfn as sf
from tdcentral.errors import DomainError, InvalidParameters, UnknownPreset
from tdcentral.potentials import FamilyA, FamilyB, LewisLeach1d

U = sf.T  # shape-argument variable


def central_diff(f, x, h):
    return (f(x + h) - f(x - h)) / (2 * h)


def preset_pool():
    """One representative instance per registered preset, with a sampling box."""
    entries = [
        ("free-particle", dict(L3=0.8), (0.0, 3.0), (0.5, 3.0)),
        ("linear-lfi", dict(g2="(poly 1 0.2 0.1)", g="(poly 0 0.3)", L3=0.5),
         (0.0, 3.0), (0.5, 3.0)),
        ("oscillator", dict(g1="(poly 1 0 1)", c0=0.4, L3=1.0), (0.0, 3.0), (0.5, 3.0)),
        ("generalized-kepler", dict(nu=1.5, k=0.8, b0=1.0, b1=0.3, b2=0.2, L3=0.7),
         (0.0, 3.0), (0.5, 3.0)),
        ("scaled-kepler", dict(phi="(sqrt (poly 1 0 1))", k=1.0, L3=0.5),
         (0.0, 3.0), (0.5, 3.0)),
        ("binary", dict(G=1.0, b0=1.0, b1=0.5, b2=0.25, L3=0.6), (0.0, 3.0), (0.5, 3.0)),
        ("yukawa", dict(k=1.0, b0=1.0, b1=0.5, b2=0.25, L3=0.6), (0.0, 3.0), (0.5, 3.0)),
        ("interatomic", dict(k1=1.0, k2=1.0, m=12.0, n=6.0, b0=1.0, b1=0.2, b2=0.1,
                             L3=0.4), (0.0, 2.0), (0.8, 2.5)),
        ("lewis-leach", dict(rho="(sqrt (poly 1 0 1))", alpha="(poly 0 0.1)",
                             k=1.0), (0.0, 3.0), (0.5, 3.0)),
    ]
    return [(pot.preset(name, **params).family, trange, rrange)
            for name, params, trange, rrange in entries]


class TestFamilyAPotential:
    def test_pure_centrifugal(self):
        fam = FamilyA(1.0, 0.0, L3=1.0)
        assert pot.potential_A(fam, 0.0, 1.0) == -0.5

    def test_quadratic_profile(self):
        # g2 = t^2 has constant second derivative 2, so V = -r^2/t^2
        fam = FamilyA(sf.poly(0, 0, 1), 0.0, 0.0)
        assert math.isclose(pot.potential_A(fam, 1.0, 1.0), -1.0, rel_tol=1e-14)

    def test_linear_gauge_term(self):
        fam = FamilyA(1.0, sf.T, 0.0)
        for t in (0.0, 1.0, 7.5):
            assert math.isclose(pot.potential_A(fam, t, 2.0), 2.0, rel_tol=1e-14)

    def test_rejects_nonpositive_radius(self):
        fam = FamilyA(1.0, 0.0, 1.0)
        with pytest.raises(DomainError):
            fam.V(0.0, 0.0)
        with pytest.raises(DomainError):
            fam.V(0.0, np.array([1.0, -2.0]))

    def test_profile_zero_raises(self):
        # g2 = t vanishes at t = 0 and the linear coefficient g'/g2 survives
        fam = FamilyA(sf.poly(0, 1), sf.poly(0, 0, 1), 0.0)
        with pytest.raises(DomainError):
            fam.V(0.0, 1.0)
        assert math.isclose(fam.V(1.0, 3.0), 6.0, rel_tol=1e-14)

    def test_degenerate_zero_coefficients_fold(self):
        # g2 = t with g''2 = 0 and constant g: both coefficients fold to the
        # exact zero limit, so evaluation succeeds even at the profile zero
        fam = FamilyA(sf.poly(0, 1), 0.0, 0.0)
        assert fam.V(0.0, 1.0) == 0.0

    def test_wrong_family_type(self):
        with pytest.raises(TypeError):
            pot.potential_A(FamilyB(0.5), 0.0, 1.0)
        with pytest.raises(TypeError):
            pot.potential_B(FamilyA(1.0), 0.0, 1.0)


class TestFamilyBPotential:
    def test_pure_centrifugal(self):
        fam = FamilyB(0.5, 0.0, 0.0, L3=1.0)
        assert pot.potential_B(fam, 0.0, 1.0) == -0.5

    def test_quadratic_profile_with_shape(self):
        # g1 = 1+t^2, F(u) = u^2 at t = 0, r = 2: the r^2 term gives -2,
        # the shape term +2; they cancel exactly
        fam = FamilyB(sf.poly(1, 0, 1), 0.0, sf.power(U, 2), 0.0)
        assert abs(pot.potential_B(fam, 0.0, 2.0)) < 1e-14

    def test_rescaled_shape_instance(self):
        # constant profile g1 = 1/2 turns the family into a plain shape
        # potential: with F(u) = Fbar(u/sqrt(2)), V(t,r) = Fbar(r) - L3^2/(2r^2)
        fbar = sf.power(U, 2)
        shape = sf.compose(fbar, sf.poly(0.0, 2.0 ** -0.5))
        fam = FamilyB(0.5, 0.0, shape, L3=1.0)
        for r in (0.5, 1.0, 2.3):
            want = r * r - 0.5 / (r * r)
            assert math.isclose(fam.V(0.7, r), want, rel_tol=1e-13)

    def test_argument_includes_profile_integral(self):
        # g2 != 0 shifts the shape argument by a time-dependent offset
        fam = FamilyB(1.0, 1.0, 0.0, 0.0, t0=0.0)
        assert math.isclose(fam.arg(2.0, 1.5), 1.5 + 1.0, rel_tol=1e-12)

    def test_t0_shifts_argument_constant(self):
        fam0 = FamilyB(1.0, 1.0, 0.0, 0.0, t0=0.0)
        fam1 = FamilyB(1.0, 1.0, 0.0, 0.0, t0=1.0)
        d = fam0.arg(3.0, 1.0) - fam1.arg(3.0, 1.0)
        assert math.isclose(d, 0.5, rel_tol=1e-12)

    def test_array_radius(self):
        fam = FamilyB(sf.poly(1, 0, 1), 0.0, sf.power(U, 2), 0.5)
        rs = np.array([0.5, 1.0, 2.0])
        vals = fam.V(1.3, rs)
        assert vals.shape == rs.shape
        for i, r in enumerate(rs):
            assert math.isclose(vals[i], fam.V(1.3, float(r)), rel_tol=1e-14)


class TestPartials:
    def test_inverse_square_slope(self):
        fam = FamilyB(0.5, 0.0, 0.0, L3=1.0)
        assert math.isclose(pot.dV_dr(fam, 0.0, 1.0), 1.0, rel_tol=1e-14)

    def test_flat_family_partials_vanish(self):
        fam = FamilyA(1.0, 0.0, 0.0)
        for t, r in ((0.0, 1.0), (2.0, 0.3), (-1.0, 5.0)):
            assert pot.dV_dr(fam, t, r) == 0.0
            assert pot.d2V_dr2(fam, t, r) == 0.0
            assert pot.d2V_dtdr(fam, t, r) == 0.0

    def test_oscillator_slope_at_origin_time(self):
        fam = pot.preset("oscillator", g1="(poly 1 0 1)", c0=0.0, L3=0.0).family
        assert math.isclose(pot.dV_dr(fam, 0.0, 1.0), -1.0, rel_tol=1e-12)

    def test_partials_match_finite_differences(self):
        # analytic partials vs central differences of the potential itself,
        # 100 samples per preset
        rng = np.random.default_rng(20260815)
        for fam, (tlo, thi), (rlo, rhi) in preset_pool():
            for _ in range(100):
                t = float(rng.uniform(tlo, thi))
                r = float(rng.uniform(rlo, rhi))
                hr = 1e-6 * max(1.0, r)
                ht = 1e-6 * max(1.0, abs(t))
                fd_r = central_diff(lambda x: fam.V(t, x), r, hr)
                fd_rr = central_diff(lambda x: fam.dV_dr(t, x), r, hr)
                fd_tr = central_diff(lambda x: fam.dV_dr(x, r), t, ht)
                got_r = fam.dV_dr(t, r)
                got_rr = fam.d2V_dr2(t, r)
                got_tr = fam.d2V_dtdr(t, r)
                scale_r = max(1.0, abs(got_r))
                scale_rr = max(1.0, abs(got_rr))
                scale_tr = max(1.0, abs(got_tr))
                assert abs(got_r - fd_r) <= 1e-7 * scale_r
                assert abs(got_rr - fd_rr) <= 1e-7 * scale_rr
                assert abs(got_tr - fd_tr) <= 1e-7 * scale_tr


class TestEffectivePotential:
    def test_exact_cancellation(self):
        for L3 in (0.0, 1.0, 7.0):
            fam = FamilyB(0.5, 0.0, 0.0, L3=L3)
            assert pot.effective_potential_U(fam, 0.3, 1.0) == 0.0

    def test_linear_family_value(self):
        fam = FamilyA(1.0, sf.T, L3=5.0)
        assert math.isclose(pot.effective_potential_U(fam, 0.0, 2.0), 2.0,
                            rel_tol=1e-14)

    def test_static_kepler_value(self):
        fam = pot.preset("generalized-kepler", nu=1.0, k=1.0, b0=1.0, L3=0.0).family
        assert math.isclose(pot.effective_potential_U(fam, 0.0, 2.0), -0.5,
                            rel_tol=1e-12)

    def test_no_angular_momentum_dependence(self):
        # U is independent of the family's L3 field when the shape is held fixed
        shape = sf.add(sf.power(U, 2), sf.power(U, -2, (0, math.inf)))
        g1 = sf.poly(1, 0, 0.25)
        g2 = sf.poly(0.3, 0.1)
        rng = np.random.default_rng(7)
        fam0 = FamilyB(g1, g2, shape, L3=0.0)
        fam7 = FamilyB(g1, g2, shape, L3=7.0)
        ga0 = FamilyA(sf.poly(1, 0.2), sf.T, L3=0.0)
        ga7 = FamilyA(sf.poly(1, 0.2), sf.T, L3=7.0)
        for _ in range(25):
            t = float(rng.uniform(0.0, 3.0))
            r = float(rng.uniform(0.5, 3.0))
            assert fam0.U(t, r) == fam7.U(t, r)
            assert ga0.U(t, r) == ga7.U(t, r)


class TestShapes:
    def test_oscillator_shape(self):
        F = pot.oscillator_shape(0.4, 1.0)
        assert math.isclose(F(2.0), 0.2 * 4.0 + 0.25, rel_tol=1e-14)

    def test_scaled_kepler_shape(self):
        F = pot.scaled_kepler_shape(1.0)
        assert math.isclose(F(2.0), -math.sqrt(2.0) / 2.0, rel_tol=1e-14)

    def test_shapes_reject_origin(self):
        for F in (pot.oscillator_shape(0.0, 1.0),
                  pot.yukawa_shape(1.0, 0.0, 0.5),
                  pot.interatomic_shape(1.0, 1.0, 12.0, 6.0, 0.0, 0.5)):
            with pytest.raises(DomainError):
                F(0.0)
            with pytest.raises(DomainError):
                F(-1.0)


class TestStructuralIdentity:
    # the screened-Coulomb and pair presets reduce to a pure rescaled shape:
    # V(t,r) = (1/2 g1) Fbar(g1^{-1/2} r), the r^2 pieces cancel for any L3

    def test_yukawa(self):
        k, b = 1.3, (1.0, 0.5, 0.25)
        fam = pot.preset("yukawa", k=k, b0=b[0], b1=b[1], b2=b[2], L3=0.6).family
        g1 = sf.poly(*b)
        for t in (0.0, 0.7, 2.5):
            for r in (0.5, 1.0, 3.0):
                gv = g1(t)
                s = r / math.sqrt(gv)
                want = (1.0 / (2.0 * gv)) * (2.0 * k * math.exp(-s) / s)
                assert math.isclose(fam.V(t, r), want, rel_tol=1e-12, abs_tol=1e-12)

    def test_interatomic(self):
        k1, k2, m, n, b = 2.0, 1.5, 12.0, 6.0, (1.0, 0.2, 0.1)
        fam = pot.preset("interatomic", k1=k1, k2=k2, m=m, n=n,
                         b0=b[0], b1=b[1], b2=b[2], L3=0.9).family
        g1 = sf.poly(*b)
        for t in (0.0, 1.1, 2.8):
            for r in (0.8, 1.2, 2.0):
                gv = g1(t)
                s = r / math.sqrt(gv)
                want = (1.0 / (2.0 * gv)) * (2.0 * k1 * s**-m - 2.0 * k2 * s**-n)
                assert math.isclose(fam.V(t, r), want, rel_tol=1e-12, abs_tol=1e-12)

    def test_static_screened_coulomb(self):
        fam = pot.preset("yukawa", k=1.0, b0=1.0, b1=0.0, b2=0.0).family
        for r in (0.5, 1.0, 2.0):
            assert math.isclose(fam.V(5.0, r), math.exp(-r) / r, rel_tol=1e-13)


class TestProfileLaws:
    def test_constant_frequency_exponent(self):
        # exponent (nu-2)/2 vanishes at nu = 2
        om = pot.omega_profile(2.0, 1.7, 1.0, 0.5, 0.25)
        for t in (0.0, 1.0, 4.0):
            assert om(t) == 1.7

    def test_frequency_tracks_mass(self):
        om = pot.omega_profile(1.0, 2.5, 1.0, 0.5, 0.25)
        mass = pot.mass_profile(1.0, 0.5, 0.25)
        ts = np.linspace(0.0, 2.0, 41)
        assert np.allclose(om(ts), 2.5 * mass(ts), rtol=1e-12, atol=0)

    def test_mass_degenerate_forms(self):
        ts = np.linspace(0.0, 2.0, 41)
        # b2 = 0: inverse square root of a linear function
        m2 = pot.mass_profile(1.0, 0.5, 0.0)
        assert np.allclose(m2(ts), 1.0 / np.sqrt(1.0 + 0.5 * ts), rtol=1e-12, atol=0)
        # zero discriminant: plain inverse linear
        m1 = pot.mass_profile(1.0, 2.0, 1.0)
        assert np.allclose(m1(ts), 1.0 / (1.0 + ts), rtol=1e-12, atol=0)
        m1b = pot.mass_profile(4.0, 4.0, 1.0)
        assert np.allclose(m1b(ts), 1.0 / (2.0 + ts), rtol=1e-12, atol=0)

    def test_classification(self):
        assert pot.classify_mass_profile(1.0, 0.0, 0.0) == "constant"
        assert pot.classify_mass_profile(1.0, 0.5, 0.0) == "inverse-sqrt-linear"
        assert pot.classify_mass_profile(1.0, 2.0, 1.0) == "inverse-linear"
        assert pot.classify_mass_profile(1.0, 0.5, 0.25) == "inverse-sqrt-quadratic"


class TestPresets:
    def test_catalog_sorted_and_described(self):
        cat = pot.catalog()
        names = [n for n, _ in cat]
        assert names == sorted(names)
        assert {"free-particle", "oscillator", "generalized-kepler", "binary",
                "yukawa", "interatomic", "scaled-kepler", "linear-lfi",
                "lewis-leach"} <= set(names)
        assert all(desc for _, desc in cat)

    def test_unknown_name(self):
        with pytest.raises(UnknownPreset):
            pot.preset("coulomb")

    def test_unknown_parameter(self):
        with pytest.raises(InvalidParameters):
            pot.preset("oscillator", omega=2.0)

    def test_invalid_profile(self):
        with pytest.raises(InvalidParameters):
            pot.preset("yukawa", b0=-1.0)
        with pytest.raises(InvalidParameters):
            pot.preset("generalized-kepler", b0=1.0, b1=-4.0, b2=1.0,
                       interval=(0.0, 10.0))
        with pytest.raises(InvalidParameters):
            pot.preset("interatomic", m=0.0)
        with pytest.raises(InvalidParameters):
            pot.preset("linear-lfi", g2="(poly 0 1)")  # vanishes at t = 0

    def test_binary_is_kepler_with_unit_exponent(self):
        pb = pot.preset("binary", G=2.0, b0=1.0, b1=0.5, b2=0.25, L3=0.6)
        pk = pot.preset("generalized-kepler", nu=1.0, k=2.0, b0=1.0, b1=0.5,
                        b2=0.25, L3=0.6)
        for t in (0.0, 1.0, 2.0):
            for r in (0.5, 2.0):
                assert pb.family.V(t, r) == pk.family.V(t, r)

    def test_preset_echoes_parameters(self):
        p = pot.preset("oscillator", c0=0.4, L3=1.0)
        assert p.name == "oscillator"
        assert p.params == {"c0": 0.4, "L3": 1.0}


class TestLewisLeach1d:
    def test_plain_oscillator_form(self):
        fam = LewisLeach1d(1.0, 0.0, 1.0, 0.0, 0.0, k=0.0)
        for q in (-2.0, 0.0, 1.5):
            assert math.isclose(fam.U(0.0, q), 0.5 * q * q, rel_tol=1e-14, abs_tol=1e-15)

    def test_coordinate_not_restricted(self):
        fam = LewisLeach1d(1.0, 0.0, 1.0, 0.0, 0.0)
        assert fam.U(0.0, -1.0) == 0.5  # q < 0 is admissible for the 1d system

    def test_shape_argument(self):
        fam = LewisLeach1d(sf.poly(2.0), sf.poly(0, 1), 0.0, 0.0, 0.0)
        assert math.isclose(fam.warg(3.0, 5.0), 1.0, rel_tol=1e-14)


class TestErmakovResiduals:
    def test_constant_solution(self):
        r1, r2 = pot.ermakov_residuals(1.0, 0.0, 1.0, 0.0, 1.0, 0.5)
        assert r1 == 0.0 and r2 == 0.0

    def test_pythagorean_profile(self):
        # rho = sqrt(1+t^2) solves rho'' = 1/rho^3 with no restoring term
        rho = sf.sqrt(sf.poly(1, 0, 1))
        for t in (0.0, 0.5, 2.0):
            r1, _ = pot.ermakov_residuals(rho, 0.0, 0.0, 0.0, 1.0, t)
            assert abs(r1) < 1e-13

    def test_violated_condition(self):
        r1, _ = pot.ermakov_residuals(1.0, 0.0, 0.0, 0.0, 1.0, 0.0)
        assert r1 == -1.0

    def test_vanishing_rho(self):
        with pytest.raises(DomainError):
            pot.ermakov_residuals(sf.poly(0, 1), 0.0, 0.0, 0.0, 1.0, 0.0)

    def test_driven_center(self):
        # alpha = t^2/2 under Omega = 0 needs F1 = 1
        alpha = sf.poly(0, 0, 0.5)
        _, r2 = pot.ermakov_residuals(1.0, alpha, 0.0, 1.0, 1.0, 0.7)
        assert abs(r2) < 1e-13
