"""Analytic primitives: evaluation, derivatives, coefficients, Moebius algebra."""

import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from loewnerqc.analytic import (
    AnalyticMap,
    MoebiusTransform,
    cardioid_map,
    cayley,
    derivative_agreement,
    half_plane_map,
    identity_map,
    inverse_cayley,
    koebe,
    koebe_map,
    koebe_transform,
    polynomial_map,
    quadratic_map,
    root_scaled_koebe,
    rotate_map,
    scaled_koebe,
    taylor_coefficients,
)
from loewnerqc.errors import (
    DegenerateTransformError,
    DomainError,
    PoleError,
    SamplingError,
)

from conftest import disk_points

finite_c = st.complex_numbers(min_magnitude=0, max_magnitude=3,
                              allow_nan=False, allow_infinity=False)


class TestKoebe:
    def test_fixed_point(self):
        assert koebe(0) == 0

    def test_half(self):
        assert abs(koebe(0.5) - 2.0) < 1e-15

    def test_coefficients_are_integers(self):
        tc = taylor_coefficients(koebe_map(), 8)
        for n in range(9):
            assert abs(tc[n] - n) < 1e-8

    def test_domain_violation(self):
        with pytest.raises(DomainError):
            koebe(1.2)
        with pytest.raises(DomainError):
            koebe(np.array([0.3, 1.0 + 0j]))

    def test_derivatives_match_stencil(self, rng):
        z = disk_points(rng, 30, 0.8)
        assert derivative_agreement(koebe_map(), z)


class TestTaylorCoefficients:
    def test_identity(self):
        tc = taylor_coefficients(identity_map(), 3)
        expected = [0, 1, 0, 0]
        for n, e in enumerate(expected):
            assert abs(tc[n] - e) < 1e-12

    def test_koebe_at_half_radius(self):
        tc = taylor_coefficients(koebe_map(), 6, radius=0.5)
        for n in range(7):
            assert abs(tc[n] - n) < 1e-8

    def test_extremal_second_coefficient(self):
        tc = taylor_coefficients(scaled_koebe(0.25), 2)
        assert abs(tc[2] - 0.5) < 1e-8

    def test_aliasing_doubling(self):
        # recomputing with twice the samples moves nothing by >= 1e-8
        f = scaled_koebe(0.35)
        a = taylor_coefficients(f, 12).coefficients
        b = taylor_coefficients(f, 12, n_samples=2 * max(48, 64)).coefficients
        assert np.max(np.abs(a - b)) < 1e-8

    def test_nonfinite_sample_raises(self):
        # pole sits exactly on the sampling circle at theta = 0
        pole_on_circle = lambda z: 1 / (z - 0.5)
        with pytest.raises(SamplingError) as info:
            taylor_coefficients(pole_on_circle, 4, radius=0.5, n_samples=64)
        assert info.value.theta == 0.0

    def test_bad_args(self):
        with pytest.raises(ValueError):
            taylor_coefficients(identity_map(), 0)
        with pytest.raises(ValueError):
            taylor_coefficients(identity_map(), 3, radius=1.5)


class TestKoebeTransform:
    def test_zeta_zero_is_identity(self, rng):
        f = scaled_koebe(0.3)
        fk = koebe_transform(f, 0.0)
        z = disk_points(rng, 40, 0.9)
        assert np.max(np.abs(fk(z) - f(z))) < 1e-12

    def test_second_coefficient_closed_form(self):
        K = koebe_map()
        zeta = 0.3
        fk = koebe_transform(K, zeta)
        a2 = taylor_coefficients(fk, 2)[2]
        closed = (0.5 * (1 - abs(zeta) ** 2) * K.deriv(zeta, 2) / K.deriv(zeta, 1)
                  - np.conj(zeta))
        assert abs(a2 - closed) < 1e-10

    def test_normalisation(self):
        fk = koebe_transform(koebe_map(), 0.2 + 0.4j)
        tc = taylor_coefficients(fk, 1)
        assert abs(tc[0]) < 1e-10
        assert abs(tc[1] - 1) < 1e-10

    def test_second_coefficient_bound(self, rng):
        K = koebe_map()
        for zeta in disk_points(rng, 100, 0.85):
            a2 = taylor_coefficients(koebe_transform(K, complex(zeta)), 2)[2]
            assert abs(a2) <= 2 + 1e-6

    def test_degenerate(self):
        # f' vanishes at the base point
        f = polynomial_map([0, 1, -1])  # z - z^2, f'(0.5) = 0
        with pytest.raises(DegenerateTransformError):
            koebe_transform(f, 0.5)
        with pytest.raises(DomainError):
            koebe_transform(koebe_map(), 1.5)


class TestCayley:
    def test_center(self):
        assert abs(cayley(0) - 1) < 1e-15

    def test_i_maps_to_i(self):
        assert abs(cayley(1j) - 1j) < 1e-15

    def test_round_trip(self):
        z = 0.3 + 0.2j
        assert abs(inverse_cayley(cayley(z)) - z) < 1e-12

    def test_maps_disk_to_right_half_plane(self, rng):
        z = disk_points(rng, 200, 0.99)
        assert np.all(np.real(cayley(z)) > 0)

    def test_pole(self):
        with pytest.raises(PoleError):
            cayley(1.0)
        with pytest.raises(PoleError):
            inverse_cayley(-1.0)


class TestMoebius:
    @given(st.tuples(finite_c, finite_c, finite_c, finite_c))
    @settings(max_examples=50, deadline=None)
    def test_inverse_composes_to_identity(self, abcd):
        a, b, c, d = abcd
        if abs(a * d - b * c) < 1e-3:
            return
        m = MoebiusTransform(a, b, c, d)
        both = m.compose(m.inverse())
        for z in (0.1, 0.5j, -0.3 + 0.2j):
            if abs(both.c * z + both.d) < 1e-6:
                continue
            assert abs(both(z) - z) < 1e-9

    @given(st.tuples(finite_c, finite_c, finite_c),
           st.tuples(finite_c, finite_c, finite_c))
    @settings(max_examples=30, deadline=None)
    def test_composition_associative(self, t1, t2):
        a1, b1, c1 = t1
        a2, b2, c2 = t2
        try:
            m1 = MoebiusTransform(1 + a1, b1, c1, 1)
            m2 = MoebiusTransform(1 + a2, b2, c2, 1)
            m3 = MoebiusTransform(1, a1 - b2, a2 * 0.1, 1)
        except ValueError:
            return
        left = m1.compose(m2).compose(m3)
        right = m1.compose(m2.compose(m3))
        for name in "abcd":
            assert abs(getattr(left, name) - getattr(right, name)) < 1e-9

    def test_degenerate_rejected(self):
        with pytest.raises(ValueError):
            MoebiusTransform(1, 2, 2, 4)

    def test_disk_automorphism(self):
        m = MoebiusTransform.disk_automorphism(0.3 + 0.1j)
        theta = np.linspace(0, 2 * np.pi, 64)
        on_circle = np.abs(m(np.exp(1j * theta)))
        assert np.max(np.abs(on_circle - 1)) < 1e-12
        with pytest.raises(DomainError):
            MoebiusTransform.disk_automorphism(1.2)

    def test_closed_derivatives(self, rng):
        m = MoebiusTransform(2 + 1j, 0.3, 0.2j, 1).to_map()
        assert derivative_agreement(m, disk_points(rng, 20, 0.7))


class TestCatalog:
    def test_root_transform_coefficients(self):
        # a_n = 2k/(n-1), all intermediate coefficients vanish
        k = 0.2
        for n in (3, 4, 5):
            tc = taylor_coefficients(root_scaled_koebe(k, n), n)
            assert abs(tc[n] - 2 * k / (n - 1)) < 1e-8
            for m in range(2, n):
                assert abs(tc[m]) < 1e-8

    def test_rotation_stays_normalised(self):
        f = rotate_map(koebe_map(), 1.1)
        tc = taylor_coefficients(f, 2)
        assert abs(tc[1] - 1) < 1e-10
        assert abs(abs(tc[2]) - 2) < 1e-8

    def test_catalog_derivative_modes(self, rng):
        z = disk_points(rng, 25, 0.8)
        for f in (scaled_koebe(0.4), half_plane_map(), cardioid_map(),
                  quadratic_map(0.1), root_scaled_koebe(0.3, 4)):
            assert derivative_agreement(f, z), f.name

    def test_spectral_fallback_accuracy(self):
        # strip closed forms; the circle stencil must still be sharp
        K = koebe_map()
        bare = AnalyticMap(K.func, name="bare-koebe")
        z = 0.4 + 0.2j
        for order in (1, 2, 3):
            assert abs(bare.deriv(z, order) - K.deriv(z, order)) \
                < 1e-9 * max(1, abs(K.deriv(z, order)))


class TestDistortionOracles:
    """Classical sharp bounds for normalised univalent maps, used as oracles."""

    slack = 1e-9

    def maps(self):
        return [koebe_map(), scaled_koebe(0.2), scaled_koebe(0.35),
                rotate_map(koebe_map(), 0.7)]

    def test_distortion_theorem(self, rng):
        z = disk_points(rng, 1000, 0.95)
        r = np.abs(z)
        for f in self.maps():
            d = np.abs(f.deriv(z, 1))
            assert np.all(d >= (1 - r) / (1 + r) ** 3 - self.slack)
            assert np.all(d <= (1 + r) / (1 - r) ** 3 + self.slack)
            v = np.abs(f(z))
            assert np.all(v >= r / (1 + r) ** 2 - self.slack)
            assert np.all(v <= r / (1 - r) ** 2 + self.slack)
            q = np.abs(z * f.deriv(z, 1) / f(z))
            assert np.all(q >= (1 - r) / (1 + r) - self.slack)
            assert np.all(q <= (1 + r) / (1 - r) + self.slack)

    def test_koebe_attains_growth_on_real_axis(self):
        # equality case: the growth bound is attained by the koebe map
        r = 0.77
        assert abs(abs(koebe(-r)) - r / (1 + r) ** 2) < 1e-12
        assert abs(koebe(r) - r / (1 - r) ** 2) < 1e-12
