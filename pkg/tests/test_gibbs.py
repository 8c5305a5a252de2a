import math

import numpy as np
import pytest
from scipy import integrate

from oball import (
    DomainError,
    TiltParams,
    char_modulus,
    in_domain,
    parse_orlicz,
    summarize,
)

GAUSS = TiltParams(-0.5, 0.0)


class TestSummarize:
    def test_gaussian_closed_forms(self, v2, v4):
        s = summarize(v2, v4, GAUSS)
        assert s.z == pytest.approx(math.sqrt(2 * math.pi), rel=1e-10)
        assert s.phi == pytest.approx(0.5 * math.log(2 * math.pi), rel=1e-10)
        assert s.mean_v == pytest.approx(1.0, rel=1e-10)
        assert s.mean_w == pytest.approx(3.0, rel=1e-10)
        np.testing.assert_allclose(
            s.cov, [[2.0, 12.0], [12.0, 96.0]], rtol=1e-8
        )

    def test_gaussian_variance_identity(self, v2, v4):
        s = summarize(v2, v4, TiltParams(-1.0, 0.0))
        assert s.mean_v == pytest.approx(0.5, rel=1e-10)

    @pytest.mark.parametrize("p", [2.0, 4.0])
    def test_power_density_normalizer(self, p):
        # density ~ exp(-|x|^p / p) has partition 2 p^{1/p} Gamma(1 + 1/p)
        v = parse_orlicz(f"{1.0 / p}*|x|^{p}")
        w = parse_orlicz("x^2")
        s = summarize(v, w, TiltParams(-1.0, 0.0))
        expected = 2.0 * p ** (1.0 / p) * math.gamma(1.0 + 1.0 / p)
        assert s.z == pytest.approx(expected, rel=1e-10)

    def test_divergent_component_raises(self, v2, v4):
        with pytest.raises(DomainError):
            summarize(v2, v4, TiltParams(-1.0, 0.25))

    def test_near_degenerate_covariance_stays_positive(self, v2):
        # w nearly proportional to v: correlation ~ 1, compensated pass keeps
        # the covariance matrix positive semidefinite instead of noise-negative
        w = parse_orlicz("x^2 + 0.0001*x^4")
        s = summarize(v2, w, TiltParams(-0.5, 0.0))
        assert s.var_v > 0 and s.var_w > 0
        assert s.det_cov >= 0


class TestDomainProbe:
    def test_gaussian_tilt_in_domain(self, v2, v4):
        ok, note = in_domain(v2, v4, TiltParams(-1.0, 0.0))
        assert ok
        assert "converges" in note

    def test_positive_quartic_weight_diverges(self, v2, v4):
        ok, note = in_domain(v2, v4, TiltParams(-1.0, 0.1))
        assert not ok
        assert "diverges" in note

    def test_ratio_bounded_pair_allows_positive_beta(self, vmix, v4):
        ok, note = in_domain(vmix, v4, TiltParams(-1.0, 0.5))
        assert ok
        assert "held" in note


class TestLogLaplaceIdentities:
    @pytest.mark.parametrize(
        "pair,params",
        [
            (("x^2", "x^4"), (-0.8, -0.05)),
            (("x^4", "x^2"), (-0.5, 0.3)),
            (("x^4 + x^2", "x^4"), (-1.0, 0.4)),
        ],
    )
    def test_gradient_is_mean_vector(self, pair, params):
        v, w = parse_orlicz(pair[0]), parse_orlicz(pair[1])
        a, b = params
        s = summarize(v, w, TiltParams(a, b))
        h = 1e-6
        dphi_da = (
            summarize(v, w, TiltParams(a + h, b)).phi
            - summarize(v, w, TiltParams(a - h, b)).phi
        ) / (2 * h)
        dphi_db = (
            summarize(v, w, TiltParams(a, b + h)).phi
            - summarize(v, w, TiltParams(a, b - h)).phi
        ) / (2 * h)
        assert s.mean_v == pytest.approx(dphi_da, rel=1e-6)
        assert s.mean_w == pytest.approx(dphi_db, rel=1e-6)

    def test_hessian_is_covariance(self, v2, v4):
        a, b = -0.8, -0.05
        h = 2e-4
        s = summarize(v2, v4, TiltParams(a, b))

        def phi(aa, bb):
            return summarize(v2, v4, TiltParams(aa, bb)).phi

        d2_aa = (phi(a + h, b) - 2 * phi(a, b) + phi(a - h, b)) / h**2
        d2_bb = (phi(a, b + h) - 2 * phi(a, b) + phi(a, b - h)) / h**2
        d2_ab = (
            phi(a + h, b + h) - phi(a + h, b - h) - phi(a - h, b + h) + phi(a - h, b - h)
        ) / (4 * h * h)
        assert s.var_v == pytest.approx(d2_aa, rel=1e-4)
        assert s.var_w == pytest.approx(d2_bb, rel=1e-4)
        assert s.cov_vw == pytest.approx(d2_ab, rel=1e-4)

    def test_mean_monotone_in_each_parameter(self, v4, v2):
        # mean_v strictly increasing in beta at fixed alpha, and in alpha
        means_b = [
            summarize(v4, v2, TiltParams(-0.5, b)).mean_v for b in (-0.6, 0.0, 0.6)
        ]
        assert means_b[0] < means_b[1] < means_b[2]
        means_a = [
            summarize(v4, v2, TiltParams(a, 0.2)).mean_v for a in (-1.2, -0.7, -0.3)
        ]
        assert means_a[0] < means_a[1] < means_a[2]

    def test_covariance_positive_definite_on_grid(self, v2, v4):
        for a in (-1.5, -0.8, -0.4):
            for b in (-0.8, -0.2, 0.0):
                s = summarize(v2, v4, TiltParams(a, b))
                assert s.var_v > 0
                assert s.det_cov > 0


class TestCharModulus:
    def test_origin_is_one(self, v2, v4):
        assert char_modulus(v2, v4, GAUSS, 0.0, 0.0) == 1.0

    @pytest.mark.parametrize("t", [0.5, 3.0, 50.0])
    def test_gaussian_closed_form(self, v2, v4, t):
        # E exp(i t X^2) for standard normal has modulus (1 + 4 t^2)^(-1/4)
        got = char_modulus(v2, v4, GAUSS, t, 0.0)
        assert got == pytest.approx((1.0 + 4.0 * t * t) ** -0.25, abs=1e-6)

    def test_example_bound_at_moderate_frequency(self, v2, v4):
        assert char_modulus(v2, v4, GAUSS, 50.0, 0.0) < 0.99

    def test_direct_quadrature_oracle(self, v2, v4):
        # independent two-part oscillatory quadrature at modest frequencies
        t, s = 3.0, 1.0

        def dens(x):
            return math.exp(-0.5 * x * x)

        cos_part, _ = integrate.quad(
            lambda x: dens(x) * math.cos(t * x * x + s * x**4),
            0, 10, limit=4000, epsabs=1e-13, epsrel=1e-12,
        )
        sin_part, _ = integrate.quad(
            lambda x: dens(x) * math.sin(t * x * x + s * x**4),
            0, 10, limit=4000, epsabs=1e-13, epsrel=1e-12,
        )
        z_half, _ = integrate.quad(dens, 0, 10, epsabs=1e-13, epsrel=1e-12)
        expected = math.hypot(cos_part, sin_part) / z_half
        assert char_modulus(v2, v4, GAUSS, t, s) == pytest.approx(expected, abs=1e-6)

    def test_mixed_sign_frequencies(self, v2, v4):
        t, s = 40.0, -7.0

        def dens(x):
            return math.exp(-0.5 * x * x)

        cos_part, _ = integrate.quad(
            lambda x: dens(x) * math.cos(t * x * x + s * x**4),
            0, 10, limit=8000, epsabs=1e-13, epsrel=1e-12,
        )
        sin_part, _ = integrate.quad(
            lambda x: dens(x) * math.sin(t * x * x + s * x**4),
            0, 10, limit=8000, epsabs=1e-13, epsrel=1e-12,
        )
        z_half, _ = integrate.quad(dens, 0, 10, epsabs=1e-13, epsrel=1e-12)
        expected = math.hypot(cos_part, sin_part) / z_half
        assert char_modulus(v2, v4, GAUSS, t, s) == pytest.approx(expected, abs=1e-6)

    def test_triangle_inequality_bound(self, v2, v4):
        rng = np.random.default_rng(7)
        for _ in range(12):
            t, s = rng.uniform(-200, 200), rng.uniform(-5, 5)
            assert char_modulus(v2, v4, GAUSS, t, s) <= 1.0 + 1e-8
