import math

import numpy as np
import pytest
from scipy.special import gammaln

from oball import (
    BranchError,
    DegenerateError,
    NoSolutionError,
    Weight,
    clt_sigma,
    deviation_formula,
    parse_orlicz,
    rate,
    thin_shell_formula,
    tilted_moment,
    volume_asymptotic,
)
from oball import asymptotics


class TestRate:
    def test_zero_at_typical_level(self, v2, v4):
        ev = rate(v2, v4, 1.0, 3.0)
        assert ev.effective_rate == 0.0

    def test_matches_direct_exponent_expression(self, v2, v4):
        ev = rate(v2, v4, 1.0, 2.5)
        a, b = ev.tilt.params.alpha, ev.tilt.params.beta
        direct = (
            ev.star_summary.phi
            - ev.tilt.summary.phi
            + (a - ev.alpha_star) * 1.0
            + b * 2.5
        )
        assert ev.effective_rate == pytest.approx(direct, rel=1e-10)
        assert ev.effective_rate > 0.0

    def test_monotone_in_level_distance_upper(self, v4, v2):
        rates = [rate(v4, v2, 1.0, t).effective_rate for t in (0.72, 0.76, 0.80)]
        assert rates[0] < rates[1] < rates[2]

    def test_monotone_in_level_distance_lower(self, v2, v4):
        rates = [rate(v2, v4, 1.0, t).effective_rate for t in (2.8, 2.5, 2.2)]
        assert rates[0] < rates[1] < rates[2]

    def test_legendre_supremum_attained(self, v4, v2):
        # the solved tilt maximizes alpha R + beta t - phi over probe points
        ev = rate(v4, v2, 1.0, 0.8)
        best = (
            ev.tilt.params.alpha * 1.0
            + ev.tilt.params.beta * 0.8
            - ev.tilt.summary.phi
        )
        gen = np.random.default_rng(20250810)
        for _ in range(100):
            a = -math.exp(gen.uniform(math.log(0.05), math.log(3.0)))
            b = gen.uniform(-1.5, 1.5)
            phi = tilted_moment(v4, v2, a, b, Weight.ONE).log_value
            assert a * 1.0 + b * 0.8 - phi <= best + 1e-9

    def test_unreachable_level_propagates(self, v2, v4):
        with pytest.raises(NoSolutionError):
            rate(v2, v4, 1.0, 3.5)


class TestDeviationFormula:
    def test_structure_under_dimension_doubling(self, v4, v2):
        p1 = deviation_formula(v4, v2, 1.0, 0.8, 100)
        p2 = deviation_formula(v4, v2, 1.0, 0.8, 200)
        assert p2.exponent == pytest.approx(2.0 * p1.exponent, rel=1e-12)
        pref_ratio = (p2.value * math.exp(p2.exponent)) / (
            p1.value * math.exp(p1.exponent)
        )
        assert pref_ratio == pytest.approx(1.0 / math.sqrt(2.0), rel=1e-10)

    def test_log_value_consistency(self, v4, v2):
        p = deviation_formula(v4, v2, 1.0, 0.8, 100)
        assert p.value == pytest.approx(math.exp(p.log_value), rel=1e-12)
        assert 0.0 < p.value < 1.0

    def test_huge_dimension_reports_log_space(self, v4, v2):
        p = deviation_formula(v4, v2, 1.0, 0.8, 20000)
        assert p.value == 0.0
        assert p.log_value < -2000.0

    def test_typical_level_is_branch_error(self, v2, v4):
        with pytest.raises(BranchError):
            deviation_formula(v2, v4, 1.0, 3.0, 50)

    def test_lower_level_is_branch_error(self, v2, v4):
        with pytest.raises(BranchError):
            deviation_formula(v2, v4, 1.0, 2.5, 50)

    def test_both_prefactor_readings_emitted(self, v4, v2):
        p = deviation_formula(v4, v2, 1.0, 0.8, 100)
        assert p.components["prefactor"] > 0
        assert p.components["prefactor_alternative"] > 0
        assert p.components["prefactor"] != p.components["prefactor_alternative"]


class TestThinShell:
    def test_dominant_side_is_smaller_rate(self):
        v = parse_orlicz("x^2")
        w = parse_orlicz("|x|^0.5", allow_generalized=True)
        p = thin_shell_formula(v, w, 1.0, 0.12, 100)
        j_up = p.components["rate_upper"]
        j_dn = p.components["rate_lower"]
        assert p.components["dominant_side"] == ("upper" if j_up < j_dn else "lower")

    def test_dominant_side_value_equals_one_sided(self):
        v = parse_orlicz("x^2")
        w = parse_orlicz("|x|^0.5", allow_generalized=True)
        p = thin_shell_formula(v, w, 1.0, 0.12, 100)
        side = p.components["dominant_side"]
        comp = p.components[side]
        expected = (
            math.exp(-100 * comp["effective_rate"])
            * comp["prefactor"]
            / comp["sqrt_2pi_n"]
        )
        assert p.value == pytest.approx(expected, rel=1e-12)

    def test_rates_vanish_with_shell_width(self, v4, v2):
        p = thin_shell_formula(v4, v2, 1.0, 1e-3, 100)
        assert p.components["rate_upper"] < 1e-3
        assert p.components["rate_lower"] < 1e-3

    def test_tie_adds_both_sides(self, v4, v2, monkeypatch):
        # force an exact rate tie (detection field only) to exercise the
        # harmonic-combination case: the returned value must be the sum of
        # the two one-sided predictions
        m = 0.6759782400672848
        real = asymptotics._one_sided
        expected = sum(
            real(v4, v2, 1.0, lvl, 50, asymptotics._SPEC).value
            for lvl in (m + 0.05, m - 0.05)
        )

        def tied(v, w, radius, level, n, spec):
            pred = real(v, w, radius, level, n, spec)
            comps = dict(pred.components)
            comps["effective_rate"] = 0.25
            return asymptotics.FormulaPrediction(
                pred.n, n * 0.25, pred.log_value, pred.value, comps
            )

        monkeypatch.setattr(asymptotics, "_one_sided", tied)
        p = thin_shell_formula(v4, v2, 1.0, 0.05, 50)
        assert p.components["dominant_side"] == "tie"
        assert p.value == pytest.approx(expected, rel=1e-9)

    def test_out_of_window_raises_per_side(self, vmix, v4):
        # for the ratio-bounded pair, the lower corner regime ends at a
        # tiny shell width; beyond it the solved tilt has alpha >= 0 and the
        # per-side failure is reported
        with pytest.raises(BranchError) as exc:
            thin_shell_formula(vmix, v4, 1.0, 0.04, 100)
        assert "lower side" in str(exc.value)


class TestVolume:
    def test_matches_exact_euclidean_ball(self, v2):
        errors = []
        for n in (20, 50, 100, 200):
            p = volume_asymptotic(v2, 1.0, n)
            exact = (n / 2) * math.log(math.pi) + (n / 2) * math.log(n) - gammaln(
                n / 2 + 1
            )
            errors.append(abs(math.exp(p.log_value - exact) - 1.0))
        assert errors[0] <= 0.05
        assert errors[2] <= 0.01
        assert errors[0] > errors[1] > errors[2] > errors[3]


class TestCltSigma:
    def test_gaussian_value(self, v2, v4):
        assert clt_sigma(v2, v4, 1.0) == pytest.approx(24.0, rel=1e-8)

    def test_quartic_scaling_in_radius(self, v2, v4):
        base = clt_sigma(v2, v4, 1.0)
        assert clt_sigma(v2, v4, 2.0) == pytest.approx(base * 16.0, rel=1e-8)

    def test_linear_dependence_detected(self, v2):
        with pytest.raises(DegenerateError):
            clt_sigma(v2, v2, 1.0)
