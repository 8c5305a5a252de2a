import numpy as np
import pytest

from oball import (
    BracketFailureError,
    NoSolutionError,
    Target,
    TiltParams,
    beta_curve,
    critical_m,
    solve_alpha_star,
    solve_tilt,
    summarize,
    t_max,
)


class TestAlphaStar:
    def test_gaussian_radius_one(self, v2, v4):
        assert solve_alpha_star(v2, 1.0, w=v4) == pytest.approx(-0.5, rel=1e-9)

    def test_gaussian_radius_two(self, v2, v4):
        assert solve_alpha_star(v2, 2.0, w=v4) == pytest.approx(-0.25, rel=1e-9)

    def test_laplace_mean(self, vabs):
        # exp(alpha |x|) has mean |x| equal to 1/|alpha|
        assert solve_alpha_star(vabs, 1.0) == pytest.approx(-1.0, rel=1e-9)

    def test_residual_contract(self, vmix, v4):
        a = solve_alpha_star(vmix, 1.0, w=v4)
        s = summarize(vmix, v4, TiltParams(a, 0.0))
        assert abs(s.mean_v - 1.0) <= 1e-10

    def test_radius_validation(self, v2):
        with pytest.raises(ValueError):
            solve_alpha_star(v2, -1.0)


class TestCriticalLevel:
    def test_gaussian_fourth_moment(self, v2, v4):
        assert critical_m(v2, v4, 1.0) == pytest.approx(3.0, rel=1e-9)
        assert critical_m(v2, v4, 2.0) == pytest.approx(12.0, rel=1e-9)

    def test_identical_functions_force_radius(self, v2):
        assert critical_m(v2, v2, 0.7) == pytest.approx(0.7, rel=1e-9)


class TestSolveTilt:
    def test_typical_level_short_circuit(self, v2, v4):
        sol = solve_tilt(v2, v4, Target(1.0, 3.0))
        assert sol.params.beta == 0.0
        assert sol.params.alpha == pytest.approx(-0.5, rel=1e-9)
        assert sol.residual <= 1e-10 * 3.0
        assert sol.iterations == 0

    def test_lower_branch_sign_pattern(self, v2, v4):
        sol = solve_tilt(v2, v4, Target(1.0, 2.5))
        assert sol.params.alpha < 0.0
        assert sol.params.beta < 0.0
        assert sol.residual <= 1e-10 * 2.5

    def test_upper_branch_sign_pattern(self, v4, v2):
        sol = solve_tilt(v4, v2, Target(1.0, 0.8))
        assert sol.params.alpha < 0.0
        assert sol.params.beta > 0.0

    def test_independent_summary_reproduces_target(self, v4, v2):
        sol = solve_tilt(v4, v2, Target(1.0, 0.8))
        s = summarize(v4, v2, sol.params)
        assert s.mean_v == pytest.approx(1.0, rel=1e-8)
        assert s.mean_w == pytest.approx(0.8, rel=1e-8)

    def test_unreachable_upper_level_reports_no_solution(self, v2, v4):
        # positive-beta tilts diverge for this pair, so no tilt reaches a
        # statistic level above the typical value
        with pytest.raises(NoSolutionError) as exc:
            solve_tilt(v2, v4, Target(1.0, 3.5))
        assert exc.value.last_params is not None

    def test_m_consistency_with_solver(self, v4, v2):
        m = critical_m(v4, v2, 1.0)
        sol = solve_tilt(v4, v2, Target(1.0, m))
        assert sol.summary.mean_w == pytest.approx(m, rel=1e-9)

    @pytest.mark.parametrize("level", [0.62, 0.74, 0.80, 0.9])
    def test_branch_sign_law(self, v4, v2, level):
        m = critical_m(v4, v2, 1.0)
        sol = solve_tilt(v4, v2, Target(1.0, level))
        assert sol.params.alpha < 0.0
        if level > m:
            assert sol.params.beta > 0.0
        else:
            assert sol.params.beta < 0.0


class TestBetaCurve:
    def test_passes_through_one_parameter_point(self, v2, v4):
        pts = beta_curve(v2, v4, 1.0, [-0.5])
        assert pts[0].beta == pytest.approx(0.0, abs=1e-10)
        assert pts[0].mean_w == pytest.approx(3.0, rel=1e-8)

    def test_large_radius_gap_is_recorded(self, vmix, v4):
        # at alpha = -1 the supremum of mean_v along beta stays far below
        # a radius of 1000, so the curve has a recorded gap there
        pts = beta_curve(vmix, v4, 1000.0, [-1.0])
        assert pts[0].beta is None
        assert "supremum" in pts[0].note

    def test_statistic_mean_monotone_down_the_curve(self, v2, v4):
        grid = list(np.linspace(-0.45, -0.1, 6))
        pts = beta_curve(v2, v4, 1.0, grid)
        means = [p.mean_w for p in pts]
        betas = [p.beta for p in pts]
        assert all(m is not None for m in means)
        # mean_w decreases in alpha; so does beta on this branch
        assert all(a > b for a, b in zip(means[:-1], means[1:]))
        assert all(a > b for a, b in zip(betas[:-1], betas[1:]))

    def test_upper_branch_rises_as_alpha_decreases(self, v4, v2):
        grid = list(np.linspace(-1.3, -0.35, 5))
        pts = beta_curve(v4, v2, 1.0, grid)
        betas = [p.beta for p in pts]
        means = [p.mean_w for p in pts]
        # toward more negative alpha: beta grows, mean_w grows toward the
        # admissible endpoint
        assert all(b1 > b2 for b1, b2 in zip(betas[:-1], betas[1:]))
        assert all(m1 > m2 for m1, m2 in zip(means[:-1], means[1:]))

    def test_positive_alpha_rejected(self, v2, v4):
        pts = beta_curve(v2, v4, 1.0, [0.3])
        assert pts[0].beta is None


class TestAdmissibleEndpoint:
    def test_unit_values(self, v4, v2):
        value, warning = t_max(v4, v2, 1.0)
        assert value == pytest.approx(1.0, abs=1e-9)
        assert warning is None

    def test_scaled_radius(self, v4, v2):
        value, _ = t_max(v4, v2, 16.0)
        assert value == pytest.approx(4.0, rel=1e-9)

    def test_warning_for_non_dominating_pair(self, v2, v4):
        value, warning = t_max(v2, v4, 1.0)
        assert value == pytest.approx(1.0, abs=1e-9)
        assert warning is not None


class TestBracketFailure:
    def test_degenerate_radius_out_of_window(self, v2):
        with pytest.raises(BracketFailureError):
            solve_alpha_star(v2, 1e30)
