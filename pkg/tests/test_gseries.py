"""Tests for core/gseries.py - G-series, numerical derivatives and identity verification."""

import math
from unittest.mock import patch

import numpy as np
import pytest

from core.errors import DifferentiationError, HypothesisError, QuadratureError, TruncationError
from core.gseries import (
    NORMALIZATION,
    GSeriesParams,
    Identity,
    IdentityPoint,
    Route,
    Side,
    VerificationSettings,
    _tail_estimate,
    g_series,
    g_series_derivative,
    g_series_direct,
    g_series_via_riesz,
    kth_derivative_at_1,
    knot_detector,
    verify_identity,
)
from core.riesz import Estimate


def zeta_params(**overrides) -> GSeriesParams:
    values = dict(side=Side.G, u=2.2, v=2.3, k=3, x=1.0, gamma=1.5, right=3.15)
    values.update(overrides)
    return GSeriesParams(**values)


class TestConstants:
    """Tests for module constants."""

    def test_normalization_is_unity(self):
        """The Meijer G carries 1/(2 pi i), so the series needs no extra factor."""
        assert NORMALIZATION == 1.0

    def test_derivative_tolerances_looser(self):
        """Derivative identities get the loosest default tolerance."""
        s = VerificationSettings()
        assert s.tolerance(Identity.S2) == 1e-6
        assert s.tolerance(Identity.ID2) == 1e-5
        assert s.tolerance(Identity.ID1) == 1e-3

    def test_tolerance_override_by_name(self):
        """String keys override the defaults too."""
        s = VerificationSettings(tolerances={"id2": 1e-3})
        assert s.tolerance(Identity.ID2) == 1e-3
        assert s.tolerance(Identity.ID3) == 1e-5


class TestTailEstimate:
    """Tests for the dyadic tail estimator."""

    def test_power_decay(self):
        """n^-3 terms: block maxima at n = 17 and n = 33, tail B2 * N / (p - 1)."""
        n = np.arange(1, 65, dtype=float)
        tail, p = _tail_estimate(n**-3)
        expected_p = 3 * math.log2(33 / 17)
        assert p == pytest.approx(expected_p)
        assert tail == pytest.approx(33.0**-3 * 64 / (expected_p - 1))

    def test_slow_decay_is_uncertified(self):
        """Decay no faster than n^-1.05 gives an infinite tail."""
        n = np.arange(1, 65, dtype=float)
        assert _tail_estimate(n**-1.0)[0] == math.inf
        assert _tail_estimate(np.ones(64))[0] == math.inf

    def test_too_few_terms(self):
        """Fewer than four terms cannot be judged."""
        assert _tail_estimate(np.array([1.0, 0.5]))[0] == math.inf


class TestDerivative:
    """Tests for kth_derivative_at_1."""

    @pytest.mark.parametrize("k", [1, 2, 3, 4])
    def test_monomial(self, k):
        """d^k/dx^k x^k = k!."""
        result = kth_derivative_at_1(lambda x: x**k, k, 0.1)
        assert result.value.real == pytest.approx(math.factorial(k), rel=1e-9)

    def test_fractional_power(self):
        """Third derivative of x^1.3 at 1 is 1.3 * 0.3 * (-0.7)."""
        result = kth_derivative_at_1(lambda x: x**1.3, 3, 0.01)
        assert abs(result.value.real - (-0.273)) <= 1e-6
        assert result.error < 1e-5

    def test_order_zero(self):
        """k = 0 just evaluates at 1."""
        result = kth_derivative_at_1(lambda x: 5 * x, 0, 0.1)
        assert result.value == 5 and result.evaluations == 1

    def test_noisy_function_raises(self):
        """Noise below the step size blows up the error estimate."""
        def noisy(x):
            return x**3 + 1e-3 * math.sin(1e5 * x)
        with pytest.raises(DifferentiationError):
            kth_derivative_at_1(noisy, 2, 0.01, tol=1e-6)

    def test_knot_moves_step(self):
        """A stencil point on a knot enlarges h slightly."""
        def knot(x):
            return abs(x - 1.01) < 1e-9
        result = kth_derivative_at_1(lambda x: x**2, 1, 0.02, near_knot=knot)
        assert result.h != 0.02
        assert result.h == pytest.approx(0.02 * 1.001, rel=1e-9)
        assert result.value.real == pytest.approx(2.0, rel=1e-9)

    def test_knot_everywhere_raises(self):
        """If every step lands on a knot, differentiation gives up."""
        with pytest.raises(DifferentiationError):
            kth_derivative_at_1(lambda x: x, 1, 0.1, near_knot=lambda x: True)


class TestKnotDetector:
    """Tests for knot_detector."""

    def test_zeta_knots(self, zeta):
        """Ratios m^2/n^2 are knots; generic points are not."""
        near = knot_detector(zeta.phi, zeta.psi)
        assert near(1.0)
        assert near(4.0)
        assert near(9.0 / 4.0)
        assert not near(1.0 + 1e-6)
        assert not near(1.3)


class TestGSeries:
    """Tests for G-series evaluation and route handling."""

    def test_rejects_bad_n_max(self):
        """n_max must be positive."""
        with pytest.raises(ValueError):
            zeta_params(n_max=0)

    def test_side_orientation(self):
        """Side F swaps u and v in its Riesz parameters."""
        p = zeta_params(side="f").riesz_params()
        assert (p.u, p.v) == (2.3, 2.2)

    def test_hypotheses_checked(self, zeta):
        """Both routes refuse points outside the admissible region."""
        with pytest.raises(HypothesisError):
            g_series_direct(zeta, zeta_params(k=1))
        with pytest.raises(HypothesisError):
            g_series_via_riesz(zeta, zeta_params(k=1))

    def test_auto_falls_back_to_riesz(self, zeta):
        """A truncation failure on the direct route switches to riesz."""
        fallback = Estimate(1.5 + 0j, 0.0, {"route": "riesz"})
        with patch("core.gseries.g_series_direct", side_effect=TruncationError("cap")), \
                patch("core.gseries.g_series_via_riesz", return_value=fallback) as riesz:
            result = g_series(zeta, zeta_params())
        assert result is fallback
        riesz.assert_called_once()

    def test_forced_direct_does_not_fall_back(self, zeta):
        """route=direct surfaces the truncation failure."""
        with patch("core.gseries.g_series_direct", side_effect=TruncationError("cap")):
            with pytest.raises(TruncationError):
                g_series(zeta, zeta_params(route=Route.DIRECT))

    def test_absolute_floor_certifies_small_series(self, zeta):
        """A tiny series is certified against atol when the relative test cannot pass."""
        with patch("core.gseries.meijer_line", return_value=1e-30 + 0j), \
                patch("core.gseries._tail_estimate", return_value=(1e-20, 2.0)):
            with pytest.raises(TruncationError):
                g_series_direct(zeta, zeta_params(n_max=64))
            result = g_series_direct(zeta, zeta_params(n_max=64, atol=1e-15))
        assert result.error == 1e-20
        assert result.settings["n_max"] == 64

    @pytest.mark.slow
    def test_direct_on_zeta(self, zeta):
        """The direct route certifies its tail on the documented point."""
        est = g_series_direct(zeta, zeta_params())
        assert est.settings["route"] == "direct"
        assert est.error <= 1e-9 * abs(est.value)

    @pytest.mark.slow
    def test_routes_agree(self, zeta):
        """Meijer terms and Riesz sum minus P_k give the same series."""
        direct = g_series(zeta, zeta_params(route=Route.DIRECT)).value
        riesz = g_series(zeta, zeta_params(route=Route.RIESZ)).value
        assert abs(direct - riesz) <= 1e-6 * abs(riesz)

    @pytest.mark.slow
    def test_sides_agree_when_symmetric(self, zeta):
        """With phi = psi and u = v both sides coincide."""
        g = g_series(zeta, zeta_params(u=2.25, v=2.25, right=None)).value
        f = g_series(zeta, zeta_params(side=Side.F, u=2.25, v=2.25, right=None)).value
        assert abs(f - g) <= 1e-9 * abs(g)


class TestSeriesDerivative:
    """Tests for g_series_derivative route handling."""

    def test_stencil_uses_one_route(self, zeta):
        """Every stencil point is evaluated on the route chosen at x = 1."""
        routes = []

        def fake(scenario, params, threads=None):
            routes.append(params.route)
            return Estimate(complex(params.x**3), 0.0, {"route": "direct"})

        with patch("core.gseries.g_series", side_effect=fake):
            result, route = g_series_derivative(zeta, zeta_params(), h=0.08)
        assert route == "direct"
        assert routes[0] == Route.AUTO
        assert set(routes[1:]) == {Route.DIRECT}
        assert result.value.real == pytest.approx(6.0, rel=1e-9)

    def test_direct_failure_redoes_whole_stencil(self, zeta):
        """A failure off x = 1 switches every point to riesz."""
        calls = []

        def fake(scenario, params, threads=None):
            calls.append((params.route, params.x))
            if params.route == Route.DIRECT and params.x != 1.0:
                raise TruncationError("cap")
            return Estimate(complex(params.x**3), 0.0, {"route": "direct"})

        with patch("core.gseries.g_series", side_effect=fake):
            result, route = g_series_derivative(zeta, zeta_params(), h=0.08)
        assert route == "riesz"
        riesz_points = [x for r, x in calls if r == Route.RIESZ]
        assert len(riesz_points) == result.evaluations
        assert result.value.real == pytest.approx(6.0, rel=1e-9)

    def test_differentiation_is_on_assembled_series(self, zeta):
        """The derivative is delegated to the finite-difference helper."""
        fake = Estimate(1.0 + 0j, 0.0, {"route": "direct"})
        with patch("core.gseries.g_series", return_value=fake), \
                patch("core.gseries.kth_derivative_at_1", wraps=kth_derivative_at_1) as helper:
            g_series_derivative(zeta, zeta_params(), h=0.08)
        helper.assert_called_once()
        assert helper.call_args.args[1] == 3


class TestVerifyIdentity:
    """Tests for verify_identity."""

    def test_default_point(self, zeta):
        """Derivative identities default to the derivative parameter set."""
        point = IdentityPoint.default(zeta, Identity.ID1)
        assert point.h == 0.08
        assert IdentityPoint.default(zeta, Identity.ID2).right == 3.15

    def test_hypothesis_gate_before_computation(self, zeta):
        """A violated hypothesis raises before any sum is evaluated."""
        with patch("core.gseries.riesz_double_sum") as riesz:
            with pytest.raises(HypothesisError, match="k > 2γ − δ"):
                verify_identity("id2", zeta, IdentityPoint(2.2, 2.3, 1, 1.5))
        riesz.assert_not_called()

    def test_unknown_identity(self, zeta):
        """Identity names are validated."""
        with pytest.raises(ValueError):
            verify_identity("id9", zeta)

    def test_failure_is_recorded(self, zeta):
        """A quadrature failure becomes an error report, not a residual."""
        with patch("core.gseries.s2_check", side_effect=QuadratureError("boom", estimate=1.0, tol=1e-9)):
            report = verify_identity(Identity.S2, zeta)
        assert not report.passed
        assert report.lhs is None and report.rhs is None
        assert report.error_kind == "certification"
        assert "boom" in report.error

    def test_s2_zeta_passes(self, zeta):
        """The residue check holds on the documented point."""
        report = verify_identity(Identity.S2, zeta)
        assert report.error is None
        assert report.passed, report.rel_residual

    def test_settings_echoed(self, zeta):
        """Truncation tolerances are recorded in the report."""
        with patch("core.gseries.s2_check", side_effect=QuadratureError("boom")):
            report = verify_identity(Identity.S2, zeta, settings=VerificationSettings(sum_tol=1e-10))
        assert report.settings["sum_tol"] == 1e-10
        assert report.parameters["k"] == 3

    @pytest.mark.slow
    @pytest.mark.parametrize("which", [Identity.ID2, Identity.ID3, Identity.EQUALITY1])
    def test_sum_identities_zeta(self, zeta, which):
        """Sum identities hold for zeta."""
        report = verify_identity(which, zeta)
        assert report.passed, (report.error, report.rel_residual)

    @pytest.mark.slow
    @pytest.mark.parametrize("which", [Identity.EXPRESION1, Identity.EXPRESSION2])
    def test_derivative_identities_zeta(self, zeta, which):
        """Derivative identities hold for zeta within 1e-3."""
        report = verify_identity(which, zeta)
        assert report.passed, (report.error, report.rel_residual)

    @pytest.mark.slow
    def test_id1_zeta(self, zeta):
        """id1 holds for zeta.

        Differentiates both G-series, so it is the most expensive check:
        roughly ten minutes on a single core.
        """
        report = verify_identity(Identity.ID1, zeta)
        assert report.passed, (report.error, report.rel_residual)

    @pytest.mark.slow
    def test_id2_tau(self, tau):
        """The Riesz identity holds for tau."""
        report = verify_identity(Identity.ID2, tau)
        assert report.passed, (report.error, report.rel_residual)

    @pytest.mark.parametrize("exc", [OverflowError("math range error"), ZeroDivisionError("division by zero"),
                                     FloatingPointError("overflow encountered")])
    def test_floating_point_failure_is_recorded(self, zeta, exc):
        """Overflow and division by zero become error reports of kind numerical."""
        with patch("core.gseries._compute", side_effect=exc):
            report = verify_identity(Identity.ID2, zeta)
        assert report.lhs is None and not report.passed
        assert report.error_kind == "numerical"
        assert report.error.startswith(type(exc).__name__)

    def test_series_floor_sized_from_other_side(self, zeta):
        """The G-series absolute floor is the part tolerance times the larger other-side term."""
        with patch("core.gseries.riesz_double_sum", return_value=Estimate(2.0 + 0j, 0.0, {"n_outer": 5})), \
                patch("core.gseries.p_k_contour", return_value=Estimate(3.0 + 0j, 0.0, {}, {"right": 3.0})), \
                patch("core.gseries.g_series_direct",
                      return_value=Estimate(-1.0 + 0j, 0.0, {"n_max": 64})) as series:
            report = verify_identity(Identity.ID2, zeta)
        params = series.call_args.args[1]
        assert params.atol == pytest.approx(0.1 * 1e-5 * 3.0)
        assert report.passed
        assert report.settings["quad_tol"] == pytest.approx(1e-6)

    def test_part_tolerances(self):
        """Each certified part gets budget times the identity tolerance unless quad_tol is set."""
        settings = VerificationSettings()
        assert settings.part_tolerance(Identity.ID2) == pytest.approx(1e-6)
        assert settings.quadrature_tolerance(Identity.EXPRESION1) == pytest.approx(1e-4)
        assert VerificationSettings(quad_tol=1e-9).quadrature_tolerance(Identity.ID2) == 1e-9


class TestScenarioIdentities:
    """Every identity on the sigma_3 and tau parameter sets."""

    @pytest.mark.slow
    @pytest.mark.parametrize("which", [Identity.S2, Identity.ID2, Identity.ID3, Identity.EQUALITY1])
    def test_sum_identities_sigma3(self, sigma3, which):
        """Sum identities and the residue check hold for sigma_3."""
        report = verify_identity(which, sigma3)
        assert report.passed, (report.error, report.rel_residual)

    @pytest.mark.slow
    @pytest.mark.parametrize("which", [Identity.EXPRESION1, Identity.EXPRESSION2, Identity.ID1])
    def test_derivative_identities_sigma3(self, sigma3, which):
        """Derivative identities hold for sigma_3 within 1e-3."""
        report = verify_identity(which, sigma3)
        assert report.passed, (report.error, report.rel_residual)

    @pytest.mark.slow
    def test_s2_tau(self, tau):
        """The residue check holds for tau, which has no poles."""
        report = verify_identity(Identity.S2, tau)
        assert report.passed, (report.error, report.rel_residual)

    @pytest.mark.slow
    @pytest.mark.parametrize("which", [Identity.EXPRESION1, Identity.EXPRESSION2, Identity.ID1])
    def test_derivative_identities_tau(self, tau, which):
        """Derivative identities hold for tau within 1e-3."""
        report = verify_identity(which, tau)
        assert report.passed, (report.error, report.rel_residual)
