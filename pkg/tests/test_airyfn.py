import math

import numpy as np
import pytest
from scipy.integrate import quad

from mirrorfall.airyfn import (AIRY_MAX_ARG, AiryRangeError, airy,
                               airy_solution_check, airy_values, wronskian)


def closed_form_origin():
    ai0 = 3.0 ** (-2.0 / 3.0) / math.gamma(2.0 / 3.0)
    bi0 = 3.0 ** (-1.0 / 6.0) / math.gamma(2.0 / 3.0)
    return ai0, bi0


class TestOriginValues:
    def test_ai0_bi0(self):
        ai0, bi0 = closed_form_origin()
        p = airy(0.0)
        assert p.ai == pytest.approx(ai0, abs=1e-14)
        assert p.bi == pytest.approx(bi0, abs=1e-14)
        assert p.ai == pytest.approx(0.3550280539, abs=1e-10)
        assert p.bi == pytest.approx(0.6149266274, abs=1e-10)

    def test_origin_derivatives(self):
        p = airy(0.0)
        assert p.ai_prime == pytest.approx(
            -(3.0 ** (-1.0 / 3.0)) / math.gamma(1.0 / 3.0), abs=1e-14)
        assert p.bi_prime == pytest.approx(
            3.0 ** (1.0 / 6.0) / math.gamma(1.0 / 3.0), abs=1e-14)


def rotated_contour_ai(x: float) -> float:
    """Independent oracle: the oscillatory integral representation

        Ai(x) = (1/pi) Re int_0^inf exp(i(t^3/3 + x t)) dt

    evaluated on the ray t = u e^{i pi/6}, where the integrand decays like
    exp(-u^3/3) and adaptive quadrature converges.
    """
    rot = complex(math.cos(math.pi / 6.0), math.sin(math.pi / 6.0))

    def integrand_re(u):
        t = rot * u
        val = rot * np.exp(1j * (t ** 3 / 3.0 + x * t))
        return val.real

    upper = 12.0 + 2.0 * math.sqrt(abs(x))
    val, err = quad(integrand_re, 0.0, upper, limit=400, epsabs=1e-13,
                    epsrel=1e-13)
    assert err < 1e-11
    return val / math.pi


class TestAgainstIntegralRepresentation:
    @pytest.mark.parametrize("x", [-5.0, -2.0, 0.7, 3.0])
    def test_ai_matches_quadrature(self, x):
        assert airy(x).ai == pytest.approx(rotated_contour_ai(x), abs=1e-9)


class TestWronskian:
    def test_identity_at_200_points(self):
        rng = np.random.default_rng(2024)
        xs = rng.uniform(-30.0, 5.0, 200)
        w = wronskian(airy(xs))
        assert np.max(np.abs(w * np.pi - 1.0)) < 1e-10

    def test_identity_deep_and_high(self):
        xs = np.array([-250.0, -120.0, -45.0, 20.0, 50.0, 79.0])
        w = wronskian(airy(xs))
        assert np.max(np.abs(w * np.pi - 1.0)) < 1e-10


class TestOdeResidual:
    def test_residual_at_origin(self):
        r = airy_solution_check(0.0, airy(0.0), 1e-3)
        assert r <= 1e-6

    def test_residual_oscillatory(self):
        r = airy_solution_check(-10.0, airy(-10.0), 1e-3)
        assert r <= 1e-4

    @pytest.mark.parametrize("x", [-10.0, -3.0, 1.5])
    def test_second_order_decay(self, x):
        p = airy(x)
        r1 = airy_solution_check(x, p, 8e-3)
        r2 = airy_solution_check(x, p, 4e-3)
        assert r2 / r1 == pytest.approx(0.25, abs=0.05)

    def test_bi_satisfies_ode_too(self):
        # same central-difference check applied to Bi
        for x in (-6.0, 0.5, 4.0):
            h = 1e-3
            lo, mid, hi = airy(x - h), airy(x), airy(x + h)
            resid = abs((hi.bi - 2 * mid.bi + lo.bi) / h ** 2 - x * mid.bi)
            assert resid < 1e-4 * max(1.0, abs(mid.bi))

    def test_step_out_of_range(self):
        with pytest.raises(ValueError):
            airy_solution_check(0.0, airy(0.0), 1e-5)


class TestShapeAndRange:
    def test_ai_positive_decreasing_for_positive_x(self):
        xs = np.linspace(0.0, 10.0, 300)
        ai = airy(xs).ai
        assert np.all(ai > 0)
        assert np.all(np.diff(ai) < 0)

    def test_bi_increasing_for_positive_x(self):
        xs = np.linspace(0.0, 10.0, 300)
        bi = airy(xs).bi
        assert np.all(np.diff(bi) > 0)

    def test_oscillation_below_zero(self):
        xs = np.linspace(-30.0, -1.0, 4000)
        ai = airy(xs).ai
        signs = np.sign(ai)
        assert np.sum(np.abs(np.diff(signs)) > 0) > 10

    def test_range_guard(self):
        with pytest.raises(AiryRangeError):
            airy(AIRY_MAX_ARG + 1.0)
        airy(-3000.0)  # deep negative arguments are allowed

    def test_array_shapes_and_values_api(self):
        x = np.array([[-3.0, 0.0], [2.0, -20.0]])
        p = airy(x)
        assert p.ai.shape == x.shape
        a, b = airy_values(x)
        assert np.array_equal(a, p.ai)
        assert np.array_equal(b, p.bi)


class TestSeamAccuracy:
    @pytest.mark.parametrize("edge", [-9.0, 9.0])
    def test_both_branches_match_reference_at_seam(self, edge):
        # ladder side and asymptotic side must both hit the reference values
        mp = pytest.importorskip("mpmath")
        mp.mp.dps = 30
        for x in (edge - math.copysign(1e-6, edge),
                  edge + math.copysign(1e-6, edge)):
            p = airy(x)
            for ours, ref in ((p.ai, mp.airyai(x)),
                              (p.bi, mp.airybi(x)),
                              (p.ai_prime, mp.airyai(x, 1)),
                              (p.bi_prime, mp.airybi(x, 1))):
                assert ours == pytest.approx(float(ref), rel=1e-11)

    def test_accuracy_contract_sample(self):
        # Ai absolute error on [-30, 10]; Bi relative error on [-30, 5]
        mp = pytest.importorskip("mpmath")
        mp.mp.dps = 30
        rng = np.random.default_rng(5)
        for x in rng.uniform(-30.0, 10.0, 25):
            assert airy(float(x)).ai == pytest.approx(
                float(mp.airyai(float(x))), abs=1e-10)
        for x in rng.uniform(-30.0, 5.0, 25):
            ref = float(mp.airybi(float(x)))
            # relative to the oscillation envelope where Bi crosses zero
            scale = max(abs(ref), 0.01)
            assert abs(airy(float(x)).bi - ref) <= 1e-8 * scale
