import numpy as np
import pytest

from mirrorfall.analytic import (FreeFallPacket, ImagePacket,
                                 accelerated_plane_wave, admixture_factor,
                                 free_fall_value, fringe_spacing,
                                 image_packet_value, modulus_closed_form,
                                 visibility_bound)
from mirrorfall.core import (DomainError, Grid, PacketSpec, make_gaussian,
                             params_preset)


@pytest.fixture
def sodium():
    return params_preset("sodium")


def schrodinger_residual(fval, z, t, hz, ht, params):
    """|i d_t psi - H psi| with central differences (gravity-only H)."""
    m, g = params.mass, params.gravity
    psi_t = (fval(z, t + ht) - fval(z, t - ht)) / (2.0 * ht)
    lap = (fval(z + hz, t) - 2.0 * fval(z, t) + fval(z - hz, t)) / hz ** 2
    return np.abs(1j * psi_t + lap / (2.0 * m) - m * g * z * fval(z, t))


class TestAcceleratedPlaneWave:
    def test_unit_modulus_everywhere(self, sodium):
        rng = np.random.default_rng(0)
        z = rng.uniform(-200.0, 50.0, 500)
        t = rng.uniform(0.0, 30.0)
        k = rng.uniform(-10.0, 10.0)
        assert np.max(np.abs(np.abs(
            accelerated_plane_wave(k, z, t, sodium)) - 1.0)) < 1e-13

    def test_reduces_to_plane_wave_at_t0(self, sodium):
        z = np.linspace(-5.0, 5.0, 101)
        got = accelerated_plane_wave(2.5, z, 0.0, sodium)
        assert np.allclose(got, np.exp(1j * 2.5 * z), atol=1e-14)

    def test_pure_time_phase_at_origin(self, sodium):
        t = 3.0
        expected = np.exp(-1j * sodium.mass * sodium.gravity ** 2 * t ** 3 / 6.0)
        assert accelerated_plane_wave(0.0, 0.0, t, sodium) == pytest.approx(expected)

    def test_solves_schrodinger_equation(self, sodium):
        # step sizes chosen so second-order truncation sits below 1e-6
        rng = np.random.default_rng(42)
        worst = 0.0
        for _ in range(50):
            k = rng.uniform(-2.0, 2.0)
            z = rng.uniform(-2.0, 2.0)
            t = rng.uniform(0.05, 0.3)
            f = lambda zz, tt: accelerated_plane_wave(k, zz, tt, sodium)
            worst = max(worst, schrodinger_residual(f, z, t, 1e-4, 2e-5, sodium))
        assert worst <= 1e-6


class TestFreeFall:
    def test_matches_initial_packet(self, sodium):
        spec = PacketSpec(z0=-7.0, sigma=0.3, q=1.5)
        grid = Grid(-12.0, -2.0, 2001)
        field = make_gaussian(spec, grid)
        vals = free_fall_value(FreeFallPacket(spec, sodium), grid.z, 0.0)
        assert np.max(np.abs(vals - field.samples)) < 1e-13

    def test_envelope_center_follows_trajectory(self, sodium):
        spec = PacketSpec(z0=-7.0, sigma=0.3)
        p = FreeFallPacket(spec, sodium)
        t = 4.0
        z = np.linspace(-160.0, -20.0, 20001)
        peak = z[np.argmax(np.abs(free_fall_value(p, z, t)))]
        assert peak == pytest.approx(-7.0 - 0.5 * 9.8 * 16.0, abs=0.05)
        assert peak == pytest.approx(-85.4, abs=0.05)

    def test_effective_width_value(self, sodium):
        p = FreeFallPacket(PacketSpec(z0=-7.0, sigma=0.35), sodium)
        # sqrt(sigma^4 + (t/2m)^2)/sigma at t = 4 ms
        assert p.effective_width(4.0) == pytest.approx(15.8, abs=0.05)

    @pytest.mark.parametrize("t", [0.0, 1.0, 2.0, 4.0, 8.0])
    def test_norm_conserved(self, sodium, t):
        spec = PacketSpec(z0=-7.0, sigma=0.3)
        p = FreeFallPacket(spec, sodium)
        c, w = p.center(t), p.effective_width(t)
        z = np.linspace(c - 14.0 * w, c + 14.0 * w, 200001)
        norm = np.trapezoid(np.abs(free_fall_value(p, z, t)) ** 2, z)
        assert norm == pytest.approx(1.0, abs=1e-6)

    def test_equivalence_principle(self, sodium):
        # |psi_g(z, t)| equals |psi_0(z + g t^2/2, t)| pointwise
        spec = PacketSpec(z0=-7.0, sigma=0.3)
        t = 3.0
        z = np.linspace(-120.0, -20.0, 5001)
        with_g = free_fall_value(FreeFallPacket(spec, sodium), z, t)
        no_g = free_fall_value(
            FreeFallPacket(spec, sodium.with_(gravity=0.0)),
            z + 0.5 * sodium.gravity * t * t, t)
        assert np.max(np.abs(np.abs(with_g) - np.abs(no_g))) < 1e-12

    def test_solves_schrodinger_equation(self, sodium):
        spec = PacketSpec(z0=-7.0, sigma=0.35)
        p = FreeFallPacket(spec, sodium)
        f = lambda z, t: free_fall_value(p, z, t)
        rng = np.random.default_rng(1)
        for _ in range(20):
            t = rng.uniform(0.5, 3.0)
            z = FreeFallPacket(spec, sodium).center(t) + rng.uniform(-10, 10)
            r = schrodinger_residual(f, z, t, 1e-3, 1e-3, sodium)
            scale = abs(f(z, t))
            assert r < 5e-3 * max(scale, 1e-3)

    def test_negative_time_rejected(self, sodium):
        p = FreeFallPacket(PacketSpec(-7.0, 0.3), sodium)
        with pytest.raises(DomainError):
            free_fall_value(p, -7.0, -1.0)


class TestImagePacket:
    def test_vanishes_at_mirror_at_t0(self, sodium):
        for q in (0.0, 2.0):
            p = ImagePacket(FreeFallPacket(PacketSpec(-7.0, 0.3, q), sodium))
            peak = (2 * np.pi * 0.09) ** -0.25
            assert abs(image_packet_value(p, 0.0, 0.0)) < 1e-10 * peak

    def test_matches_free_packet_away_from_mirror(self, sodium):
        spec = PacketSpec(z0=-7.0, sigma=0.3)
        p = ImagePacket(FreeFallPacket(spec, sodium))
        grid = Grid(-12.0, -2.0, 1001)
        direct = make_gaussian(spec, grid)
        image_tail = np.exp(-spec.z0 ** 2 / (2.0 * spec.sigma ** 2))
        diff = np.max(np.abs(image_packet_value(p, grid.z, 0.0)
                             - direct.samples))
        assert diff <= 2.0 * image_tail + 1e-15

    def test_antisymmetric_at_t0(self, sodium):
        p = ImagePacket(FreeFallPacket(PacketSpec(-7.0, 0.3), sodium))
        z = np.linspace(-10.0, 10.0, 501)
        left = image_packet_value(p, z, 0.0)
        right = image_packet_value(p, -z, 0.0)
        assert np.max(np.abs(left + right)) < 1e-14

    def test_plain_solves_equation_second_order(self, sodium):
        # the residual is pure finite-difference truncation: O(h^2)
        p = ImagePacket(FreeFallPacket(PacketSpec(-7.0, 0.3), sodium))
        f = lambda z, t: image_packet_value(p, z, t)
        rng = np.random.default_rng(3)
        pts = [(rng.uniform(-100.0, -5.0), rng.uniform(0.5, 3.5))
               for _ in range(12)]
        r_coarse = max(schrodinger_residual(f, z, t, 4e-3, 4e-3, sodium)
                       for z, t in pts)
        r_fine = max(schrodinger_residual(f, z, t, 2e-3, 2e-3, sodium)
                     for z, t in pts)
        assert r_fine / r_coarse == pytest.approx(0.25, abs=0.08)

    def test_corrected_cancels_at_mirror(self, sodium):
        base = FreeFallPacket(PacketSpec(-7.0, 0.3), sodium)
        plain = ImagePacket(base, corrected=False)
        corr = ImagePacket(base, corrected=True)
        t = 4.0
        assert abs(image_packet_value(corr, 0.0, t)) \
            < abs(image_packet_value(plain, 0.0, t))
        assert abs(image_packet_value(corr, 0.0, t)) < 1e-14

    def test_admixture_factor_limit_modulus(self, sodium):
        # |lambda| settles to exp(-eps^2) = exp(-2 m^2 g sigma^2 |z0|)
        spec = PacketSpec(z0=-7.0, sigma=0.3)
        p = ImagePacket(FreeFallPacket(spec, sodium), corrected=True)
        m, g = sodium.mass, sodium.gravity
        expected = np.exp(2.0 * m * m * g * spec.sigma ** 2 * spec.z0)
        assert abs(admixture_factor(p, 30.0)) == pytest.approx(expected, rel=1e-3)
        assert abs(admixture_factor(p, 1e-6)) == pytest.approx(1.0, abs=1e-6)


class TestModulusClosedForm:
    def test_fringe_spacing_value(self, sodium):
        spec = PacketSpec(z0=-7.0, sigma=0.3)
        assert fringe_spacing(spec, sodium, 4.0) == pytest.approx(4.96, abs=0.01)

    def test_agrees_with_image_packet_on_envelope(self, sodium):
        spec = PacketSpec(z0=-7.0, sigma=0.3)
        p = FreeFallPacket(spec, sodium)
        t = 4.0
        c, w = p.center(t), p.effective_width(t)
        z = np.linspace(c - 3 * w, min(c + 3 * w, -0.5), 6000)
        exact = np.abs(image_packet_value(ImagePacket(p), z, t))
        closed = modulus_closed_form(spec, sodium, z, t)
        assert np.max(np.abs(closed - exact)) / np.max(exact) <= 0.02

    def test_minima_coincide_with_image_minima(self, sodium):
        from scipy.signal import argrelmin
        spec = PacketSpec(z0=-7.0, sigma=0.3)
        p = FreeFallPacket(spec, sodium)
        t = 4.0
        c, w = p.center(t), p.effective_width(t)
        dz = 0.05
        z = np.arange(c - 2 * w, min(c + 2 * w, -0.5), dz)
        exact = np.abs(image_packet_value(ImagePacket(p), z, t))
        closed = modulus_closed_form(spec, sodium, z, t)
        m_ex = z[argrelmin(exact, order=3)[0]]
        m_cl = z[argrelmin(closed, order=3)[0]]
        assert len(m_ex) == len(m_cl)
        assert np.max(np.abs(m_ex - m_cl)) <= dz

    def test_detected_spacing_matches_prediction(self, sodium):
        from scipy.signal import argrelmin
        spec = PacketSpec(z0=-7.0, sigma=0.3)
        t = 4.0
        p = FreeFallPacket(spec, sodium)
        c, w = p.center(t), p.effective_width(t)
        z = np.linspace(c - 2 * w, min(c + 2 * w, -0.5), 30000)
        closed = modulus_closed_form(spec, sodium, z, t)
        minima = z[argrelmin(closed, order=5)[0]]
        assert np.mean(np.diff(minima)) == pytest.approx(
            fringe_spacing(spec, sodium, t), rel=0.01)

    def test_validity_bound_enforced(self, sodium):
        spec = PacketSpec(z0=-7.0, sigma=0.3)
        with pytest.raises(DomainError, match="validity"):
            modulus_closed_form(spec, sodium, -10.0, 0.1)
        with pytest.raises(DomainError, match="q = 0"):
            modulus_closed_form(PacketSpec(-7.0, 0.3, q=1.0), sodium, -10.0, 4.0)


class TestVisibilityBound:
    def test_thin_packet_value(self, sodium):
        theta, visible = visibility_bound(PacketSpec(-7.0, 0.3), sodium)
        assert theta == pytest.approx(0.404, abs=0.002)
        assert visible

    def test_wide_packet_value(self, sodium):
        theta, visible = visibility_bound(PacketSpec(-7.0, 2.0), sodium)
        assert theta == pytest.approx(17.9, abs=0.1)
        assert not visible

    def test_boundary_case(self, sodium):
        lg = sodium.l_g
        sigma = 2.0 * np.sqrt(lg ** 3 / 7.0)
        theta, _ = visibility_bound(PacketSpec(-7.0, sigma), sodium)
        assert theta == pytest.approx(1.0, rel=1e-12)
