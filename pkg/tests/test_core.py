import numpy as np
import pytest

from mirrorfall.core import (ConfigurationError, DomainError, Grid,
                             PacketSpec, PhysicalParams, assemble_potential,
                             crossover_ratio, gravitational_length,
                             grid_with_spacing, make_gaussian, params_preset,
                             SODIUM_MASS)


@pytest.fixture
def sodium():
    return params_preset("sodium")


class TestGravitationalLength:
    def test_sodium_value(self, sodium):
        # quoted scale for sodium is 0.73 um
        assert gravitational_length(sodium) == pytest.approx(0.73, rel=1e-2)

    def test_hydrogen_value(self):
        hydrogen = params_preset("hydrogen")
        assert hydrogen.mass == pytest.approx(SODIUM_MASS / 23.0)
        assert gravitational_length(hydrogen) == pytest.approx(5.86, rel=1e-2)

    def test_mass_gravity_scaling_symmetry(self, sodium):
        # depends only on m^2 g: (m, g) -> (alpha m, g/alpha^2) is invariant
        for alpha in (0.5, 2.0, 7.3):
            scaled = PhysicalParams(mass=alpha * sodium.mass,
                                    gravity=sodium.gravity / alpha ** 2)
            assert gravitational_length(scaled) == pytest.approx(
                gravitational_length(sodium), rel=1e-14)

    def test_no_gravity_is_domain_error(self, sodium):
        with pytest.raises(DomainError):
            gravitational_length(sodium.with_(gravity=0.0))


class TestCrossoverRatio:
    def test_reference_value(self, sodium):
        eps = crossover_ratio(PacketSpec(z0=-7.0, sigma=0.3), sodium)
        # sigma / sqrt(l_g^3/7) with l_g = 0.73:  0.3 / 0.2357 = 1.27
        assert eps == pytest.approx(1.27, abs=0.01)

    def test_borderline_sigma(self, sodium):
        lg = gravitational_length(sodium)
        sigma = np.sqrt(lg ** 3 / 7.0)
        eps = crossover_ratio(PacketSpec(z0=-7.0, sigma=sigma), sodium)
        assert eps == pytest.approx(1.0, rel=1e-12)

    def test_thin_limit(self, sodium):
        eps = crossover_ratio(PacketSpec(z0=-7.0, sigma=1e-9), sodium)
        assert eps < 1e-8

    def test_centered_packet_rejected(self, sodium):
        with pytest.raises(DomainError):
            crossover_ratio(PacketSpec(z0=0.0, sigma=0.3), sodium)


class TestGrid:
    def test_spacing(self):
        g = Grid(-10.0, 10.0, 201)
        assert g.dz == pytest.approx(0.1)
        assert len(g.z) == 201
        assert g.z[0] == -10.0 and g.z[-1] == 10.0

    def test_validation(self):
        with pytest.raises(ConfigurationError):
            Grid(1.0, -1.0, 100)
        with pytest.raises(ConfigurationError):
            Grid(0.0, 1.0, 1)

    def test_grid_with_spacing_covers_request(self):
        g = grid_with_spacing(-5.0, 5.0, 0.3)
        assert g.z_min == -5.0
        assert g.z_max >= 5.0
        assert g.dz <= 0.3 + 1e-15


class TestMakeGaussian:
    def test_peak_amplitude(self):
        spec = PacketSpec(z0=-7.0, sigma=0.3)
        grid = Grid(-12.0, -2.0, 2001)
        field = make_gaussian(spec, grid)
        i0 = np.argmin(np.abs(grid.z - spec.z0))
        assert abs(field.samples[i0]) == pytest.approx(
            (2 * np.pi * spec.sigma ** 2) ** -0.25, rel=1e-10)

    def test_normalized(self):
        field = make_gaussian(PacketSpec(-7.0, 0.3), Grid(-12.0, -2.0, 2001))
        assert field.norm() == pytest.approx(1.0, abs=1e-6)
        assert field.time == 0.0

    def test_symmetric_when_at_rest(self):
        spec = PacketSpec(z0=-5.0, sigma=0.4)
        grid = Grid(-10.0, 0.0, 2001)  # symmetric around z0
        field = make_gaussian(spec, grid)
        assert np.allclose(field.samples, field.samples[::-1])
        assert np.allclose(field.samples.imag, 0.0)

    def test_tail_at_edge_rejected(self):
        with pytest.raises(ConfigurationError, match="upper"):
            make_gaussian(PacketSpec(z0=-1.0, sigma=0.5), Grid(-8.0, 0.0, 801))
        with pytest.raises(ConfigurationError, match="lower"):
            make_gaussian(PacketSpec(z0=-7.0, sigma=0.5), Grid(-8.0, 0.0, 801))


class TestAssemblePotential:
    def test_pure_gravity_value(self, sodium):
        grid = Grid(-8.0, -6.0, 3)
        v = assemble_potential(sodium, grid)
        # m g z at z = -7
        assert v[1] == pytest.approx(sodium.mass * 9.8 * -7.0, rel=1e-12)
        assert v[1] == pytest.approx(-24.81, abs=0.01)

    def test_barrier_band(self, sodium):
        params = sodium.with_(barrier_height=1e3, barrier_width=10.0)
        grid = Grid(-20.0, 20.0, 4001)
        v = assemble_potential(params, grid)
        inside = (grid.z >= 0.0) & (grid.z <= 10.0)
        gravity = params.mass * params.gravity * grid.z
        assert np.allclose(v[inside], gravity[inside] + 1e3)
        assert np.allclose(v[~inside], gravity[~inside])

    def test_gp_term_at_center(self, sodium):
        # interaction term at the packet peak is gp (2 pi sigma^2)^(-1/2)
        spec = PacketSpec(z0=-7.0, sigma=0.3)
        grid = Grid(-12.0, -2.0, 4001)
        field = make_gaussian(spec, grid)
        params = sodium.with_(gp_strength=25.0)
        v = assemble_potential(params, grid, field)
        v0 = assemble_potential(sodium, grid)
        i0 = np.argmin(np.abs(grid.z - spec.z0))
        assert (v[i0] - v0[i0]) == pytest.approx(
            25.0 / np.sqrt(2 * np.pi * spec.sigma ** 2), rel=1e-9)

    def test_zero_field_adds_nothing(self, sodium):
        from mirrorfall.core import WaveField
        grid = Grid(-5.0, 5.0, 101)
        params = sodium.with_(gp_strength=25.0)
        field = WaveField(grid, np.zeros(101, dtype=complex))
        assert np.array_equal(assemble_potential(params, grid, field),
                              assemble_potential(sodium, grid))

    def test_pure_and_deterministic(self, sodium):
        params = sodium.with_(barrier_height=1e3)
        grid = Grid(-30.0, 15.0, 1501)
        a = assemble_potential(params, grid)
        b = assemble_potential(params, grid)
        assert np.array_equal(a, b)

    def test_grid_mismatch_rejected(self, sodium):
        field = make_gaussian(PacketSpec(-7.0, 0.3), Grid(-12.0, -2.0, 2001))
        with pytest.raises(ConfigurationError):
            assemble_potential(sodium.with_(gp_strength=1.0),
                               Grid(-12.0, -2.0, 1001), field)


class TestParams:
    def test_preset_unknown(self):
        with pytest.raises(ConfigurationError, match="sodium"):
            params_preset("plutonium")

    def test_validation(self):
        with pytest.raises(ConfigurationError):
            PhysicalParams(mass=-1.0)
        with pytest.raises(ConfigurationError):
            PhysicalParams(mass=1.0, gravity=-1.0)
        with pytest.raises(ConfigurationError):
            PhysicalParams(mass=1.0, barrier_width=0.0)

    def test_immutability(self):
        p = params_preset("sodium")
        with pytest.raises(Exception):
            p.mass = 2.0
        field = make_gaussian(PacketSpec(-7.0, 0.3), Grid(-12.0, -2.0, 2001))
        with pytest.raises(ValueError):
            field.samples[0] = 1.0
