"""Unit conventions, physical parameters, spatial grid, and the wavefield container.

Units throughout the package: hbar = 1, lengths in micrometers (um), times in
milliseconds (ms).  Masses are then hbar-scaled, in ms/um^2, and energies /
potential strengths are rates, in 1/ms.  Gravity defaults to 9.8 um/ms^2.
"""

from __future__ import annotations

from dataclasses import dataclass, replace
import numpy as np

DEFAULT_GRAVITY = 9.8  # um / ms^2


class ConfigurationError(ValueError):
    """Inputs cannot form a consistent simulation setup."""


class DomainError(ValueError):
    """An operation was evaluated outside its domain of validity."""


@dataclass(frozen=True)
class PhysicalParams:
    """Particle, gravity, mirror and mean-field interaction parameters.

    mass            hbar-scaled atomic mass, ms/um^2
    gravity         um/ms^2
    gp_strength     cubic mean-field coupling, um/ms per unit |psi|^2
    barrier_height  1/ms; negative values model a well
    barrier_width   um
    barrier_base    um, lower edge of the mirror
    """

    mass: float
    gravity: float = DEFAULT_GRAVITY
    gp_strength: float = 0.0
    barrier_height: float = 0.0
    barrier_width: float = 10.0
    barrier_base: float = 0.0

    def __post_init__(self):
        if self.mass <= 0:
            raise ConfigurationError(f"mass must be positive, got {self.mass}")
        if self.gravity < 0:
            raise ConfigurationError(f"gravity must be >= 0, got {self.gravity}")
        if self.barrier_width <= 0:
            raise ConfigurationError(
                f"barrier_width must be positive, got {self.barrier_width}")

    @property
    def l_g(self) -> float:
        return gravitational_length(self)

    def with_(self, **kw) -> "PhysicalParams":
        return replace(self, **kw)


# Sodium mass fixed by inverting the gravitational length scale against
# l_g = 0.73 um; hydrogen scaled by the mass ratio 23.
SODIUM_MASS = 0.3617      # ms/um^2  (hbar/m ~ 2.76 um^2/ms)
HYDROGEN_MASS = SODIUM_MASS / 23.0

PARAM_PRESETS = {
    "sodium": SODIUM_MASS,
    "hydrogen": HYDROGEN_MASS,
}


def params_preset(name: str, **overrides) -> PhysicalParams:
    """Named parameter presets, addressable from CLI configs."""
    try:
        mass = PARAM_PRESETS[name]
    except KeyError:
        raise ConfigurationError(
            f"unknown parameter preset {name!r}; available: "
            + ", ".join(sorted(PARAM_PRESETS))) from None
    return PhysicalParams(mass=mass, **overrides)


def gravitational_length(params: PhysicalParams) -> float:
    """l_g = (2 m^2 g)^(-1/3), the only intrinsic length of a particle in a
    uniform field.  About 0.73 um for sodium."""
    if params.gravity <= 0:
        raise DomainError("no gravitational scale: gravity <= 0")
    return (2.0 * params.mass ** 2 * params.gravity) ** (-1.0 / 3.0)


@dataclass(frozen=True)
class Grid:
    """Uniform 1D spatial mesh on [z_min, z_max] with n_points nodes."""

    z_min: float
    z_max: float
    n_points: int

    def __post_init__(self):
        if not self.z_min < self.z_max:
            raise ConfigurationError(
                f"need z_min < z_max, got [{self.z_min}, {self.z_max}]")
        if self.n_points < 2:
            raise ConfigurationError(f"n_points must be >= 2, got {self.n_points}")
        z = np.linspace(self.z_min, self.z_max, self.n_points)
        z.flags.writeable = False
        object.__setattr__(self, "_z", z)

    @property
    def dz(self) -> float:
        return (self.z_max - self.z_min) / (self.n_points - 1)

    @property
    def z(self) -> np.ndarray:
        return self._z


def grid_with_spacing(z_min: float, z_max: float, dz: float) -> Grid:
    """Grid covering at least [z_min, z_max] with spacing <= dz."""
    n = int(np.ceil((z_max - z_min) / dz)) + 1
    return Grid(z_min, z_min + (n - 1) * dz, n)


@dataclass(frozen=True)
class WaveField:
    """Complex amplitude samples (units um^-1/2) on a grid at one instant."""

    grid: Grid
    samples: np.ndarray
    time: float = 0.0

    def __post_init__(self):
        s = np.asarray(self.samples, dtype=np.complex128)
        if s.shape != (self.grid.n_points,):
            raise ConfigurationError(
                f"samples shape {s.shape} does not match grid "
                f"({self.grid.n_points} points)")
        if not np.all(np.isfinite(s.view(np.float64))):
            raise ConfigurationError("samples contain non-finite values")
        s = s.copy()
        s.flags.writeable = False
        object.__setattr__(self, "samples", s)

    def norm(self) -> float:
        """Trapezoid-integrated total probability."""
        return float(np.trapezoid(np.abs(self.samples) ** 2, dx=self.grid.dz))

    def abs2(self) -> np.ndarray:
        return np.abs(self.samples) ** 2


@dataclass(frozen=True)
class PacketSpec:
    """Initial Gaussian: center z0 (um), width parameter sigma (um), mean
    momentum q (1/um)."""

    z0: float
    sigma: float
    q: float = 0.0

    def __post_init__(self):
        if self.sigma <= 0:
            raise ConfigurationError(f"sigma must be positive, got {self.sigma}")


def crossover_ratio(spec: PacketSpec, params: PhysicalParams) -> float:
    """eps = sigma / sqrt(l_g^3 / |z0|).

    Small eps predicts visible interference fringes below the mirror; eps of
    order one and larger predicts a blurred profile.
    """
    if spec.z0 == 0:
        raise DomainError("crossover ratio undefined for z0 = 0")
    lg = gravitational_length(params)
    return spec.sigma / np.sqrt(lg ** 3 / abs(spec.z0))


GAUSSIAN_EDGE_TOL = 1e-8


def make_gaussian(spec: PacketSpec, grid: Grid) -> WaveField:
    """Minimal-uncertainty packet A exp(iq(z-z0)) exp(-(z-z0)^2/(4 sigma^2)),
    A = (2 pi sigma^2)^(-1/4), at time 0."""
    z = grid.z
    amp = (2.0 * np.pi * spec.sigma ** 2) ** (-0.25)
    envelope = amp * np.exp(-((z - spec.z0) ** 2) / (4.0 * spec.sigma ** 2))
    for edge, name in ((0, "lower"), (-1, "upper")):
        if envelope[edge] > GAUSSIAN_EDGE_TOL * amp:
            raise ConfigurationError(
                f"packet tail exceeds {GAUSSIAN_EDGE_TOL:g} x peak at the "
                f"{name} grid edge z = {z[edge]:g} um; widen the grid")
    samples = envelope * np.exp(1j * spec.q * (z - spec.z0))
    field = WaveField(grid, samples, time=0.0)
    n = field.norm()
    if abs(n - 1.0) > 1e-6:
        raise ConfigurationError(
            f"grid too coarse for the packet: trapezoid norm {n!r} deviates "
            "from 1 by more than 1e-6")
    return field


def barrier_mask(params: PhysicalParams, grid: Grid) -> np.ndarray:
    """Boolean mask of grid points inside the mirror slab.

    Edges snap to the nearest grid point; the slab occupies
    [barrier_base, barrier_base + barrier_width].
    """
    i0 = int(round((params.barrier_base - grid.z_min) / grid.dz))
    i1 = int(round((params.barrier_base + params.barrier_width - grid.z_min) / grid.dz))
    mask = np.zeros(grid.n_points, dtype=bool)
    lo = max(i0, 0)
    hi = min(i1, grid.n_points - 1)
    if lo <= hi:
        mask[lo:hi + 1] = True
    return mask


def assemble_potential(params: PhysicalParams, grid: Grid,
                       field: WaveField | None = None) -> np.ndarray:
    """Per-point potential m g z + U * slab + gp |psi|^2, in 1/ms.

    The mean-field term is included only when a field is given.
    """
    if field is not None and field.grid != grid:
        raise ConfigurationError("field grid does not match the requested grid")
    v = params.mass * params.gravity * grid.z.copy()
    if params.barrier_height != 0.0:
        v[barrier_mask(params, grid)] += params.barrier_height
    if field is not None and params.gp_strength != 0.0:
        v += params.gp_strength * field.abs2()
    return v
