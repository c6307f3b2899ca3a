"""Closed-form solutions used as oracles for the grid propagator.

Contains the accelerating-frame plane wave, the freely falling Gaussian, the
single-image-packet mirror approximation (plain and admixture-corrected), the
large-time closed form of the image-packet modulus, and the fringe-visibility
bound.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .core import (DomainError, PacketSpec, PhysicalParams, WaveField, Grid,
                   gravitational_length, crossover_ratio)

__all__ = [
    "accelerated_plane_wave", "FreeFallPacket", "free_fall_value",
    "ImagePacket", "image_packet_value", "admixture_factor",
    "modulus_closed_form", "visibility_bound", "fringe_spacing",
]


def accelerated_plane_wave(k: float, z, t, params: PhysicalParams):
    """Plane wave boosted to the frame falling with acceleration g.

    phase = -m g z t + k (z + g t^2/2) - k^2 t/(2m) - m g^2 t^3/6; the result
    has unit modulus and solves i dPsi/dt = -Psi''/2m + m g z Psi exactly.
    """
    m, g = params.mass, params.gravity
    phi = (-m * g * np.asarray(z) * t
           + k * (np.asarray(z) + 0.5 * g * t * t)
           - k * k * t / (2.0 * m)
           - m * g * g * t ** 3 / 6.0)
    return np.exp(1j * phi)


@dataclass(frozen=True)
class FreeFallPacket:
    """Gaussian packet in free fall; barrier and interaction are ignored."""

    spec: PacketSpec
    params: PhysicalParams

    def complex_width_sq(self, t: float) -> complex:
        """sigma^2(t) = sigma^2 + i t/(2m)."""
        return self.spec.sigma ** 2 + 0.5j * t / self.params.mass

    def center(self, t: float) -> float:
        """Classical envelope center z0 + (q/m) t - g t^2/2."""
        s, p = self.spec, self.params
        return s.z0 + s.q * t / p.mass - 0.5 * p.gravity * t * t

    def effective_width(self, t: float) -> float:
        """|sigma^2(t)| / sigma, the spread envelope scale."""
        return abs(self.complex_width_sq(t)) / self.spec.sigma


def _falling_gaussian(z, t: float, z0: float, q: float, sigma: float,
                      params: PhysicalParams):
    """Exact falling Gaussian with envelope centered on the trajectory of
    (z0, q).  At t=0 it reduces to the make_gaussian samples exactly."""
    m, g = params.mass, params.gravity
    z = np.asarray(z, dtype=np.float64)
    s2t = sigma ** 2 + 0.5j * t / m
    w = z - z0 - q * t / m + 0.5 * g * t * t
    amp = (2.0 * np.pi) ** (-0.25) * np.sqrt(sigma / s2t)
    # Plane-wave factor taken at z with a constant -q z0 offset: each term is
    # then an exact solution and matches the t=0 packet including its phase.
    phi = (-m * g * z * t
           + q * (z - z0 + 0.5 * g * t * t)
           - q * q * t / (2.0 * m)
           - m * g * g * t ** 3 / 6.0)
    return amp * np.exp(-w * w / (4.0 * s2t) + 1j * phi)


def free_fall_value(p: FreeFallPacket, z, t: float):
    """Value of the freely falling normalized Gaussian at (z, t)."""
    if t < 0:
        raise DomainError("free fall evaluated for t < 0")
    return _falling_gaussian(z, t, p.spec.z0, p.spec.q, p.spec.sigma, p.params)


def free_fall_field(p: FreeFallPacket, grid: Grid, t: float) -> WaveField:
    return WaveField(grid, free_fall_value(p, grid.z, t), time=t)


@dataclass(frozen=True)
class ImagePacket:
    """Mirror approximation: direct packet minus an image launched at -z0.

    The plain variant is an exact solution of the gravity-only equation but
    cancels at z = 0 only near t = 0; the corrected variant multiplies the
    image by a time-dependent admixture factor restoring the cancellation,
    at the price of no longer solving the equation exactly.
    """

    base: FreeFallPacket
    corrected: bool = False


def admixture_factor(p: ImagePacket, t: float) -> complex:
    """lambda(t) = Psi_direct(0, t) / Psi_image(0, t)."""
    s, prm = p.base.spec, p.base.params
    num = _falling_gaussian(0.0, t, s.z0, s.q, s.sigma, prm)
    den = _falling_gaussian(0.0, t, -s.z0, -s.q, s.sigma, prm)
    if den == 0:
        raise DomainError("admixture factor degenerate: image vanishes at z=0")
    return complex(num / den)


def image_packet_value(p: ImagePacket, z, t: float):
    """Direct minus (possibly weighted) image; see ImagePacket."""
    if t < 0:
        raise DomainError("image packet evaluated for t < 0")
    s, prm = p.base.spec, p.base.params
    direct = _falling_gaussian(z, t, s.z0, s.q, s.sigma, prm)
    image = _falling_gaussian(z, t, -s.z0, -s.q, s.sigma, prm)
    lam = admixture_factor(p, t) if p.corrected else 1.0
    return direct - lam * image


def image_packet_field(p: ImagePacket, grid: Grid, t: float) -> WaveField:
    return WaveField(grid, image_packet_value(p, grid.z, t), time=t)


# Validity floor for the large-time modulus closed form: t >> 2 m sigma^2.
MODULUS_TIME_FACTOR = 10.0


def _modulus_shape(spec: PacketSpec, params: PhysicalParams, z, t: float):
    """Large-time modulus of the plain image packet, up to normalization.

    Derived from the image difference for q = 0 in the t >> 2 m sigma^2
    limit:  e^{theta1} sqrt(sin^2 theta2 + sinh^2 theta3)  with

        theta1 = -m^2 s^2 (u^2 + z0^2) / t^2,       u = z + g t^2/2
        theta2 =  m z0 u / t
        theta3 =  2 m^2 s^2 z0 u / t^2

    sin(theta2) carries fringes of wavenumber m |z0| / t; sinh(theta3) fills
    the minima in and is what blurs the pattern.
    """
    m, g = params.mass, params.gravity
    s2 = spec.sigma ** 2
    z0 = spec.z0
    u = np.asarray(z, dtype=np.float64) + 0.5 * g * t * t
    theta1 = -m * m * s2 * (u * u + z0 * z0) / (t * t)
    theta2 = m * z0 * u / t
    theta3 = 2.0 * m * m * s2 * z0 * u / (t * t)
    return np.exp(theta1) * np.sqrt(np.sin(theta2) ** 2 + np.sinh(theta3) ** 2)


def modulus_closed_form(spec: PacketSpec, params: PhysicalParams, z,
                        t: float):
    """|Psi| of the falling interference pattern in closed form (q = 0).

    The overall amplitude is fixed by matching the peak of the plain image
    packet, from which the shape is derived.
    """
    if spec.q != 0.0:
        raise DomainError("modulus closed form is derived for q = 0 only")
    t_min = MODULUS_TIME_FACTOR * 2.0 * params.mass * spec.sigma ** 2
    if t < t_min:
        raise DomainError(
            f"t = {t:g} ms below the validity bound t >= {t_min:g} ms "
            "(need t >> 2 m sigma^2)")
    pk = ImagePacket(FreeFallPacket(spec, params), corrected=False)
    c = FreeFallPacket(spec, params).center(t)
    w = FreeFallPacket(spec, params).effective_width(t)
    zs = np.linspace(c - 5.0 * w, min(c + 5.0 * w, 0.0), 4001)
    peak_exact = np.max(np.abs(image_packet_value(pk, zs, t)))
    peak_shape = np.max(_modulus_shape(spec, params, zs, t))
    amp = peak_exact / peak_shape
    return amp * _modulus_shape(spec, params, z, t)


def fringe_spacing(spec: PacketSpec, params: PhysicalParams, t: float) -> float:
    """Spacing pi t / (m |z0|) between interference minima at time t."""
    return np.pi * t / (params.mass * abs(spec.z0))


def visibility_bound(spec: PacketSpec, params: PhysicalParams):
    """(max theta3, visible?) with max theta3 ~ m^2 sigma^2 |z0| g / 2.

    Values well below one predict visible fringes; order one and above,
    blurring.  Equivalent to sigma << 2 sqrt(l_g^3/|z0|).
    """
    if params.gravity <= 0:
        raise DomainError("visibility bound needs gravity > 0")
    m = params.mass
    max_theta3 = 0.5 * m * m * spec.sigma ** 2 * abs(spec.z0) * params.gravity
    return max_theta3, bool(max_theta3 < 1.0)
