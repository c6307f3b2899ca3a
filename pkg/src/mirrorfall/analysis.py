"""Snapshot diagnostics: conserved functionals, peak structure, fringe
visibility, and solver-vs-oracle comparison metrics."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
import scipy.signal
from scipy.interpolate import CubicSpline

from .core import (DomainError, PhysicalParams, WaveField, assemble_potential,
                   barrier_mask)

__all__ = ["DiagnosticsReport", "conserved_functionals", "diagnose",
           "find_peaks", "fringe_visibility", "compare_fields"]


def conserved_functionals(field: WaveField, params: PhysicalParams):
    """(norm, energy) by trapezoid integration; see energy_parts for the
    kinetic/gravity/barrier/interaction decomposition."""
    norm, energy, _ = _functionals(field, params)
    return norm, energy


def _functionals(field: WaveField, params: PhysicalParams):
    dz = field.grid.dz
    abs2 = field.abs2()
    norm = float(np.trapezoid(abs2, dx=dz))
    # Kinetic term from central differences on the midpoint lattice,
    # (psi_{i+1}-psi_i)/dz at z_{i+1/2}.  This is the quadratic form of the
    # 3-point Laplacian the propagator evolves under, so for fields that
    # vanish at the edges the measured energy is the propagator's exact
    # invariant; any other stencil would report the O((k dz)^2) dispersion
    # mismatch as a spurious drift.
    dpsi = np.diff(field.samples) / dz
    kinetic = float(np.sum(np.abs(dpsi) ** 2) * dz / (2.0 * params.mass))
    gravity = float(np.trapezoid(
        params.mass * params.gravity * field.grid.z * abs2, dx=dz))
    if params.barrier_height != 0.0:
        box = barrier_mask(params, field.grid) * params.barrier_height
        barrier = float(np.trapezoid(box * abs2, dx=dz))
    else:
        barrier = 0.0
    if params.gp_strength != 0.0:
        interaction = float(np.trapezoid(
            0.5 * params.gp_strength * abs2 ** 2, dx=dz))
    else:
        interaction = 0.0
    parts = {"kinetic": kinetic, "gravity": gravity, "barrier": barrier,
             "interaction": interaction}
    return norm, kinetic + gravity + barrier + interaction, parts


def _parabolic_refine(z: np.ndarray, y: np.ndarray, i: int):
    """Sub-grid extremum position/value from a 3-point parabola."""
    if i <= 0 or i >= len(y) - 1:
        return float(z[i]), float(y[i])
    denom = y[i - 1] - 2.0 * y[i] + y[i + 1]
    if denom == 0.0:
        return float(z[i]), float(y[i])
    delta = 0.5 * (y[i - 1] - y[i + 1]) / denom
    dz = z[1] - z[0]
    val = y[i] - 0.25 * (y[i - 1] - y[i + 1]) * delta
    return float(z[i] + delta * dz), float(val)


def find_peaks(field: WaveField, min_prominence: float = 0.1):
    """Local maxima of |psi|^2 with topographic prominence at least
    min_prominence x global max, parabolically refined; sorted by z."""
    if not 0.0 < min_prominence < 1.0:
        raise DomainError(
            f"min_prominence must be in (0, 1), got {min_prominence}")
    intensity = field.abs2()
    top = float(intensity.max())
    if top == 0.0:
        return []
    idx, _ = scipy.signal.find_peaks(intensity, prominence=min_prominence * top)
    return [_parabolic_refine(field.grid.z, intensity, int(i)) for i in idx]


# Maxima below this fraction of the regional peak are treated as noise or
# irrelevant tail structure, not fringes.
_MAXIMA_FLOOR = 1e-3


def fringe_visibility(field: WaveField, region: tuple[float, float] | None = None):
    """Median of (I_max - I_min)/(I_max + I_min) over adjacent extremum pairs
    of |psi|^2 in the region; None when the region holds fewer than two
    maxima or no interior minimum (undefined, as opposed to zero contrast).

    Maxima are kept above a small intensity floor, and each kept pair of
    neighboring maxima contributes the interior minimum between them (which
    may be arbitrarily deep).  The median, rather than the global max/min
    pair, keeps the decaying envelope from masquerading as fringe contrast.
    """
    z = field.grid.z
    intensity = field.abs2()
    if region is not None:
        lo, hi = region
        m = (z >= lo) & (z <= hi)
        if not np.any(m):
            raise DomainError(f"region [{lo}, {hi}] lies outside the grid")
        z, intensity = z[m], intensity[m]
    top = float(intensity.max())
    if top == 0.0:
        return None
    floor = _MAXIMA_FLOOR * top
    imax, _ = scipy.signal.find_peaks(intensity, prominence=floor, height=floor)
    if len(imax) < 2:
        return None
    pair_vis = []
    for i0, i1 in zip(imax[:-1], imax[1:]):
        seg = intensity[i0:i1 + 1]
        i_min = float(seg.min())
        for i_max in (float(intensity[i0]), float(intensity[i1])):
            pair_vis.append((i_max - i_min) / (i_max + i_min))
    return float(np.median(pair_vis))


def compare_fields(f1: WaveField, f2: WaveField, mode: str = "modulus"):
    """Relative (L2, Linf) difference of two fields, f1 the reference.

    modulus mode compares |psi|; full mode compares complex values after
    fitting a single global phase.  Differing grids are restricted to their
    intersection and f2 is cubic-resampled onto f1's nodes.
    """
    if mode not in ("modulus", "full"):
        raise DomainError(f"unknown comparison mode {mode!r}")
    z1, z2 = f1.grid.z, f2.grid.z
    lo = max(z1[0], z2[0])
    hi = min(z1[-1], z2[-1])
    if hi <= lo:
        raise DomainError("fields live on disjoint grids")
    if f1.grid == f2.grid:
        s1, s2 = f1.samples, f2.samples
    else:
        keep = (z1 >= lo) & (z1 <= hi)
        target = z1[keep]
        s1 = f1.samples[keep]
        spline_re = CubicSpline(z2, f2.samples.real)
        spline_im = CubicSpline(z2, f2.samples.imag)
        s2 = spline_re(target) + 1j * spline_im(target)
    if mode == "modulus":
        a1 = np.abs(s1)
        d = a1 - np.abs(s2)
    else:
        inner = np.vdot(s2, s1)
        phase = inner / abs(inner) if inner != 0 else 1.0
        a1 = np.abs(s1)
        d = np.abs(s1 - phase * s2)
    ref_l2 = float(np.sqrt(np.sum(a1 ** 2)))
    ref_linf = float(a1.max())
    l2_rel = float(np.sqrt(np.sum(np.abs(d) ** 2))) / ref_l2
    linf_rel = float(np.max(np.abs(d))) / ref_linf
    return l2_rel, linf_rel


@dataclass(frozen=True)
class DiagnosticsReport:
    """Conserved functionals and pattern metrics for one snapshot."""

    norm: float
    energy: float
    energy_parts: dict
    peaks: tuple
    visibility: float | None
    center_mean: float
    center_argmax: float
    width_rms: float

    def to_json_dict(self) -> dict:
        return {
            "norm": self.norm,
            "energy": self.energy,
            "energy_parts": dict(self.energy_parts),
            "peaks": [[z, h] for z, h in self.peaks],
            "visibility": self.visibility,
            "center_mean": self.center_mean,
            "center_argmax": self.center_argmax,
            "width_rms": self.width_rms,
        }


def diagnose(field: WaveField, params: PhysicalParams,
             min_prominence: float = 0.1,
             visibility_region: tuple[float, float] | None = None) -> DiagnosticsReport:
    """Full diagnostics for one snapshot."""
    norm, energy, parts = _functionals(field, params)
    peaks = tuple(find_peaks(field, min_prominence))
    vis = fringe_visibility(field, visibility_region)
    z = field.grid.z
    abs2 = field.abs2()
    dz = field.grid.dz
    center_mean = float(np.trapezoid(z * abs2, dx=dz) / norm)
    center_argmax, _ = _parabolic_refine(z, abs2, int(np.argmax(abs2)))
    var = float(np.trapezoid((z - center_mean) ** 2 * abs2, dx=dz) / norm)
    return DiagnosticsReport(
        norm=norm, energy=energy, energy_parts=parts, peaks=peaks,
        visibility=vis, center_mean=center_mean, center_argmax=center_argmax,
        width_rms=float(np.sqrt(var)))
