"""Grid propagator for the time-dependent Schroedinger / Gross-Pitaevskii
equation with gravity and a square barrier or well.

Scheme: Crank-Nicolson on the linear part (one prefactored complex
tridiagonal solve per step, hard-wall edges) with Strang splitting for the
cubic mean-field term (half-step pointwise phase, full linear step, second
half-step).  For the linear problem the step is a Cayley transform of the
discrete Hamiltonian: exactly unitary and commuting with H, so norm and
discrete energy are conserved to roundoff at any dt.
"""

from __future__ import annotations

import time
from dataclasses import dataclass, replace

import numpy as np
from scipy.linalg import get_lapack_funcs

from .analysis import DiagnosticsReport, compare_fields, diagnose
from .analytic import FreeFallPacket, free_fall_value
from .core import (ConfigurationError, Grid, PacketSpec, PhysicalParams,
                   WaveField, assemble_potential, grid_with_spacing,
                   make_gaussian)

__all__ = ["SolverConfig", "RunResult", "AccuracyError", "DomainTooSmallError",
           "propagate", "propagate_gp", "convergence_study",
           "ConvergenceReport", "default_dz", "default_dt"]


class AccuracyError(RuntimeError):
    """Conservation contract violated; carries the per-snapshot drift history."""

    def __init__(self, message: str, history: list):
        super().__init__(message)
        self.history = history


class DomainTooSmallError(RuntimeError):
    """Wavefunction amplitude reached the outer grid edges."""


@dataclass(frozen=True)
class SolverConfig:
    """Time step, snapshot schedule and conservation contract for one run.

    dt is guarded by dt <= m dz^2 unless relax_dt_guard is set (the scheme
    is unconditionally stable; the guard is an accuracy convention and must
    be lifted for very long runs where it would demand millions of steps).
    energy_tol may be None to skip the energy drift check.
    """

    dt: float
    snapshot_times: tuple
    norm_tol: float = 0.002
    energy_tol: float | None = 0.02
    relax_dt_guard: bool = False
    edge_tol: float = 1e-5
    edge_points: int = 10

    def __post_init__(self):
        if self.dt <= 0:
            raise ConfigurationError(f"dt must be positive, got {self.dt}")
        ts = tuple(float(t) for t in self.snapshot_times)
        if not ts:
            raise ConfigurationError("at least one snapshot time is required")
        if any(t < 0 for t in ts) or any(b <= a for a, b in zip(ts, ts[1:])):
            raise ConfigurationError(
                f"snapshot times must be >= 0 and strictly ascending: {ts}")
        object.__setattr__(self, "snapshot_times", ts)

    def with_(self, **kw) -> "SolverConfig":
        return replace(self, **kw)


@dataclass(frozen=True)
class RunResult:
    snapshots: tuple
    diagnostics: tuple
    wall_time: float

    def at_time(self, t: float) -> WaveField:
        for f in self.snapshots:
            if abs(f.time - t) < 1e-9:
                return f
        raise KeyError(f"no snapshot at t = {t} ms")

    def diagnostics_at(self, t: float) -> DiagnosticsReport:
        for f, d in zip(self.snapshots, self.diagnostics):
            if abs(f.time - t) < 1e-9:
                return d
        raise KeyError(f"no snapshot at t = {t} ms")


INITIAL_NORM_TOL = 1e-6
INITIAL_EDGE_TOL = 1e-8


class _CrankNicolson:
    """Prefactored Crank-Nicolson step for the static linear Hamiltonian."""

    def __init__(self, v_interior: np.ndarray, mass: float, dz: float, dt: float):
        m_int = len(v_interior)
        kin_diag = 1.0 / (mass * dz * dz)
        kin_off = -0.5 / (mass * dz * dz)
        half = 0.5j * dt
        a_diag = 1.0 + half * (kin_diag + v_interior)
        a_off = np.full(m_int - 1, half * kin_off)
        self.b_diag = 1.0 - half * (kin_diag + v_interior)
        self.b_off = -half * kin_off
        gttrf, gttrs = get_lapack_funcs(("gttrf", "gttrs"), (a_diag,))
        dl, d, du, du2, ipiv, info = gttrf(a_off, a_diag, a_off)
        if info != 0:
            raise RuntimeError(f"tridiagonal factorization failed (info={info})")
        self._fact = (dl, d, du, du2, ipiv)
        self._gttrs = gttrs
        # two alternating rhs/solution buffers so a step can read the
        # previous step's output while assembling in place
        self._bufs = (np.empty(m_int, dtype=np.complex128),
                      np.empty(m_int, dtype=np.complex128))
        self._flip = 0
        self._scratch = np.empty(m_int - 1, dtype=np.complex128)

    def step(self, psi: np.ndarray) -> np.ndarray:
        rhs = self._bufs[self._flip]
        self._flip ^= 1
        off = self._scratch
        np.multiply(self.b_diag, psi, out=rhs)
        np.multiply(self.b_off, psi[:-1], out=off)
        rhs[1:] += off
        np.multiply(self.b_off, psi[1:], out=off)
        rhs[:-1] += off
        x, info = self._gttrs(*self._fact, rhs, overwrite_b=True)
        if info != 0:
            raise RuntimeError(f"tridiagonal solve failed (info={info})")
        return x


def _validate_initial(initial: WaveField):
    n = initial.norm()
    if abs(n - 1.0) > INITIAL_NORM_TOL:
        raise ConfigurationError(
            f"initial field norm {n!r} deviates from 1 by more than "
            f"{INITIAL_NORM_TOL:g}")
    amp = np.abs(initial.samples)
    peak = amp.max()
    if amp[0] > INITIAL_EDGE_TOL * peak or amp[-1] > INITIAL_EDGE_TOL * peak:
        raise ConfigurationError(
            "initial packet tails exceed 1e-8 x peak at the grid edges; "
            "enlarge the domain")


def propagate(initial: WaveField, params: PhysicalParams,
              config: SolverConfig) -> RunResult:
    """Propagate the field, returning snapshots and diagnostics at the
    requested times.

    Raises AccuracyError if norm drift exceeds norm_tol or energy drift
    exceeds energy_tol over the run, and DomainTooSmallError if amplitude
    builds up at the outer edges.
    """
    t0 = time.perf_counter()
    _validate_initial(initial)
    grid = initial.grid
    dz = grid.dz
    if not config.relax_dt_guard and config.dt > params.mass * dz * dz * (1 + 1e-12):
        raise ConfigurationError(
            f"dt = {config.dt:g} exceeds the accuracy guard m dz^2 = "
            f"{params.mass * dz * dz:g}; refine dt or set relax_dt_guard")

    v = assemble_potential(params, grid)
    gp = params.gp_strength
    psi = initial.samples.copy()
    psi[0] = 0.0
    psi[-1] = 0.0
    interior = psi[1:-1].copy()
    v_int = v[1:-1]

    ref_norm = ref_energy = None
    history = []
    snapshots = []
    reports = []
    stepper_cache: dict[float, _CrankNicolson] = {}
    ne = config.edge_points
    # The lower edge must stay empty (the packet falls toward it).  The
    # upper edge matters only when nothing blocks it: with a repulsive
    # mirror present, whatever ends up above the slab is sealed off from
    # the physical region and may bounce against the top wall harmlessly.
    monitor_top = params.barrier_height <= 0.0

    def take_snapshot(t_now: float):
        nonlocal ref_norm, ref_energy
        full = np.zeros(grid.n_points, dtype=np.complex128)
        full[1:-1] = interior
        field = WaveField(grid, full, time=t_now)
        report = diagnose(field, params)
        snapshots.append(field)
        reports.append(report)
        if ref_norm is None:
            ref_norm, ref_energy = report.norm, report.energy
            history.append({"t": t_now, "norm_drift": 0.0, "energy_drift": 0.0})
            return
        norm_drift = abs(report.norm - ref_norm) / ref_norm
        e_scale = max(abs(ref_energy), 1e-30)
        energy_drift = abs(report.energy - ref_energy) / e_scale
        history.append({"t": t_now, "norm_drift": norm_drift,
                        "energy_drift": energy_drift})
        if norm_drift > config.norm_tol:
            raise AccuracyError(
                f"norm drift {norm_drift:.3e} exceeds the {config.norm_tol:g} "
                f"contract at t = {t_now:g} ms", history)
        if config.energy_tol is not None and energy_drift > config.energy_tol:
            raise AccuracyError(
                f"energy drift {energy_drift:.3e} exceeds the "
                f"{config.energy_tol:g} contract at t = {t_now:g} ms", history)

    t_now = 0.0
    times = config.snapshot_times
    if times[0] == 0.0:
        take_snapshot(0.0)
        times = times[1:]
    else:
        # the conservation contract is always measured against t = 0
        full = np.zeros(grid.n_points, dtype=np.complex128)
        full[1:-1] = interior
        r0 = diagnose(WaveField(grid, full, time=0.0), params)
        ref_norm, ref_energy = r0.norm, r0.energy

    for t_target in times:
        span = t_target - t_now
        n_steps = max(1, int(np.ceil(span / config.dt - 1e-12)))
        h = span / n_steps
        stepper = stepper_cache.get(h)
        if stepper is None:
            stepper = _CrankNicolson(v_int, params.mass, dz, h)
            stepper_cache[h] = stepper
        for step_i in range(n_steps):
            if gp != 0.0:
                interior *= np.exp((-0.5j * h * gp) * np.abs(interior) ** 2)
                interior = stepper.step(interior)
                interior *= np.exp((-0.5j * h * gp) * np.abs(interior) ** 2)
            else:
                interior = stepper.step(interior)
            if step_i % 4 == 0 or step_i == n_steps - 1:
                edge_amp = np.abs(interior[:ne]).max()
                if monitor_top:
                    edge_amp = max(edge_amp, np.abs(interior[-ne:]).max())
                if edge_amp > config.edge_tol:
                    raise DomainTooSmallError(
                        f"amplitude {edge_amp:.2e} within {ne} points of a "
                        f"grid edge during the segment ending at "
                        f"t = {t_target:g} ms; enlarge the domain")
        t_now = t_target
        take_snapshot(t_now)

    return RunResult(tuple(snapshots), tuple(reports),
                     wall_time=time.perf_counter() - t0)


def propagate_gp(initial: WaveField, params: PhysicalParams,
                 config: SolverConfig) -> RunResult:
    """Mean-field run; requires a repulsive (non-negative) coupling.

    With gp_strength = 0 this is bitwise identical to propagate (the
    nonlinear phase kicks are skipped on the same code path).
    """
    if params.gp_strength < 0:
        raise ConfigurationError(
            "attractive mean-field coupling is not supported "
            f"(gp_strength = {params.gp_strength})")
    return propagate(initial, params, config)


def default_dz(spec: PacketSpec, params: PhysicalParams, t_max: float) -> float:
    """Resolution rule: resolve the packet width, the falling-frame carrier
    wavelength at t_max, and the barrier skin depth."""
    k_carrier = (params.mass * params.gravity * t_max + abs(spec.q)
                 + 2.0 / spec.sigma)
    dz = min(spec.sigma / 10.0, 2.0 * np.pi / k_carrier / 12.0)
    if params.barrier_height > 0:
        skin = 1.0 / np.sqrt(2.0 * params.mass * params.barrier_height)
        dz = min(dz, skin / 2.0)
    return dz


def default_dt(params: PhysicalParams, dz: float) -> float:
    return 0.5 * params.mass * dz * dz


@dataclass(frozen=True)
class ConvergenceReport:
    dz_values: tuple
    dz_errors: tuple
    dz_order: float
    dz_inconclusive: bool
    dt_values: tuple
    dt_errors: tuple
    dt_order: float
    dt_inconclusive: bool


def _observed_order(errors):
    ratios = [e0 / e1 for e0, e1 in zip(errors, errors[1:])]
    orders = [np.log2(r) for r in ratios]
    monotone = all(e0 > e1 for e0, e1 in zip(errors, errors[1:]))
    return float(np.mean(orders)), not monotone


def convergence_study(spec: PacketSpec, params: PhysicalParams,
                      base_grid: Grid, base_config: SolverConfig,
                      levels: int = 3) -> ConvergenceReport:
    """Observed convergence orders of the propagator on the free-fall case.

    Spatial order: dz is halved per level (dt tied to m dz^2/2 so the
    spatial error dominates) and the error is measured against the falling
    Gaussian oracle.  Temporal order: dt is halved per level on the fixed
    base grid, against a dt/2^levels self-reference, which cancels the
    spatial error exactly.
    """
    if levels < 3:
        raise ConfigurationError(f"need at least 3 levels, got {levels}")
    t_end = base_config.snapshot_times[-1]
    oracle = FreeFallPacket(spec, params)

    dz_values, dz_errors = [], []
    for lev in range(levels):
        dz = base_grid.dz / 2 ** lev
        grid = grid_with_spacing(base_grid.z_min, base_grid.z_max, dz)
        cfg = base_config.with_(dt=default_dt(params, dz),
                                snapshot_times=(t_end,))
        result = propagate(make_gaussian(spec, grid), params, cfg)
        ref = WaveField(grid, free_fall_value(oracle, grid.z, t_end), time=t_end)
        l2, _ = compare_fields(ref, result.at_time(t_end))
        dz_values.append(dz)
        dz_errors.append(l2)
    dz_order, dz_bad = _observed_order(dz_errors)

    initial = make_gaussian(spec, base_grid)
    dt_values, dt_errors = [], []
    ref_cfg = base_config.with_(dt=base_config.dt / 2 ** levels,
                                snapshot_times=(t_end,))
    ref_field = propagate(initial, params, ref_cfg).at_time(t_end)
    for lev in range(levels):
        dt = base_config.dt / 2 ** lev
        cfg = base_config.with_(dt=dt, snapshot_times=(t_end,))
        result = propagate(initial, params, cfg)
        l2, _ = compare_fields(ref_field, result.at_time(t_end), mode="full")
        dt_values.append(dt)
        dt_errors.append(l2)
    dt_order, dt_bad = _observed_order(dt_errors)

    return ConvergenceReport(tuple(dz_values), tuple(dz_errors), dz_order,
                             dz_bad, tuple(dt_values), tuple(dt_errors),
                             dt_order, dt_bad)
