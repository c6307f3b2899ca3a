"""Quick invariant suite behind `mirrorfall selftest`: a cheap subset of the
full test suite that exercises each subsystem in seconds."""

from __future__ import annotations

import numpy as np

from .airyfn import airy, wronskian
from .analytic import (FreeFallPacket, accelerated_plane_wave,
                       free_fall_value)
from .analysis import compare_fields
from .core import (PacketSpec, PhysicalParams, WaveField, assemble_potential,
                   grid_with_spacing, make_gaussian, params_preset)
from .tdse import SolverConfig, propagate


def _check(name: str, ok: bool, detail: str = "") -> bool:
    tag = "PASS" if ok else "FAIL"
    suffix = f"  ({detail})" if detail else ""
    print(f"  [{tag}] {name}{suffix}")
    return ok


def run_selftest() -> bool:
    print("mirrorfall selftest")
    ok = True
    params = params_preset("sodium")

    rng = np.random.default_rng(12345)
    xs = rng.uniform(-30.0, 5.0, 40)
    w = wronskian(airy(xs))
    err = float(np.max(np.abs(w * np.pi - 1.0)))
    ok &= _check("Airy Wronskian = 1/pi", err < 1e-10, f"max rel err {err:.1e}")

    z = rng.uniform(-50.0, 0.0, 100)
    mod = np.abs(accelerated_plane_wave(1.3, z, 2.0, params))
    ok &= _check("accelerated plane wave has unit modulus",
                 float(np.max(np.abs(mod - 1.0))) < 1e-12)

    spec = PacketSpec(z0=-7.0, sigma=0.35)
    grid = grid_with_spacing(-120.0, 30.0, 0.03)
    field = make_gaussian(spec, grid)
    ok &= _check("Gaussian packet normalized", abs(field.norm() - 1.0) < 1e-6)

    v1 = assemble_potential(params.with_(barrier_height=1e3), grid)
    v2 = assemble_potential(params.with_(barrier_height=1e3), grid)
    ok &= _check("potential assembly deterministic", np.array_equal(v1, v2))

    t_end = 0.5
    cfg = SolverConfig(dt=0.5 * params.mass * grid.dz ** 2,
                       snapshot_times=(t_end,))
    res = propagate(field, params, cfg)
    drift = abs(res.diagnostics[-1].norm - 1.0)
    ok &= _check("propagator conserves the norm", drift < 1e-9,
                 f"drift {drift:.1e}")
    oracle = WaveField(grid, free_fall_value(FreeFallPacket(spec, params),
                                             grid.z, t_end), t_end)
    l2, _ = compare_fields(oracle, res.at_time(t_end))
    ok &= _check("short free fall matches the closed form", l2 < 5e-3,
                 f"l2 {l2:.1e}")

    print("selftest:", "all checks passed" if ok else "FAILURES present")
    return ok
