"""Command line interface: scenario runner, parameter sweeps, oracle listing
and a quick invariant self-test.

Exit codes: 0 success, 1 configuration/usage error, 2 solver contract
violation (conservation drift or domain overflow).
"""

from __future__ import annotations

import argparse
import sys
from concurrent.futures import ProcessPoolExecutor
from pathlib import Path

import numpy as np
import yaml

from . import analytic, spectral
from .analysis import compare_fields, diagnose
from .core import (ConfigurationError, DomainError, Grid, PacketSpec,
                   PhysicalParams, WaveField, crossover_ratio, make_gaussian,
                   params_preset, grid_with_spacing)
from .outputs import (snapshot_filename, svg_line_plot, write_comparison_json,
                      write_diagnostics_json, write_field_csv, write_run_meta)
from .scenarios import (ORACLE_NAMES, Scenario, build_config, build_grid,
                        preset_names, resolve_preset)
from .tdse import (AccuracyError, DomainTooSmallError, SolverConfig,
                   propagate_gp)

EXIT_OK = 0
EXIT_CONFIG = 1
EXIT_CONTRACT = 2


def _scenario_from_config(path: Path) -> list:
    try:
        doc = yaml.safe_load(path.read_text(encoding="utf-8"))
    except yaml.YAMLError as exc:
        raise ConfigurationError(f"cannot parse {path}: {exc}") from exc
    if not isinstance(doc, dict):
        raise ConfigurationError(f"{path}: expected a mapping at top level")
    pk = doc.get("packet", {})
    packet = PacketSpec(z0=float(pk.get("z0", -7.0)),
                        sigma=float(pk.get("sigma", 0.3)),
                        q=float(pk.get("q", 0.0)))
    pr = dict(doc.get("params", {}))
    preset = pr.pop("preset", None)
    if preset is not None:
        params = params_preset(preset, **{k: float(v) for k, v in pr.items()})
    else:
        params = PhysicalParams(**{k: float(v) for k, v in pr.items()})
    sv = doc.get("solver", {})
    t_max = float(sv.get("t_max", 4.0))
    snapshots = tuple(float(t) for t in sv.get("snapshots", [t_max]))
    dz = sv.get("dz")
    dt = sv.get("dt")
    return [Scenario(
        name=str(doc.get("name", path.stem)),
        packet=packet, params=params, t_max=t_max, snapshot_times=snapshots,
        dz=None if dz is None else float(dz),
        dt=None if dt is None else float(dt),
        oracles=tuple(doc.get("oracles", [])),
        relax_dt_guard=bool(sv.get("relax_dt_guard", False)))]


def _resolve_runs(target: str) -> list:
    path = Path(target)
    if path.suffix in (".yml", ".yaml") or path.exists():
        return _scenario_from_config(path)
    return resolve_preset(target)


def _apply_overrides(sc: Scenario, args) -> Scenario:
    if args.dz is not None:
        sc = sc.with_(dz=args.dz)
    if args.dt is not None:
        sc = sc.with_(dt=args.dt)
    if args.t_max is not None:
        snaps = tuple(t for t in sc.snapshot_times if t < args.t_max)
        sc = sc.with_(t_max=args.t_max, snapshot_times=snaps + (args.t_max,))
    if args.snapshots is not None:
        times = tuple(float(t) for t in args.snapshots.split(","))
        sc = sc.with_(snapshot_times=times, t_max=max(times))
    if args.gp is not None:
        sc = sc.with_(params=sc.params.with_(gp_strength=args.gp))
    if getattr(args, "inject_fault", None) == "dt100":
        grid = build_grid(sc)
        dt = sc.dt if sc.dt is not None else build_config(sc, grid).dt
        # fault injection bypasses the construction guard on purpose: the
        # point is to prove the drift detector catches a bad step size
        sc = sc.with_(dt=dt * 100.0, relax_dt_guard=True)
    return sc


def _spectral_coeffs(name: str, sc: Scenario, grid: Grid,
                     initial: WaveField):
    x_min = grid.z_min / sc.params.l_g
    a = spectral.default_a_grid(sc.packet, sc.params, x_min, t_max=sc.t_max)
    if name == "spectral-numeric":
        return spectral.coefficients_numeric(initial, sc.params, a)
    return spectral.coefficients_thin_packet(sc.packet, sc.params, a)


def _oracle_field(name: str, sc: Scenario, grid: Grid, t: float,
                  initial: WaveField, coeff_cache: dict):
    packet, params = sc.packet, sc.params
    ff = analytic.FreeFallPacket(packet, params)
    if name == "free-fall":
        return WaveField(grid, analytic.free_fall_value(ff, grid.z, t), t)
    if name in ("image-plain", "image-corrected"):
        ip = analytic.ImagePacket(ff, corrected=(name == "image-corrected"))
        return WaveField(grid, analytic.image_packet_value(ip, grid.z, t), t)
    if name == "modulus":
        vals = analytic.modulus_closed_form(packet, params, grid.z, t)
        return WaveField(grid, vals.astype(complex), t)
    if name in ("spectral-numeric", "spectral-thin"):
        if name not in coeff_cache:
            coeff_cache[name] = _spectral_coeffs(name, sc, grid, initial)
        out = grid_with_spacing(grid.z_min, 0.0, max(grid.dz, 0.05))
        return spectral.evolve_spectral(coeff_cache[name], t, out)
    raise ConfigurationError(f"unknown oracle {name!r}")


def _run_one(sc: Scenario, out_dir: Path) -> dict:
    out_dir.mkdir(parents=True, exist_ok=True)
    grid = build_grid(sc)
    config = build_config(sc, grid)
    initial = make_gaussian(sc.packet, grid)
    result = propagate_gp(initial, sc.params, config)

    for fld in result.snapshots:
        write_field_csv(fld, out_dir / snapshot_filename(sc.name, fld.time))
    write_diagnostics_json([f.time for f in result.snapshots],
                           result.diagnostics, out_dir / "diagnostics.json")

    comparisons = []
    coeff_cache: dict = {}
    for fld in result.snapshots:
        series = [("numeric", grid.z, fld.abs2())]
        for oracle in sc.oracles:
            try:
                ofld = _oracle_field(oracle, sc, grid, fld.time, initial,
                                     coeff_cache)
            except (DomainError, spectral.ResolutionError) as exc:
                comparisons.append({"oracle": oracle, "t": fld.time,
                                    "error": str(exc)})
                continue
            l2, linf = compare_fields(fld, ofld)
            comparisons.append({"oracle": oracle, "t": fld.time,
                                "l2_rel": l2, "linf_rel": linf})
            series.append((oracle, ofld.grid.z, ofld.abs2()))
        svg_line_plot(out_dir / f"{sc.name}_t{fld.time:g}.svg",
                      f"{sc.name}  t = {fld.time:g} ms", "z (um)",
                      "|psi|^2 (1/um)", series)
    for name, coeffs in coeff_cache.items():
        coeffs.to_csv(out_dir / f"{name}-coefficients.csv")
    if sc.oracles:
        write_comparison_json(comparisons, out_dir / "comparison.json")

    write_run_meta({
        "scenario": sc.name,
        "grid": {"z_min": grid.z_min, "z_max": grid.z_max,
                 "n_points": grid.n_points, "dz": grid.dz},
        "dt": config.dt,
        "snapshot_times": list(config.snapshot_times),
        "wall_time_s": result.wall_time,
    }, out_dir / "run_meta.json")

    last = result.diagnostics[-1]
    return {"scenario": sc.name, "visibility": last.visibility,
            "peak_count": len(last.peaks), "norm": last.norm,
            "energy": last.energy}


def cmd_run(args) -> int:
    runs = _resolve_runs(args.target)
    out_root = Path(args.out)
    status = EXIT_OK
    for sc in runs:
        sc = _apply_overrides(sc, args)
        sub = out_root / sc.name if len(runs) > 1 else out_root
        if sc.slow:
            print(f"[{sc.name}] long run: expect tens of minutes", flush=True)
        try:
            summary = _run_one(sc, sub)
        except (AccuracyError, DomainTooSmallError) as exc:
            print(f"[{sc.name}] CONTRACT VIOLATION: {exc}", file=sys.stderr)
            status = max(status, EXIT_CONTRACT)
            continue
        vis = summary["visibility"]
        vis_str = f"{vis:.3f}" if vis is not None else "undefined"
        print(f"[{sc.name}] ok: peaks={summary['peak_count']} "
              f"visibility={vis_str} norm={summary['norm']:.6f} "
              f"energy={summary['energy']:.4f}")
    return status


SWEEP_PARAMS = ("sigma", "z0", "gp_strength", "barrier_height")


def _sweep_variant(sc: Scenario, param: str, value: float) -> Scenario:
    if param == "sigma":
        return sc.with_(packet=PacketSpec(sc.packet.z0, value, sc.packet.q),
                        name=f"{param}-{value:g}")
    if param == "z0":
        return sc.with_(packet=PacketSpec(value, sc.packet.sigma, sc.packet.q),
                        name=f"{param}-{value:g}")
    if param == "gp_strength":
        return sc.with_(params=sc.params.with_(gp_strength=value),
                        name=f"{param}-{value:g}")
    if param == "barrier_height":
        return sc.with_(params=sc.params.with_(barrier_height=value),
                        name=f"{param}-{value:g}")
    raise ConfigurationError(
        f"sweep parameter must be one of {SWEEP_PARAMS}, got {param!r}")


def _sweep_row(payload):
    base, param, value, out_dir = payload
    try:
        sc = _sweep_variant(base, param, value)
        summary = _run_one(sc, Path(out_dir))
        eps = crossover_ratio(sc.packet, sc.params)
        return {"value": value, "eps": eps,
                "visibility": summary["visibility"],
                "peak_count": summary["peak_count"], "error": None}
    except Exception as exc:  # recorded per-row, sweep continues
        return {"value": value, "eps": None, "visibility": None,
                "peak_count": None, "error": f"{type(exc).__name__}: {exc}"}


def cmd_sweep(args) -> int:
    base = _resolve_runs(args.target)
    if len(base) != 1:
        raise ConfigurationError(
            "sweep needs a single-run base scenario "
            f"({args.target} expands to {len(base)} runs)")
    sc = _apply_overrides(base[0], args)
    values = [float(v) for v in args.values.split(",")]
    out_root = Path(args.out)
    out_root.mkdir(parents=True, exist_ok=True)
    payloads = [(sc, args.param, v, str(out_root / f"{args.param}-{v:g}"))
                for v in values]
    jobs = args.jobs or min(len(payloads), 4)
    if jobs > 1:
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            rows = list(pool.map(_sweep_row, payloads))
    else:
        rows = [_sweep_row(p) for p in payloads]

    csv_path = out_root / "sweep.csv"
    with open(csv_path, "w", encoding="utf-8") as fh:
        fh.write("value,eps,visibility,peak_count\n")
        for r in rows:
            vis = "" if r["visibility"] is None else f"{r['visibility']:.17g}"
            eps = "" if r["eps"] is None else f"{r['eps']:.17g}"
            pk = "" if r["peak_count"] is None else str(r["peak_count"])
            fh.write(f"{r['value']:.17g},{eps},{vis},{pk}\n")

    ok_rows = [r for r in rows if r["error"] is None]
    order = np.argsort([r["eps"] for r in ok_rows])
    vis_seq = [ok_rows[i]["visibility"] for i in order]
    vis_num = [0.0 if v is None else v for v in vis_seq]
    monotone = all(a >= b - 1e-12 for a, b in zip(vis_num, vis_num[1:]))
    write_run_meta({"parameter": args.param,
                    "visibility_non_increasing_in_eps": monotone,
                    "rows": rows}, out_root / "sweep_summary.json")
    for r in rows:
        if r["error"]:
            print(f"value={r['value']:g}: FAILED ({r['error']})")
        else:
            vis = r["visibility"]
            vis_str = f"{vis:.3f}" if vis is not None else "undefined"
            print(f"value={r['value']:g}: eps={r['eps']:.3f} "
                  f"visibility={vis_str} peaks={r['peak_count']}")
    print(f"visibility non-increasing in eps: {monotone}")
    return EXIT_OK if all(r["error"] is None for r in rows) else EXIT_CONTRACT


def cmd_oracles(_args) -> int:
    for name in sorted(ORACLE_NAMES):
        print(f"{name:18s} {ORACLE_NAMES[name]}")
    return EXIT_OK


def cmd_selftest(_args) -> int:
    from .selftest import run_selftest
    return EXIT_OK if run_selftest() else EXIT_CONFIG


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(
        prog="mirrorfall",
        description="Wavepackets falling under a mirror: grid and spectral "
                    "solvers with closed-form oracles.")
    sub = parser.add_subparsers(dest="command", required=True)

    run_p = sub.add_parser("run", help="run a preset or YAML config")
    run_p.add_argument("target", help="preset name or config file; "
                       f"presets: {', '.join(preset_names())}")
    run_p.add_argument("--out", default="out", help="output directory")
    run_p.add_argument("--dz", type=float, default=None)
    run_p.add_argument("--dt", type=float, default=None)
    run_p.add_argument("--t-max", dest="t_max", type=float, default=None)
    run_p.add_argument("--snapshots", default=None,
                       help="comma-separated times in ms")
    run_p.add_argument("--gp", type=float, default=None,
                       help="override the mean-field coupling")
    run_p.add_argument("--seedless", action="store_true",
                       help="assert the pipeline uses no randomness (it "
                            "never does; reruns are bit-identical)")
    run_p.add_argument("--inject-fault", choices=["dt100"], default=None,
                       help="testing hook: multiply dt by 100, bypassing "
                            "the construction guard")
    run_p.set_defaults(func=cmd_run)

    sweep_p = sub.add_parser("sweep", help="run a scenario across values of "
                             "one parameter")
    sweep_p.add_argument("target")
    sweep_p.add_argument("--param", required=True, choices=SWEEP_PARAMS)
    sweep_p.add_argument("--values", required=True,
                         help="comma-separated values")
    sweep_p.add_argument("--jobs", type=int, default=None)
    sweep_p.add_argument("--out", default="sweep-out")
    sweep_p.add_argument("--dz", type=float, default=None)
    sweep_p.add_argument("--dt", type=float, default=None)
    sweep_p.add_argument("--t-max", dest="t_max", type=float, default=None)
    sweep_p.add_argument("--snapshots", default=None)
    sweep_p.add_argument("--gp", type=float, default=None)
    sweep_p.set_defaults(func=cmd_sweep)

    oracles_p = sub.add_parser("oracles", help="list available oracles")
    oracles_p.set_defaults(func=cmd_oracles)

    selftest_p = sub.add_parser("selftest", help="run the quick invariant "
                                "suite")
    selftest_p.set_defaults(func=cmd_selftest)

    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except ConfigurationError as exc:
        print(f"configuration error: {exc}", file=sys.stderr)
        return EXIT_CONFIG


if __name__ == "__main__":
    sys.exit(main())
