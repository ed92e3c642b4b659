"""Command-line front end.

Subcommands: params | propagate | sweep | check | optimize.  Every command
is a pure function of its resolved configuration: identical inputs produce
identical outputs and exit codes.  File outputs are written to a temporary
file and renamed, so an interrupted run never leaves a partial artifact.

Exit codes: 0 success, 1 validity warning, 2 configuration error,
3 numerical failure.
"""

from __future__ import annotations

import argparse
import json
import math
import os
import sys
import tempfile
import time

import numpy as np

from . import __version__
from .analytics import ScrapPulseParams, report_to_json, validity_check
from .config import ConfigError, load_config, parse_frequency, resolve_preset, validate_config
from .exceptions import IntegrationError, TweezersError
from .experiments import (
    AxisSpec,
    SweepSpec,
    gated_ramp_schedule,
    optimize_pulse,
    resonant_gaussian_schedule,
    run_sweep,
)
from .levels import build_level_model
from .params import derive_all
from .presets import Preset
from .propagator import propagate, trajectory_to_csv, transfer_probability
from .pulses import build_pi_pulse, build_scrap_schedule, schedule_from_dict

EXIT_OK = 0
EXIT_VALIDITY = 1
EXIT_CONFIG = 2
EXIT_NUMERICAL = 3


def _atomic_write(path: str, text: str) -> None:
    directory = os.path.dirname(os.path.abspath(path)) or "."
    os.makedirs(directory, exist_ok=True)
    fd, tmp = tempfile.mkstemp(dir=directory, suffix=".tmp")
    try:
        with os.fdopen(fd, "w", encoding="utf-8") as handle:
            handle.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def _json_text(payload) -> str:
    def clean(obj):
        if isinstance(obj, float) and not math.isfinite(obj):
            return repr(obj)
        if isinstance(obj, dict):
            return {k: clean(v) for k, v in obj.items()}
        if isinstance(obj, (list, tuple)):
            return [clean(v) for v in obj]
        if isinstance(obj, np.floating):
            return float(obj)
        if isinstance(obj, np.integer):
            return int(obj)
        return obj

    return json.dumps(clean(payload), indent=2, sort_keys=True) + "\n"


def _build_model(preset: Preset):
    return build_level_model(derive_all(preset.system), n_max=2)


def _protocol_schedule(preset: Preset, model, protocol: dict, convention: str):
    kind = protocol["type"]
    if kind == "schedule":
        return schedule_from_dict(protocol["schedule"])
    if kind == "ramp":
        if "ramp_rate_rad_s2" not in protocol:
            raise ConfigError("ramp protocol requires ramp_rate_rad_s2")
        return gated_ramp_schedule(model, preset.omega_l,
                                   protocol["ramp_rate_rad_s2"],
                                   target=protocol.get("target", 1),
                                   geometry=preset.ramp)
    if kind == "pi_pulse":
        t_omega = protocol.get("t_omega_s", preset.pi.t_omega)
        if "omega_hat" in protocol:
            omega_hat = parse_frequency(protocol["omega_hat"], convention)
            return resonant_gaussian_schedule(
                model, omega_hat, t_omega,
                (0, 1) if protocol.get("transition", "0-1") == "0-1" else (1, 2))
        return build_pi_pulse(model, protocol.get("transition", "0-1"), t_omega)
    if kind == "scrap_1atom":
        cfg = preset.scrap
        t_omega = protocol.get("t_omega_s", cfg.t_omega)
        omega_hat = (parse_frequency(protocol["omega_hat"], convention)
                     if "omega_hat" in protocol else cfg.omega_hat)
        delta_hat = (parse_frequency(protocol["delta_hat"], convention)
                     if "delta_hat" in protocol else cfg.delta_hat)
        return build_scrap_schedule(
            omega_hat, t_omega, delta_hat, cfg.t_delta(t_omega),
            cfg.tau(t_omega), protocol.get("delta_tau_s", 0.0),
            model.derived.e1, hbar=model.hbar)
    if kind == "scrap_2atom":
        from .pulses import build_two_atom_scrap_schedule

        cfg = preset.scrap2
        t_omega = protocol.get("t_omega_s", cfg.t_omega)
        omega_hat = (parse_frequency(protocol["omega_hat"], convention)
                     if "omega_hat" in protocol else cfg.omega_hat)
        return build_two_atom_scrap_schedule(
            omega_hat, t_omega, cfg.delta_hat, cfg.t_delta(t_omega),
            cfg.baseline_depth, model.derived.e1,
            model.derived.e2 - model.derived.e1,
            ramp_time=cfg.ramp_time_factor * t_omega, hbar=model.hbar)
    raise ConfigError(f"protocol type {kind!r} is not a single-schedule protocol")


def cmd_params(config: dict, preset: Preset, out_dir: str) -> int:
    derived = derive_all(preset.system)
    payload = derived.as_dict()
    payload["preset"] = preset.name
    lines = [f"derived parameters for preset {preset.name}"]
    for key in sorted(k for k in payload if k != "preset"):
        lines.append(f"  {key} = {payload[key]!r}")
    print("\n".join(lines))
    _atomic_write(os.path.join(out_dir, "params.json"), _json_text(payload))
    return EXIT_OK


def cmd_propagate(config: dict, preset: Preset, out_dir: str) -> int:
    protocol = config.get("protocol")
    if not protocol:
        raise ConfigError("propagate requires a 'protocol' section")
    convention = config.get("frequency_units", "angular_khz")
    model = _build_model(preset)
    if protocol["type"] == "sequential_pi":
        from .experiments import _evaluate_point

        point = {"t_omega_s": protocol.get("t_omega_s", preset.pi.t_omega),
                 "omit_second": protocol.get("omit_second", False)}
        out = _evaluate_point(preset, "sequential_pi", point, 2)
        finals = {"p2": out["p"], "p1_after_first": out["p1_after_first"]}
        _atomic_write(os.path.join(out_dir, "final.json"), _json_text(finals))
        print(f"sequential pulses: P_0->2 = {out['p']:.6f}")
        return EXIT_OK
    schedule = _protocol_schedule(preset, model, protocol, convention)
    trajectory = propagate(model, schedule)
    csv_text = trajectory_to_csv(trajectory)
    _atomic_write(os.path.join(out_dir, "trajectory.csv"), csv_text)
    finals = {f"p{n}": transfer_probability(trajectory, n)
              for n in range(model.dim)}
    finals["n_steps"] = trajectory.n_steps
    finals["step_s"] = trajectory.step
    _atomic_write(os.path.join(out_dir, "final.json"), _json_text(finals))
    print("final populations: "
          + ", ".join(f"p{n} = {finals[f'p{n}']:.6f}" for n in range(model.dim)))
    return EXIT_OK


def cmd_sweep(config: dict, preset: Preset, out_dir: str, threads: int) -> int:
    sweep_cfg = config.get("sweep")
    if not sweep_cfg:
        raise ConfigError("sweep requires a 'sweep' section")
    axes = tuple(
        AxisSpec(name=a["name"], minimum=a["min"], maximum=a["max"],
                 points=a["points"], scale=a.get("scale", "linear"))
        for a in sweep_cfg["axes"])
    spec = SweepSpec(protocol=sweep_cfg["protocol"], axes=axes,
                     target=sweep_cfg.get("target", 1),
                     fixed=sweep_cfg.get("fixed", {}),
                     preset_name=preset.name)
    started = time.perf_counter()
    result = run_sweep(spec, preset, threads=threads)
    wall_ms = 1e3 * (time.perf_counter() - started)
    _atomic_write(os.path.join(out_dir, "sweep.csv"), result.to_csv_text())
    meta = result.metadata_dict()
    meta["wall_ms"] = wall_ms
    meta["version"] = __version__
    _atomic_write(os.path.join(out_dir, "sweep_meta.json"), _json_text(meta))
    finite = result.p[np.isfinite(result.p)]
    if finite.size == 0:
        print("sweep failed at every grid point", file=sys.stderr)
        return EXIT_NUMERICAL
    max_p = float(np.max(finite))
    area = float(np.mean(np.nan_to_num(result.p, nan=-1.0) > 0.99))
    print(f"sweep complete: max P = {max_p:.6f}, "
          f"P>0.99 region fraction = {area:.4f}, "
          f"{len(result.failures)} failed points")
    return EXIT_OK


def cmd_check(config: dict, preset: Preset, out_dir: str) -> int:
    model = _build_model(preset)
    protocol = config.get("protocol", {})
    scrap = None
    # the chirp bounds are derived for the Gaussian pulse pair, so they are
    # attached only for the single-atom protocol
    if protocol.get("type") == "scrap_1atom":
        cfg = preset.scrap
        t_omega = protocol.get("t_omega_s", cfg.t_omega)
        convention = config.get("frequency_units", "angular_khz")
        omega_hat = (parse_frequency(protocol["omega_hat"], convention)
                     if "omega_hat" in protocol else cfg.omega_hat)
        scrap = ScrapPulseParams(omega_hat=omega_hat, t_omega=t_omega,
                                 delta_hat=cfg.delta_hat,
                                 t_delta=cfg.t_delta(t_omega),
                                 tau=cfg.tau(t_omega))
    report = validity_check(model, preset.omega_l, scrap=scrap)
    text = report_to_json(report)
    _atomic_write(os.path.join(out_dir, "check.json"), text + "\n")
    print(f"validity report for preset {preset.name} "
          f"(omega_l = {preset.omega_l!r} rad/s)")
    for name, flag in sorted(report.flags.items()):
        print(f"  {name}: {flag}")
    print(f"  two_level_margin = {report.two_level_margin:.4g}")
    print(f"  single_particle_margin = {report.single_particle_margin:.4g}")
    print(f"  ramp_rate_limit = {report.ramp_rate_limit:.4g} rad/s^2")
    print(f"  tau_min = {report.tau_min:.4g} s")
    return EXIT_OK if report.all_strong else EXIT_VALIDITY


def cmd_optimize(config: dict, preset: Preset, out_dir: str, seed: int) -> int:
    opt_cfg = config.get("optimize")
    if not opt_cfg:
        raise ConfigError("optimize requires an 'optimize' section")
    bounds = {k: (v[0], v[1]) for k, v in opt_cfg["bounds"].items()}
    result = optimize_pulse(opt_cfg["protocol"], bounds, opt_cfg["budget"],
                            preset=preset, target=opt_cfg.get("target", 1),
                            seed=seed, fixed=opt_cfg.get("fixed"))
    payload = {
        "params": result.params,
        "probability": result.probability,
        "converged": result.converged,
        "n_evaluations": result.n_evaluations,
    }
    _atomic_write(os.path.join(out_dir, "optimize.json"), _json_text(payload))
    print(f"best P = {result.probability:.6f} at "
          + ", ".join(f"{k} = {v:.6g}" for k, v in sorted(result.params.items()))
          + f" (converged = {result.converged}, {result.n_evaluations} evals)")
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="qtweezers",
        description="Few-level pulse design and simulation for loading a "
                    "steep trap from an atom reservoir")
    parser.add_argument("--version", action="version", version=__version__)
    sub = parser.add_subparsers(dest="command", required=True)
    for name, helptext in [
        ("params", "derive and report every model parameter"),
        ("propagate", "integrate one schedule and write the trajectory CSV"),
        ("sweep", "run a parameter sweep and write CSV + metadata"),
        ("check", "evaluate analytic validity margins and flags"),
        ("optimize", "maximize transfer probability over pulse parameters"),
    ]:
        cmd = sub.add_parser(name, help=helptext)
        cmd.add_argument("--config", help="path to a JSON run configuration")
        cmd.add_argument("--preset", help="named preset (fig3a, fig3b, fig4, "
                                          "fig6, fig7)")
        cmd.add_argument("--out", default=".", help="output directory")
        cmd.add_argument("--threads", type=int, default=None,
                         help="worker processes for sweeps (default 1)")
        cmd.add_argument("--seed", type=int, default=None,
                         help="seed for the optimizer start point")
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        config = load_config(args.config) if args.config else validate_config({})
        preset = resolve_preset(config, args.preset)
        out_dir = args.out if args.out != "." else config.get("output_dir", ".")
        threads = args.threads if args.threads is not None \
            else config.get("threads", 1)
        seed = args.seed if args.seed is not None else config.get("seed", 0)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    try:
        if args.command == "params":
            return cmd_params(config, preset, out_dir)
        if args.command == "propagate":
            return cmd_propagate(config, preset, out_dir)
        if args.command == "sweep":
            return cmd_sweep(config, preset, out_dir, threads)
        if args.command == "check":
            return cmd_check(config, preset, out_dir)
        if args.command == "optimize":
            return cmd_optimize(config, preset, out_dir, seed)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except IntegrationError as exc:
        print(f"numerical failure: {exc}", file=sys.stderr)
        return EXIT_NUMERICAL
    except TweezersError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_NUMERICAL
    raise AssertionError("unreachable")


if __name__ == "__main__":
    sys.exit(main())
