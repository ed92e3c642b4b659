"""Figure-style parameter sweeps and derivative-free pulse optimization.

Every sweep point is an independent pure computation: a schedule is built
from the preset plus the point's axis values, propagated, and reduced to a
transfer probability with analytic diagnostics.  Points may be evaluated
in a process pool; results are always assembled in deterministic grid
order (C order over the axes), and CSV output is byte-identical across
runs of the same sweep.  Wall-clock timings live in the JSON metadata,
never in the CSV.
"""

from __future__ import annotations

import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from .analytics import (
    ScrapPulseParams,
    adiabaticity_parameter,
    lz_probability,
    sequential_lz,
    validity_check,
)
from .exceptions import InfeasibleScheduleError, TweezersError
from .levels import LevelModel, build_level_model, rabi_coupling, resonance_detunings
from .params import derive_all
from .presets import Preset, RampGeometry
from .propagator import StepControl, propagate, transfer_probability
from .pulses import (
    Constant,
    Gaussian,
    LinearRamp,
    PulseSchedule,
    TanhPlateau,
    build_pi_pulse,
    build_scrap_schedule,
    build_two_atom_scrap_schedule,
)

__all__ = [
    "AxisSpec",
    "SweepSpec",
    "SweepResult",
    "OptimizeResult",
    "gated_ramp_schedule",
    "resonant_gaussian_schedule",
    "ramp_rate_sweep",
    "scrap_contour",
    "delay_scan",
    "pipulse_contour",
    "sequential_pi",
    "run_sweep",
    "optimize_pulse",
    "contiguous_intervals",
    "region_area_fraction",
    "threshold_contours",
]

PROTOCOLS = ("ramp", "scrap_1atom", "scrap_2atom", "pi_pulse", "delay_scan",
             "sequential_pi")

# trajectory storage is decimated hard during sweeps; only the final state
# matters for the transfer probability.
_SWEEP_STEP_CONTROL = StepControl(sample_cap=256)


@dataclass(frozen=True)
class AxisSpec:
    """One sweep axis: name, range, point count and linear/log spacing."""

    name: str
    minimum: float
    maximum: float
    points: int
    scale: str = "linear"

    def __post_init__(self):
        if self.points < 2:
            raise ValueError("an axis needs at least 2 points")
        if not self.maximum > self.minimum:
            raise ValueError("axis maximum must exceed minimum")
        if self.scale not in ("linear", "log"):
            raise ValueError(f"unknown axis scale {self.scale!r}")
        if self.scale == "log" and self.minimum <= 0:
            raise ValueError("log axes need a positive minimum")

    def values(self) -> np.ndarray:
        if self.scale == "log":
            return np.geomspace(self.minimum, self.maximum, self.points)
        return np.linspace(self.minimum, self.maximum, self.points)


@dataclass(frozen=True)
class SweepSpec:
    """A protocol, its axes and fixed parameters, and the target level."""

    protocol: str
    axes: tuple[AxisSpec, ...]
    target: int = 1
    fixed: dict = field(default_factory=dict)
    preset_name: str = "custom"

    def __post_init__(self):
        if self.protocol not in PROTOCOLS:
            raise ValueError(f"unknown protocol {self.protocol!r}")
        if not self.axes:
            raise ValueError("a sweep needs at least one axis")

    @property
    def shape(self) -> tuple[int, ...]:
        return tuple(axis.points for axis in self.axes)

    def to_dict(self) -> dict:
        return {
            "protocol": self.protocol,
            "target": self.target,
            "fixed": dict(self.fixed),
            "preset": self.preset_name,
            "axes": [
                {"name": a.name, "min": a.minimum, "max": a.maximum,
                 "points": a.points, "scale": a.scale}
                for a in self.axes
            ],
        }


@dataclass(frozen=True)
class SweepResult:
    """Gridded transfer probabilities plus analytic companions.

    p has the axes' shape; p_lz is NaN where no sweep-formula prediction
    applies.  extras holds per-point diagnostic columns (margins, alpha).
    failures lists (flat_index, message) for points whose schedule or
    propagation failed; their p is NaN but the grid stays complete.
    """

    spec: SweepSpec
    axis_values: tuple[np.ndarray, ...]
    p: np.ndarray
    p_lz: np.ndarray
    extras: dict[str, np.ndarray]
    failures: tuple[tuple[int, str], ...]
    metadata: dict = field(default_factory=dict)

    def to_csv_text(self) -> str:
        names = [axis.name for axis in self.spec.axes]
        extra_names = sorted(self.extras)
        header = names + ["p_target", "p_lz"] + extra_names
        lines = [",".join(header)]
        flat_p = self.p.reshape(-1)
        flat_lz = self.p_lz.reshape(-1)
        flat_extras = [self.extras[k].reshape(-1) for k in extra_names]
        for flat, idx in enumerate(np.ndindex(self.spec.shape)):
            row = [repr(float(self.axis_values[d][idx[d]]))
                   for d in range(len(idx))]
            row.append(_csv_float(flat_p[flat]))
            row.append(_csv_float(flat_lz[flat]))
            row += [_csv_float(col[flat]) for col in flat_extras]
            lines.append(",".join(row))
        return "\n".join(lines) + "\n"

    def metadata_dict(self) -> dict:
        return {
            "spec": self.spec.to_dict(),
            "failures": [{"index": i, "message": m} for i, m in self.failures],
            **self.metadata,
        }


def _csv_float(value: float) -> str:
    if math.isnan(value):
        return ""
    return repr(float(value))


# --- protocol schedule assembly ---------------------------------------------

def gated_ramp_schedule(model: LevelModel, omega_l: float, rate: float,
                        target: int = 1,
                        geometry: RampGeometry | None = None) -> PulseSchedule:
    """Linear detuning sweep with a flat-top drive gate.

    The detuning sweeps up through the 0->1 crossing (and for target 2 the
    1->2 crossing as well) at |rate|; the drive switches on before the
    first crossing and off after the last one, so the final populations are
    measured in the bare basis with the drive dark.
    """
    geom = geometry or RampGeometry()
    if rate == 0:
        raise ValueError("ramp rate must be non-zero")
    rate = abs(rate)
    if target not in (1, 2) or target > model.n_max:
        raise ValueError(f"unsupported ramp target {target}")
    res = resonance_detunings(model)
    q = (model.derived.e2 - 2.0 * model.derived.e1) / model.hbar
    if q <= 0:
        raise InfeasibleScheduleError(
            "no level anharmonicity: crossings are degenerate, the sweep "
            "cannot select an atom number")
    delta_i = res.d01 - geom.start_depth_frac * q
    if target == 1:
        delta_f = res.d01 + geom.end_above_frac_1 * q
        last_crossing = res.d01
        coupling = abs(rabi_coupling(model, 0, omega_l))
    else:
        delta_f = res.d12 + geom.end_above_frac_2 * q
        last_crossing = res.d12
        coupling = abs(rabi_coupling(model, 1, omega_l))
    duration = (delta_f - delta_i) / rate
    t_first = (res.d01 - delta_i) / rate
    t_last = (last_crossing - delta_i) / rate
    tail = duration - t_last
    # hold the plateau through the crossing's jump region, then switch off
    # over a tanh edge slow compared to the dressed gap opened by the sweep
    span_after = delta_f - last_crossing
    off_frac = geom.jump_coeff * coupling / span_after if span_after > 0 else 1.0
    off_frac = min(max(off_frac, geom.min_off_frac), geom.max_off_frac)
    gate_start = geom.gate_start_frac * t_first
    gate_end = t_last + off_frac * tail
    ramp_time = (1.0 - off_frac) * tail / geom.edge_divisor
    rabi = TanhPlateau(peak=omega_l, start_time=gate_start,
                       plateau_width=gate_end - gate_start,
                       ramp_time=ramp_time)
    return PulseSchedule(
        detuning=LinearRamp(start=delta_i, rate=rate),
        rabi=rabi,
        t_start=0.0,
        t_end=duration,
    )


def resonant_gaussian_schedule(model: LevelModel, omega_hat: float,
                               t_omega: float,
                               transition: tuple[int, int] = (0, 1)
                               ) -> PulseSchedule:
    """Gaussian drive of given peak at a transition's resonant detuning."""
    lower, upper = transition
    if upper != lower + 1 or not 0 <= lower < model.n_max:
        raise ValueError(f"unsupported transition {transition}")
    res = resonance_detunings(model)
    detuning = res.d01 if lower == 0 else res.d12
    return PulseSchedule(
        detuning=Constant(detuning),
        rabi=Gaussian(peak=omega_hat, center=0.0, width=t_omega),
        t_start=-5.0 * t_omega,
        t_end=5.0 * t_omega,
    )


def _scrap_slope(delta_hat: float, t_delta: float, tau: float) -> float:
    """|d detuning/dt| at the crossings of a Stark-chirp detuning pulse."""
    return 2.0 * abs(delta_hat) * tau / t_delta**2 * math.exp(-(tau / t_delta) ** 2)


# --- per-point evaluation ----------------------------------------------------

def _build_model(preset: Preset) -> LevelModel:
    return build_level_model(derive_all(preset.system), n_max=2)


def _evaluate_point(preset: Preset, protocol: str, point: dict,
                    target: int) -> dict:
    model = _build_model(preset)
    hbar = model.hbar
    out: dict = {}
    if protocol == "ramp":
        rate = point["ramp_rate_rad_s2"]
        omega_l = point.get("omega_l_rad_s", preset.omega_l)
        schedule = gated_ramp_schedule(model, omega_l, rate, target=target,
                                       geometry=preset.ramp)
        traj = propagate(model, schedule, step_control=_SWEEP_STEP_CONTROL)
        out["p"] = transfer_probability(traj, target)
        omega01 = rabi_coupling(model, 0, omega_l)
        out["alpha_ad"] = adiabaticity_parameter(hbar * omega01, rate, hbar)
        if target == 1:
            out["p_lz"] = lz_probability(hbar * omega01, rate, hbar)
        else:
            out["p_lz"] = sequential_lz(model, omega_l, rate)
        out["two_level_margin"] = validity_check(model, omega_l).two_level_margin
    elif protocol in ("scrap_1atom", "delay_scan"):
        omega_hat = point.get("omega_hat_rad_s", preset.scrap.omega_hat)
        t_omega = point.get("t_omega_s", preset.scrap.t_omega)
        delta_tau = point.get("delta_tau_s", 0.0)
        t_delta = preset.scrap.t_delta(t_omega)
        tau = preset.scrap.tau(t_omega)
        delta_hat = preset.scrap.delta_hat
        schedule = build_scrap_schedule(omega_hat, t_omega, delta_hat, t_delta,
                                        tau, delta_tau, model.derived.e1,
                                        hbar=hbar)
        traj = propagate(model, schedule, step_control=_SWEEP_STEP_CONTROL)
        out["p"] = transfer_probability(traj, 1)
        omega_eff = rabi_coupling(model, 0, omega_hat)
        slope = _scrap_slope(delta_hat, t_delta, tau)
        out["alpha_ad"] = adiabaticity_parameter(hbar * omega_eff, slope, hbar)
        out["p_lz"] = lz_probability(hbar * omega_eff, slope, hbar)
        report = validity_check(model, omega_hat,
                                scrap=ScrapPulseParams(omega_hat, t_omega,
                                                       delta_hat, t_delta, tau))
        out["two_level_margin"] = report.two_level_margin
        out["scrap_adiabatic_margin"] = report.scrap_adiabatic_margin
        out["scrap_pump_width_margin"] = report.scrap_pump_width_margin
        out["scrap_diabatic_margin"] = report.scrap_diabatic_margin
    elif protocol == "scrap_2atom":
        omega_hat = point.get("omega_hat_rad_s", preset.scrap2.omega_hat)
        t_omega = point.get("t_omega_s", preset.scrap2.t_omega)
        cfg = preset.scrap2
        t_delta = cfg.t_delta(t_omega)
        schedule = build_two_atom_scrap_schedule(
            omega_hat, t_omega, cfg.delta_hat, t_delta, cfg.baseline_depth,
            model.derived.e1, model.derived.e2 - model.derived.e1,
            ramp_time=cfg.ramp_time_factor * t_omega, hbar=hbar)
        traj = propagate(model, schedule, step_control=_SWEEP_STEP_CONTROL)
        out["p"] = transfer_probability(traj, 2)
        # crossing-by-crossing sweep prediction from the pulse's local slopes
        q_gap = (model.derived.e2 - 2.0 * model.derived.e1) / hbar
        center_ratio = cfg.delta_hat / cfg.baseline_depth
        tau01 = t_delta * math.sqrt(math.log(center_ratio))
        tau12 = t_delta * math.sqrt(
            math.log(cfg.delta_hat / (cfg.baseline_depth + q_gap)))
        slope01 = _scrap_slope(cfg.delta_hat, t_delta, tau01)
        slope12 = _scrap_slope(cfg.delta_hat, t_delta, tau12)
        om01 = rabi_coupling(model, 0, omega_hat)
        om12 = rabi_coupling(model, 1, omega_hat)
        out["p_lz"] = (lz_probability(hbar * om01, slope01, hbar)
                       * lz_probability(hbar * om12, slope12, hbar))
        out["alpha_ad"] = adiabaticity_parameter(hbar * om01, slope01, hbar)
        out["two_level_margin"] = validity_check(model, omega_hat).two_level_margin
    elif protocol == "pi_pulse":
        omega_hat = point["omega_hat_rad_s"]
        t_omega = point["t_omega_s"]
        schedule = resonant_gaussian_schedule(model, omega_hat, t_omega, (0, 1))
        traj = propagate(model, schedule, step_control=_SWEEP_STEP_CONTROL)
        out["p"] = transfer_probability(traj, target)
        out["p_lz"] = math.nan
        out["two_level_margin"] = validity_check(model, omega_hat).two_level_margin
    elif protocol == "sequential_pi":
        t_omega = point.get("t_omega_s", preset.pi.t_omega)
        omit_second = bool(point.get("omit_second", False))
        first = build_pi_pulse(model, (0, 1), t_omega)
        traj1 = propagate(model, first, step_control=_SWEEP_STEP_CONTROL)
        if omit_second:
            out["p"] = transfer_probability(traj1, target)
            out["p1_after_first"] = transfer_probability(traj1, 1)
        else:
            second = build_pi_pulse(model, (1, 2), t_omega)
            traj2 = propagate(model, second, initial_state=traj1.final_state,
                              step_control=_SWEEP_STEP_CONTROL)
            out["p"] = transfer_probability(traj2, target)
            out["p1_after_first"] = transfer_probability(traj1, 1)
        out["p_lz"] = math.nan
    else:
        raise ValueError(f"unknown protocol {protocol!r}")
    return out


def _evaluate_task(task: tuple) -> dict:
    preset, protocol, point, target = task
    try:
        return _evaluate_point(preset, protocol, point, target)
    except (TweezersError, ValueError, FloatingPointError) as exc:
        return {"p": math.nan, "p_lz": math.nan,
                "error": f"{type(exc).__name__}: {exc}"}


def _execute(spec: SweepSpec, preset: Preset, threads: int = 1) -> SweepResult:
    axis_values = tuple(axis.values() for axis in spec.axes)
    tasks = []
    for idx in np.ndindex(spec.shape):
        point = dict(spec.fixed)
        for d, axis in enumerate(spec.axes):
            point[axis.name] = float(axis_values[d][idx[d]])
        tasks.append((preset, spec.protocol, point, spec.target))
    if threads > 1:
        with ProcessPoolExecutor(max_workers=threads) as pool:
            results = list(pool.map(_evaluate_task, tasks,
                                    chunksize=max(1, len(tasks) // (threads * 8))))
    else:
        results = [_evaluate_task(task) for task in tasks]

    n = len(tasks)
    p = np.full(n, math.nan)
    p_lz = np.full(n, math.nan)
    extra_names = sorted({k for r in results for k in r
                          if k not in ("p", "p_lz", "error")})
    extras = {k: np.full(n, math.nan) for k in extra_names}
    failures: list[tuple[int, str]] = []
    for i, r in enumerate(results):
        p[i] = r.get("p", math.nan)
        p_lz[i] = r.get("p_lz", math.nan)
        for k in extra_names:
            if k in r:
                extras[k][i] = r[k]
        if "error" in r:
            failures.append((i, r["error"]))
    shape = spec.shape
    return SweepResult(
        spec=spec,
        axis_values=axis_values,
        p=p.reshape(shape),
        p_lz=p_lz.reshape(shape),
        extras={k: v.reshape(shape) for k, v in extras.items()},
        failures=tuple(failures),
    )


# --- public sweep operations --------------------------------------------------

def _axis_from_values(name: str, values: np.ndarray) -> AxisSpec:
    """Describe a value array as an AxisSpec; it must be lin- or log-spaced."""
    values = np.asarray(values, dtype=float)
    if values.size < 2:
        raise ValueError("a sweep axis needs at least 2 points")
    ratios = np.diff(np.log(values)) if np.all(values > 0) else None
    if ratios is not None and ratios.size and np.allclose(ratios, ratios[0],
                                                          rtol=1e-10, atol=0):
        scale = "log"
    else:
        scale = "linear"
    axis = AxisSpec(name=name, minimum=float(values[0]), maximum=float(values[-1]),
                    points=int(values.size), scale=scale)
    if not np.allclose(axis.values(), values, rtol=1e-12, atol=0):
        raise ValueError(
            f"axis {name!r} values must be linearly or geometrically spaced")
    return axis


def ramp_rate_sweep(preset: Preset, rates, target: int = 1,
                    threads: int = 1) -> SweepResult:
    """Transfer probability vs detuning sweep rate, with the LZ companion.

    The metadata records the contiguous rate intervals whose simulated
    probability exceeds 0.99.
    """
    spec = SweepSpec(protocol="ramp",
                     axes=(_axis_from_values("ramp_rate_rad_s2", rates),),
                     target=target, preset_name=preset.name)
    result = _execute(spec, preset, threads)
    intervals = contiguous_intervals(result.axis_values[0], result.p, 0.99)
    result.metadata["intervals_p_gt_0.99"] = intervals
    return result


def scrap_contour(preset: Preset, omega_hats, t_omegas, target: int = 1,
                  threads: int = 1) -> SweepResult:
    """Stark-chirp efficiency over the (pump peak, pump width) plane.

    The detuning-pulse width stays locked to twice the pump width.  For
    target 2 the pump is the flat-top two-crossing variant.
    """
    protocol = "scrap_1atom" if target == 1 else "scrap_2atom"
    spec = SweepSpec(
        protocol=protocol,
        axes=(_axis_from_values("omega_hat_rad_s", omega_hats),
              _axis_from_values("t_omega_s", t_omegas)),
        target=target, preset_name=preset.name)
    result = _execute(spec, preset, threads)
    result.metadata["contours"] = {
        "0.99": threshold_contours(result, 0.99),
        "0.80": threshold_contours(result, 0.80),
    }
    result.metadata["area_fraction_p_gt_0.99"] = region_area_fraction(result.p, 0.99)
    return result


def delay_scan(preset: Preset, delays, threads: int = 1) -> SweepResult:
    """Efficiency vs pump-to-crossing delay for the single-atom Stark chirp.

    delta_tau = 0 centres the pump on the first resonance crossing;
    negative values move it towards (and past) the second crossing, where
    the adiabatic/diabatic passage order is exchanged.
    """
    spec = SweepSpec(protocol="delay_scan",
                     axes=(_axis_from_values("delta_tau_s", delays),),
                     target=1, preset_name=preset.name)
    return _execute(spec, preset, threads)


def pipulse_contour(preset: Preset, omega_hats, t_omegas, target: int = 1,
                    threads: int = 1) -> SweepResult:
    """Resonant-pulse efficiency over the (peak, width) plane."""
    spec = SweepSpec(
        protocol="pi_pulse",
        axes=(_axis_from_values("omega_hat_rad_s", omega_hats),
              _axis_from_values("t_omega_s", t_omegas)),
        target=target, preset_name=preset.name)
    result = _execute(spec, preset, threads)
    result.metadata["contours"] = {
        "0.99": threshold_contours(result, 0.99),
        "0.80": threshold_contours(result, 0.80),
    }
    return result


def sequential_pi(preset: Preset, t_omegas=None, omit_second: bool = False,
                  threads: int = 1) -> SweepResult:
    """Two chained resonant pi pulses (0->1 then 1->2), reporting P_{0->2}.

    Each pulse's peak is solved for effective area pi at its own
    transition; the second pulse starts from the state the first one left.
    """
    if t_omegas is None:
        t_omegas = preset.pi.t_omega * np.array([0.75, 1.0, 1.5])
    spec = SweepSpec(protocol="sequential_pi",
                     axes=(_axis_from_values("t_omega_s", t_omegas),),
                     target=2, fixed={"omit_second": omit_second},
                     preset_name=preset.name)
    return _execute(spec, preset, threads)


def run_sweep(spec: SweepSpec, preset: Preset, threads: int = 1) -> SweepResult:
    """Dispatch a SweepSpec to its protocol implementation."""
    result = _execute(spec, preset, threads)
    if spec.protocol == "ramp":
        result.metadata["intervals_p_gt_0.99"] = contiguous_intervals(
            result.axis_values[0], result.p, 0.99)
    if result.p.ndim == 2:
        result.metadata["contours"] = {
            "0.99": threshold_contours(result, 0.99),
            "0.80": threshold_contours(result, 0.80),
        }
        result.metadata["area_fraction_p_gt_0.99"] = region_area_fraction(
            result.p, 0.99)
    return result


# --- region extraction ---------------------------------------------------------

def contiguous_intervals(axis: np.ndarray, p: np.ndarray,
                         threshold: float) -> list[tuple[float, float]]:
    """Axis-value intervals over which p exceeds the threshold (grid runs)."""
    mask = np.asarray(p).reshape(-1) > threshold
    intervals = []
    start = None
    values = np.asarray(axis, dtype=float)
    for i, hit in enumerate(mask):
        if hit and start is None:
            start = i
        elif not hit and start is not None:
            intervals.append((float(values[start]), float(values[i - 1])))
            start = None
    if start is not None:
        intervals.append((float(values[start]), float(values[-1])))
    return intervals


def region_area_fraction(p: np.ndarray, threshold: float) -> float:
    """Fraction of grid points with p above the threshold (NaN counts as below)."""
    p = np.asarray(p)
    return float(np.mean(np.nan_to_num(p, nan=-1.0) > threshold))


def threshold_contours(result: SweepResult, level: float) -> list[list[float]]:
    """Marching-squares contour segments [x1, y1, x2, y2] at one level.

    x runs along the first axis, y along the second.  NaN cells are skipped.
    """
    p = result.p
    if p.ndim != 2:
        raise ValueError("contour extraction needs a 2-D sweep")
    xs, ys = result.axis_values
    segments: list[list[float]] = []

    def interp(va, vb, a, b):
        # linear interpolation of the level crossing between grid values
        return a + (level - va) / (vb - va) * (b - a)

    for i in range(p.shape[0] - 1):
        for j in range(p.shape[1] - 1):
            corners = np.array([p[i, j], p[i + 1, j], p[i + 1, j + 1], p[i, j + 1]])
            if np.any(np.isnan(corners)):
                continue
            code = sum(1 << k for k, v in enumerate(corners) if v > level)
            if code in (0, 15):
                continue
            x0, x1 = xs[i], xs[i + 1]
            y0, y1 = ys[j], ys[j + 1]
            # edge midpoints by interpolation: bottom(0-1), right(1-2),
            # top(3-2), left(0-3); corners ordered (i,j),(i+1,j),(i+1,j+1),(i,j+1)
            pts = {}
            if (corners[0] > level) != (corners[1] > level):
                pts["b"] = (interp(corners[0], corners[1], x0, x1), y0)
            if (corners[1] > level) != (corners[2] > level):
                pts["r"] = (x1, interp(corners[1], corners[2], y0, y1))
            if (corners[3] > level) != (corners[2] > level):
                pts["t"] = (interp(corners[3], corners[2], x0, x1), y1)
            if (corners[0] > level) != (corners[3] > level):
                pts["l"] = (x0, interp(corners[0], corners[3], y0, y1))
            keys = sorted(pts)
            if len(keys) == 2:
                (xa, ya), (xb, yb) = pts[keys[0]], pts[keys[1]]
                segments.append([float(xa), float(ya), float(xb), float(yb)])
            elif len(keys) == 4:
                # saddle cell: pair bottom-left and top-right
                segments.append([float(pts["b"][0]), float(pts["b"][1]),
                                 float(pts["l"][0]), float(pts["l"][1])])
                segments.append([float(pts["t"][0]), float(pts["t"][1]),
                                 float(pts["r"][0]), float(pts["r"][1])])
    return segments


# --- derivative-free pulse-parameter optimization ------------------------------

@dataclass(frozen=True)
class OptimizeResult:
    """Best parameters found, their probability, and the search history."""

    params: dict
    probability: float
    converged: bool
    n_evaluations: int
    best_history: tuple[float, ...]


def optimize_pulse(protocol, bounds: dict[str, tuple[float, float]],
                   budget: int, preset: Preset | None = None, target: int = 1,
                   seed: int = 0, fixed: dict | None = None,
                   x0: dict | None = None) -> OptimizeResult:
    """Maximize a transfer probability over pulse parameters (Nelder-Mead).

    protocol is one of the sweep protocol names (a schedule is built per
    evaluation from the preset plus the candidate parameters) or a callable
    mapping a parameter dict to the objective.  bounds maps parameter names
    to (low, high); candidates are clamped to the box, so the result never
    leaves it.  The search is deterministic for fixed inputs and seed, and
    the best-so-far history is monotone non-decreasing.  If the budget runs
    out before the simplex collapses, the best point found so far is
    returned with converged=False.
    """
    if budget < 10:
        raise ValueError("optimization budget must be at least 10 evaluations")
    names = sorted(bounds)
    if not names:
        raise ValueError("no parameters to optimize")
    lows = np.array([float(bounds[k][0]) for k in names])
    highs = np.array([float(bounds[k][1]) for k in names])
    if not np.all(np.isfinite(lows)) or not np.all(np.isfinite(highs)):
        raise ValueError("bounds must be finite")
    if not np.all(highs > lows):
        raise ValueError("each bound must satisfy low < high")

    if callable(protocol):
        evaluate_params = protocol
    else:
        if preset is None:
            raise ValueError("a preset is required for named protocols")
        base = dict(fixed or {})

        def evaluate_params(params: dict) -> float:
            point = dict(base)
            point.update(params)
            result = _evaluate_task((preset, protocol, point, target))
            p = result.get("p", math.nan)
            return 0.0 if math.isnan(p) else p

    evaluations = 0
    best_value = -math.inf
    best_x = None
    history: list[float] = []

    def objective(z: np.ndarray) -> float:
        nonlocal evaluations, best_value, best_x
        z = np.clip(z, 0.0, 1.0)
        x = lows + z * (highs - lows)
        params = {k: float(x[d]) for d, k in enumerate(names)}
        value = float(evaluate_params(params))
        evaluations += 1
        if value > best_value:
            best_value = value
            best_x = x.copy()
        history.append(best_value)
        return -value  # minimize

    dim = len(names)
    rng = np.random.default_rng(seed)
    if x0 is not None:
        z0 = (np.array([float(x0[k]) for k in names]) - lows) / (highs - lows)
        z0 = np.clip(z0, 0.0, 1.0)
    else:
        z0 = 0.5 + 0.2 * (rng.random(dim) - 0.5)

    converged = _nelder_mead(objective, z0, budget)
    params = {k: float(best_x[d]) for d, k in enumerate(names)}
    return OptimizeResult(
        params=params,
        probability=best_value,
        converged=converged,
        n_evaluations=evaluations,
        best_history=tuple(history),
    )


def _nelder_mead(objective, z0: np.ndarray, budget: int,
                 step: float = 0.25, xtol: float = 1e-4,
                 ftol: float = 1e-10) -> bool:
    """Simplex search in [0,1]^d; returns True if converged within budget."""
    dim = z0.size
    simplex = [np.clip(z0, 0.0, 1.0)]
    for d in range(dim):
        vertex = simplex[0].copy()
        vertex[d] = vertex[d] + step if vertex[d] + step <= 1.0 else vertex[d] - step
        simplex.append(np.clip(vertex, 0.0, 1.0))
    spent = [0]

    def f(z):
        spent[0] += 1
        return objective(z)

    values = [f(v) for v in simplex]
    while spent[0] < budget:
        order = np.argsort(values)
        simplex = [simplex[i] for i in order]
        values = [values[i] for i in order]
        spread = max(np.max(np.abs(v - simplex[0])) for v in simplex[1:])
        if spread < xtol and values[-1] - values[0] < ftol:
            return True
        centroid = np.mean(simplex[:-1], axis=0)
        reflected = np.clip(centroid + (centroid - simplex[-1]), 0.0, 1.0)
        fr = f(reflected)
        if fr < values[0]:
            expanded = np.clip(centroid + 2.0 * (centroid - simplex[-1]), 0.0, 1.0)
            fe = f(expanded) if spent[0] < budget else fr
            if fe < fr:
                simplex[-1], values[-1] = expanded, fe
            else:
                simplex[-1], values[-1] = reflected, fr
        elif fr < values[-2]:
            simplex[-1], values[-1] = reflected, fr
        else:
            contracted = np.clip(centroid + 0.5 * (simplex[-1] - centroid), 0.0, 1.0)
            fc = f(contracted) if spent[0] < budget else math.inf
            if fc < values[-1]:
                simplex[-1], values[-1] = contracted, fc
            else:
                for i in range(1, len(simplex)):
                    if spent[0] >= budget:
                        return False
                    simplex[i] = np.clip(
                        simplex[0] + 0.5 * (simplex[i] - simplex[0]), 0.0, 1.0)
                    values[i] = f(simplex[i])
    return False
