"""Time-dependent pulse envelopes and (detuning, drive) schedule assembly.

Width convention: the Gaussian envelope is peak * exp(-(t - c)^2 / T^2)
with width T and no factor 2 in the exponent.  Getting this wrong silently
rescales every width by sqrt(2), so it is pinned here and tested.

Schedules are evaluated only on their finite window [t_start, t_end]; the
builders place the window several pulse widths beyond the outermost
feature so the truncated tails contribute less than ~1e-8 of a pulse area.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.integrate import quad
from scipy.optimize import brentq

from .constants import HBAR
from .exceptions import InfeasibleScheduleError
from .levels import LevelModel, resonance_detunings

__all__ = [
    "Envelope",
    "Constant",
    "LinearRamp",
    "Gaussian",
    "TanhPlateau",
    "OffsetSum",
    "PulseSchedule",
    "pulse_area",
    "build_ramp_schedule",
    "build_scrap_schedule",
    "build_two_atom_scrap_schedule",
    "build_pi_pulse",
    "crossing_times",
    "envelope_to_dict",
    "envelope_from_dict",
    "schedule_to_dict",
    "schedule_from_dict",
]


class Envelope:
    """Base class: a pointwise-evaluable function of time, defined for all t."""

    def __call__(self, t):
        raise NotImplementedError


@dataclass(frozen=True)
class Constant(Envelope):
    value: float

    def __call__(self, t):
        t = np.asarray(t, dtype=float)
        return np.full(t.shape, self.value) if t.ndim else float(self.value)


@dataclass(frozen=True)
class LinearRamp(Envelope):
    """start + rate * (t - t_ref)."""

    start: float
    rate: float
    t_ref: float = 0.0

    def __call__(self, t):
        t = np.asarray(t, dtype=float)
        out = self.start + self.rate * (t - self.t_ref)
        return out if out.ndim else float(out)


@dataclass(frozen=True)
class Gaussian(Envelope):
    """peak * exp(-(t - center)^2 / width^2)."""

    peak: float
    center: float
    width: float

    def __post_init__(self):
        if not self.width > 0:
            raise ValueError("gaussian width must be strictly positive")

    def __call__(self, t):
        t = np.asarray(t, dtype=float)
        out = self.peak * np.exp(-((t - self.center) / self.width) ** 2)
        return out if out.ndim else float(out)


@dataclass(frozen=True)
class TanhPlateau(Envelope):
    """Smooth switch-on / plateau / switch-off pulse.

    (peak/2) * [tanh((t - t_on + 2 t_r) / t_r) - tanh((t - t_on - w - 2 t_r) / t_r)]

    with t_on = start_time, w = plateau_width, t_r = ramp_time.  The value
    is within e^-4 of peak across [start_time, start_time + plateau_width]
    once the plateau is a few ramp times wide.
    """

    peak: float
    start_time: float
    plateau_width: float
    ramp_time: float

    def __post_init__(self):
        if not self.ramp_time > 0:
            raise ValueError("ramp_time must be strictly positive")
        if not self.plateau_width > 0:
            raise ValueError("plateau_width must be strictly positive")

    def __call__(self, t):
        t = np.asarray(t, dtype=float)
        tr = self.ramp_time
        rising = np.tanh((t - self.start_time + 2.0 * tr) / tr)
        falling = np.tanh((t - self.start_time - self.plateau_width - 2.0 * tr) / tr)
        out = 0.5 * self.peak * (rising - falling)
        return out if out.ndim else float(out)


@dataclass(frozen=True)
class OffsetSum(Envelope):
    """offset + inner(t); used for detuning pulses riding on a baseline."""

    offset: float
    inner: Envelope

    def __call__(self, t):
        return self.offset + self.inner(t)


@dataclass(frozen=True)
class PulseSchedule:
    """A (detuning(t), Omega_L(t)) pair on a finite window, both in rad/s."""

    detuning: Envelope
    rabi: Envelope
    t_start: float
    t_end: float

    def __post_init__(self):
        if not self.t_end > self.t_start:
            raise ValueError("schedule window must satisfy t_start < t_end")

    @property
    def duration(self) -> float:
        return self.t_end - self.t_start


def pulse_area(envelope: Envelope, t_start: float, t_end: float) -> float:
    """Integral of the envelope over [t_start, t_end] (adaptive, rel 1e-10)."""
    probe = envelope(np.linspace(t_start, t_end, 97))
    if not np.all(np.isfinite(probe)):
        raise ValueError("envelope is not finite on the integration window")
    value, _ = quad(envelope, t_start, t_end, epsabs=0.0, epsrel=1e-10, limit=400)
    return value


def build_ramp_schedule(delta_i: float, delta_f: float, rate: float,
                        omega_l: float) -> PulseSchedule:
    """Linear detuning sweep from delta_i to delta_f at |rate|, constant drive.

    The signed rate must point from delta_i towards delta_f; the window is
    exactly the sweep duration |delta_f - delta_i| / |rate|.
    """
    if rate == 0:
        raise ValueError("ramp rate must be non-zero")
    span = delta_f - delta_i
    if span == 0:
        raise ValueError("degenerate ramp: delta_i == delta_f")
    if span * rate < 0:
        raise ValueError(
            f"ramp direction inconsistent: delta_f - delta_i = {span:.3g} "
            f"but rate = {rate:.3g}")
    duration = span / rate
    return PulseSchedule(
        detuning=LinearRamp(start=delta_i, rate=rate),
        rabi=Constant(omega_l),
        t_start=0.0,
        t_end=duration,
    )


def build_scrap_schedule(omega_hat: float, t_omega: float, delta_hat: float,
                         t_delta: float, tau: float, delta_tau: float,
                         e1: float, delta_offset: float | None = None,
                         hbar: float = HBAR) -> PulseSchedule:
    """Stark-chirp schedule: Gaussian detuning pulse plus Gaussian pump.

    The detuning pulse delta_offset + delta_hat * exp(-(t - tau)^2/T_d^2)
    is centred at t = tau and crosses the one-atom resonance E1/hbar twice,
    at t1 and t2 symmetric about tau.  When delta_offset is not given it is
    solved so that t1 = 0 and t2 = 2 tau.  The pump Gaussian is centred at
    t1 - delta_tau: delta_tau = 0 puts the pump peak on the first crossing
    (adiabatic first, diabatic second), and delta_tau = -(t2 - t1) moves it
    onto the second crossing, exchanging the passage order.
    """
    if not (t_omega > 0 and t_delta > 0 and tau > 0):
        raise ValueError("t_omega, t_delta and tau must be strictly positive")
    if delta_hat == 0:
        raise ValueError("delta_hat must be non-zero")
    resonance = e1 / hbar
    if delta_offset is None:
        delta_offset = resonance - delta_hat * math.exp(-(tau / t_delta) ** 2)
        t1, t2 = 0.0, 2.0 * tau
    else:
        ratio = (resonance - delta_offset) / delta_hat
        if not 0.0 < ratio <= 1.0:
            raise InfeasibleScheduleError(
                "detuning pulse never reaches the resonance: "
                f"(E1/hbar - delta_offset)/delta_hat = {ratio:.3g} not in (0, 1]")
        half = t_delta * math.sqrt(max(-math.log(ratio), 0.0))
        t1, t2 = tau - half, tau + half
    pump_center = t1 - delta_tau
    pump = Gaussian(peak=omega_hat, center=pump_center, width=t_omega)
    detuning = OffsetSum(offset=delta_offset,
                         inner=Gaussian(peak=delta_hat, center=tau, width=t_delta))
    t_lo = min(pump_center - 4.0 * t_omega, t1 - t_delta)
    t_hi = max(pump_center + 4.0 * t_omega, t2 + t_delta)
    return PulseSchedule(detuning=detuning, rabi=pump, t_start=t_lo, t_end=t_hi)


def build_two_atom_scrap_schedule(omega_hat: float, t_omega: float,
                                  delta_hat: float, t_delta: float,
                                  baseline_depth: float, e1: float, e12: float,
                                  ramp_time: float | None = None,
                                  lead: float | None = None,
                                  lag: float | None = None,
                                  hbar: float = HBAR) -> PulseSchedule:
    """Sequential two-atom Stark-chirp schedule.

    One Gaussian detuning pulse sweeps up through both resonances (first
    E1/hbar for 0->1 at t = 0, then (E2-E1)/hbar for 1->2) while a
    flat-top tanh pump stays on across both crossings and switches off
    before the detuning comes back down through them.  baseline_depth is
    how far below the 0->1 resonance the detuning sits between pulses.
    """
    if not (t_omega > 0 and t_delta > 0 and baseline_depth > 0):
        raise ValueError("t_omega, t_delta and baseline_depth must be positive")
    d01 = e1 / hbar
    d12 = e12 / hbar
    gap = d12 - d01
    if gap <= 0:
        raise InfeasibleScheduleError(
            "level ladder is not anharmonic: d12 <= d01, sequential transfer "
            "cannot be resolved")
    if delta_hat <= baseline_depth + gap:
        raise InfeasibleScheduleError(
            f"detuning pulse maximum {delta_hat:.3g} rad/s never reaches the "
            f"1->2 resonance (needs > {baseline_depth + gap:.3g} rad/s)")
    ramp_time = 0.2 * t_omega if ramp_time is None else ramp_time
    lead = 0.5 * t_omega if lead is None else lead
    lag = 0.3 * t_omega if lag is None else lag
    delta_offset = d01 - baseline_depth
    # centre the detuning pulse so the rising 0->1 crossing sits at t = 0
    center = t_delta * math.sqrt(math.log(delta_hat / baseline_depth))
    t_cross_12 = center - t_delta * math.sqrt(
        math.log(delta_hat / (baseline_depth + gap)))
    pump = TanhPlateau(peak=omega_hat, start_time=-lead,
                       plateau_width=t_cross_12 + lag + lead,
                       ramp_time=ramp_time)
    detuning = OffsetSum(offset=delta_offset,
                         inner=Gaussian(peak=delta_hat, center=center,
                                        width=t_delta))
    t_lo = -lead - 4.0 * ramp_time - 2.0 * t_omega
    t_hi = 2.0 * center + 2.0 * t_omega
    return PulseSchedule(detuning=detuning, rabi=pump, t_start=t_lo, t_end=t_hi)


def build_pi_pulse(model: LevelModel, transition: tuple[int, int] | str,
                   t_omega: float) -> PulseSchedule:
    """Resonant Gaussian pulse with effective area pi on one transition.

    The drive peak is solved so that the collective coupling integrates to
    pi: Omega_hat = sqrt(pi) / (kappa sqrt(n+1) T), with the detuning held
    at the transition's resonance (d01 for 0->1, d12 for 1->2).
    """
    if not t_omega > 0:
        raise ValueError("t_omega must be strictly positive")
    if isinstance(transition, str):
        parts = transition.replace("->", "-").split("-")
        transition = (int(parts[0]), int(parts[1]))
    lower, upper = transition
    if upper != lower + 1 or not 0 <= lower < model.n_max:
        raise ValueError(f"unsupported transition {transition}")
    res = resonance_detunings(model)
    detuning = res.d01 if lower == 0 else res.d12
    peak = math.sqrt(math.pi) / (model.rabi_units[lower] * t_omega)
    return PulseSchedule(
        detuning=Constant(detuning),
        rabi=Gaussian(peak=peak, center=0.0, width=t_omega),
        t_start=-5.0 * t_omega,
        t_end=5.0 * t_omega,
    )


def crossing_times(schedule: PulseSchedule, resonance_energy: float,
                   hbar: float = HBAR, n_scan: int = 4096) -> list[float]:
    """All times in the window where the detuning crosses resonance_energy/hbar.

    Sign-scan on a dense grid followed by bisection; roots are refined to
    1e-12 of the window length and returned ascending.  An empty list means
    the detuning never reaches the resonance.
    """
    target = resonance_energy / hbar
    ts = np.linspace(schedule.t_start, schedule.t_end, n_scan + 1)
    values = np.asarray(schedule.detuning(ts), dtype=float) - target
    roots: list[float] = []
    xtol = 1e-12 * schedule.duration

    def f(t):
        return float(schedule.detuning(t)) - target

    for k in range(n_scan):
        a, b = ts[k], ts[k + 1]
        fa, fb = values[k], values[k + 1]
        if fa == 0.0:
            roots.append(float(a))
        elif fa * fb < 0.0:
            roots.append(float(brentq(f, a, b, xtol=xtol)))
    if values[-1] == 0.0:
        roots.append(float(ts[-1]))
    # merge duplicates from roots landing exactly on scan nodes
    merged: list[float] = []
    for r in roots:
        if not merged or abs(r - merged[-1]) > 2.0 * xtol:
            merged.append(r)
    return merged


# --- JSON (de)serialization -------------------------------------------------

def envelope_to_dict(env: Envelope) -> dict:
    if isinstance(env, Constant):
        return {"type": "constant", "value": env.value}
    if isinstance(env, LinearRamp):
        return {"type": "linear_ramp", "start": env.start, "rate": env.rate,
                "t_ref": env.t_ref}
    if isinstance(env, Gaussian):
        return {"type": "gaussian", "peak": env.peak, "center": env.center,
                "width": env.width}
    if isinstance(env, TanhPlateau):
        return {"type": "tanh_plateau", "peak": env.peak,
                "start_time": env.start_time,
                "plateau_width": env.plateau_width,
                "ramp_time": env.ramp_time}
    if isinstance(env, OffsetSum):
        return {"type": "offset_sum", "offset": env.offset,
                "inner": envelope_to_dict(env.inner)}
    raise TypeError(f"unknown envelope type {type(env).__name__}")


def envelope_from_dict(data: dict) -> Envelope:
    kind = data.get("type")
    if kind == "constant":
        return Constant(float(data["value"]))
    if kind == "linear_ramp":
        return LinearRamp(float(data["start"]), float(data["rate"]),
                          float(data.get("t_ref", 0.0)))
    if kind == "gaussian":
        return Gaussian(float(data["peak"]), float(data["center"]),
                        float(data["width"]))
    if kind == "tanh_plateau":
        return TanhPlateau(float(data["peak"]), float(data["start_time"]),
                           float(data["plateau_width"]), float(data["ramp_time"]))
    if kind == "offset_sum":
        return OffsetSum(float(data["offset"]), envelope_from_dict(data["inner"]))
    raise ValueError(f"unknown envelope type {kind!r}")


def schedule_to_dict(schedule: PulseSchedule) -> dict:
    return {
        "detuning": envelope_to_dict(schedule.detuning),
        "rabi": envelope_to_dict(schedule.rabi),
        "window": [schedule.t_start, schedule.t_end],
    }


def schedule_from_dict(data: dict) -> PulseSchedule:
    window = data["window"]
    return PulseSchedule(
        detuning=envelope_from_dict(data["detuning"]),
        rabi=envelope_from_dict(data["rabi"]),
        t_start=float(window[0]),
        t_end=float(window[1]),
    )
