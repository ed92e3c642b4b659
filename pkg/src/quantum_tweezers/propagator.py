"""Time-dependent Schroedinger propagation of the truncated level system.

The integrator is a fixed-step fourth-order Magnus scheme (two-point
Gauss-Legendre quadrature with its commutator correction).  Each step is a
true matrix exponential of an anti-Hermitian generator, so the evolution
is unitary to machine precision regardless of step size, and a constant
Hamiltonian is propagated exactly.  Step size follows

    h = min(window / 1000,  2 pi / (50 * omega_max))

with omega_max the largest instantaneous spectral scale of H/hbar sampled
over the window (plus the drive strength), so fast detuning excursions are
resolved with ~50 steps per oscillation period.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .exceptions import IntegrationError
from .levels import LevelModel, hamiltonian_stack
from .pulses import PulseSchedule

__all__ = [
    "StepControl",
    "Trajectory",
    "propagate",
    "transfer_probability",
    "phase_convention",
    "trajectory_to_csv",
]

NORM_TOLERANCE = 1e-9
_GL_NODE_1 = 0.5 - math.sqrt(3.0) / 6.0
_GL_NODE_2 = 0.5 + math.sqrt(3.0) / 6.0
_BLOCK = 65536  # steps processed per vectorized block (bounds memory)


@dataclass(frozen=True)
class StepControl:
    """Step-selection and output-decimation knobs.

    points_per_period : steps per 2pi/omega_max oscillation (default 50)
    min_steps         : lower bound on step count (window/1000 rule)
    sample_cap        : maximum number of stored trajectory samples
    h_override        : fixed step size in seconds, bypassing the rule
    """

    points_per_period: int = 50
    min_steps: int = 1000
    sample_cap: int = 10_000
    h_override: float | None = None


@dataclass(frozen=True)
class Trajectory:
    """Propagated amplitudes on a decimated time grid.

    times has shape (S,), states (S, dim) complex, populations (S, dim).
    The last sample always coincides with the end of the window.
    """

    times: np.ndarray
    states: np.ndarray
    populations: np.ndarray
    n_steps: int
    step: float

    @property
    def dim(self) -> int:
        return self.states.shape[1]

    @property
    def final_state(self) -> np.ndarray:
        return self.states[-1]


def _spectral_scale(model: LevelModel, schedule: PulseSchedule,
                    n_probe: int = 257) -> float:
    """Largest instantaneous eigenfrequency scale of H/hbar over the window."""
    ts = np.linspace(schedule.t_start, schedule.t_end, n_probe)
    deltas = np.asarray(schedule.detuning(ts), dtype=float)
    omegas = np.asarray(schedule.rabi(ts), dtype=float)
    if not (np.all(np.isfinite(deltas)) and np.all(np.isfinite(omegas))):
        raise ValueError("schedule is not finite on its window")
    h_stack = hamiltonian_stack(model, deltas, omegas)
    eigs = np.linalg.eigvalsh(h_stack)
    scale = float(np.max(np.abs(eigs))) / model.hbar
    return max(scale, float(np.max(np.abs(omegas))))


def _choose_step(model: LevelModel, schedule: PulseSchedule,
                 control: StepControl) -> tuple[float, int]:
    window = schedule.duration
    if control.h_override is not None:
        if not control.h_override > 0:
            raise ValueError("h_override must be positive")
        n = max(1, math.ceil(window / control.h_override))
        return window / n, n
    omega_max = _spectral_scale(model, schedule)
    h = window / control.min_steps
    if omega_max > 0:
        h = min(h, 2.0 * math.pi / (control.points_per_period * omega_max))
    n = max(control.min_steps, math.ceil(window / h))
    return window / n, n


def propagate(model: LevelModel, schedule: PulseSchedule,
              initial_state: np.ndarray | None = None,
              step_control: StepControl | None = None) -> Trajectory:
    """Solve i hbar dpsi/dt = H(t) psi over the schedule window.

    The initial state defaults to |0> (everything in the reservoir) and
    must be normalized.  Raises IntegrationError if the state leaves the
    unit sphere by more than 1e-9 or becomes non-finite.
    """
    control = step_control or StepControl()
    dim = model.dim
    if initial_state is None:
        psi = np.zeros(dim, dtype=complex)
        psi[0] = 1.0
    else:
        psi = np.asarray(initial_state, dtype=complex).copy()
        if psi.shape != (dim,):
            raise ValueError(f"initial state must have shape ({dim},)")
        norm = float(np.linalg.norm(psi))
        if abs(norm - 1.0) > 1e-6:
            raise ValueError(f"initial state norm {norm} is not 1")

    h, n_steps = _choose_step(model, schedule, control)
    stride = max(1, math.ceil((n_steps + 1) / control.sample_cap))
    hbar = model.hbar

    times = [schedule.t_start]
    states = [psi.copy()]

    coeff_lin = h / (2.0 * hbar)
    coeff_comm = math.sqrt(3.0) * h * h / (12.0 * hbar * hbar)

    step_index = 0
    t0 = schedule.t_start
    while step_index < n_steps:
        count = min(_BLOCK, n_steps - step_index)
        base = t0 + (step_index + np.arange(count)) * h
        t1 = base + _GL_NODE_1 * h
        t2 = base + _GL_NODE_2 * h
        h1 = hamiltonian_stack(model, schedule.detuning(t1), schedule.rabi(t1))
        h2 = hamiltonian_stack(model, schedule.detuning(t2), schedule.rabi(t2))
        hermitian = (coeff_lin * (h1 + h2)).astype(complex)
        hermitian -= 1j * coeff_comm * (h2 @ h1 - h1 @ h2)
        w, v = np.linalg.eigh(hermitian)
        u = (v * np.exp(-1j * w)[:, None, :]) @ v.conj().transpose(0, 2, 1)
        for k in range(count):
            psi = u[k] @ psi
            step_index += 1
            if step_index % stride == 0 or step_index == n_steps:
                times.append(t0 + step_index * h)
                states.append(psi.copy())

    times_arr = np.asarray(times)
    states_arr = np.asarray(states)
    if not np.all(np.isfinite(states_arr)):
        raise IntegrationError(
            f"propagation produced non-finite amplitudes (steps={n_steps}, h={h:.3e})")
    norms = np.linalg.norm(states_arr, axis=1)
    drift = float(np.max(np.abs(norms**2 - 1.0)))
    if drift > NORM_TOLERANCE:
        raise IntegrationError(
            f"norm drift {drift:.3e} exceeds {NORM_TOLERANCE:.0e} "
            f"(steps={n_steps}, h={h:.3e})")
    return Trajectory(
        times=times_arr,
        states=states_arr,
        populations=np.abs(states_arr) ** 2,
        n_steps=n_steps,
        step=h,
    )


def transfer_probability(trajectory: Trajectory, n: int) -> float:
    """Population of level |n> at the end of the window, in [0, 1]."""
    if not 0 <= n < trajectory.dim:
        raise ValueError(f"level index {n} outside 0..{trajectory.dim - 1}")
    return float(trajectory.populations[-1, n])


def phase_convention(trajectory: Trajectory) -> Trajectory:
    """Fix the global phase so Re(c_0) >= 0 and Im(c_0) = 0 at every sample.

    Populations are unchanged; samples with c_0 = 0 are left as they are.
    Idempotent.
    """
    states = trajectory.states.copy()
    c0 = states[:, 0]
    mag = np.abs(c0)
    # samples already in the convention are left untouched, which makes the
    # operation exactly idempotent despite last-ulp rounding in abs/divide
    rotate = (mag > 0.0) & ((c0.imag != 0.0) | (c0.real < 0.0))
    phase = np.ones_like(c0)
    phase[rotate] = np.conj(c0[rotate]) / mag[rotate]
    states = states * phase[:, None]
    states[rotate, 0] = mag[rotate]
    return Trajectory(
        times=trajectory.times,
        states=states,
        populations=trajectory.populations.copy(),
        n_steps=trajectory.n_steps,
        step=trajectory.step,
    )


def trajectory_to_csv(trajectory: Trajectory) -> str:
    """Render the trajectory as CSV text with a mandatory header.

    Columns: time_s, p0..p{d-1}, then re_c{n}, im_c{n} for each level.
    Floats are written with shortest round-trip formatting, so identical
    trajectories serialize to identical bytes.
    """
    dim = trajectory.dim
    header = (["time_s"] + [f"p{n}" for n in range(dim)]
              + [item for n in range(dim) for item in (f"re_c{n}", f"im_c{n}")])
    lines = [",".join(header)]
    for k in range(trajectory.times.size):
        row = [repr(float(trajectory.times[k]))]
        row += [repr(float(p)) for p in trajectory.populations[k]]
        for n in range(dim):
            c = trajectory.states[k, n]
            row += [repr(float(c.real)), repr(float(c.imag))]
        lines.append(",".join(row))
    return "\n".join(lines) + "\n"
