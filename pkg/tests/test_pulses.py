"""Envelope primitives, schedule builders and crossing finding."""

import math

import numpy as np
import pytest

from quantum_tweezers import (
    HBAR,
    Constant,
    Gaussian,
    InfeasibleScheduleError,
    LinearRamp,
    OffsetSum,
    PulseSchedule,
    TanhPlateau,
    build_pi_pulse,
    build_ramp_schedule,
    build_scrap_schedule,
    build_two_atom_scrap_schedule,
    crossing_times,
    pulse_area,
    schedule_from_dict,
    schedule_to_dict,
)
from quantum_tweezers.levels import resonance_detunings


class TestEnvelopes:
    def test_constant(self):
        env = Constant(5.0)
        assert env(0.0) == 5.0
        assert env(-3.3) == 5.0
        np.testing.assert_array_equal(env(np.array([0.0, 1.0])), [5.0, 5.0])

    def test_gaussian_peak_and_width_convention(self):
        # peak * exp(-(t-c)^2 / T^2): value at one width off-centre is 1/e
        env = Gaussian(peak=2.0, center=1.0, width=0.5)
        assert env(1.0) == 2.0
        assert env(1.5) == pytest.approx(2.0 * math.exp(-1.0), rel=1e-14)

    def test_tanh_plateau_mid_value(self):
        # flat-top form: mid-plateau sits within e^-4 of the peak
        env = TanhPlateau(peak=3.0, start_time=0.0, plateau_width=1.0,
                          ramp_time=0.1)
        mid = env(0.5)
        assert abs(mid - 3.0) < 3.0 * math.exp(-4.0)

    def test_tanh_plateau_smoothness(self):
        env = TanhPlateau(peak=1.0, start_time=0.0, plateau_width=1.0,
                          ramp_time=0.05)
        ts = np.linspace(-0.5, 1.5, 20001)
        values = env(ts)
        slope = np.diff(values) / np.diff(ts)
        # |d/dt| is bounded by peak / ramp_time for the tanh edges
        assert np.max(np.abs(slope)) <= 1.0 / 0.05 + 1e-9

    def test_linear_ramp(self):
        env = LinearRamp(start=10.0, rate=2.0)
        assert env(3.0) == pytest.approx(16.0)

    def test_offset_sum(self):
        env = OffsetSum(offset=7.0, inner=Gaussian(1.0, 0.0, 1.0))
        assert env(0.0) == pytest.approx(8.0)

    def test_envelopes_continuous(self):
        for env in (Constant(1.0), LinearRamp(0.0, 5.0), Gaussian(1.0, 0.0, 1.0),
                    TanhPlateau(1.0, 0.0, 1.0, 0.1),
                    OffsetSum(1.0, Gaussian(1.0, 0.0, 0.5))):
            ts = np.linspace(-3.0, 3.0, 30001)
            values = np.asarray(env(ts), dtype=float)
            assert np.all(np.isfinite(values))
            assert np.max(np.abs(np.diff(values))) < 0.05

    def test_invalid_widths(self):
        with pytest.raises(ValueError):
            Gaussian(1.0, 0.0, 0.0)
        with pytest.raises(ValueError):
            TanhPlateau(1.0, 0.0, 1.0, -0.1)


class TestPulseArea:
    def test_gaussian_closed_form(self):
        env = Gaussian(peak=2.5, center=0.3, width=0.7)
        got = pulse_area(env, 0.3 - 8 * 0.7, 0.3 + 8 * 0.7)
        assert got == pytest.approx(2.5 * 0.7 * math.sqrt(math.pi), rel=1e-10)

    def test_constant_area(self):
        assert pulse_area(Constant(3.0), 0.0, 2.0) == pytest.approx(6.0, rel=1e-12)

    def test_zero_envelope(self):
        assert pulse_area(Constant(0.0), 0.0, 1.0) == 0.0

    def test_additive_over_adjacent_windows(self):
        env = Gaussian(peak=1.0, center=0.5, width=0.4)
        total = pulse_area(env, -2.0, 3.0)
        split = pulse_area(env, -2.0, 0.7) + pulse_area(env, 0.7, 3.0)
        assert split == pytest.approx(total, rel=1e-10)

    def test_rejects_nonfinite(self):
        class Bad(Constant):
            def __call__(self, t):
                with np.errstate(invalid="ignore"):
                    return np.asarray(t) * math.inf

        with pytest.raises(ValueError):
            pulse_area(Bad(1.0), 0.0, 1.0)


class TestRampSchedule:
    def test_duration(self):
        sched = build_ramp_schedule(1e4, 5e4, 2e6, 4e3)
        assert sched.duration == pytest.approx(4e4 / 2e6, rel=1e-12)

    def test_crossing_setup_below_first_resonance(self, fig3a_model):
        res = resonance_detunings(fig3a_model)
        sched = build_ramp_schedule(res.d01 - 1e4, res.d01 + 3e3, 1e6, 4e3)
        roots = crossing_times(sched, fig3a_model.derived.e1)
        assert len(roots) == 1
        assert sched.detuning(sched.t_start) < res.d01
        assert res.d01 < sched.detuning(sched.t_end) < res.d02

    def test_rejects_degenerate_and_inconsistent(self):
        with pytest.raises(ValueError):
            build_ramp_schedule(1e4, 1e4, 1e6, 4e3)
        with pytest.raises(ValueError):
            build_ramp_schedule(1e4, 5e4, -1e6, 4e3)
        with pytest.raises(ValueError):
            build_ramp_schedule(1e4, 5e4, 0.0, 4e3)


class TestScrapSchedule:
    def test_crossings_symmetric_about_pulse_center(self, fig3a_model):
        e1 = fig3a_model.derived.e1
        tau = 1.25e-3
        sched = build_scrap_schedule(1.5e4, 1e-3, 2e4, 2e-3, tau, 0.0, e1)
        roots = crossing_times(sched, e1)
        assert len(roots) == 2
        t1, t2 = roots
        # equidistant from the detuning-pulse centre at t = tau
        assert (tau - t1) == pytest.approx(t2 - tau, rel=1e-9)

    def test_crossing_recovery(self, fig3a_model):
        e1 = fig3a_model.derived.e1
        tau = 1.25e-3
        sched = build_scrap_schedule(1.5e4, 1e-3, 2e4, 2e-3, tau, 0.0, e1)
        t1, t2 = crossing_times(sched, e1)
        assert abs(t1 - 0.0) < 1e-9 * tau
        assert abs(t2 - 2 * tau) < 1e-9 * tau

    def test_pump_centred_on_first_crossing(self, fig3a_model):
        e1 = fig3a_model.derived.e1
        sched = build_scrap_schedule(1.5e4, 1e-3, 2e4, 2e-3, 1.25e-3, 0.0, e1)
        assert sched.rabi.center == pytest.approx(0.0, abs=1e-12)

    def test_negative_delay_moves_pump_to_second_crossing(self, fig3a_model):
        e1 = fig3a_model.derived.e1
        tau = 1.25e-3
        sched = build_scrap_schedule(1.5e4, 1e-3, 2e4, 2e-3, tau, -2 * tau, e1)
        t1, t2 = crossing_times(sched, e1)
        assert sched.rabi.center == pytest.approx(t2, rel=1e-9)

    def test_infeasible_offset(self, fig3a_model):
        e1 = fig3a_model.derived.e1
        # baseline so far below resonance the pulse never reaches it
        with pytest.raises(InfeasibleScheduleError):
            build_scrap_schedule(1.5e4, 1e-3, 2e4, 2e-3, 1.25e-3, 0.0, e1,
                                 delta_offset=e1 / HBAR - 5e4)

    def test_explicit_feasible_offset(self, fig3a_model):
        e1 = fig3a_model.derived.e1
        offset = e1 / HBAR - 1.0e4
        sched = build_scrap_schedule(1.5e4, 1e-3, 2e4, 2e-3, 1.25e-3, 0.0, e1,
                                     delta_offset=offset)
        roots = crossing_times(sched, e1)
        assert len(roots) == 2


class TestTwoAtomScrapSchedule:
    def test_crossings_against_both_resonances(self, fig3a_model):
        d = fig3a_model.derived
        sched = build_two_atom_scrap_schedule(1.5e4, 1e-3, 4.6e4, 2e-3, 2.0e4,
                                              d.e1, d.e2 - d.e1)
        first = crossing_times(sched, d.e1)
        second = crossing_times(sched, d.e2 - d.e1)
        assert len(first) == 2 and len(second) == 2
        # rising order: 0->1 resonance first, then 1->2
        assert first[0] < second[0] < second[1] < first[1]
        assert first[0] == pytest.approx(0.0, abs=1e-9)

    def test_pump_is_flat_top(self, fig3a_model):
        d = fig3a_model.derived
        sched = build_two_atom_scrap_schedule(1.5e4, 1e-3, 4.6e4, 2e-3, 2.0e4,
                                              d.e1, d.e2 - d.e1)
        assert isinstance(sched.rabi, TanhPlateau)
        t_12 = crossing_times(sched, d.e2 - d.e1)
        # on across both rising crossings, off by the falling 1->2 crossing
        assert sched.rabi(0.0) > 0.99 * 1.5e4
        assert sched.rabi(t_12[0]) > 0.99 * 1.5e4
        assert sched.rabi(t_12[1]) < 0.01 * 1.5e4

    def test_infeasible_when_pulse_too_small(self, fig3a_model):
        d = fig3a_model.derived
        with pytest.raises(InfeasibleScheduleError):
            build_two_atom_scrap_schedule(1.5e4, 1e-3, 2.0e4, 2e-3, 2.0e4,
                                          d.e1, d.e2 - d.e1)


class TestPiPulse:
    def test_effective_area_is_pi(self, fig3a_model):
        sched = build_pi_pulse(fig3a_model, (0, 1), 1.5e-3)
        area = pulse_area(sched.rabi, sched.t_start, sched.t_end)
        assert area * fig3a_model.rabi_units[0] == pytest.approx(math.pi, abs=1e-8)

    def test_solved_peak(self, fig3a_model):
        t_omega = 1.5e-3
        sched = build_pi_pulse(fig3a_model, (0, 1), t_omega)
        expected_eff = math.sqrt(math.pi) / t_omega
        assert sched.rabi.peak * fig3a_model.rabi_units[0] == pytest.approx(
            expected_eff, rel=1e-12)

    def test_second_transition_detuning(self, fig3a_model):
        res = resonance_detunings(fig3a_model)
        sched = build_pi_pulse(fig3a_model, "1-2", 1.5e-3)
        assert sched.detuning(0.0) == pytest.approx(res.d12, rel=1e-12)
        area = pulse_area(sched.rabi, sched.t_start, sched.t_end)
        assert area * fig3a_model.rabi_units[1] == pytest.approx(math.pi, abs=1e-8)

    def test_rejects_bad_transition(self, fig3a_model):
        with pytest.raises(ValueError):
            build_pi_pulse(fig3a_model, (0, 2), 1e-3)


class TestCrossingTimes:
    def test_linear_ramp_analytic_root(self, fig3a_model):
        e1 = fig3a_model.derived.e1
        d01 = e1 / HBAR
        sched = build_ramp_schedule(d01 - 2e4, d01 + 1e4, 1e6, 4e3)
        roots = crossing_times(sched, e1)
        assert len(roots) == 1
        assert roots[0] == pytest.approx(2e4 / 1e6, rel=1e-9)

    def test_no_crossing(self, fig3a_model):
        e1 = fig3a_model.derived.e1
        d01 = e1 / HBAR
        sched = build_ramp_schedule(d01 - 5e4, d01 - 1e4, 1e6, 4e3)
        assert crossing_times(sched, e1) == []


class TestSerialization:
    def test_round_trip(self, fig3a_model):
        e1 = fig3a_model.derived.e1
        sched = build_scrap_schedule(1.5e4, 1e-3, 2e4, 2e-3, 1.25e-3, 0.0, e1)
        data = schedule_to_dict(sched)
        back = schedule_from_dict(data)
        ts = np.linspace(sched.t_start, sched.t_end, 500)
        np.testing.assert_allclose(back.detuning(ts), sched.detuning(ts), rtol=0)
        np.testing.assert_allclose(back.rabi(ts), sched.rabi(ts), rtol=0)
        assert (back.t_start, back.t_end) == (sched.t_start, sched.t_end)

    def test_schema_shape(self):
        sched = PulseSchedule(Constant(1.0), Gaussian(2.0, 0.0, 1.0), -4.0, 4.0)
        data = schedule_to_dict(sched)
        assert set(data) == {"detuning", "rabi", "window"}
        assert data["window"] == [-4.0, 4.0]
        assert data["rabi"]["type"] == "gaussian"

    def test_json_compatible(self):
        import json
        sched = PulseSchedule(
            OffsetSum(2.0, Gaussian(1.0, 0.5, 0.2)),
            TanhPlateau(1.0, 0.0, 1.0, 0.1), -1.0, 2.0)
        text = json.dumps(schedule_to_dict(sched))
        back = schedule_from_dict(json.loads(text))
        assert back.rabi(0.5) == pytest.approx(sched.rabi(0.5), rel=1e-15)
