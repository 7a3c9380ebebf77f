"""Unit tests for the behavioral circuit engine and its calibration."""

import math

import pytest

from stdplab.circuit import (
    CalibrationError,
    CircuitParams,
    IDLE_PULSE,
    NodePulse,
    build_frame,
    calibrate,
    ltp_drive,
    overlap_voltage,
    pwm_encode,
    quantize_train,
    run_circuit,
)
from stdplab.model import SpikeTrain, TripletParams
from stdplab.synapse import DeviceSettings

HIPPO = TripletParams(4.6e-3, 9.1e-3, 3.0e-3, 16.8, 33.7, 48.0)
VISUAL = TripletParams(0.0, 50.0e-3, 8.0e-3, 16.8, 33.7, 40.0)
HIPPO_DEV = DeviceSettings(v_p=58.282, v_d=53.7)
VISUAL_DEV = DeviceSettings(v_p=68.5, v_d=63.9)


def hippo_circuit() -> CircuitParams:
    return calibrate(HIPPO, HIPPO_DEV.v_p, HIPPO_DEV.v_d)


# ---------------------------------------------------------------- quantize


def test_quantize_rounds_half_up():
    train = SpikeTrain([1.4, 10.0], [1.5, 4.5], 20.0)
    q = quantize_train(train, 3.0)
    assert q.pre_times == (0.0, 9.0)  # 10 ms lands on frame 3
    assert q.post_times == (3.0, 6.0)  # 1.5 and 4.5 both round up


def test_quantize_merges_same_frame_spikes():
    q = quantize_train(SpikeTrain([0.0, 1.0], [], 10.0), 3.0)
    assert q.pre_times == (0.0,)


def test_quantize_extends_duration_when_needed():
    q = quantize_train(SpikeTrain([11.0], [], 11.0), 3.0)
    assert q.pre_times == (12.0,)
    assert q.duration == 12.0


def test_quantize_validates_frame():
    with pytest.raises(ValueError):
        quantize_train(SpikeTrain([0.0], [], 1.0), 0.0)


# ---------------------------------------------------------------- pwm


def test_pwm_is_proportional():
    assert pwm_encode(0.0, 2.0, 1.0) == 0.0
    assert pwm_encode(1.0, 2.0, 1.0) == pytest.approx(0.5e-3)
    assert pwm_encode(2.0, 2.0, 1.0) == pytest.approx(1.0e-3)


def test_pwm_saturates_at_full_slot():
    assert pwm_encode(5.0, 2.0, 1.0) == pytest.approx(1.0e-3)


def test_pwm_scales_with_slot():
    assert pwm_encode(1.0, 2.0, 2.0) == pytest.approx(1.0e-3)


def test_pwm_validation():
    with pytest.raises(ValueError):
        pwm_encode(-0.1, 2.0, 1.0)
    with pytest.raises(ValueError):
        pwm_encode(0.5, 0.0, 1.0)


def test_ltp_drive_combines_terms():
    assert ltp_drive(0.5, 0.4, 1.0, 2.0) == pytest.approx(0.5 + 2 * 0.2)
    assert ltp_drive(0.5, 0.9, 0.0, 1.0) == pytest.approx(0.45)


# ---------------------------------------------------------------- frames


def test_build_frame_gating():
    slot_s = 1e-3
    empty = build_frame(False, False, 0.2e-3, 0.3e-3, 2.0, 1.0)
    transmit, ltp, ltd = empty.slots
    assert transmit.p == IDLE_PULSE and transmit.n == IDLE_PULSE
    assert ltp.n == IDLE_PULSE  # no post spike, no potentiation enable
    assert ltd.p == IDLE_PULSE  # no pre spike, no depression enable

    full = build_frame(True, True, 0.2e-3, 0.3e-3, 2.0, 1.0)
    transmit, ltp, ltd = full.slots
    assert transmit.p == NodePulse(2.0, slot_s)
    assert ltp.p == NodePulse(2.0, 0.2e-3)
    assert ltp.n == NodePulse(-2.0, slot_s)
    assert ltd.p == NodePulse(-2.0, slot_s)
    assert ltd.n == NodePulse(2.0, 0.3e-3)


def test_build_frame_rejects_oversized_widths():
    with pytest.raises(ValueError):
        build_frame(True, True, 2e-3, 0.0, 2.0, 1.0)
    with pytest.raises(ValueError):
        build_frame(True, True, 0.0, -1e-6, 2.0, 1.0)


def test_overlap_voltage():
    p = NodePulse(2.0, 0.4e-3)
    n = NodePulse(-2.0, 1.0e-3)
    diff, dur = overlap_voltage(p, n)
    assert diff == pytest.approx(4.0)
    assert dur == pytest.approx(0.4e-3)
    # disjoint pulses never overlap
    late = NodePulse(-2.0, 0.2e-3, offset_s=0.5e-3)
    assert overlap_voltage(p, late)[1] == 0.0


# ---------------------------------------------------------------- end to end


def test_single_pair_ltp_oracle():
    # pre at 0, post at 9: one potentiation overlap, width set by x(9)
    cp = hippo_circuit()
    run = run_circuit(
        SpikeTrain([0.0], [9.0], 1000.0), cp, HIPPO_DEV.make_synapse(0.5)
    )
    x = math.exp(-9.0 / 16.8)
    expected = HIPPO_DEV.v_p * (cp.g1 * x / cp.v_j_peak) * 1e-3
    assert run.total_delta_w == pytest.approx(expected, rel=1e-12)
    # and the calibration identity maps it onto the rule amplitude
    assert run.total_delta_w == pytest.approx(4.6e-3 * x, rel=1e-12)


def test_single_pair_ltd_oracle():
    cp = hippo_circuit()
    run = run_circuit(
        SpikeTrain([9.0], [0.0], 1000.0), cp, HIPPO_DEV.make_synapse(0.5)
    )
    y1 = math.exp(-9.0 / 33.7)
    assert run.total_delta_w == pytest.approx(-3.0e-3 * y1, rel=1e-12)


def test_slow_trace_is_read_delayed_and_pre_reset():
    # post at 0 and 21 with a pre in between: the second potentiation
    # reads the slow trace at 20 ms, still carrying the reset from t=0
    cp = hippo_circuit()
    run = run_circuit(
        SpikeTrain([12.0], [0.0, 21.0], 1000.0),
        cp,
        HIPPO_DEV.make_synapse(0.5),
    )
    x = math.exp(-9.0 / 16.8)
    y2 = math.exp(-20.0 / 48.0)
    ltd = -3.0e-3 * math.exp(-12.0 / 33.7)
    # the realized triplet amplitude is g2/g1 = 2 times a2_plus, which the
    # integer gains pin at 9.2e-3 rather than the nominal 9.1e-3
    ltp = 4.6e-3 * x + 2.0 * 4.6e-3 * x * y2
    assert run.total_delta_w == pytest.approx(ltd + ltp, rel=1e-12)


def test_pre_spike_alone_is_silent():
    cp = hippo_circuit()
    run = run_circuit(
        SpikeTrain([0.0], [], 100.0), cp, HIPPO_DEV.make_synapse(0.5)
    )
    assert run.total_delta_w == 0.0
    run = run_circuit(
        SpikeTrain([], [0.0], 100.0), cp, HIPPO_DEV.make_synapse(0.5)
    )
    assert run.total_delta_w == 0.0


def test_off_grid_pair_is_quantized():
    # dt = 10 ms snaps to 9 ms; the run must equal the on-grid run
    cp = hippo_circuit()
    off = run_circuit(
        SpikeTrain([0.0], [10.0], 1000.0), cp, HIPPO_DEV.make_synapse(0.5)
    )
    on = run_circuit(
        SpikeTrain([0.0], [9.0], 1000.0), cp, HIPPO_DEV.make_synapse(0.5)
    )
    assert off.total_delta_w == on.total_delta_w
    assert [f.time_ms for f in off.frames] == [0.0, 9.0]


def test_record_idle_covers_every_frame():
    cp = hippo_circuit()
    train = SpikeTrain([0.0], [9.0], 1000.0)
    sparse = run_circuit(train, cp, HIPPO_DEV.make_synapse(0.5))
    dense = run_circuit(
        train, cp, HIPPO_DEV.make_synapse(0.5), record_idle=True
    )
    assert [f.frame_index for f in dense.frames] == [0, 1, 2, 3]
    idle = [f for f in dense.frames if not (f.has_pre or f.has_post)]
    assert all(f.delta_w == 0.0 for f in idle)
    assert dense.total_delta_w == sparse.total_delta_w


def test_runs_are_deterministic():
    cp = hippo_circuit()
    train = SpikeTrain([0.0, 50.0], [9.0, 60.0], 1000.0)
    a = run_circuit(train, cp, HIPPO_DEV.make_synapse(0.5))
    b = run_circuit(train, cp, HIPPO_DEV.make_synapse(0.5))
    assert a == b


def test_weight_clamps_and_total_reflects_it():
    # saturating drive: many fast pairs push the weight into the ceiling
    cp = hippo_circuit()
    pre = [20.0 * k for k in range(200)]
    post = [20.0 * k + 3.0 for k in range(200)]
    run = run_circuit(
        SpikeTrain(pre, post, 4000.0), cp, HIPPO_DEV.make_synapse(0.9)
    )
    assert run.final_weight == 1.0
    assert run.total_delta_w == pytest.approx(0.1)


def test_pairwise_only_circuit_window_signs():
    # a3 = 0 collapses the drive to the classic pair rule
    pair_tp = TripletParams(5.0e-3, 0.0, 3.0e-3, 16.8, 33.7, 48.0)
    dev = DeviceSettings(v_p=60.0, v_d=53.7)
    cp = calibrate(pair_tp, dev.v_p, dev.v_d)
    assert (cp.g1, cp.g2) == (1.0, 0.0)
    ltp = run_circuit(
        SpikeTrain([0.0], [9.0], 1000.0), cp, dev.make_synapse(0.5)
    )
    ltd = run_circuit(
        SpikeTrain([9.0], [0.0], 1000.0), cp, dev.make_synapse(0.5)
    )
    assert ltp.total_delta_w > 0
    assert ltd.total_delta_w < 0
    assert ltp.total_delta_w == pytest.approx(
        5.0e-3 * math.exp(-9.0 / 16.8), rel=1e-12
    )


# ---------------------------------------------------------------- calibrate


def test_calibrate_visual_cortex_row():
    cp = calibrate(VISUAL, VISUAL_DEV.v_p, VISUAL_DEV.v_d)
    assert (cp.g1, cp.g2) == (0.0, 1.0)
    assert cp.v_j_peak == pytest.approx(1.37, rel=1e-12)
    assert cp.v_i_peak == pytest.approx(63.9e-3 / 8.0e-3, rel=1e-12)
    assert round(cp.v_i_peak, 2) == 7.99


def test_calibrate_hippocampal_row():
    cp = hippo_circuit()
    assert (cp.g1, cp.g2) == (1.0, 2.0)
    assert cp.v_j_peak == pytest.approx(12.67, rel=1e-12)
    assert cp.v_i_peak == pytest.approx(17.90, rel=1e-12)
    # integer gains approximate the amplitude ratio within 2 percent
    assert cp.g2 / cp.g1 == pytest.approx(9.1e-3 / 4.6e-3, rel=0.02)


def test_calibrate_identities_round_trip():
    cp = hippo_circuit()
    slot_s = 1e-3
    assert HIPPO_DEV.v_p * slot_s * cp.g1 / cp.v_j_peak == pytest.approx(
        HIPPO.a2_plus, rel=1e-12
    )
    assert HIPPO_DEV.v_p * slot_s * cp.g2 / cp.v_j_peak == pytest.approx(
        2.0 * HIPPO.a2_plus, rel=1e-12
    )
    assert HIPPO_DEV.v_d * slot_s / cp.v_i_peak == pytest.approx(
        HIPPO.a2_minus, rel=1e-12
    )


def test_calibrate_copies_time_constants():
    cp = hippo_circuit()
    assert (cp.tau_j, cp.tau_i1, cp.tau_i2) == (16.8, 33.7, 48.0)
    assert cp.frame_ms == 3.0


def test_calibrate_error_cases():
    no_ltp = TripletParams(0.0, 0.0, 3.0e-3, 16.8, 33.7, 48.0)
    with pytest.raises(CalibrationError):
        calibrate(no_ltp, 60.0, 60.0)
    no_ltd = TripletParams(4.6e-3, 9.1e-3, 0.0, 16.8, 33.7, 48.0)
    with pytest.raises(CalibrationError):
        calibrate(no_ltd, 60.0, 60.0)
    with pytest.raises(ValueError):
        calibrate(HIPPO, -1.0, 60.0)
    with pytest.raises(ValueError):
        calibrate(HIPPO, 60.0, 60.0, slot_ms=0.0)


def test_circuit_params_validation():
    with pytest.raises(ValueError):
        CircuitParams(0.0, 17.9, 1.0, 2.0, 16.8, 33.7, 48.0)
    with pytest.raises(ValueError):
        CircuitParams(12.67, 17.9, 1.0, 2.0, 16.8, 33.7, 48.0, slot_ms=0.0)
