"""Behavioral engine for the frame-quantized, PWM-driven plasticity circuit.

Time is organized as three-slot frames on a 1 ms clock. Slot 0 transmits
spikes, slot 1 programs potentiation, slot 2 programs depression. Spike
times snap to frame boundaries (round half up on the frame index), traces
are sampled on the clock grid with reset applied before sampling, and drive
amplitudes become pulse widths against a rising sawtooth carrier whose
period is one slot.

Weight changes happen only where pulses from both synapse terminals overlap:
each terminal alone stays inside the device dead zone, so a potentiation
pulse without the opposing enable (or vice versa) programs nothing. The
slow post trace is routed through a one-slot zero-order delay, so the value
read at a post-spike frame is the one sampled just before that spike's
reset.

Node pulse amplitudes are the voltage levels driven onto the P and N
terminals; the device sees their difference. During potentiation the P
terminal is high and the N terminal low (+2A differential); during
depression the polarities swap (-2A), which is what pushes the device below
its lower threshold.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction

from .model import SpikeTrain, TripletParams
from .synapse import MemristiveSynapse, apply_voltage
from .traces import value_at

SLOT_TRANSMIT = 0
SLOT_LTP = 1
SLOT_LTD = 2
SLOTS_PER_FRAME = 3

_MAX_INTEGER_GAIN = 10  # denominator bound when integerizing the gain ratio


class CalibrationError(ValueError):
    """Raised when rule amplitudes leave a carrier peak undetermined."""


@dataclass(frozen=True)
class CircuitParams:
    """Circuit-side constants: carrier peaks, gains, and frame timing."""

    v_j_peak: float  # pre-side sawtooth peak, controls potentiation scale
    v_i_peak: float  # post-side sawtooth peak, controls depression scale
    g1: float
    g2: float
    tau_j: float
    tau_i1: float
    tau_i2: float
    slot_ms: float = 1.0
    delay_ms: float = 1.0  # slow-trace zero-order delay
    slots_per_frame: int = field(default=SLOTS_PER_FRAME, init=False)

    def __post_init__(self) -> None:
        if not (self.v_j_peak > 0 and self.v_i_peak > 0):
            raise ValueError("carrier peaks must be > 0")
        if self.g1 < 0 or self.g2 < 0:
            raise ValueError("amplifier gains must be >= 0")
        for name in ("tau_j", "tau_i1", "tau_i2"):
            if not getattr(self, name) > 0:
                raise ValueError(f"{name} must be > 0")
        if not self.slot_ms > 0:
            raise ValueError(f"slot_ms must be > 0, got {self.slot_ms}")
        if self.delay_ms < 0:
            raise ValueError(f"delay_ms must be >= 0, got {self.delay_ms}")

    @property
    def frame_ms(self) -> float:
        return self.slots_per_frame * self.slot_ms


@dataclass(frozen=True)
class NodePulse:
    """Rectangular drive on one synapse terminal within a slot."""

    amplitude_v: float
    width_s: float
    offset_s: float = 0.0


IDLE_PULSE = NodePulse(0.0, 0.0)


@dataclass(frozen=True)
class SlotDrive:
    p: NodePulse
    n: NodePulse


@dataclass(frozen=True)
class FrameSchedule:
    """Per-slot P/N node drives for one frame."""

    frame_index: int
    slots: tuple[SlotDrive, SlotDrive, SlotDrive]


@dataclass(frozen=True)
class SlotEvent:
    """What one slot did to the synapse."""

    slot: int
    p_width_s: float
    n_width_s: float
    differential_v: float  # P minus N level while both are active
    overlap_s: float
    delta_w: float
    weight_after: float


@dataclass(frozen=True)
class FrameRecord:
    frame_index: int
    time_ms: float
    has_pre: bool
    has_post: bool
    x_sample: float
    y1_sample: float
    y2_delayed: float
    ltp_width_s: float
    ltd_width_s: float
    delta_w: float
    weight_after: float
    slots: tuple[SlotEvent, ...]


@dataclass(frozen=True)
class CircuitRun:
    initial_weight: float
    frames: tuple[FrameRecord, ...]
    final_weight: float
    total_delta_w: float  # final minus initial, clamp-aware


def _frame_index(t_ms: float, frame_ms: float) -> int:
    # round half up; 10 ms at 3 ms frames lands on frame 3 (9 ms effective)
    return int(math.floor(t_ms / frame_ms + 0.5))


def quantize_train(train: SpikeTrain, frame_ms: float) -> SpikeTrain:
    """Snap every spike to the nearest frame boundary.

    Spikes of the same neuron that collapse into one frame merge into a
    single event.
    """
    if not frame_ms > 0:
        raise ValueError(f"frame_ms must be > 0, got {frame_ms}")
    pre = sorted({_frame_index(t, frame_ms) for t in train.pre_times})
    post = sorted({_frame_index(t, frame_ms) for t in train.post_times})
    pre_times = [i * frame_ms for i in pre]
    post_times = [i * frame_ms for i in post]
    last = max(pre_times[-1:] + post_times[-1:] + [0.0])
    return SpikeTrain(pre_times, post_times, max(train.duration, last))


def pwm_encode(value: float, v_peak: float, slot_ms: float) -> float:
    """Convert a drive amplitude into a pulse width in seconds.

    The comparator output stays high until the rising sawtooth crosses the
    held value, so width is proportional to value and saturates at one
    full slot.
    """
    if value < 0:
        raise ValueError(f"drive value must be >= 0, got {value}")
    if not v_peak > 0:
        raise ValueError(f"v_peak must be > 0, got {v_peak}")
    return min(value / v_peak, 1.0) * slot_ms * 1e-3


def ltp_drive(x_sampled: float, y2_delayed: float, g1: float, g2: float) -> float:
    """Potentiation drive amplitude: ideal adder plus multiplier output."""
    return g1 * x_sampled + g2 * x_sampled * y2_delayed


def build_frame(
    has_pre: bool,
    has_post: bool,
    ltp_width_s: float,
    ltd_width_s: float,
    node_amplitude: float,
    slot_ms: float,
    frame_index: int = 0,
) -> FrameSchedule:
    """Assemble the per-slot node drives for one frame.

    Slot 0 carries the pre spike transmission alone (single terminal, so it
    stays sub-threshold). Slot 1 pairs the pre side's width-encoded
    potentiation pulse on P with a full-slot low enable on N that is present
    only when a post spike occurred this frame. Slot 2 mirrors this for
    depression with swapped polarities: a full-slot low enable on P when a
    pre spike occurred, against the post side's width-encoded pulse on N.
    All pulses start at their slot boundary.
    """
    slot_s = slot_ms * 1e-3
    if not 0 <= ltp_width_s <= slot_s:
        raise ValueError(f"ltp width {ltp_width_s} outside [0, {slot_s}]")
    if not 0 <= ltd_width_s <= slot_s:
        raise ValueError(f"ltd width {ltd_width_s} outside [0, {slot_s}]")
    amp = node_amplitude
    transmit = SlotDrive(
        p=NodePulse(amp, slot_s) if has_pre else IDLE_PULSE,
        n=IDLE_PULSE,
    )
    ltp = SlotDrive(
        p=NodePulse(amp, ltp_width_s),
        n=NodePulse(-amp, slot_s) if has_post else IDLE_PULSE,
    )
    ltd = SlotDrive(
        p=NodePulse(-amp, slot_s) if has_pre else IDLE_PULSE,
        n=NodePulse(amp, ltd_width_s),
    )
    return FrameSchedule(frame_index=frame_index, slots=(transmit, ltp, ltd))


def overlap_voltage(p_pulse: NodePulse, n_pulse: NodePulse) -> tuple[float, float]:
    """Differential level and duration while both pulses are active.

    The differential is the P level minus the N level; the duration is the
    length of the temporal intersection (the smaller width, for slot-start
    aligned pulses).
    """
    start = max(p_pulse.offset_s, n_pulse.offset_s)
    end = min(
        p_pulse.offset_s + p_pulse.width_s,
        n_pulse.offset_s + n_pulse.width_s,
    )
    return (
        p_pulse.amplitude_v - n_pulse.amplitude_v,
        max(0.0, end - start),
    )


def _apply_slot(
    syn: MemristiveSynapse, slot: int, drive: SlotDrive
) -> tuple[MemristiveSynapse, SlotEvent]:
    """Run one slot's piecewise-constant differential through the device.

    Segments: both pulses active (the overlap), then whichever pulse
    outlasts the other alone. With a sane device the single-sided segments
    sit in the dead zone; they are still applied so misconfigured
    amplitudes behave as the device would.
    """
    w_before = syn.weight
    diff, overlap = overlap_voltage(drive.p, drive.n)
    syn = apply_voltage(syn, diff, overlap)
    # single-sided tails: the longer pulse alone, P level minus 0 or 0 minus N
    p_tail = drive.p.width_s - overlap
    if p_tail > 0:
        syn = apply_voltage(syn, drive.p.amplitude_v, p_tail)
    n_tail = drive.n.width_s - overlap
    if n_tail > 0:
        syn = apply_voltage(syn, -drive.n.amplitude_v, n_tail)
    event = SlotEvent(
        slot=slot,
        p_width_s=drive.p.width_s,
        n_width_s=drive.n.width_s,
        differential_v=diff,
        overlap_s=overlap,
        delta_w=syn.weight - w_before,
        weight_after=syn.weight,
    )
    return syn, event


def run_circuit(
    train: SpikeTrain,
    cp: CircuitParams,
    syn: MemristiveSynapse,
    record_idle: bool = False,
) -> CircuitRun:
    """Simulate the full circuit over a spike train.

    The train is quantized to frames first. For every frame the three
    traces are sampled at the frame tick (resets from this frame's spikes
    land before the sample), the slow post trace is read through its
    zero-order delay, pulse widths are PWM-encoded, and the frame's slots
    are applied to the synapse in order.

    Frames with no spike provably change nothing (no enable is asserted),
    so by default only spike frames are stepped and recorded; ``record_idle``
    materializes every frame up to the last spike instead.
    """
    frame_ms = cp.frame_ms
    q = quantize_train(train, frame_ms)
    pre_frames = {_frame_index(t, frame_ms) for t in q.pre_times}
    post_frames = {_frame_index(t, frame_ms) for t in q.post_times}
    active = sorted(pre_frames | post_frames)
    if record_idle and active:
        frames_to_step: list[int] = list(range(active[-1] + 1))
    else:
        frames_to_step = active
    w0 = syn.weight
    records: list[FrameRecord] = []
    for f in frames_to_step:
        t = f * frame_ms
        has_pre = f in pre_frames
        has_post = f in post_frames
        x_s = value_at(q.pre_times, cp.tau_j, t)
        y1_s = value_at(q.post_times, cp.tau_i1, t)
        y2_d = value_at(q.post_times, cp.tau_i2, t - cp.delay_ms)
        width_ltp = pwm_encode(
            ltp_drive(x_s, y2_d, cp.g1, cp.g2), cp.v_j_peak, cp.slot_ms
        )
        width_ltd = pwm_encode(y1_s, cp.v_i_peak, cp.slot_ms)
        sched = build_frame(
            has_pre, has_post, width_ltp, width_ltd,
            syn.node_amplitude, cp.slot_ms, frame_index=f,
        )
        w_frame_start = syn.weight
        slot_events = []
        for slot, drive in enumerate(sched.slots):
            syn, event = _apply_slot(syn, slot, drive)
            slot_events.append(event)
        records.append(
            FrameRecord(
                frame_index=f,
                time_ms=t,
                has_pre=has_pre,
                has_post=has_post,
                x_sample=x_s,
                y1_sample=y1_s,
                y2_delayed=y2_d,
                ltp_width_s=width_ltp,
                ltd_width_s=width_ltd,
                delta_w=syn.weight - w_frame_start,
                weight_after=syn.weight,
                slots=tuple(slot_events),
            )
        )
    return CircuitRun(
        initial_weight=w0,
        frames=tuple(records),
        final_weight=syn.weight,
        total_delta_w=syn.weight - w0,
    )


def _integer_gains(a2_plus: float, a3_plus: float) -> tuple[int, int]:
    if a2_plus == 0 and a3_plus == 0:
        raise CalibrationError(
            "both potentiation amplitudes are zero; gains are undetermined"
        )
    if a2_plus == 0:
        return 0, 1
    if a3_plus == 0:
        return 1, 0
    ratio = Fraction(a3_plus / a2_plus).limit_denominator(_MAX_INTEGER_GAIN)
    return ratio.denominator, ratio.numerator


def calibrate(
    tp: TripletParams, v_p: float, v_d: float, slot_ms: float = 1.0
) -> CircuitParams:
    """Derive circuit constants that reproduce a set of rule amplitudes.

    Time constants copy over directly. The amplifier gains take the
    smallest integer pair matching the ratio of the two potentiation
    amplitudes. The carrier peaks then come from the magnitude identities
    a2_plus = v_p*slot*g1/v_j_peak (falling back to the a3_plus identity
    when g1 is zero) and a2_minus = v_d*slot/v_i_peak.
    """
    if not (v_p > 0 and v_d > 0):
        raise ValueError("programming rates must be > 0")
    if not slot_ms > 0:
        raise ValueError(f"slot_ms must be > 0, got {slot_ms}")
    g1, g2 = _integer_gains(tp.a2_plus, tp.a3_plus)
    slot_s = slot_ms * 1e-3
    if g1 > 0 and tp.a2_plus > 0:
        v_j_peak = v_p * slot_s * g1 / tp.a2_plus
    else:
        v_j_peak = v_p * slot_s * g2 / tp.a3_plus
    if tp.a2_minus == 0:
        raise CalibrationError(
            "depression amplitude is zero; v_i_peak is undetermined"
        )
    v_i_peak = v_d * slot_s / tp.a2_minus
    return CircuitParams(
        v_j_peak=v_j_peak,
        v_i_peak=v_i_peak,
        g1=float(g1),
        g2=float(g2),
        tau_j=tp.tau_j,
        tau_i1=tp.tau_i1,
        tau_i2=tp.tau_i2,
        slot_ms=slot_ms,
    )
