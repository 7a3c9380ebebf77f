"""Ideal pulse-width-programmed memristive synapse.

The device has a voltage dead zone: a differential at or above ``v_on``
raises the weight at a constant rate ``v_p``, one at or below ``v_off``
lowers it at ``v_d``, and anything in between leaves it untouched. The
weight is hard-clamped to [w_min, w_max] after every pulse. Pulse durations
are in seconds and rates in weight units per second; weight units are
normalized (a conductance mapping is documentation, not code).
"""

from __future__ import annotations

from dataclasses import dataclass, replace

POTENTIATE = "potentiate"
DEPRESS = "depress"


@dataclass(frozen=True)
class MemristiveSynapse:
    weight: float = 0.5
    w_min: float = 0.0
    w_max: float = 1.0
    v_on: float = 3.0
    v_off: float = -3.0
    v_p: float = 68.5  # weight units per second
    v_d: float = 63.9  # magnitude of the decrease rate
    node_amplitude: float = 2.0  # per-terminal drive level, volts

    def __post_init__(self) -> None:
        if not self.w_min <= self.w_max:
            raise ValueError(f"w_min {self.w_min} > w_max {self.w_max}")
        if not self.w_min <= self.weight <= self.w_max:
            raise ValueError(
                f"weight {self.weight} outside [{self.w_min}, {self.w_max}]"
            )
        if not (self.v_off < 0 < self.v_on):
            raise ValueError(
                f"thresholds must satisfy v_off < 0 < v_on, "
                f"got v_off={self.v_off}, v_on={self.v_on}"
            )
        if not (self.v_p > 0 and self.v_d > 0):
            raise ValueError("programming rates v_p and v_d must be > 0")
        if not self.node_amplitude > 0:
            raise ValueError("node_amplitude must be > 0")


@dataclass(frozen=True)
class DeviceSettings:
    """Per-experiment device configuration used to construct synapses."""

    v_p: float = 68.5
    v_d: float = 63.9
    v_on: float = 3.0
    v_off: float = -3.0
    w_min: float = 0.0
    w_max: float = 1.0
    node_amplitude: float = 2.0

    def make_synapse(self, weight: float = 0.5) -> MemristiveSynapse:
        return MemristiveSynapse(
            weight=weight,
            w_min=self.w_min,
            w_max=self.w_max,
            v_on=self.v_on,
            v_off=self.v_off,
            v_p=self.v_p,
            v_d=self.v_d,
            node_amplitude=self.node_amplitude,
        )


def apply_voltage(
    syn: MemristiveSynapse, v: float, duration_s: float
) -> MemristiveSynapse:
    """Hold a differential voltage across the device for a duration.

    Supra-threshold voltage moves the weight at the constant device rate;
    the dead zone leaves it unchanged. The result is clamped to bounds.
    """
    if duration_s < 0:
        raise ValueError(f"duration must be >= 0, got {duration_s}")
    if v >= syn.v_on:
        w = syn.weight + syn.v_p * duration_s
    elif v <= syn.v_off:
        w = syn.weight - syn.v_d * duration_s
    else:
        return syn
    w = min(max(w, syn.w_min), syn.w_max)
    return replace(syn, weight=w)


def program(
    syn: MemristiveSynapse, polarity: str, pulse_width_s: float
) -> MemristiveSynapse:
    """Apply one programming pulse of the given polarity and width.

    Equivalent to holding the full differential overlap level, which is
    twice the per-terminal amplitude, for the pulse width.
    """
    if pulse_width_s < 0:
        raise ValueError(f"pulse width must be >= 0, got {pulse_width_s}")
    if polarity == POTENTIATE:
        v = 2.0 * syn.node_amplitude
    elif polarity == DEPRESS:
        v = -2.0 * syn.node_amplitude
    else:
        raise ValueError(f"unknown polarity {polarity!r}")
    return apply_voltage(syn, v, pulse_width_s)


def ramp_characterize(
    syn: MemristiveSynapse, n_pulses: int, polarity: str, pulse_width_s: float
) -> list[float]:
    """Weight after each of ``n_pulses`` identical programming pulses.

    For the ideal device the trajectory is exactly linear until a bound is
    hit, then flat.
    """
    if n_pulses < 1:
        raise ValueError(f"n_pulses must be >= 1, got {n_pulses}")
    weights = []
    for _ in range(n_pulses):
        syn = program(syn, polarity, pulse_width_s)
        weights.append(syn.weight)
    return weights
