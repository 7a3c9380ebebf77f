"""Exponentially decaying, spike-reset synaptic traces.

A trace jumps to its maximum whenever its neuron fires (nearest-spike reset,
no accumulation) and decays exponentially in between. All evaluation is
closed form, so no integration step error enters anywhere downstream.
Times and time constants are in milliseconds.
"""

from __future__ import annotations

import math
from bisect import bisect_right
from dataclasses import dataclass, field, replace
from typing import Sequence

X_MAX = 1.0  # reset level is fixed by the rule family, not tunable


@dataclass(frozen=True)
class TraceState:
    """A trace value at a known time, with its decay constant."""

    value: float
    tau: float
    last_update_time: float = 0.0
    x_max: float = field(default=X_MAX, init=False)

    def __post_init__(self) -> None:
        if not self.tau > 0:
            raise ValueError(f"tau must be > 0, got {self.tau}")
        if not 0.0 <= self.value <= self.x_max:
            raise ValueError(
                f"trace value {self.value} outside [0, {self.x_max}]"
            )


@dataclass(frozen=True)
class SampledTrace:
    """Zero-order-hold view of a trace on the global clock grid.

    ``samples`` is an ordered series of (time_ms, held_value) pairs aligned
    to t = 0, p, 2p, ... where p is the sample period.
    """

    sample_period: float
    samples: tuple[tuple[float, float], ...]

    def held_at(self, t: float) -> float:
        """Held value at time t (constant between sample instants)."""
        if t < 0 or not self.samples:
            return 0.0
        idx = min(int(t // self.sample_period), len(self.samples) - 1)
        return self.samples[idx][1]


def decay(state: TraceState, dt: float) -> TraceState:
    """Advance a trace by dt milliseconds of pure exponential decay.

    dt must be non-negative; time never runs backward.
    """
    if dt < 0:
        raise ValueError(f"dt must be >= 0, got {dt}")
    return replace(
        state,
        value=state.value * math.exp(-dt / state.tau),
        last_update_time=state.last_update_time + dt,
    )


def on_spike(state: TraceState) -> TraceState:
    """Reset the trace to its maximum, discarding the previous value."""
    return replace(state, value=state.x_max)


def value_at(spike_times: Sequence[float], tau: float, t: float) -> float:
    """Evaluate a nearest-spike trace at time t from its spike history.

    Returns exp(-(t - s) / tau) where s is the latest spike at or before t,
    or 0.0 if no spike precedes t. ``spike_times`` must be sorted ascending.
    """
    if not tau > 0:
        raise ValueError(f"tau must be > 0, got {tau}")
    if any(a > b for a, b in zip(spike_times, spike_times[1:])):
        raise ValueError("spike_times must be sorted ascending")
    idx = bisect_right(spike_times, t) - 1
    if idx < 0:
        return 0.0
    return X_MAX * math.exp(-(t - spike_times[idx]) / tau)


def sample_hold(
    spike_times: Sequence[float],
    tau: float,
    duration: float,
    sample_period: float = 1.0,
) -> SampledTrace:
    """Sample a trace on the clock grid t = 0, p, 2p, ... up to ``duration``.

    A spike landing exactly on a sample instant is applied first, so that
    sample holds the reset value.
    """
    if not sample_period > 0:
        raise ValueError(f"sample_period must be > 0, got {sample_period}")
    if duration < 0:
        raise ValueError(f"duration must be >= 0, got {duration}")
    n = int(math.floor(duration / sample_period)) + 1
    samples = tuple(
        (k * sample_period, value_at(spike_times, tau, k * sample_period))
        for k in range(n)
    )
    return SampledTrace(sample_period=sample_period, samples=samples)
