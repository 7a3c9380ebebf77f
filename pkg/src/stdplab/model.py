"""Event-driven reference engine for the nearest-spike triplet plasticity rule.

One presynaptic trace x (time constant tau_j) is reset by pre spikes; a fast
trace y1 (tau_i1) and a slow trace y2 (tau_i2) are reset by post spikes.
Depression fires at each pre spike and is proportional to y1 at that moment;
potentiation fires at each post spike and reads x at that moment together
with y2 as it stood just before the spike resets it.

Amplitudes are constants, so every event delta scales linearly with them and
the trajectory is independent of the starting weight. This engine never
clamps; it is the linear-regime reference the circuit engine is checked
against.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Iterable

PRE = "pre"
POST = "post"


@dataclass(frozen=True)
class TripletParams:
    """Rule constants: amplitudes (dimensionless) and time constants (ms).

    ``epsilon`` is the read-before-update margin for the slow post trace.
    The engine evaluates the pre-reset value exactly, so any positive
    epsilon smaller than the minimum post-spike gap yields identical
    results; it is kept as a parameter for circuit calibration.
    """

    a2_plus: float
    a3_plus: float
    a2_minus: float
    tau_j: float
    tau_i1: float
    tau_i2: float
    epsilon: float = 1.0

    def __post_init__(self) -> None:
        for name in ("a2_plus", "a3_plus", "a2_minus"):
            a = getattr(self, name)
            if not (math.isfinite(a) and a >= 0):
                raise ValueError(f"{name} must be finite and >= 0, got {a}")
        for name in ("tau_j", "tau_i1", "tau_i2", "epsilon"):
            tau = getattr(self, name)
            if not tau > 0:
                raise ValueError(f"{name} must be > 0, got {tau}")
        if not self.tau_i1 < self.tau_i2:
            raise ValueError(
                f"tau_i1 ({self.tau_i1}) must be < tau_i2 ({self.tau_i2}); "
                "the fast post trace must fall faster than the slow one"
            )


@dataclass(frozen=True)
class SpikeTrain:
    """Timestamped pre and post spike events over a finite window (ms)."""

    pre_times: tuple[float, ...]
    post_times: tuple[float, ...]
    duration: float

    def __init__(
        self,
        pre_times: Iterable[float],
        post_times: Iterable[float],
        duration: float,
    ) -> None:
        object.__setattr__(self, "pre_times", tuple(pre_times))
        object.__setattr__(self, "post_times", tuple(post_times))
        object.__setattr__(self, "duration", float(duration))
        if self.duration < 0:
            raise ValueError(f"duration must be >= 0, got {self.duration}")
        for name, times in (("pre", self.pre_times), ("post", self.post_times)):
            if any(a > b for a, b in zip(times, times[1:])):
                raise ValueError(f"{name}_times must be sorted ascending")
            if times and (times[0] < 0 or times[-1] > self.duration):
                raise ValueError(
                    f"{name}_times must lie in [0, {self.duration}]"
                )


@dataclass(frozen=True)
class PlasticityEvent:
    """One weight update: when, which side triggered it, and the result."""

    time: float
    kind: str  # PRE or POST
    delta_w: float
    weight_after: float


@dataclass(frozen=True)
class ModelRun:
    initial_weight: float
    events: tuple[PlasticityEvent, ...]
    total_delta_w: float


def ltd_at_pre(params: TripletParams, y1_value: float) -> float:
    """Depression triggered by a pre spike: -a2_minus * y1 (signed, <= 0)."""
    if not 0.0 <= y1_value <= 1.0:
        raise ValueError(f"y1 value {y1_value} outside [0, 1]")
    return -params.a2_minus * y1_value


def ltp_at_post(
    params: TripletParams, x_value: float, y2_before_update: float
) -> float:
    """Potentiation triggered by a post spike.

    ``y2_before_update`` is the slow post trace as it stood just before this
    spike resets it. Returns a2_plus*x + a3_plus*x*y2 (>= 0).
    """
    if not 0.0 <= x_value <= 1.0:
        raise ValueError(f"x value {x_value} outside [0, 1]")
    if not 0.0 <= y2_before_update <= 1.0:
        raise ValueError(f"y2 value {y2_before_update} outside [0, 1]")
    return params.a2_plus * x_value + params.a3_plus * x_value * y2_before_update


def _decayed(last_spike: float | None, tau: float, t: float) -> float:
    if last_spike is None:
        return 0.0
    return math.exp(-(t - last_spike) / tau)


def run_model(
    train: SpikeTrain, params: TripletParams, w0: float = 0.5
) -> ModelRun:
    """Run the rule over a spike train, returning the full event trajectory.

    Events are processed in time order. When a pre and a post spike share a
    timestamp, all traces are read first (pre-update values), depression is
    applied, then potentiation, then all resets. Repeated spikes of the same
    neuron at an identical timestamp collapse into a single reset.
    """
    if not math.isfinite(w0):
        raise ValueError(f"w0 must be finite, got {w0}")
    pre_set = set(train.pre_times)
    post_set = set(train.post_times)
    last_pre: float | None = None
    last_post: float | None = None
    w = w0
    deltas: list[float] = []
    events: list[PlasticityEvent] = []
    for t in sorted(pre_set | post_set):
        x = _decayed(last_pre, params.tau_j, t)
        y1 = _decayed(last_post, params.tau_i1, t)
        y2 = _decayed(last_post, params.tau_i2, t)
        if t in pre_set:
            dw = ltd_at_pre(params, y1)
            w += dw
            deltas.append(dw)
            events.append(PlasticityEvent(t, PRE, dw, w))
            last_pre = t
        if t in post_set:
            dw = ltp_at_post(params, x, y2)
            w += dw
            deltas.append(dw)
            events.append(PlasticityEvent(t, POST, dw, w))
            last_post = t
    return ModelRun(
        initial_weight=w0,
        events=tuple(events),
        total_delta_w=math.fsum(deltas),
    )


def merged_events(train: SpikeTrain) -> list[tuple[float, str]]:
    """Time-ordered (time, kind) pairs, pre before post at shared times."""
    out = [(t, PRE) for t in train.pre_times]
    out += [(t, POST) for t in train.post_times]
    out.sort(key=lambda e: (e[0], e[1] == POST))
    return out


def shift(train: SpikeTrain, offset_ms: float) -> SpikeTrain:
    """Translate every spike by a constant offset (must stay within >= 0)."""
    return SpikeTrain(
        pre_times=[t + offset_ms for t in train.pre_times],
        post_times=[t + offset_ms for t in train.post_times],
        duration=train.duration + max(offset_ms, 0.0),
    )
