"""Spike-train generators for the stimulation protocols.

Three protocols are provided. Pairing repeats a pre/post pair at a fixed
interval; the sign convention here is ordering-based: dt > 0 means the post
spike follows the pre spike (the potentiation side), dt < 0 the reverse.
Triplets come in pre-post-pre and post-pre-post variants with two positive
gaps. Quadruplets are a pre-post pair and a post-pre pair, each with a 5 ms
internal delay, separated by T (measured second spike of the first pair to
first spike of the second); negative T mirrors the order.

Every generator repeats its group ``n`` times at a period of 1000/rho ms and
refuses configurations whose group span reaches the period.
"""

from __future__ import annotations

import csv
from dataclasses import dataclass

from .model import SpikeTrain

PAIRING = "pairing"
TRIPLET = "triplet"
QUADRUPLET = "quadruplet"
PRE_POST_PRE = "pre-post-pre"
POST_PRE_POST = "post-pre-post"

QUAD_PAIR_DELAY_MS = 5.0  # internal delay of each quadruplet pair


@dataclass(frozen=True)
class ProtocolSpec:
    """A complete protocol description, ready to build a spike train.

    Timing fields are per kind: ``dt_ms`` for pairing, ``variant`` with
    ``dt1_ms``/``dt2_ms`` for triplet, ``t_ms`` for quadruplet. Unused
    fields may stay None.
    """

    kind: str
    repetitions: int = 60
    rho_hz: float = 1.0
    dt_ms: float | None = None
    variant: str = PRE_POST_PRE
    dt1_ms: float | None = None
    dt2_ms: float | None = None
    t_ms: float | None = None

    def build(self) -> SpikeTrain:
        if self.kind == PAIRING:
            if self.dt_ms is None:
                raise ValueError("pairing protocol requires dt_ms")
            return pairing(self.dt_ms, self.rho_hz, self.repetitions)
        if self.kind == TRIPLET:
            if self.dt1_ms is None or self.dt2_ms is None:
                raise ValueError("triplet protocol requires dt1_ms and dt2_ms")
            return triplet(
                self.variant, self.dt1_ms, self.dt2_ms,
                self.rho_hz, self.repetitions,
            )
        if self.kind == QUADRUPLET:
            if self.t_ms is None:
                raise ValueError("quadruplet protocol requires t_ms")
            return quadruplet(self.t_ms, self.rho_hz, self.repetitions)
        raise ValueError(f"unknown protocol kind {self.kind!r}")


def _period(rho_hz: float, n: int) -> float:
    if not rho_hz > 0:
        raise ValueError(f"rho must be > 0 Hz, got {rho_hz}")
    if n < 1:
        raise ValueError(f"repetitions must be >= 1, got {n}")
    return 1000.0 / rho_hz


def pairing(dt_ms: float, rho_hz: float, n: int = 60) -> SpikeTrain:
    """n pre/post pairs with interval |dt_ms|, repeated at rho_hz.

    Positive dt puts the post spike after the pre spike.
    """
    period = _period(rho_hz, n)
    if abs(dt_ms) >= period:
        raise ValueError(
            f"|dt| = {abs(dt_ms)} ms must be smaller than the "
            f"group period {period} ms"
        )
    starts = [k * period for k in range(n)]
    if dt_ms >= 0:
        pre = starts
        post = [t + dt_ms for t in starts]
    else:
        post = starts
        pre = [t - dt_ms for t in starts]
    return SpikeTrain(pre, post, n * period)


def triplet(
    variant: str, dt1_ms: float, dt2_ms: float, rho_hz: float, n: int = 60
) -> SpikeTrain:
    """n three-spike groups with gaps dt1 then dt2, repeated at rho_hz."""
    period = _period(rho_hz, n)
    if dt1_ms <= 0 or dt2_ms <= 0:
        raise ValueError(
            f"triplet gaps must be > 0, got dt1={dt1_ms}, dt2={dt2_ms}"
        )
    span = dt1_ms + dt2_ms
    if span >= period:
        raise ValueError(
            f"group span {span} ms must be smaller than the period {period} ms"
        )
    pre: list[float] = []
    post: list[float] = []
    for k in range(n):
        t = k * period
        if variant == PRE_POST_PRE:
            pre += [t, t + span]
            post += [t + dt1_ms]
        elif variant == POST_PRE_POST:
            post += [t, t + span]
            pre += [t + dt1_ms]
        else:
            raise ValueError(f"unknown triplet variant {variant!r}")
    return SpikeTrain(pre, post, n * period)


def quadruplet(t_ms: float, rho_hz: float, n: int = 60) -> SpikeTrain:
    """n four-spike groups: two 5 ms pairs separated by T = t_ms.

    T > 0 runs pre-post ... post-pre; T < 0 mirrors to post-pre ... pre-post.
    T = 0 would make the middle spikes coincide and is rejected.
    """
    period = _period(rho_hz, n)
    if t_ms == 0:
        raise ValueError("quadruplet separation T must be nonzero")
    d = QUAD_PAIR_DELAY_MS
    span = 2 * d + abs(t_ms)
    if span >= period:
        raise ValueError(
            f"group span {span} ms must be smaller than the period {period} ms"
        )
    pre: list[float] = []
    post: list[float] = []
    for k in range(n):
        t = k * period
        if t_ms > 0:
            pre += [t, t + 2 * d + t_ms]
            post += [t + d, t + d + t_ms]
        else:
            post += [t, t + 2 * d - t_ms]
            pre += [t + d, t + d - t_ms]
    return SpikeTrain(pre, post, n * period)


def write_train_csv(train: SpikeTrain, path: str) -> None:
    """Export a train as (time_ms, neuron) rows, time-ordered."""
    rows = [(t, "pre") for t in train.pre_times]
    rows += [(t, "post") for t in train.post_times]
    rows.sort(key=lambda r: (r[0], r[1] != "pre"))
    try:
        with open(path, "w", newline="") as fh:
            writer = csv.writer(fh, lineterminator="\n")
            writer.writerow(["time_ms", "neuron"])
            for t, neuron in rows:
                writer.writerow([repr(t), neuron])
    except OSError as exc:
        raise OSError(f"writing spike train to {path}: {exc}") from exc
