"""Experiment orchestration over protocol sweeps.

Runs one or both engines across a list of sweep values, collects per-point
weight changes, scores circuit-vs-model agreement, and reads/writes the
flat-file formats (result CSV, parameter files, sigma files).

Agreement is scored as NMSE when per-point standard errors are supplied
and as a relative RMS error otherwise; the output always names the metric
used. Two parameter sets ship built in: ``visual-cortex`` (pure triplet
potentiation) and ``hippocampal`` (mixed pair and triplet terms).
"""

from __future__ import annotations

import csv
import math
import os
from dataclasses import dataclass, replace

from .circuit import SLOTS_PER_FRAME, calibrate, quantize_train, run_circuit
from .model import TripletParams, run_model
from .protocols import PAIRING, QUADRUPLET, TRIPLET, ProtocolSpec
from .synapse import DeviceSettings

ENGINE_MODEL = "model"
ENGINE_CIRCUIT = "circuit"
ENGINE_BOTH = "both"
ENGINES = (ENGINE_MODEL, ENGINE_CIRCUIT, ENGINE_BOTH)

AXIS_RHO = "rho"
AXIS_DT = "dt"
AXIS_DT_PAIR = "dt_pair"
AXIS_T = "t"

_AXES_BY_KIND = {
    PAIRING: (AXIS_RHO, AXIS_DT),
    TRIPLET: (AXIS_RHO, AXIS_DT_PAIR),
    QUADRUPLET: (AXIS_RHO, AXIS_T),
}

CSV_HEADER = ("condition", "dw_model", "dw_circuit", "abs_err", "rel_err")

VISUAL_CORTEX = TripletParams(
    a2_plus=0.0,
    a3_plus=50.0e-3,
    a2_minus=8.0e-3,
    tau_j=16.8,
    tau_i1=33.7,
    tau_i2=40.0,
)

HIPPOCAMPAL = TripletParams(
    a2_plus=4.6e-3,
    a3_plus=9.1e-3,
    a2_minus=3.0e-3,
    tau_j=16.8,
    tau_i1=33.7,
    tau_i2=48.0,
)


class ConfigError(ValueError):
    """Raised for malformed configs, unknown keys, or bad sweep setups."""


class DegenerateMetricError(ValueError):
    """Raised when a relative metric has an all-zero reference."""


@dataclass(frozen=True)
class ParameterSet:
    """A rule parameterization plus the device that realizes it."""

    name: str
    triplet: TripletParams
    device: DeviceSettings


# Device programming rates are chosen so that calibration lands exactly on
# the nominal carrier peaks for each set (1.37/7.99 V and 12.67/17.90 V).
PARAM_SETS = {
    "visual-cortex": ParameterSet(
        "visual-cortex", VISUAL_CORTEX, DeviceSettings(v_p=68.5, v_d=63.9)
    ),
    "hippocampal": ParameterSet(
        "hippocampal", HIPPOCAMPAL, DeviceSettings(v_p=58.282, v_d=53.7)
    ),
}


def nmse(
    delta_w_cir: "list[float] | tuple[float, ...]",
    delta_w_mod: "list[float] | tuple[float, ...]",
    sigma: "list[float] | tuple[float, ...]",
) -> float:
    """Mean of squared deviations, each normalized by its standard error."""
    n = len(delta_w_cir)
    if len(delta_w_mod) != n or len(sigma) != n:
        raise ValueError(
            f"length mismatch: {n} circuit, {len(delta_w_mod)} model, "
            f"{len(sigma)} sigma"
        )
    if n < 1:
        raise ValueError("nmse needs at least one point")
    for s in sigma:
        if not s > 0:
            raise ValueError(f"sigma values must be > 0, got {s}")
    terms = [
        ((c - m) / s) ** 2
        for c, m, s in zip(delta_w_cir, delta_w_mod, sigma)
    ]
    return math.fsum(terms) / n


def relative_rms(
    delta_w_cir: "list[float] | tuple[float, ...]",
    delta_w_mod: "list[float] | tuple[float, ...]",
) -> float:
    """RMS deviation normalized by the RMS of the reference series."""
    n = len(delta_w_cir)
    if len(delta_w_mod) != n:
        raise ValueError(
            f"length mismatch: {n} circuit vs {len(delta_w_mod)} model"
        )
    if n < 1:
        raise ValueError("relative_rms needs at least one point")
    denom = math.fsum(m * m for m in delta_w_mod)
    if denom == 0.0:
        raise DegenerateMetricError(
            "reference series is identically zero; relative error undefined"
        )
    num = math.fsum((c - m) ** 2 for c, m in zip(delta_w_cir, delta_w_mod))
    return math.sqrt(num / denom)


@dataclass(frozen=True)
class SweepSpec:
    """One swept protocol parameter and its values, in output order.

    ``dt_pair`` values are (dt1_ms, dt2_ms) tuples; the other axes take
    plain numbers.
    """

    axis: str
    values: tuple

    def __init__(self, axis: str, values) -> None:
        object.__setattr__(self, "axis", axis)
        object.__setattr__(self, "values", tuple(values))
        if axis not in (AXIS_RHO, AXIS_DT, AXIS_DT_PAIR, AXIS_T):
            raise ConfigError(f"unknown sweep axis {axis!r}")
        if not self.values:
            raise ConfigError("sweep must contain at least one value")


@dataclass(frozen=True)
class ExperimentConfig:
    """Everything one experiment needs, validated up front."""

    params: ParameterSet
    protocol: ProtocolSpec
    sweep: SweepSpec
    engine: str = ENGINE_BOTH
    w0: float = 0.5
    slot_ms: float = 1.0
    model_at_quantized_times: bool = False
    disagreement_threshold: float | None = None
    sigmas: tuple[float, ...] | None = None

    def __post_init__(self) -> None:
        if self.engine not in ENGINES:
            raise ConfigError(f"unknown engine {self.engine!r}")
        allowed = _AXES_BY_KIND.get(self.protocol.kind)
        if allowed is None:
            raise ConfigError(f"unknown protocol kind {self.protocol.kind!r}")
        if self.sweep.axis not in allowed:
            raise ConfigError(
                f"axis {self.sweep.axis!r} does not apply to "
                f"{self.protocol.kind!r} (use one of {', '.join(allowed)})"
            )
        if not self.slot_ms > 0:
            raise ConfigError(f"slot_ms must be > 0, got {self.slot_ms}")
        if self.sigmas is not None:
            object.__setattr__(self, "sigmas", tuple(self.sigmas))
            if len(self.sigmas) != len(self.sweep.values):
                raise ConfigError(
                    f"{len(self.sigmas)} sigma values for "
                    f"{len(self.sweep.values)} sweep points"
                )


@dataclass(frozen=True)
class ResultRow:
    """Per-sweep-point weight changes and their disagreement.

    Fields are None when the corresponding engine did not run, or for
    rel_err when the model change is zero.
    """

    condition: str
    dw_model: float | None
    dw_circuit: float | None
    abs_err: float | None
    rel_err: float | None


@dataclass(frozen=True)
class ExperimentResult:
    rows: tuple[ResultRow, ...]
    metric_name: str | None
    metric_value: float | None
    flagged: tuple[str, ...] = ()


def _condition(axis: str, value) -> str:
    if axis == AXIS_DT_PAIR:
        a, b = value
        return f"{axis}={float(a)!r}:{float(b)!r}"
    return f"{axis}={float(value)!r}"


def _spec_with(protocol: ProtocolSpec, axis: str, value) -> ProtocolSpec:
    if axis == AXIS_RHO:
        return replace(protocol, rho_hz=float(value))
    if axis == AXIS_DT:
        return replace(protocol, dt_ms=float(value))
    if axis == AXIS_DT_PAIR:
        a, b = value
        return replace(protocol, dt1_ms=float(a), dt2_ms=float(b))
    return replace(protocol, t_ms=float(value))


def run_experiment(cfg: ExperimentConfig) -> ExperimentResult:
    """Sweep the configured axis and score the engines.

    Every sweep point starts from the same initial weight; engines never
    share state, so the model and circuit columns match what single-engine
    runs would produce. Points whose relative disagreement exceeds the
    configured threshold are listed in ``flagged``.
    """
    tp = cfg.params.triplet
    dev = cfg.params.device
    want_model = cfg.engine in (ENGINE_MODEL, ENGINE_BOTH)
    want_circuit = cfg.engine in (ENGINE_CIRCUIT, ENGINE_BOTH)
    cp = None
    if want_circuit:
        cp = calibrate(tp, dev.v_p, dev.v_d, cfg.slot_ms)
    frame_ms = SLOTS_PER_FRAME * cfg.slot_ms
    rows: list[ResultRow] = []
    col_model: list[float] = []
    col_circuit: list[float] = []
    flagged: list[str] = []
    for value in cfg.sweep.values:
        condition = _condition(cfg.sweep.axis, value)
        train = _spec_with(cfg.protocol, cfg.sweep.axis, value).build()
        dw_m: float | None = None
        dw_c: float | None = None
        if want_model:
            model_train = train
            if cfg.model_at_quantized_times:
                model_train = quantize_train(train, frame_ms)
            dw_m = run_model(model_train, tp, cfg.w0).total_delta_w
            col_model.append(dw_m)
        if want_circuit:
            syn = dev.make_synapse(cfg.w0)
            dw_c = run_circuit(train, cp, syn).total_delta_w
            col_circuit.append(dw_c)
        abs_err: float | None = None
        rel_err: float | None = None
        if dw_m is not None and dw_c is not None:
            abs_err = abs(dw_c - dw_m)
            rel_err = abs_err / abs(dw_m) if dw_m != 0.0 else None
            if cfg.disagreement_threshold is not None:
                measure = rel_err if rel_err is not None else abs_err
                if measure > cfg.disagreement_threshold:
                    flagged.append(condition)
        rows.append(ResultRow(condition, dw_m, dw_c, abs_err, rel_err))
    metric_name: str | None = None
    metric_value: float | None = None
    if want_model and want_circuit:
        if cfg.sigmas is not None:
            metric_name = "nmse"
            metric_value = nmse(col_circuit, col_model, cfg.sigmas)
        else:
            metric_name = "relative_rms"
            metric_value = relative_rms(col_circuit, col_model)
    return ExperimentResult(
        rows=tuple(rows),
        metric_name=metric_name,
        metric_value=metric_value,
        flagged=tuple(flagged),
    )


def _cell(value: float | None) -> str:
    # repr of a float round-trips exactly, well past 12 significant digits
    return "" if value is None else repr(float(value))


def emit_csv(result: ExperimentResult, path: str) -> None:
    """Write one row per sweep point; byte-identical for equal results."""
    try:
        with open(path, "w", newline="") as fh:
            writer = csv.writer(fh, lineterminator="\n")
            writer.writerow(CSV_HEADER)
            for row in result.rows:
                writer.writerow(
                    [
                        row.condition,
                        _cell(row.dw_model),
                        _cell(row.dw_circuit),
                        _cell(row.abs_err),
                        _cell(row.rel_err),
                    ]
                )
    except OSError as exc:
        raise OSError(f"writing results to {path}: {exc}") from exc


def read_result_csv(path: str) -> list[ResultRow]:
    """Parse a file produced by emit_csv back into result rows."""
    try:
        with open(path, newline="") as fh:
            reader = csv.reader(fh)
            header = next(reader, None)
            if header != list(CSV_HEADER):
                raise ConfigError(f"{path}: unexpected header {header!r}")
            rows = []
            for record in reader:
                if len(record) != len(CSV_HEADER):
                    raise ConfigError(f"{path}: malformed row {record!r}")
                condition, *cells = record
                nums = [None if c == "" else float(c) for c in cells]
                rows.append(ResultRow(condition, *nums))
    except OSError as exc:
        raise OSError(f"reading results from {path}: {exc}") from exc
    return rows


def emit_frames_csv(run, path: str) -> None:
    """Dump a circuit run slot by slot for waveform-level inspection."""
    try:
        with open(path, "w", newline="") as fh:
            writer = csv.writer(fh, lineterminator="\n")
            writer.writerow(
                [
                    "frame",
                    "slot",
                    "p_width_s",
                    "n_width_s",
                    "differential_v",
                    "delta_w",
                    "weight",
                ]
            )
            for frame in run.frames:
                for event in frame.slots:
                    writer.writerow(
                        [
                            frame.frame_index,
                            event.slot,
                            _cell(event.p_width_s),
                            _cell(event.n_width_s),
                            _cell(event.differential_v),
                            _cell(event.delta_w),
                            _cell(event.weight_after),
                        ]
                    )
    except OSError as exc:
        raise OSError(f"writing frames to {path}: {exc}") from exc


def emit_characterization_csv(weights: "list[float]", path: str) -> None:
    """Write a pulse-by-pulse weight staircase."""
    try:
        with open(path, "w", newline="") as fh:
            writer = csv.writer(fh, lineterminator="\n")
            writer.writerow(["pulse_index", "weight"])
            for i, w in enumerate(weights, start=1):
                writer.writerow([i, _cell(w)])
    except OSError as exc:
        raise OSError(f"writing characterization to {path}: {exc}") from exc


_PARAM_KEYS = {
    "params.a2_plus",
    "params.a3_plus",
    "params.a2_minus",
    "params.tau_j",
    "params.tau_i1",
    "params.tau_i2",
    "params.epsilon",
}
_DEVICE_KEYS = {
    "device.v_p",
    "device.v_d",
    "device.v_on",
    "device.v_off",
    "device.w_min",
    "device.w_max",
    "device.node_amplitude",
}
_REQUIRED_KEYS = _PARAM_KEYS - {"params.epsilon"}


def load_params_file(path: str) -> ParameterSet:
    """Read a custom parameter set from a flat key=value file.

    Lines hold ``section.key = number``; '#' starts a comment. All rule
    amplitudes and time constants are required, device keys fall back to
    their defaults, and unknown or repeated keys fail immediately.
    """
    try:
        with open(path) as fh:
            lines = fh.readlines()
    except OSError as exc:
        raise ConfigError(f"cannot read parameter file {path}: {exc}") from exc
    known = _PARAM_KEYS | _DEVICE_KEYS
    values: dict[str, float] = {}
    for lineno, raw in enumerate(lines, start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        key, sep, text = line.partition("=")
        if not sep:
            raise ConfigError(f"{path}:{lineno}: expected 'key = value'")
        key = key.strip()
        text = text.strip()
        if key not in known:
            raise ConfigError(f"{path}:{lineno}: unknown key {key!r}")
        if key in values:
            raise ConfigError(f"{path}:{lineno}: duplicate key {key!r}")
        try:
            values[key] = float(text)
        except ValueError:
            raise ConfigError(
                f"{path}:{lineno}: {text!r} is not a number"
            ) from None
    missing = sorted(_REQUIRED_KEYS - values.keys())
    if missing:
        raise ConfigError(f"{path}: missing required keys: {', '.join(missing)}")
    tp_kwargs = {
        key.split(".", 1)[1]: val
        for key, val in values.items()
        if key.startswith("params.")
    }
    dev_kwargs = {
        key.split(".", 1)[1]: val
        for key, val in values.items()
        if key.startswith("device.")
    }
    try:
        triplet = TripletParams(**tp_kwargs)
        device = DeviceSettings(**dev_kwargs)
        device.make_synapse(device.w_min)  # surfaces bad device bounds now
    except ValueError as exc:
        raise ConfigError(f"{path}: {exc}") from exc
    name = os.path.splitext(os.path.basename(path))[0]
    return ParameterSet(name, triplet, device)


def load_sigma_file(path: str) -> tuple[float, ...]:
    """Read per-point standard errors, one number per line."""
    try:
        with open(path) as fh:
            lines = fh.readlines()
    except OSError as exc:
        raise ConfigError(f"cannot read sigma file {path}: {exc}") from exc
    sigmas: list[float] = []
    for lineno, raw in enumerate(lines, start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        try:
            sigmas.append(float(line))
        except ValueError:
            raise ConfigError(
                f"{path}:{lineno}: {line!r} is not a number"
            ) from None
    if not sigmas:
        raise ConfigError(f"{path}: no sigma values found")
    return tuple(sigmas)


def resolve_params(name_or_path: str) -> ParameterSet:
    """Look up a built-in parameter set or load one from a file."""
    if name_or_path in PARAM_SETS:
        return PARAM_SETS[name_or_path]
    if os.path.exists(name_or_path):
        return load_params_file(name_or_path)
    raise ConfigError(
        f"{name_or_path!r} is neither a named parameter set "
        f"({', '.join(sorted(PARAM_SETS))}) nor an existing file"
    )
