"""Simulation lab for a frame-quantized triplet plasticity circuit.

Two engines compute the weight change of one plastic synapse under the
same nearest-spike triplet learning rule: an exact event-driven model and
a behavioral replica of a time-multiplexed mixed-signal circuit (sampled
traces, PWM pulse widths, a thresholded memristive device). A harness
sweeps the standard pairing, triplet, and quadruplet protocols over both
engines and scores their agreement.
"""

from .circuit import (
    CalibrationError,
    CircuitParams,
    CircuitRun,
    FrameRecord,
    SLOTS_PER_FRAME,
    SLOT_LTD,
    SLOT_LTP,
    SLOT_TRANSMIT,
    build_frame,
    calibrate,
    ltp_drive,
    overlap_voltage,
    pwm_encode,
    quantize_train,
    run_circuit,
)
from .harness import (
    ConfigError,
    DegenerateMetricError,
    ExperimentConfig,
    ExperimentResult,
    HIPPOCAMPAL,
    PARAM_SETS,
    ParameterSet,
    ResultRow,
    SweepSpec,
    VISUAL_CORTEX,
    emit_characterization_csv,
    emit_csv,
    emit_frames_csv,
    load_params_file,
    load_sigma_file,
    nmse,
    read_result_csv,
    relative_rms,
    resolve_params,
    run_experiment,
)
from .model import (
    ModelRun,
    PlasticityEvent,
    SpikeTrain,
    TripletParams,
    ltd_at_pre,
    ltp_at_post,
    run_model,
)
from .protocols import (
    POST_PRE_POST,
    PRE_POST_PRE,
    ProtocolSpec,
    pairing,
    quadruplet,
    triplet,
    write_train_csv,
)
from .synapse import (
    DEPRESS,
    DeviceSettings,
    MemristiveSynapse,
    POTENTIATE,
    apply_voltage,
    program,
    ramp_characterize,
)
from .traces import (
    SampledTrace,
    TraceState,
    decay,
    on_spike,
    sample_hold,
    value_at,
)

__version__ = "0.1.0"

__all__ = [
    "CalibrationError",
    "CircuitParams",
    "CircuitRun",
    "ConfigError",
    "DEPRESS",
    "DegenerateMetricError",
    "DeviceSettings",
    "ExperimentConfig",
    "ExperimentResult",
    "FrameRecord",
    "HIPPOCAMPAL",
    "MemristiveSynapse",
    "ModelRun",
    "POST_PRE_POST",
    "POTENTIATE",
    "PARAM_SETS",
    "PRE_POST_PRE",
    "ParameterSet",
    "PlasticityEvent",
    "ProtocolSpec",
    "ResultRow",
    "SLOTS_PER_FRAME",
    "SLOT_LTD",
    "SLOT_LTP",
    "SLOT_TRANSMIT",
    "SampledTrace",
    "SpikeTrain",
    "SweepSpec",
    "TraceState",
    "TripletParams",
    "VISUAL_CORTEX",
    "apply_voltage",
    "build_frame",
    "calibrate",
    "decay",
    "emit_characterization_csv",
    "emit_csv",
    "emit_frames_csv",
    "load_params_file",
    "load_sigma_file",
    "ltd_at_pre",
    "ltp_at_post",
    "ltp_drive",
    "nmse",
    "on_spike",
    "overlap_voltage",
    "pairing",
    "program",
    "pwm_encode",
    "quadruplet",
    "quantize_train",
    "ramp_characterize",
    "read_result_csv",
    "relative_rms",
    "resolve_params",
    "run_circuit",
    "run_experiment",
    "run_model",
    "sample_hold",
    "triplet",
    "value_at",
    "write_train_csv",
]
