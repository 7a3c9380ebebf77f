"""Command-line front end.

Three subcommands: ``run`` executes a protocol sweep and writes the result
CSV, ``characterize`` ramps the synapse up and down to record its staircase
response, and ``calibrate`` prints the circuit constants derived from a
parameter set.

Exit codes: 0 success, 2 bad arguments or config, 3 unsolvable domain
request (undetermined calibration, degenerate metric, or disagreement over
the configured threshold), 4 file I/O failure.
"""

from __future__ import annotations

import argparse
import sys

from .circuit import CalibrationError, calibrate
from .harness import (
    AXIS_DT_PAIR,
    ConfigError,
    DegenerateMetricError,
    ENGINE_BOTH,
    ENGINES,
    ExperimentConfig,
    SweepSpec,
    emit_characterization_csv,
    emit_csv,
    load_sigma_file,
    resolve_params,
    run_experiment,
)
from .protocols import (
    PAIRING,
    POST_PRE_POST,
    PRE_POST_PRE,
    ProtocolSpec,
    QUADRUPLET,
    TRIPLET,
)
from .synapse import DEPRESS, POTENTIATE, ramp_characterize

EXIT_OK = 0
EXIT_USAGE = 2
EXIT_DOMAIN = 3
EXIT_IO = 4


def parse_sweep(text: str) -> SweepSpec:
    """Parse 'axis=v1,v2,...'; dt_pair values are 'dt1:dt2'."""
    axis, sep, rest = text.partition("=")
    axis = axis.strip()
    if not sep or not rest.strip():
        raise ConfigError(
            f"sweep must look like axis=v1,v2,... got {text!r}"
        )
    values: list = []
    for item in rest.split(","):
        item = item.strip()
        if not item:
            raise ConfigError(f"empty value in sweep {text!r}")
        try:
            if ":" in item:
                a, _, b = item.partition(":")
                values.append((float(a), float(b)))
            else:
                values.append(float(item))
        except ValueError:
            raise ConfigError(
                f"bad sweep value {item!r} in {text!r}"
            ) from None
    pairs = [isinstance(v, tuple) for v in values]
    if axis == AXIS_DT_PAIR and not all(pairs):
        raise ConfigError("dt_pair sweep values must be dt1:dt2 pairs")
    if axis != AXIS_DT_PAIR and any(pairs):
        raise ConfigError(f"{axis!r} sweep values must be plain numbers")
    return SweepSpec(axis, values)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="stdplab",
        description=(
            "Simulation lab for a frame-quantized triplet plasticity "
            "circuit and its reference model."
        ),
    )
    sub = parser.add_subparsers(dest="command", required=True)

    run = sub.add_parser("run", help="sweep a protocol and write result CSV")
    run.add_argument(
        "--protocol",
        required=True,
        choices=[PAIRING, TRIPLET, QUADRUPLET],
    )
    run.add_argument(
        "--params",
        required=True,
        help="named parameter set (visual-cortex, hippocampal) or file path",
    )
    run.add_argument("--engine", choices=list(ENGINES), default=ENGINE_BOTH)
    run.add_argument(
        "--sweep",
        required=True,
        help="axis=v1,v2,... with axis in {rho,dt,dt_pair,t}; "
        "dt_pair values as dt1:dt2",
    )
    run.add_argument("--out", required=True, help="result CSV path")
    run.add_argument("--reps", type=int, default=60, help="groups per run")
    run.add_argument("--rho", type=float, default=1.0, help="repetition Hz")
    run.add_argument("--dt", type=float, default=None, help="pairing gap ms")
    run.add_argument(
        "--variant",
        choices=[PRE_POST_PRE, POST_PRE_POST],
        default=PRE_POST_PRE,
    )
    run.add_argument("--dt1", type=float, default=None, help="first gap ms")
    run.add_argument("--dt2", type=float, default=None, help="second gap ms")
    run.add_argument("--t", type=float, default=None, help="pair spacing ms")
    run.add_argument("--w0", type=float, default=0.5, help="initial weight")
    run.add_argument("--slot-ms", type=float, default=1.0)
    run.add_argument(
        "--sigmas",
        default=None,
        help="file of per-point standard errors; switches the metric to NMSE",
    )
    run.add_argument(
        "--model-at-quantized-times",
        action="store_true",
        help="feed the model the frame-snapped spike times",
    )
    run.add_argument(
        "--disagreement-threshold",
        type=float,
        default=None,
        help="flag sweep points whose relative engine gap exceeds this",
    )

    char = sub.add_parser(
        "characterize", help="record the synapse pulse staircase"
    )
    char.add_argument("--pulses", type=int, required=True)
    char.add_argument("--out", required=True)
    char.add_argument("--params", default="visual-cortex")
    char.add_argument(
        "--width-s",
        type=float,
        default=1e-4,
        help="programming pulse width in seconds",
    )

    cal = sub.add_parser(
        "calibrate", help="print circuit constants for a parameter set"
    )
    cal.add_argument("--params", required=True)
    cal.add_argument("--slot-ms", type=float, default=1.0)
    return parser


def _cmd_run(args: argparse.Namespace) -> int:
    params = resolve_params(args.params)
    sweep = parse_sweep(args.sweep)
    sigmas = load_sigma_file(args.sigmas) if args.sigmas else None
    protocol = ProtocolSpec(
        kind=args.protocol,
        repetitions=args.reps,
        rho_hz=args.rho,
        dt_ms=args.dt,
        variant=args.variant,
        dt1_ms=args.dt1,
        dt2_ms=args.dt2,
        t_ms=args.t,
    )
    cfg = ExperimentConfig(
        params=params,
        protocol=protocol,
        sweep=sweep,
        engine=args.engine,
        w0=args.w0,
        slot_ms=args.slot_ms,
        model_at_quantized_times=args.model_at_quantized_times,
        disagreement_threshold=args.disagreement_threshold,
        sigmas=sigmas,
    )
    result = run_experiment(cfg)
    emit_csv(result, args.out)
    print(f"wrote {len(result.rows)} rows to {args.out}")
    if result.metric_name is not None:
        print(f"{result.metric_name} = {result.metric_value:.6g}")
    if result.flagged:
        for condition in result.flagged:
            print(
                f"disagreement over threshold at {condition}",
                file=sys.stderr,
            )
        return EXIT_DOMAIN
    return EXIT_OK


def _cmd_characterize(args: argparse.Namespace) -> int:
    if args.pulses < 1:
        raise ConfigError(f"--pulses must be >= 1, got {args.pulses}")
    device = resolve_params(args.params).device
    up = ramp_characterize(
        device.make_synapse(device.w_min),
        args.pulses,
        POTENTIATE,
        args.width_s,
    )
    down = ramp_characterize(
        device.make_synapse(up[-1]), args.pulses, DEPRESS, args.width_s
    )
    emit_characterization_csv(up + down, args.out)
    print(f"wrote {2 * args.pulses} pulses to {args.out}")
    return EXIT_OK


def _cmd_calibrate(args: argparse.Namespace) -> int:
    params = resolve_params(args.params)
    cp = calibrate(
        params.triplet, params.device.v_p, params.device.v_d, args.slot_ms
    )
    fields = (
        "v_j_peak",
        "v_i_peak",
        "g1",
        "g2",
        "tau_j",
        "tau_i1",
        "tau_i2",
        "slot_ms",
        "delay_ms",
    )
    for name in fields:
        print(f"{name} = {getattr(cp, name):.6g}")
    print(f"frame_ms = {cp.frame_ms:.6g}")
    return EXIT_OK


def main(argv: "list[str] | None" = None) -> int:
    args = build_parser().parse_args(argv)
    handlers = {
        "run": _cmd_run,
        "characterize": _cmd_characterize,
        "calibrate": _cmd_calibrate,
    }
    try:
        return handlers[args.command](args)
    except (CalibrationError, DegenerateMetricError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_DOMAIN
    except (ConfigError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_IO


if __name__ == "__main__":
    sys.exit(main())
