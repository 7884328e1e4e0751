"""
Command-line front end: golden evaluation, simulation, estimation,
scheduling, benchmarking, the interleaved-vs-separate comparison and replay
of a report from the configuration it embeds.

Reports go to stdout (or --out) as sorted-key JSON or CSV; logs go to stderr.
"""

import argparse
import json
import sys

import numpy as np
import pydantic
from loguru import logger

from gradinterleave import __version__, costmodel, golden
from gradinterleave.bench import headline_ratios, net_totals, run_cnn_fc, run_sweep
from gradinterleave.bench.report import BenchReport
from gradinterleave.errors import EXIT_OK, EXIT_USAGE, CheckFailure, ConfigurationError, GradInterleaveError
from gradinterleave.models.config_models import SCHEMA_VERSION, Engine, RunConfig, SweepSpec
from gradinterleave.models.core_models import ActivationKind, ArrayGeometry, DataflowMode, LayerShape, Precision, StepKind
from gradinterleave.models.document_models import (
    CompareDocument,
    EstimateDocument,
    GoldenDocument,
    PolicySchedule,
    ScheduleDocument,
    SimDocument,
)
from gradinterleave.models.report_models import PassCost
from gradinterleave.models.schedule_models import SchedulePolicy
from gradinterleave.models.train_models import TrainStepOutputs
from gradinterleave.schedule import build_graph, compare_policies, list_schedule, timeline_csv
from gradinterleave.sysarray import run_layer, run_separate
from gradinterleave.utils.log_setup import configure_logging
from gradinterleave.utils.output import digests, emit, load_run_config, matrix_lists, to_json, with_config_header

DEFAULT_DIMS = "1024x5"
DEFAULT_SIZES = "128,256,512,1024"
DEFAULT_BATCHES = "4,16,64"
LAYER_STEPS = ("layer", "loop")
OUTPUT_FIELDS = ("grad_a", "delta_prev", "grad_w_t", "w_next", "z")


# --- Flag parsing ---

def _positive_int(text: str) -> int:
    try:
        value = int(text)
    except ValueError as exc:
        raise argparse.ArgumentTypeError(f"expected an integer, got {text!r}") from exc
    if value < 1:
        raise argparse.ArgumentTypeError(f"expected a value >= 1, got {value}")
    return value


def _number(text: str) -> float | int:
    """
    Integral values stay integers so integer-precision updates remain exact.
    """
    try:
        value = float(text)
    except ValueError as exc:
        raise argparse.ArgumentTypeError(f"expected a number, got {text!r}") from exc
    return int(value) if value.is_integer() and "." not in text and "e" not in text.lower() else value


def _int_list(text: str) -> list[int]:
    """
    Comma-separated positive integers; "AxK" repeats A K times.
    """
    values = []
    for token in text.split(","):
        token = token.strip()
        if "x" in token:
            value, _, repeat = token.partition("x")
            values.extend([_positive_int(value)] * _positive_int(repeat))
        else:
            values.append(_positive_int(token))
    if not values:
        raise argparse.ArgumentTypeError("expected at least one value")
    return values


def _shape_flags(parser: argparse.ArgumentParser, defaults: tuple[int, int, int] = (8, 8, 4)) -> None:
    parser.add_argument("--n", type=_positive_int, default=defaults[0], help="output neurons N")
    parser.add_argument("--m", type=_positive_int, default=defaults[1], help="input neurons M")
    parser.add_argument("--batch", type=_positive_int, default=defaults[2], help="mini-batch size B")


def _geometry_flags(parser: argparse.ArgumentParser, default: int = 128) -> None:
    parser.add_argument("--p", type=_positive_int, default=default, help="horizontal PE count P")
    parser.add_argument("--q", type=_positive_int, default=default, help="vertical PE count Q")


def _data_flags(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--seed", type=int, default=0)
    parser.add_argument("--precision", choices=[p.value for p in Precision], default=Precision.INT.value)
    parser.add_argument("--lr", type=_number, default=None, help="learning rate (default 1 for int, 0.125 for f64)")


def _output_flags(parser: argparse.ArgumentParser, default_format: str = "json") -> None:
    parser.add_argument("--out", default=None, help="write the report here instead of stdout")
    parser.add_argument("--format", choices=["json", "csv"], default=default_format)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="gradinterleave",
        description="Systolic-array training simulator and cost model for interleaved gradient dataflows.",
    )
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    parser.add_argument("-v", "--verbose", action="count", default=0, help="-v for INFO, -vv for DEBUG logs")
    commands = parser.add_subparsers(dest="command", required=True)

    golden_cmd = commands.add_parser("golden", help="reference train step on seeded inputs")
    _shape_flags(golden_cmd)
    _data_flags(golden_cmd)
    golden_cmd.add_argument("--full", action="store_true", help="include full matrices")
    _output_flags(golden_cmd)
    golden_cmd.set_defaults(handler=cmd_golden)

    sim_cmd = commands.add_parser("sim", help="cycle-stepped simulation of one layer step")
    sim_cmd.add_argument("--mode", choices=[m.value for m in DataflowMode], required=True)
    _shape_flags(sim_cmd)
    _geometry_flags(sim_cmd)
    _data_flags(sim_cmd)
    sim_cmd.add_argument("--check", action="store_true", help="compare against the golden reference")
    _output_flags(sim_cmd)
    sim_cmd.set_defaults(handler=cmd_sim)

    estimate_cmd = commands.add_parser("estimate", help="closed-form cycles and accesses")
    estimate_cmd.add_argument("--mode", choices=[m.value for m in DataflowMode], required=True)
    estimate_cmd.add_argument(
        "--step", choices=[*LAYER_STEPS, *(s.value for s in StepKind)], default="layer",
        help="one step, the simulated layer composition, or a full training loop",
    )
    _shape_flags(estimate_cmd)
    _geometry_flags(estimate_cmd)
    _data_flags(estimate_cmd)
    _output_flags(estimate_cmd)
    estimate_cmd.set_defaults(handler=cmd_estimate)

    schedule_cmd = commands.add_parser("schedule", help="list-schedule a multi-layer training iteration")
    schedule_cmd.add_argument("--dims", type=_int_list, default=_int_list(DEFAULT_DIMS), help="d1,d2,... or AxK")
    schedule_cmd.add_argument("--batch", type=_positive_int, default=32)
    schedule_cmd.add_argument("--procs", type=_int_list, default=[1, 2, 3])
    schedule_cmd.add_argument(
        "--policy", choices=[p.value for p in SchedulePolicy], default=None,
        help="schedule one policy; omit to compare baseline-os against proposed",
    )
    _geometry_flags(schedule_cmd)
    _data_flags(schedule_cmd)
    _output_flags(schedule_cmd)
    schedule_cmd.set_defaults(handler=cmd_schedule)

    bench_cmd = commands.add_parser("bench", help="normalized sweeps and CNN presets")
    bench_kinds = bench_cmd.add_subparsers(dest="bench_kind", required=True)
    sweep_cmd = bench_kinds.add_parser("sweep", help="square layer sizes x batch sizes")
    sweep_cmd.add_argument("--sizes", type=_int_list, default=_int_list(DEFAULT_SIZES))
    sweep_cmd.add_argument("--batches", type=_int_list, default=_int_list(DEFAULT_BATCHES))
    sweep_cmd.add_argument("--engine", choices=[e.value for e in Engine], default=Engine.ANALYTIC.value)
    sweep_cmd.add_argument("--normalize-to", choices=[m.value for m in DataflowMode], default=DataflowMode.WS.value)
    sweep_cmd.add_argument("--workers", type=_positive_int, default=1)
    _geometry_flags(sweep_cmd)
    _data_flags(sweep_cmd)
    _output_flags(sweep_cmd, default_format="csv")
    sweep_cmd.set_defaults(handler=cmd_bench_sweep)
    cnn_cmd = bench_kinds.add_parser("cnn", help="fully-connected layers of a CNN preset")
    cnn_cmd.add_argument("--net", required=True)
    cnn_cmd.add_argument("--batch", type=_positive_int, default=32)
    _geometry_flags(cnn_cmd)
    _data_flags(cnn_cmd)
    _output_flags(cnn_cmd, default_format="csv")
    cnn_cmd.set_defaults(handler=cmd_bench_cnn)

    compare_cmd = commands.add_parser("compare", help="interleaved layer against the separate passes")
    _shape_flags(compare_cmd)
    _geometry_flags(compare_cmd)
    _data_flags(compare_cmd)
    _output_flags(compare_cmd)
    compare_cmd.set_defaults(handler=cmd_compare)

    replay_cmd = commands.add_parser("replay", help="re-run the command a report was produced by")
    replay_cmd.add_argument("--config", required=True, help="JSON report, CSV report or bare run configuration")
    replay_cmd.add_argument("--out", default=None, help="write the report here instead of stdout")
    replay_cmd.set_defaults(handler=cmd_replay)
    return parser


# --- Shared helpers ---

def _run_config(args: argparse.Namespace, command: str) -> RunConfig:
    values = {name: getattr(args, name) for name in RunConfig.model_fields if name != "command" and hasattr(args, name)}
    if values.get("lr") is None and "precision" in values:
        values["lr"] = 1 if values["precision"] == Precision.INT.value else 0.125
    return RunConfig(command=command, **values)


def _shape(config: RunConfig) -> LayerShape:
    return LayerShape(n_out=config.n, m_in=config.m, batch=config.batch)


def _geometry(config: RunConfig) -> ArrayGeometry:
    return ArrayGeometry(p=config.p, q=config.q)


def _require_json(config: RunConfig) -> None:
    if config.format != "json":
        raise ConfigurationError(f"{config.command} writes JSON only")


def _output_matrices(outputs: TrainStepOutputs) -> dict[str, np.ndarray | None]:
    return {name: getattr(outputs, name) for name in OUTPUT_FIELDS}


def _mismatches(simulated: TrainStepOutputs, reference: TrainStepOutputs) -> list[str]:
    failed = []
    for name in OUTPUT_FIELDS:
        ours, theirs = getattr(simulated, name), getattr(reference, name)
        if ours is not None and theirs is not None and not np.array_equal(ours, theirs):
            failed.append(name)
    return failed


# --- Commands ---

def cmd_golden(args: argparse.Namespace) -> int:
    config = _run_config(args, "golden")
    _require_json(config)
    inputs = golden.seeded_inputs(_shape(config), config.seed, config.precision, config.lr)
    outputs = golden.train_step(inputs)
    input_matrices = {
        "w": inputs.w, "a_prev": inputs.a_prev, "delta": inputs.delta, "fprime_z_prev": inputs.fprime_z_prev,
    }
    document = GoldenDocument(
        config=config,
        inputs=digests(input_matrices),
        outputs=digests(_output_matrices(outputs)),
        matrices={**matrix_lists(input_matrices), **matrix_lists(_output_matrices(outputs))} if config.full else None,
    )
    emit(to_json(document), config.out)
    return EXIT_OK


def cmd_sim(args: argparse.Namespace) -> int:
    config = _run_config(args, "sim")
    _require_json(config)
    shape = _shape(config)
    inputs = golden.seeded_inputs(shape, config.seed, config.precision, config.lr)
    run = run_layer(shape, _geometry(config), config.mode, inputs)
    check = None
    if config.check:
        reference = golden.train_step(inputs)
        if config.mode == DataflowMode.IS:
            z, _ = golden.forward(inputs.w, inputs.a_prev, ActivationKind.IDENTITY)
            reference = TrainStepOutputs(z=z)
        failed = _mismatches(run.outputs, reference)
        if failed:
            raise CheckFailure(f"{config.mode.value} simulation differs from golden in {', '.join(failed)}")
        check = "passed"
    document = SimDocument(
        config=config,
        mode=config.mode.value,
        cycles=run.cycles,
        accesses=run.accesses,
        passes=run.passes,
        outputs=digests(_output_matrices(run.outputs)),
        check=check,
    )
    emit(to_json(document), config.out)
    return EXIT_OK


def cmd_estimate(args: argparse.Namespace) -> int:
    config = _run_config(args, "estimate")
    _require_json(config)
    shape, geom = _shape(config), _geometry(config)
    if config.step == "layer":
        result = costmodel.estimate_layer(shape, geom, config.mode)
    elif config.step == "loop":
        result = costmodel.estimate_loop(shape, geom, config.mode)
    else:
        result = costmodel.estimate(shape, geom, config.mode, StepKind(config.step))
    savings = []
    if config.mode == DataflowMode.INTERLEAVED:
        savings = [costmodel.delta_reuse_saving(shape, geom), costmodel.inplace_update_saving(shape, geom)]
    document = EstimateDocument(
        config=config,
        mode=config.mode.value,
        step=config.step,
        cycles=result.cycles,
        accesses=result.accesses,
        formula_trace=result.formula_trace,
        savings=savings,
    )
    emit(to_json(document), config.out)
    return EXIT_OK


def cmd_schedule(args: argparse.Namespace) -> int:
    config = _run_config(args, "schedule")
    geom = _geometry(config)
    if config.policy is None:
        if config.format == "csv":
            raise ConfigurationError("CSV timelines need a single --policy")
        comparison = compare_policies(config.dims, config.batch, geom, config.procs)
        emit(to_json(ScheduleDocument(config=config, comparison=comparison)), config.out)
        return EXIT_OK

    policy = SchedulePolicy(config.policy)
    graph = build_graph(config.dims, config.batch, policy, geom)
    schedules = [PolicySchedule(policy=policy, result=list_schedule(graph, procs)) for procs in config.procs]
    if config.format == "csv":
        if len(schedules) != 1:
            raise ConfigurationError("CSV timelines need a single --procs value")
        emit(with_config_header(timeline_csv(schedules[0].result), config), config.out)
        return EXIT_OK
    emit(to_json(ScheduleDocument(config=config, schedules=schedules)), config.out)
    return EXIT_OK


def _emit_bench(report: BenchReport, config: RunConfig, summary: dict) -> None:
    if config.format == "csv":
        emit(with_config_header(report.to_csv(), config), config.out)
        return
    document = {
        "schema_version": SCHEMA_VERSION,
        "config": config.model_dump(mode="json"),
        "kind": report.kind,
        "normalize_to": report.normalize_to,
        "rows": json.loads(report.rows.to_json(orient="records")),
        "aggregates": json.loads(report.aggregates.to_json(orient="records")),
        "summary": summary,
    }
    emit(to_json(document), config.out)


def cmd_bench_sweep(args: argparse.Namespace) -> int:
    config = _run_config(args, "bench sweep")
    spec = SweepSpec(
        sizes=[(size, size) for size in config.sizes],
        batches=config.batches,
        geom=_geometry(config),
        normalize_to=DataflowMode(config.normalize_to),
    )
    report = run_sweep(spec, config.engine, config.workers)
    _emit_bench(report, config, headline_ratios(report).model_dump(mode="json"))
    return EXIT_OK


def cmd_bench_cnn(args: argparse.Namespace) -> int:
    config = _run_config(args, "bench cnn")
    report = run_cnn_fc(config.net, config.batch, _geometry(config))
    _emit_bench(report, config, net_totals(report).summary())
    return EXIT_OK


def cmd_compare(args: argparse.Namespace) -> int:
    config = _run_config(args, "compare")
    _require_json(config)
    shape, geom = _shape(config), _geometry(config)
    inputs = golden.seeded_inputs(shape, config.seed, config.precision, config.lr)
    interleaved = run_layer(shape, geom, DataflowMode.INTERLEAVED, inputs)
    separate = run_separate(shape, geom, inputs)
    reference = golden.train_step(inputs)
    outputs_match = not _mismatches(interleaved.outputs, reference) and not _mismatches(separate.outputs, reference)
    document = CompareDocument(
        config=config,
        interleaved=PassCost(cycles=interleaved.cycles, accesses=interleaved.accesses),
        separate=PassCost(cycles=separate.cycles, accesses=separate.accesses),
        cycle_difference=separate.cycles.total_cycles - interleaved.cycles.total_cycles,
        access_difference=separate.accesses.total - interleaved.accesses.total,
        delta_reuse=costmodel.delta_reuse_saving(shape, geom),
        inplace_update=costmodel.inplace_update_saving(shape, geom),
        outputs_match=outputs_match,
    )
    emit(to_json(document), config.out)
    return EXIT_OK


REPLAY_HANDLERS = {
    "golden": cmd_golden,
    "sim": cmd_sim,
    "estimate": cmd_estimate,
    "schedule": cmd_schedule,
    "bench sweep": cmd_bench_sweep,
    "bench cnn": cmd_bench_cnn,
    "compare": cmd_compare,
}


def cmd_replay(args: argparse.Namespace) -> int:
    """
    Rebuild the arguments from a report's embedded configuration and run the
    same command; the output is byte-identical to the original report.
    """
    config = load_run_config(args.config)
    handler = REPLAY_HANDLERS.get(config.command)
    if handler is None:
        raise ConfigurationError(f"cannot replay command {config.command!r}")
    logger.info("replaying {} from {}", config.command, args.config)
    return handler(argparse.Namespace(**config.model_dump(exclude_defaults=True), out=args.out))


def main(argv: list[str] | None = None) -> int:
    """
    Parse flags, run one command and map failures to exit codes:
    0 success, 2 usage error, 3 configuration or dimension error, 4 check failure.
    """
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return exc.code if isinstance(exc.code, int) else EXIT_USAGE
    configure_logging(args.verbose)
    try:
        return args.handler(args)
    except GradInterleaveError as exc:
        logger.error("{}: {}", type(exc).__name__, exc)
        return exc.exit_code
    except pydantic.ValidationError as exc:
        logger.error("invalid arguments: {}", exc)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
