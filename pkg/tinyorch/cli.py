"""
Command line: count, plan, simulate, compare and check fixtures.

.. autosummary::

    ~main
    ~cmd_compare
    ~cmd_count
    ~cmd_fixtures
    ~cmd_plan
    ~cmd_simulate

Exit codes: 0 success, 1 usage or validation error, 2 no runnable plan or
simulator deadlock, 3 out-of-resource plan, 4 search budget exceeded.
"""

import argparse
import csv
import io
import json
import logging
import math
import pathlib
import sys

from . import TinyorchError
from .enumeration import count_execution_plans
from .operations.configure import MODES
from .operations.configure import OBJECTIVES
from .operations.configure import PRIORITIZATIONS
from .operations.configure import RunConfig
from .operations.configure import export_header
from .operations.constraints import is_runnable
from .operations.misc import DeadlockDetected
from .operations.misc import NoRunnablePlan
from .operations.misc import SearchBudgetExceeded
from .operations.misc import strategies
from .operations.plan import HolisticPlan
from .planner import Planner
from .planner import compare
from .simulator import simulate
from .simulator import write_trace
from .workloads import fixture_selfcheck
from .workloads import fixtures

logger = logging.getLogger(__name__)

EXIT_OK = 0
EXIT_USAGE = 1
EXIT_INFEASIBLE = 2
EXIT_OOR = 3
EXIT_BUDGET = 4

SIM_HEADER = "mode runs makespan_s throughput unit device utilization".split()
COMPARE_HEADER = "strategy prioritization objective latency_s throughput avg_power_w status".split()


class _Parser(argparse.ArgumentParser):
    """Usage errors exit with code 1."""

    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def _positive(text):
    value = int(text)
    if value < 1:
        raise argparse.ArgumentTypeError(f"must be positive, received {value}")
    return value


def _nonnegative(text):
    value = int(text)
    if value < 0:
        raise argparse.ArgumentTypeError(f"must not be negative, received {value}")
    return value


def _csv_list(text):
    return [item.strip() for item in text.split(",") if item.strip()]


def _number(value):
    """Deterministic text of a float: ``.`` decimal, no separators."""
    if value is None:
        return ""
    return format(value, ".9g")


def _emit(text: str, output=None, command: str = "", comment: str = "", python_class: str = ""):
    """Write ``text`` to ``output`` (plus its metadata sidecar) or to stdout."""
    if output is None:
        sys.stdout.write(text)
        return
    with open(pathlib.Path(output), "w", newline="\n") as f:
        f.write(text)
    export_header(output, command, comment, python_class)


def _csv_text(header, rows) -> str:
    buffer = io.StringIO(newline="")
    writer = csv.writer(buffer, lineterminator="\n")
    writer.writerow(header)
    writer.writerows(rows)
    return buffer.getvalue()


def _run_config(args) -> RunConfig:
    config = RunConfig() if args.config is None else RunConfig.from_file(args.config)
    overrides = {
        key: getattr(args, key, None)
        for key in (
            "fixture devices models workload strategy prioritization objective budget max_chunks output comment"
        ).split()
    }
    for key in "mode runs warmup window trace".split():
        overrides[key] = getattr(args, key, None)
    config.update(**overrides)
    config.validate()
    return config


def cmd_count(args) -> int:
    """Closed-form plan counts of one model, or of several pipelines."""
    if args.pipelines is None:
        if args.layers is None:
            raise TinyorchError("Need --layers or --pipelines.")
        count = count_execution_plans(args.layers, args.devices)
        if args.format == "json":
            sys.stdout.write(json.dumps({"layers": args.layers, "devices": args.devices, "count": count}) + "\n")
        else:
            sys.stdout.write(f"{count}\n")
        return EXIT_OK

    counts = [count_execution_plans(layers, args.devices) for layers in args.pipelines]
    total, product = sum(counts), math.prod(counts)
    if args.format == "json":
        report = {"counts": counts, "sum": total, "product": product, "reduction": product / total}
        sys.stdout.write(json.dumps(report) + "\n")
    else:
        sys.stdout.write(f"counts {','.join(str(c) for c in counts)}\n")
        sys.stdout.write(f"sum {total}\n")
        sys.stdout.write(f"product {product}\n")
        sys.stdout.write(f"reduction {_number(product / total)}\n")
    return EXIT_OK


def _planner(config, devices, pipelines) -> Planner:
    return Planner(
        devices,
        pipelines,
        objective=config.objective,
        prioritization=config.prioritization,
        budget=config.budget,
        max_chunks=config.max_chunks,
    )


def cmd_plan(args) -> int:
    """Select a holistic plan and write it with its estimate as JSON."""
    config = _run_config(args)
    devices, pipelines = config.load()[2:]
    planner = _planner(config, devices, pipelines)
    selection = planner.select(config.strategy)
    document = selection._asdict()
    code = EXIT_OK
    if selection.status == "oor":
        document = {"error": "OOR", **document}
        code = EXIT_OOR
    text = json.dumps(document, indent=2) + "\n"
    _emit(text, config.output, "plan", config.comment, selection.__class__.__name__)
    return code


def _load_plan(file, pipelines) -> HolisticPlan:
    with open(file) as f:
        document = json.load(f)
    if "plan" in document:
        document = document["plan"]
    return HolisticPlan._fromdict(document, {p.id: p for p in pipelines})


def cmd_simulate(args) -> int:
    """Simulate a plan in one or more modes; per-unit utilization as CSV."""
    config = _run_config(args)
    devices, pipelines = config.load()[2:]
    if args.plan is None:
        holistic = _planner(config, devices, pipelines).select(config.strategy).holistic
    else:
        holistic = _load_plan(args.plan, pipelines)
    report = is_runnable(holistic, devices)
    if not report.runnable:
        violations = [v._asdict() for v in report.violations]
        sys.stderr.write(json.dumps({"error": "OOR", "violations": violations}) + "\n")
        return EXIT_OOR

    modes = args.modes or [config.mode]
    if config.trace is not None and len(modes) > 1:
        raise TinyorchError("--trace needs a single simulation mode.")
    rows = []
    for mode in modes:
        result = simulate(
            holistic,
            devices,
            mode=mode,
            runs=config.runs,
            warmup=config.warmup,
            window=config.window,
            trace=config.trace is not None,
        )
        summary = [mode, config.runs, _number(result.makespan), _number(result.throughput)]
        for (device, unit), busy in sorted(result.utilization.items()):
            rows.append(summary + [unit, device, _number(busy)])
        rows.append(summary + ["", "", ""])
        if config.trace is not None:
            write_trace(result, config.trace)
            export_header(config.trace, "simulate", config.comment, result.__class__.__name__)
    _emit(_csv_text(SIM_HEADER, rows), config.output, "simulate", config.comment, "SimReport")
    return EXIT_OK


def cmd_compare(args) -> int:
    """Strategies (times prioritizations and objectives) side by side as CSV."""
    config = _run_config(args)
    devices, pipelines = config.load()[2:]
    names = args.strategies or sorted(strategies())
    rows = compare(
        devices,
        pipelines,
        strategies=names,
        prioritizations=args.prioritizations or [config.prioritization],
        objectives=args.objectives or [config.objective],
        budget=config.budget,
        group_size=args.group_size,
    )
    sweep = args.group_size is not None
    with_ratio = "oracle" in names
    header = list(COMPARE_HEADER)
    if sweep:
        header.insert(0, "group")
    if with_ratio:
        header.append("ratio")
    if args.modes:
        header += ["mode", "sim_throughput"]

    table = []
    for row in rows:
        result = row.estimate
        cells = [
            row.strategy,
            row.prioritization,
            row.objective,
            _number(None if result is None else result.latency),
            _number(None if result is None else result.throughput),
            _number(None if result is None else result.avg_power_w),
            row.status,
        ]
        if sweep:
            cells.insert(0, "+".join(row.group))
        if with_ratio:
            cells.append(_number(row.ratio))
        if not args.modes:
            table.append(cells)
            continue
        for mode in args.modes:
            throughput = None
            if row.status == "ok":
                throughput = simulate(
                    row.holistic,
                    devices,
                    mode=mode,
                    runs=config.runs,
                    warmup=config.warmup,
                    window=config.window,
                    trace=False,
                ).throughput
            table.append(cells + [mode, _number(throughput)])
    _emit(_csv_text(header, table), config.output, "compare", config.comment, "ComparisonRow")

    ratios = [row.ratio for row in rows if row.ratio is not None and row.strategy != "oracle"]
    if ratios:
        sys.stderr.write(f"mean ratio {_number(sum(ratios) / len(ratios))} over {len(ratios)} rows\n")
    return EXIT_OK


def cmd_fixtures(args) -> int:
    """List the shipped fixtures, or compare them with the published model table."""
    if args.action == "list":
        sys.stdout.write("".join(f"{name}\n" for name in fixtures()))
        return EXIT_OK
    deviations = fixture_selfcheck(strict=False)
    for line in deviations:
        sys.stdout.write(f"{line}\n")
    if deviations:
        return EXIT_USAGE
    sys.stdout.write("ok\n")
    return EXIT_OK


def _add_run_options(parser, simulation=False):
    group = parser.add_argument_group("workload")
    group.add_argument("--config", help="YAML file of run settings")
    group.add_argument("--fixture", help="name of a shipped fixture")
    group.add_argument("--devices", help="devices JSON file")
    group.add_argument("--models", help="models JSON file")
    group.add_argument("--workload", help="workload (pipelines) JSON file")
    group = parser.add_argument_group("selection")
    group.add_argument("--strategy", choices=sorted(strategies()))
    group.add_argument("--prioritization", choices=PRIORITIZATIONS)
    group.add_argument("--objective", choices=OBJECTIVES)
    group.add_argument("--budget", type=_positive, help="largest cross-product the oracle searches")
    group.add_argument("--max-chunks", dest="max_chunks", type=_positive)
    if simulation:
        group = parser.add_argument_group("simulation")
        group.add_argument("--mode", choices=MODES)
        group.add_argument("--runs", type=_positive)
        group.add_argument("--warmup", type=_nonnegative)
        group.add_argument("--window", type=_positive)
    parser.add_argument("--output", help="write here instead of stdout")
    parser.add_argument("--comment", help="comment for the metadata sidecar")


def _modes(text):
    modes = _csv_list(text)
    for mode in modes:
        if mode not in MODES:
            raise argparse.ArgumentTypeError(f"mode {mode!r} unknown.  Pick from: {MODES!r}")
    return modes


def _parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="tinyorch", description="Plan and simulate AI pipelines on tiny accelerators.")
    parser.add_argument("-v", "--verbose", action="count", default=0, help="-v: info, -vv: debug")
    commands = parser.add_subparsers(dest="command", required=True)

    sub = commands.add_parser("count", help="count execution plans")
    sub.add_argument("--layers", type=_positive)
    sub.add_argument("--devices", type=_positive, required=True)
    sub.add_argument(
        "--pipelines", type=lambda t: [_positive(x) for x in _csv_list(t)], help="layer counts, e.g. 9,14,19"
    )
    sub.add_argument("--format", choices=["text", "json"], default="text")
    sub.set_defaults(func=cmd_count)

    sub = commands.add_parser("plan", help="select a holistic plan")
    _add_run_options(sub)
    sub.set_defaults(func=cmd_plan)

    sub = commands.add_parser("simulate", help="simulate a plan")
    _add_run_options(sub, simulation=True)
    sub.add_argument("--plan", help="plan JSON written by 'plan' (default: select one now)")
    sub.add_argument("--modes", type=_modes, help="comma-separated simulation modes")
    sub.add_argument("--trace", help="write a JSON-lines trace here")
    sub.set_defaults(func=cmd_simulate)

    sub = commands.add_parser("compare", help="compare strategies")
    _add_run_options(sub, simulation=True)
    sub.add_argument("--strategies", type=_csv_list)
    sub.add_argument("--prioritizations", type=_csv_list)
    sub.add_argument("--objectives", type=_csv_list)
    sub.add_argument(
        "--group-size", dest="group_size", type=_positive, help="sweep all groups of this many pipelines"
    )
    sub.add_argument("--modes", type=_modes, help="also simulate each plan in these modes")
    sub.set_defaults(func=cmd_compare)

    sub = commands.add_parser("fixtures", help="shipped fixtures")
    sub.add_argument("action", choices=["list", "check"])
    sub.set_defaults(func=cmd_fixtures)
    return parser


def main(argv=None) -> int:
    """Run the command line; returns the exit code."""
    args = _parser().parse_args(argv)
    level = {0: logging.WARNING, 1: logging.INFO}.get(args.verbose, logging.DEBUG)
    logging.basicConfig(level=level, format="%(levelname)s %(name)s: %(message)s")
    try:
        return args.func(args)
    except SearchBudgetExceeded as exc:
        code, message = EXIT_BUDGET, str(exc)
    except (NoRunnablePlan, DeadlockDetected) as exc:
        code, message = EXIT_INFEASIBLE, str(exc)
    except (TinyorchError, ValueError, OSError) as exc:
        code, message = EXIT_USAGE, str(exc)
    logger.debug("exit code %d", code)
    sys.stderr.write(f"tinyorch: error: {message}\n")
    return code


if __name__ == "__main__":
    sys.exit(main())
