import argparse
import json
import os
import sys
from dataclasses import dataclass, field
from typing import Any, Callable, Dict, List, Optional, Sequence

from . import offload_config
from .catalog import LOCAL_PRESETS, PRESETS, REMOTE_PRESETS, TIER_NAMES, reference_deployment
from .decision import (
    SWEEP_AXES,
    all_tables,
    best_placement,
    capacity,
    evaluate_placements,
    explain_decision,
    sweep,
)
from .model import CloudResource, ComputeJob, InfeasibleError, NetworkHop, NetworkPath, OffloadError, Processor
from .netsim import simulate_train, write_event_trace
from .offload_config import offload_log
from .server import sanitize_json_data
from .units import parse_hop, parse_quantity, resolve_processor
from .validation_worker import HETEROGENEOUS, build_trials, run_validation
from .workload import load_trace, summarize_trace

EXIT_OK = 0
EXIT_FAILED = 1  # infeasible request or a failed invariant
EXIT_USAGE = 2  # bad flags or unusable input


@dataclass
class OutputEnvelope:
    command: str
    inputs_echo: Dict[str, Any]
    results: Any
    warnings: List[str] = field(default_factory=list)

    def to_dict(self) -> Dict[str, Any]:
        return {
            "command": self.command,
            "inputs": self.inputs_echo,
            "results": self.results,
            "warnings": list(self.warnings),
        }


class UsageError(Exception):
    """Input problem found after argument parsing."""


# Argument types ----------------------------------------------------------------------


def _quantity_arg(text: str) -> float:
    try:
        return parse_quantity(text)
    except OffloadError as exc:
        raise argparse.ArgumentTypeError(str(exc)) from None


def _positive_arg(text: str) -> float:
    value = _quantity_arg(text)
    if value <= 0:
        raise argparse.ArgumentTypeError(f"must be > 0, got {text!r}")
    return value


def _non_negative_arg(text: str) -> float:
    value = _quantity_arg(text)
    if value < 0:
        raise argparse.ArgumentTypeError(f"must be >= 0, got {text!r}")
    return value


def _processor_arg(text: str) -> Processor:
    try:
        return resolve_processor(text, text)
    except OffloadError as exc:
        raise argparse.ArgumentTypeError(f"{exc} (use a preset: {', '.join(PRESETS)})") from None


def _hop_arg(text: str):
    try:
        return parse_hop(text)
    except OffloadError as exc:
        raise argparse.ArgumentTypeError(str(exc)) from None


# Formatting --------------------------------------------------------------------------


def fmt(value: Optional[float], unit: str = "", digits: int = 6) -> str:
    if value is None:
        return "n/a"
    text = f"{value:.{digits}g}"
    return f"{text} {unit}".rstrip()


def _sig(value: float, digits: int) -> str:
    """Scientific text at a fixed number of significant figures, e.g. 6.23e-8."""
    mantissa, exponent = f"{value:.{digits - 1}e}".split("e")
    return f"{mantissa}e{int(exponent)}"


def _render_rows(headers: Sequence[str], rows: Sequence[Sequence[str]]) -> str:
    widths = [len(h) for h in headers]
    for row in rows:
        widths = [max(w, len(cell)) for w, cell in zip(widths, row)]
    lines = ["  ".join(h.ljust(w) for h, w in zip(headers, widths))]
    lines.append("  ".join("-" * w for w in widths))
    for row in rows:
        lines.append("  ".join(cell.ljust(w) for cell, w in zip(row, widths)))
    return "\n".join(lines)


def emit(envelope: OutputEnvelope, as_json: bool, render: Callable[[Any], str]) -> None:
    if as_json:
        print(json.dumps(sanitize_json_data(envelope.to_dict()), indent=2))
        return
    print(render(envelope.results))
    for warning in envelope.warnings:
        print(f"warning: {warning}")


# Commands ----------------------------------------------------------------------------


def _job_from_args(args: argparse.Namespace) -> ComputeJob:
    if args.intensity is not None:
        return ComputeJob.from_intensity(args.intensity, args.instructions)
    return ComputeJob(args.instructions, args.input_bits, args.output_bits)


def _render_decision(results: Dict[str, Any]) -> str:
    lines = [
        f"verdict:        {results['verdict']}",
        f"local time:     {fmt(results['local']['total'], 's')}",
        f"remote time:    {fmt(results['remote']['total'], 's')}"
        f"  (compute {fmt(results['remote']['compute'], 's')},"
        f" transfer {fmt(results['remote']['transfer'], 's')},"
        f" per-hop {fmt(results['remote']['per_hop_overhead'], 's')})",
        f"margin:         {fmt(results['decision']['margin'], 's')}",
        f"CCR:            {fmt(results['ccr']) if results['ccr'] is not None else 'infinite'}",
        f"RLR:            {fmt(results['rlr'])}",
        f"RLR threshold:  {fmt(results['rlr_threshold'])} ({'met' if results['rlr_check'] else 'not met'})",
        f"F/C:            {fmt(results['inverse_intensity'], 'bits/instruction')}",
        f"capacity:       {fmt(results['capacity'], 'bits/instruction')}",
    ]
    placement = results.get("placement")
    if placement:
        lines.append("")
        rows = [
            [
                "local" if option["placement"] == "local" else f"tier {option['placement']} ({TIER_NAMES.get(option['placement'], 'custom')})",
                fmt(option["breakdown"]["total"], "s"),
            ]
            for option in placement["options"]
        ]
        lines.append(_render_rows(["placement", "completion"], rows))
        best = placement["best"]["placement"]
        lines.append(f"best placement: {'local' if best == 'local' else f'tier {best}'}")
    return "\n".join(lines)


def cmd_decide(args: argparse.Namespace, settings: Dict[str, Any]) -> int:
    job = _job_from_args(args)
    mtu_bits = settings["mtu_bits"]
    if args.tiers:
        resources = reference_deployment(args.access_rate, args.core_rate, args.queue_delay)
    else:
        if args.remote is None or not args.hop:
            raise UsageError("decide needs --remote and at least one --hop (or --tiers)")
        resources = [CloudResource(args.remote, NetworkPath(tuple(args.hop)), 1)]

    primary = resources[0]
    if args.tiers:
        best = best_placement(job, args.local, resources, mtu_bits)
        if not best.is_local:
            primary = next(r for r in resources if r.tier_index == best.tier_index)
    results = explain_decision(job, args.local, primary, mtu_bits)
    if args.tiers:
        results["placement"] = {
            "best": best.to_dict(),
            "options": [p.to_dict() for p in evaluate_placements(job, args.local, resources, mtu_bits)],
        }
    inputs = {
        "local": args.local.to_dict(),
        "resources": [r.to_dict() for r in resources],
        "job": job.to_dict(),
        "mtu_bits": mtu_bits,
    }
    emit(OutputEnvelope("decide", inputs, results), args.json, _render_decision)
    return EXIT_OK


def _render_sweep(results: Dict[str, Any]) -> str:
    unit = {"rate": "bits/s", "remote": "IPS", "intensity": "bits/instruction"}[results["axis"]]
    rows = [
        [
            fmt(row["value"], unit),
            fmt(row["capacity"], "bits/instruction"),
            "favorable" if row["favorable"] else "unfavorable",
            "<- crossover" if row["crossover"] else "",
        ]
        for row in results["rows"]
    ]
    header = f"crossover: {fmt(results['crossover'], unit)}\n"
    return header + _render_rows([results["axis"], "capacity", "verdict", ""], rows)


def cmd_sweep(args: argparse.Namespace, settings: Dict[str, Any]) -> int:
    if not (args.min > 0 and args.max > args.min):
        raise UsageError("sweep range must satisfy 0 < --min < --max")
    result = sweep(
        args.axis,
        args.min,
        args.max,
        local=args.local,
        remote=args.remote,
        bottleneck_rate=args.bottleneck_rate,
        intensity=args.intensity,
        points=settings["sweep_points"],
    )
    inputs = {
        "axis": args.axis,
        "min": args.min,
        "max": args.max,
        "points": settings["sweep_points"],
        "local": args.local.to_dict(),
        "remote": args.remote.to_dict() if args.remote else None,
        "bottleneck_rate": args.bottleneck_rate,
        "intensity": args.intensity,
    }
    emit(OutputEnvelope("sweep", inputs, result.to_dict(), result.warnings), args.json, _render_sweep)
    return EXIT_OK


def _render_tables(results: Dict[str, Any]) -> str:
    sections = ["RLR required for offloading to be favorable"]
    sections.append(
        _render_rows(
            ["CCR", "RLR >", "note"],
            [[f"{row['ccr']:g}", f"{row['rlr']:.7g}", row.get("note", "")] for row in results["table1"]],
        )
    )

    sections.append("\nProcessor ratings")
    sections.append(
        _render_rows(["preset", "name", "IPS"], [[r["key"], r["name"], fmt(r["ips"], "IPS")] for r in results["table2"]])
    )

    def grid(cells: List[Dict[str, Any]], render_cell: Callable[[Dict[str, Any]], str]) -> str:
        lookup = {(c["local"], c["remote"]): c for c in cells}
        rows = [[local] + [render_cell(lookup[(local, remote)]) for remote in REMOTE_PRESETS] for local in LOCAL_PRESETS]
        return _render_rows(["local \\ remote"] + list(REMOTE_PRESETS), rows)

    sections.append("\nRemote-to-local ratio E/e")
    sections.append(grid(results["table3"], lambda c: f"{c['value']:.{c['printed_digits']}g} ({c['value']:.6g})"))
    sections.append("\nRemote-to-local execution ratio 1/e - 1/E (s/instruction)")
    sections.append(grid(results["table5"], lambda c: f"{_sig(c['value'], 3)} ({c['value']:.6g})"))
    return "\n".join(sections)


def cmd_tables(args: argparse.Namespace, settings: Dict[str, Any]) -> int:
    emit(OutputEnvelope("tables", {}, all_tables()), args.json, _render_tables)
    return EXIT_OK


def cmd_presets(args: argparse.Namespace, settings: Dict[str, Any]) -> int:
    results = {"presets": [{"key": k, "name": p.name, "ips": p.exec_rate} for k, p in PRESETS.items()]}
    emit(
        OutputEnvelope("presets", {}, results),
        args.json,
        lambda r: _render_rows(["preset", "name", "IPS"], [[p["key"], p["name"], fmt(p["ips"], "IPS")] for p in r["presets"]]),
    )
    return EXIT_OK


def _render_trace(results: Dict[str, Any]) -> str:
    headers = ["app", "jobs", "min F/C", "avg F/C", "max F/C"]
    with_verdict = any("verdict" in app for app in results["apps"])
    if with_verdict:
        headers.append("offload")
    rows = []
    for app in results["apps"]:
        row = [app["app_name"], str(app["count"]), fmt(app["min_fc"]), fmt(app["avg_fc"]), fmt(app["max_fc"])]
        if with_verdict:
            row.append(app["verdict"])
        rows.append(row)
    text = f"records: {results['records']}  (F/C in bits/instruction)\n" + _render_rows(headers, rows)
    if results.get("capacity") is not None:
        text += f"\ncapacity: {fmt(results['capacity'], 'bits/instruction')}"
    return text


def _trace_capacity(args: argparse.Namespace) -> Optional[float]:
    if args.capacity is not None:
        return args.capacity
    if args.local and args.remote and args.bottleneck_rate:
        return capacity(args.local, args.remote, args.bottleneck_rate).capacity
    if args.local or args.remote or args.bottleneck_rate:
        raise UsageError("trace needs --capacity or all of --local, --remote and --bottleneck-rate")
    return None


def _run_trace_once(args: argparse.Namespace, path: str, capacity_value: Optional[float]) -> int:
    result = load_trace(path)
    if not result.records:
        raise UsageError(f"no valid rows in {path}")
    results = summarize_trace(result, args.assumed_rate, capacity_value)
    results["capacity"] = capacity_value
    inputs = {"path": path, "assumed_rate": args.assumed_rate, "capacity": capacity_value}
    emit(OutputEnvelope("trace", inputs, results, results["diagnostics"]), args.json, _render_trace)
    return EXIT_OK


def cmd_trace(args: argparse.Namespace, settings: Dict[str, Any]) -> int:
    capacity_value = _trace_capacity(args)
    if not args.watch:
        return _run_trace_once(args, args.path, capacity_value)

    from .trace_monitor import TraceMonitor

    def on_change(path: str) -> None:
        try:
            _run_trace_once(args, path, capacity_value)
        except (OffloadError, UsageError) as exc:
            offload_log(f"TraceMonitor: {exc}")
        sys.stdout.flush()

    if os.path.isfile(args.path):
        on_change(args.path)
    monitor = TraceMonitor(args.path, on_change, use_polling_observer=settings["use_polling_observer"])
    monitor.run_forever()
    return EXIT_OK


def _render_validation(results: Dict[str, Any]) -> str:
    rows = []
    for kind, summary in results["summaries"].items():
        rows.append(
            [
                kind,
                str(summary["count"]),
                fmt(summary["min"], "s"),
                fmt(summary["mean"], "s"),
                fmt(summary["max"], "s"),
                str(summary["negative"]),
            ]
        )
    text = _render_rows(["cases", "count", "min gap", "mean gap", "max gap", "negative"], rows)
    text += f"\nidentity failures: {len(results['identity_failures'])}"
    text += f"\nerrors: {len(results['errors'])}"
    text += f"\nresult: {'PASS' if results['passed'] else 'FAIL'}"
    return text


def cmd_validate(args: argparse.Namespace, settings: Dict[str, Any]) -> int:
    if args.trials < 1:
        raise UsageError("--trials must be >= 1")
    mtu_bits = settings["mtu_bits"]
    report = run_validation(args.trials, args.seed, settings["workers"], mtu_bits)

    if args.trace_events:
        sample = next(t for t in build_trials(1, args.seed, mtu_bits) if t.kind == HETEROGENEOUS)
        path = NetworkPath.of(*(NetworkHop(rate) for rate in sample.rates))
        sim = simulate_train(sample.file_bits, path, mtu_bits, record_events=True)
        with open(args.trace_events, "w", encoding="utf-8") as f:
            written = write_event_trace(sim, f)
        offload_log(f"Validate: wrote {written} events to {args.trace_events}")

    inputs = {"trials": args.trials, "seed": args.seed, "workers": settings["workers"], "mtu_bits": mtu_bits}
    emit(OutputEnvelope("validate", inputs, report.to_dict()), args.json, _render_validation)
    return EXIT_OK if report.passed else EXIT_FAILED


def cmd_serve(args: argparse.Namespace, settings: Dict[str, Any]) -> int:
    from .server import run_server

    run_server(args.host, args.port, settings["mtu_bits"], args.settings)
    return EXIT_OK


# Parser ------------------------------------------------------------------------------


def _common_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--json", action="store_true", help="Emit one JSON document instead of tables")
    common.add_argument("--quiet", action="store_true", help="Silence diagnostic logging on stderr")
    common.add_argument("--settings", metavar="PATH", help="Settings file (default: ./offload_settings.json)")
    common.add_argument("--mtu-bits", type=_positive_arg, help="Maximum packet size in bits (default: 12000)")
    return common


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="offload-feasibility",
        description="Decide when offloading a computation reduces its completion time.",
    )
    subparsers = parser.add_subparsers(dest="command", required=True)
    common = _common_parser()

    decide = subparsers.add_parser("decide", parents=[common], help="Local vs remote verdict for one job")
    decide.add_argument("--local", type=_processor_arg, required=True, help="Preset name or IPS, e.g. msp430 or 16M")
    decide.add_argument("--remote", type=_processor_arg, help="Preset name or IPS of the cloud resource")
    decide.add_argument("--hop", type=_hop_arg, action="append", help="rate[:queue_delay], first flag is nearest the client")
    decide.add_argument("-C", "--instructions", type=_positive_arg, default=1e9, help="Job size in instructions")
    decide.add_argument("-i", "--input-bits", type=_non_negative_arg, default=0.0, help="Input data in bits")
    decide.add_argument("-o", "--output-bits", type=_non_negative_arg, default=0.0, help="Output data in bits")
    decide.add_argument("--intensity", type=_non_negative_arg, help="F/C in bits/instruction (overrides -i/-o)")
    decide.add_argument("--tiers", action="store_true", help="Choose among the five-tier reference deployment")
    decide.add_argument("--access-rate", type=_positive_arg, default=1e6, help="Tier access link rate (bits/s)")
    decide.add_argument("--core-rate", type=_positive_arg, default=1e9, help="Tier core link rate (bits/s)")
    decide.add_argument("--queue-delay", type=_non_negative_arg, default=0.0, help="Per-hop queueing delay for tiers (s)")
    decide.set_defaults(handler=cmd_decide)

    sweep_parser = subparsers.add_parser("sweep", parents=[common], help="Capacity and verdict across a parameter range")
    sweep_parser.add_argument("--axis", choices=SWEEP_AXES, required=True)
    sweep_parser.add_argument("--min", type=_quantity_arg, required=True)
    sweep_parser.add_argument("--max", type=_quantity_arg, required=True)
    sweep_parser.add_argument("--points", type=int, help="Grid points (default: 25)")
    sweep_parser.add_argument("--local", type=_processor_arg, required=True)
    sweep_parser.add_argument("--remote", type=_processor_arg)
    sweep_parser.add_argument("--bottleneck-rate", type=_positive_arg)
    sweep_parser.add_argument("--intensity", type=_quantity_arg, help="Job F/C in bits/instruction")
    sweep_parser.set_defaults(handler=cmd_sweep)

    tables = subparsers.add_parser("tables", parents=[common], help="Regenerate the reference tables")
    tables.set_defaults(handler=cmd_tables)

    presets = subparsers.add_parser("presets", parents=[common], help="List the processor catalog")
    presets.set_defaults(handler=cmd_presets)

    trace = subparsers.add_parser("trace", parents=[common], help="Per-application F/C from a job trace")
    trace.add_argument("path", help="Trace CSV (or a directory with --watch)")
    trace.add_argument("--assumed-rate", type=_positive_arg, required=True, help="Instructions/sec used to derive C")
    trace.add_argument("--capacity", type=_quantity_arg, help="Capacity in bits/instruction")
    trace.add_argument("--local", type=_processor_arg)
    trace.add_argument("--remote", type=_processor_arg)
    trace.add_argument("--bottleneck-rate", type=_positive_arg)
    trace.add_argument("--watch", action="store_true", help="Re-run whenever the trace changes")
    trace.set_defaults(handler=cmd_trace)

    validate = subparsers.add_parser("validate", parents=[common], help="Closed form vs packet simulation")
    validate.add_argument("--trials", type=int, default=offload_config.DEFAULT_TRIALS)
    validate.add_argument("--seed", type=int, default=offload_config.DEFAULT_SEED)
    validate.add_argument("--workers", type=int, help="Worker threads (default: 2)")
    validate.add_argument("--trace-events", metavar="PATH", help="Write one simulation's event trace as JSON lines")
    validate.set_defaults(handler=cmd_validate)

    serve = subparsers.add_parser("serve", parents=[common], help="Serve the JSON API over HTTP")
    serve.add_argument("--host", default=offload_config.DEFAULT_HOST)
    serve.add_argument("--port", type=int, default=offload_config.DEFAULT_PORT)
    serve.set_defaults(handler=cmd_serve)

    return parser


def main(argv: Optional[Sequence[str]] = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)

    overrides = {
        "mtu_bits": args.mtu_bits,
        "sweep_points": getattr(args, "points", None),
        "workers": getattr(args, "workers", None),
        "disable_logs": True if args.quiet else None,
    }
    settings = offload_config.resolve_settings(overrides, offload_config.load_settings(args.settings))
    offload_config.apply_settings(settings)

    try:
        return args.handler(args, settings)
    except InfeasibleError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_FAILED
    except (UsageError, OffloadError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
