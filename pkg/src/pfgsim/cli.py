"""Command-line front end.

Exit codes: 0 success, 2 usage or parse error, 3 analysis failure (no
oscillation found), 4 capability exceeded (too many gates to enumerate).
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import sys
import warnings
from pathlib import Path

import numpy as np

from . import analysis
from .circuits import (
    BUILTIN_NAMES,
    NetlistError,
    builtin,
    evaluate_circuit,
    gate_netlist,
    logic_truth_table,
    parse_netlist,
)
from .gates import GateKind, GateSpec, classify, threshold_rule_for
from .signal import (
    DEFAULT_RESPONSE,
    OscillationModel,
    ResponseModel,
    StimulusPattern,
    read_trace,
    sample_delta_f,
    synthesize_trace,
)
from .spectral import NoOscillationDetected, SpectralConfig, TooShort, measure_delta_f

EXIT_OK, EXIT_USAGE, EXIT_ANALYSIS, EXIT_CAPABILITY = 0, 2, 3, 4
DEFAULT_SEED = 0


class UsageError(Exception):
    pass


def _common() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(add_help=False)
    p.add_argument("--seed", type=int, default=DEFAULT_SEED, help="master random seed (default %(default)s)")
    p.add_argument("--trials", type=int, default=100_000, help="Monte Carlo trials per input combination")
    p.add_argument("--response-model", type=Path, help="JSON file overriding the default response model")
    p.add_argument("--format", choices=("json", "csv", "text"), default="text")
    p.add_argument("--workers", type=int, default=1, help="threads for Monte Carlo (results do not change)")
    return p


def _osc_args(p: argparse.ArgumentParser) -> None:
    p.add_argument("--period", type=float, default=100.0, help="baseline oscillation period, s")
    p.add_argument("--amplitude", type=float, default=5.0, help="oscillation amplitude, mV")
    p.add_argument("--dc-offset", type=float, default=0.0, help="DC offset, mV")
    p.add_argument("--sample-rate", type=float, default=1.0, help="Hz")


def _circuit_eval_args(p: argparse.ArgumentParser) -> None:
    p.add_argument("--mode", choices=("sampled", "measured"), default="sampled")
    p.add_argument(
        "--noise", type=float, default=1.0, help="scale on every response std (0 gives ideal gates)"
    )
    p.add_argument("--electrode-noise", type=float, default=0.0, help="trace noise std in measured mode, mV")
    _osc_args(p)


def build_parser() -> argparse.ArgumentParser:
    common = _common()
    parser = argparse.ArgumentParser(prog="pfgsim", description="Slime-mould frequency gate simulator")
    sub = parser.add_subparsers(dest="command", required=True)

    trace = sub.add_parser("trace", help="synthesize or analyze electrode traces").add_subparsers(
        dest="action", required=True
    )
    synth = trace.add_parser("synth", parents=[common], help="write a synthetic trace CSV")
    _osc_args(synth)
    synth.add_argument("--noise", type=float, default=0.0, help="electrode noise std, mV")
    what = synth.add_mutually_exclusive_group()
    what.add_argument("--delta-f", type=float, help="explicit frequency change, %%")
    what.add_argument("--pattern", help="stimulus pattern: none, heat, oat, heat+oat")
    synth.add_argument("--pre", type=float, default=600.0, help="pre-onset duration, s")
    synth.add_argument("--post", type=float, default=600.0, help="post-onset duration, s")
    synth.add_argument("--out", type=Path, default=Path("trace.csv"))

    analyze = trace.add_parser("analyze", parents=[common], help="measure frequency change of a trace CSV")
    analyze.add_argument("input", type=Path)
    analyze.add_argument("--onset", type=int, help="stimulus onset sample index (else from sidecar JSON)")
    analyze.add_argument("--sample-rate", type=float)
    analyze.add_argument("--gate", help="classify the change with this gate kind's rule")
    analyze.add_argument("--window", choices=("hann", "rectangular"), default="hann")
    analyze.add_argument("--zero-pad", type=int, default=8)
    analyze.add_argument("--detrend", action="store_true", help="remove a linear trend per window")

    gate = sub.add_parser("gate", help="single gates").add_subparsers(dest="action", required=True)
    grun = gate.add_parser("run", parents=[common], help="evaluate one noisy gate")
    grun.add_argument("--gate", required=True)
    grun.add_argument("--in-a", type=int, choices=(0, 1), required=True)
    grun.add_argument("--in-b", type=int, choices=(0, 1), default=0)
    grun.add_argument("--invert-a", action="store_true")
    grun.add_argument("--invert-b", action="store_true")
    _circuit_eval_args(grun)

    circuit = sub.add_parser("circuit", help="netlists").add_subparsers(dest="action", required=True)
    crun = circuit.add_parser("run", parents=[common], help="evaluate a circuit once")
    _netlist_source(crun)
    crun.add_argument("--inputs", required=True, help="input bits, e.g. 110")
    _circuit_eval_args(crun)
    check = circuit.add_parser("check", parents=[common], help="validate a netlist, print its truth table")
    _netlist_source(check)

    acc = sub.add_parser("accuracy", parents=[common], help="accuracy reports")
    acc.add_argument("target", nargs="?", choices=("table4",), help="'table4' for the comparison report")
    src = acc.add_mutually_exclusive_group()
    src.add_argument("--gate")
    src.add_argument("--builtin", choices=BUILTIN_NAMES)
    src.add_argument("--netlist", type=Path)
    acc.add_argument("--method", choices=("analytic", "mc", "both"), default="both")

    model = sub.add_parser("model", parents=[common], help="print the effective response model")
    model.set_defaults(action="show")
    return parser


def _netlist_source(p: argparse.ArgumentParser) -> None:
    g = p.add_mutually_exclusive_group(required=True)
    g.add_argument("--builtin", choices=BUILTIN_NAMES)
    g.add_argument("--netlist", type=Path)


def _load_netlist(args):
    if getattr(args, "builtin", None):
        return builtin(args.builtin)
    if getattr(args, "netlist", None):
        try:
            return parse_netlist(args.netlist.read_text())
        except NetlistError as exc:
            if exc.line is not None:
                raise UsageError(f"{args.netlist}:{exc.line}:{exc.column}: {type(exc).__name__}: {exc.message}")
            raise UsageError(f"{args.netlist}: {type(exc).__name__}: {exc}")
    return None


def _gate_kind(name: str) -> GateKind:
    try:
        return GateKind.parse(name)
    except ValueError:
        raise UsageError(f"unknown gate kind {name!r}; choose from {', '.join(k.value for k in GateKind)}")


def _model(args) -> ResponseModel:
    if args.response_model is None:
        return DEFAULT_RESPONSE
    try:
        return ResponseModel.load(args.response_model)
    except (OSError, KeyError, ValueError, TypeError) as exc:
        raise UsageError(f"cannot load response model {args.response_model}: {exc}")


def _bits(text: str, n: int) -> tuple[int, ...]:
    text = text.replace(",", "").replace(" ", "")
    if len(text) != n or set(text) - {"0", "1"}:
        raise UsageError(f"expected {n} input bits, got {text!r}")
    return tuple(int(c) for c in text)


def _emit(fmt: str, payload: dict, text: str, rows: list[list] | None = None) -> None:
    if fmt == "json":
        sys.stdout.write(json.dumps(payload, indent=2, sort_keys=True) + "\n")
    elif fmt == "csv" and rows is not None:
        buf = io.StringIO()
        csv.writer(buf, lineterminator="\n").writerows(rows)
        sys.stdout.write(buf.getvalue())
    else:
        sys.stdout.write(text.rstrip("\n") + "\n")


def cmd_trace_synth(args) -> int:
    model = _model(args)
    rng = np.random.default_rng(args.seed)
    osc = OscillationModel(args.period, args.amplitude, args.noise, args.dc_offset, args.sample_rate)
    if args.delta_f is not None:
        delta = args.delta_f
        pattern = None
    else:
        try:
            pattern = StimulusPattern.from_label(args.pattern or "none")
        except ValueError as exc:
            raise UsageError(str(exc))
        delta = sample_delta_f(pattern, model, rng)
    tr = synthesize_trace(osc, delta, args.pre, args.post, rng)
    meta_path = tr.save(args.out)
    payload = {
        "csv": str(args.out),
        "metadata": str(meta_path),
        "delta_f_pct": delta,
        "pattern": pattern.label() if pattern else None,
        "samples": len(tr),
        "stimulus_onset_index": tr.stimulus_onset_index,
    }
    _emit(
        args.format,
        payload,
        f"wrote {len(tr)} samples to {args.out} (onset {tr.stimulus_onset_index}, delta_f {delta:.4f}%)",
        [list(payload), list(payload.values())],
    )
    return EXIT_OK


def cmd_trace_analyze(args) -> int:
    try:
        tr = read_trace(args.input, args.onset, args.sample_rate)
    except (OSError, ValueError) as exc:
        raise UsageError(str(exc))
    cfg = SpectralConfig(window_function=args.window, zero_pad_factor=args.zero_pad, detrend=args.detrend)
    kind = _gate_kind(args.gate) if args.gate else None
    try:
        result = measure_delta_f(tr, cfg)
    except TooShort as exc:
        raise UsageError(str(exc))
    record = result.record()
    text = f"f_pre {record['f_pre_hz'] * 1e3:.4f} mHz  f_post {record['f_post_hz'] * 1e3:.4f} mHz  delta_f {record['delta_f_pct']:.4f}%"
    if kind is not None:
        record["gate"] = kind.value
        record["output"] = classify(result.delta_f_pct, threshold_rule_for(kind))
        text += f"  {kind.value} -> {record['output']}"
    _emit(args.format, record, text, [list(record), list(record.values())])
    return EXIT_OK


def _eval_options(args):
    model = _model(args).scaled(args.noise)
    osc = OscillationModel(args.period, args.amplitude, args.electrode_noise, args.dc_offset, args.sample_rate)
    return model, dict(mode=args.mode, osc=osc, cfg=SpectralConfig())


def _print_outputs(args, n, bits, outs) -> None:
    named = dict(zip(n.output_names, outs))
    payload = {"circuit": n.name, "inputs": dict(zip(n.inputs, bits)), "outputs": named, "seed": args.seed}
    _emit(
        args.format,
        payload,
        " ".join(f"{k}={v}" for k, v in named.items()),
        [[*n.inputs, *n.output_names], [*bits, *outs]],
    )


def cmd_gate_run(args) -> int:
    kind = _gate_kind(args.gate)
    if kind is GateKind.NOT and (args.in_b or args.invert_b):
        raise UsageError("NOT gates take input A only")
    n = gate_netlist(GateSpec(kind, args.invert_a, args.invert_b))
    bits = (args.in_a,) if kind is GateKind.NOT else (args.in_a, args.in_b)
    model, opts = _eval_options(args)
    _print_outputs(args, n, bits, evaluate_circuit(n, bits, model, args.seed, **opts))
    return EXIT_OK


def cmd_circuit_run(args) -> int:
    n = _load_netlist(args)
    bits = _bits(args.inputs, len(n.inputs))
    model, opts = _eval_options(args)
    _print_outputs(args, n, bits, evaluate_circuit(n, bits, model, args.seed, **opts))
    return EXIT_OK


def cmd_circuit_check(args) -> int:
    n = _load_netlist(args)
    table = logic_truth_table(n)
    payload = {
        "circuit": n.name,
        "inputs": list(n.inputs),
        "outputs": list(n.output_names),
        "pfg_count": n.pfg_count,
        "truth_table": [{"inputs": list(i), "outputs": list(o)} for i, o in table.rows],
    }
    text = f"{n.name}: ok, {n.pfg_count} PFGs\n" + table.to_csv()
    if args.format == "csv":
        sys.stdout.write(table.to_csv())
    else:
        _emit(args.format, payload, text)
    return EXIT_OK


def _accuracy_reports(args, model):
    if args.gate:
        kind = _gate_kind(args.gate)
        n = gate_netlist(kind)
    else:
        n = _load_netlist(args)
        if n is None:
            raise UsageError("accuracy needs --gate, --builtin, --netlist, or 'table4'")
    reports = []
    if args.method in ("analytic", "both"):
        if args.gate:
            reports.append(analysis.analytic_gate_accuracy(GateSpec(kind), model))
        else:
            reports.append(analysis.analytic_circuit_accuracy(n, model))
    if args.method in ("mc", "both"):
        reports.append(analysis.monte_carlo_accuracy(n, model, args.trials, args.seed, args.workers))
    return reports


def cmd_accuracy(args) -> int:
    model = _model(args)
    if args.trials < 1:
        raise UsageError("--trials must be >= 1")
    if args.target == "table4":
        rows = analysis.comparison_report(model, args.trials, args.seed, args.workers, monte_carlo=args.method != "analytic")
        if args.format == "csv":
            sys.stdout.write(analysis.comparison_csv(rows))
        elif args.format == "json":
            payload = [
                {
                    **dict(zip(analysis.COMPARISON_COLUMNS, r.csv_row())),
                    "reference_only": r.reference_only,
                    "analytic": r.analytic.to_dict(),
                    "monte_carlo": r.monte_carlo.to_dict() if r.monte_carlo else None,
                }
                for r in rows
            ]
            sys.stdout.write(json.dumps(payload, indent=2, sort_keys=True) + "\n")
        else:
            lines = [f"{'subject':<14}{'PFGs':>5}{'published %':>9}{'analytic %':>12}{'MC %':>10}{'MC se':>8}"]
            for r in rows:
                c = r.csv_row()
                note = "  (reference only)" if r.reference_only else ""
                mc = f"{float(c[4]):>10.2f}{float(c[5]):>8.2f}" if r.monte_carlo else f"{'-':>10}{'-':>8}"
                lines.append(f"{c[0]:<14}{c[1]:>5}{c[2]:>9}{float(c[3]):>12.2f}{mc}{note}")
            sys.stdout.write("\n".join(lines) + "\n")
        return EXIT_OK

    reports = _accuracy_reports(args, model)
    if args.format == "json":
        sys.stdout.write(json.dumps([r.to_dict() for r in reports], indent=2, sort_keys=True) + "\n")
    elif args.format == "csv":
        out = reports[0].to_csv()
        for r in reports[1:]:
            out += "".join(r.to_csv().splitlines(keepends=True)[1:])
        sys.stdout.write(out)
    else:
        for r in reports:
            extra = f" +/- {r.std_error:.5f} ({r.trials} trials)" if r.method == "monte_carlo" else ""
            sys.stdout.write(f"{r.subject} {r.method}: overall {r.overall:.5f}{extra}\n")
            for k, v in r.per_input.items():
                sys.stdout.write(f"  {''.join(map(str, k))}: {v:.5f}\n")
    return EXIT_OK


def cmd_model(args) -> int:
    sys.stdout.write(_model(args).to_json())
    return EXIT_OK


COMMANDS = {
    ("trace", "synth"): cmd_trace_synth,
    ("trace", "analyze"): cmd_trace_analyze,
    ("gate", "run"): cmd_gate_run,
    ("circuit", "run"): cmd_circuit_run,
    ("circuit", "check"): cmd_circuit_check,
    ("accuracy", None): cmd_accuracy,
    ("model", "show"): cmd_model,
}


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    handler = COMMANDS[(args.command, getattr(args, "action", None))]
    with warnings.catch_warnings():
        warnings.simplefilter("always")
        warnings.showwarning = lambda msg, *a, **k: print(f"warning: {msg}", file=sys.stderr)
        try:
            return handler(args)
        except UsageError as exc:
            print(f"error: {exc}", file=sys.stderr)
            return EXIT_USAGE
        except NetlistError as exc:
            print(f"error: {exc}", file=sys.stderr)
            return EXIT_USAGE
        except NoOscillationDetected as exc:
            print(f"error: NoOscillationDetected: {exc}", file=sys.stderr)
            return EXIT_ANALYSIS
        except analysis.TooManyGates as exc:
            print(f"error: TooManyGates: {exc}", file=sys.stderr)
            return EXIT_CAPABILITY
        except ValueError as exc:
            print(f"error: {exc}", file=sys.stderr)
            return EXIT_USAGE


def run() -> None:
    sys.exit(main())
