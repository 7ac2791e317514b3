"""Command-line front end.

Subcommands: reach-nn (network output union), reach-cls (closed-loop
tube), verify (tube + safety verdict), sample (seeded Monte Carlo).

Exit codes: 0 success (and SAFE verdicts), 1 UNCERTAIN verdict,
2 input or parse error, 3 internal invariant violation.
"""

from __future__ import annotations

import argparse
import dataclasses
import sys
import time
from pathlib import Path

from . import __version__, io
from .closed_loop import reach_nncs, verify_nncs
from .errors import InputError, InternalError
from .geometry import HyperBox, PartitionSpec
from .network import reach_mlp
from .sampling import SampleConfig, sample_network_outputs, simulate_trajectories


def parse_box_spec(text: str) -> HyperBox:
    """Parse 'lo:hi,lo:hi,...' into a box."""
    los, his = [], []
    for i, part in enumerate(text.split(",")):
        pieces = part.split(":")
        if len(pieces) != 2:
            raise InputError(
                f"bad box component {part!r} (expected 'lo:hi') in {text!r}")
        try:
            lo, hi = float(pieces[0]), float(pieces[1])
        except ValueError:
            raise InputError(f"non-numeric bound in box component {part!r}") from None
        los.append(lo)
        his.append(hi)
    try:
        return HyperBox(los, his)
    except ValueError as exc:
        raise InputError(f"bad box {text!r}: {exc}") from None


def parse_partition(text: str, dim: int) -> PartitionSpec:
    """Parse 'M1,M2,...' (or a single count applied to every dimension)."""
    try:
        counts = tuple(int(p) for p in text.split(","))
    except ValueError:
        raise InputError(f"partition counts must be integers, got {text!r}") from None
    if len(counts) == 1 and dim > 1:
        counts = counts * dim
    try:
        spec = PartitionSpec(counts)
    except ValueError as exc:
        raise InputError(str(exc)) from None
    if len(spec.counts) != dim:
        raise InputError(
            f"partition has {len(spec.counts)} counts but the input space "
            f"has {dim} dimensions")
    return spec


def _emit(doc: dict, out_path: str | None, summary: str):
    if out_path:
        io.save_json(doc, out_path)
        print(f"{summary} (report: {out_path})")
    else:
        import json
        print(json.dumps(doc, indent=2))
        if summary:
            print(summary, file=sys.stderr)


def cmd_reach_nn(args) -> int:
    net = io.load_network(args.network)
    box = parse_box_spec(args.input_box)
    if box.dim != net.input_dim:
        raise InputError(
            f"--input-box has {box.dim} dimensions, network expects "
            f"{net.input_dim}")
    spec = parse_partition(args.partition, net.input_dim)
    started = time.perf_counter()
    union = reach_mlp(net, box, spec, epsilon=args.epsilon)
    wall = time.perf_counter() - started
    config = {
        "command": "reach-nn",
        "network": io.network_to_doc(net),
        "input_box": io.box_to_doc(box),
        "partition": list(spec.counts),
        "epsilon": args.epsilon,
    }
    report = io.network_report(config, union, wall)
    _emit(report, args.out, f"{len(union)} output boxes in {wall:.3f}s")
    return 0


def _load_scenario_with_overrides(args):
    scenario, safety = io.load_scenario(args.scenario)
    updates = {}
    if args.partition is not None:
        updates["partition"] = parse_partition(
            args.partition, scenario.controller.input_dim)
    if args.horizon is not None:
        updates["horizon"] = args.horizon
    if args.epsilon is not None:
        updates["epsilon"] = args.epsilon
    if updates:
        try:
            scenario = dataclasses.replace(scenario, **updates)
        except ValueError as exc:
            raise InputError(str(exc)) from None
    return scenario, safety


def cmd_reach_cls(args) -> int:
    scenario, safety = _load_scenario_with_overrides(args)
    step_times: list = []
    tube = reach_nncs(scenario, step_times=step_times)
    config = {
        "command": "reach-cls",
        "scenario": io.scenario_to_doc(scenario, safety),
    }
    report = io.tube_report(config, tube, step_times)
    io.validate_tube_report(report, scenario.horizon)
    _emit(report, args.out,
          f"tube with {len(tube.steps)} steps in {sum(step_times):.3f}s")
    return 0


def cmd_verify(args) -> int:
    scenario, safety = _load_scenario_with_overrides(args)
    step_times: list = []
    verdict = verify_nncs(scenario, safety, step_times=step_times)
    config = {
        "command": "verify",
        "scenario": io.scenario_to_doc(scenario, safety),
    }
    report = io.tube_report(config, verdict.tube, step_times, verdict=verdict)
    io.validate_tube_report(report, scenario.horizon)
    _emit(report, args.out, f"verdict: {verdict.value.value}")
    return 0 if verdict.value.value == "SAFE" else 1


def _format_row(values) -> str:
    return ",".join(repr(float(v)) for v in values)


def cmd_sample(args) -> int:
    fmt = io.detect_format(args.file)
    lines = []
    if fmt == io.NETWORK_FORMAT:
        net = io.load_network(args.file)
        if args.input_box is None:
            raise InputError("sampling a network requires --input-box")
        box = parse_box_spec(args.input_box)
        outputs = sample_network_outputs(
            net, box, SampleConfig(args.count, args.seed))
        lines.append("# boxreach/samples-v1 kind=network-outputs "
                     f"count={args.count} seed={args.seed}")
        lines.append(",".join(f"u{i+1}" for i in range(outputs.shape[1])))
        lines.extend(_format_row(row) for row in outputs)
        summary = f"{len(outputs)} output samples"
    elif fmt == io.SCENARIO_FORMAT:
        scenario, _ = io.load_scenario(args.file)
        states = simulate_trajectories(
            scenario, SampleConfig(args.count, args.seed))
        n_x = states.shape[2]
        lines.append("# boxreach/samples-v1 kind=trajectories "
                     f"count={args.count} seed={args.seed} "
                     f"horizon={scenario.horizon}")
        lines.append("sample,t," + ",".join(f"x{i+1}" for i in range(n_x)))
        for k in range(states.shape[0]):
            for t in range(states.shape[1]):
                lines.append(f"{k},{t}," + _format_row(states[k, t]))
        summary = f"{states.shape[0]} trajectories over {scenario.horizon} steps"
    else:
        raise InputError(f"{args.file}: cannot sample from a report file")
    text = "\n".join(lines) + "\n"
    if args.out:
        Path(args.out).write_text(text)
        print(f"{summary} (written to {args.out})")
    else:
        sys.stdout.write(text)
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="boxreach",
        description="Box-union reachability analysis for feedforward-network "
                    "controllers and the systems they close.")
    parser.add_argument("--version", action="version", version=__version__)
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("reach-nn", help="over-approximate a network's output set")
    p.add_argument("network", help="network JSON file")
    p.add_argument("--input-box", required=True, metavar="LO:HI,...",
                   help="input region, one lo:hi pair per dimension")
    p.add_argument("--partition", required=True, metavar="M1,M2,...",
                   help="segments per input dimension (single value broadcasts)")
    p.add_argument("--epsilon", type=float, default=0.0,
                   help="outward padding added to every result box")
    p.add_argument("--out", help="write the JSON report here instead of stdout")
    p.set_defaults(func=cmd_reach_nn)

    for name, func, help_text in (
            ("reach-cls", cmd_reach_cls, "closed-loop reach tube"),
            ("verify", cmd_verify, "closed-loop tube plus safety verdict")):
        p = sub.add_parser(name, help=help_text)
        p.add_argument("scenario", help="scenario JSON file")
        p.add_argument("--partition", metavar="M1,M2,...",
                       help="override the scenario's partition counts")
        p.add_argument("--horizon", type=int, help="override the horizon")
        p.add_argument("--epsilon", type=float,
                       help="override the epsilon padding")
        p.add_argument("--out", help="write the JSON report here instead of stdout")
        p.set_defaults(func=func)

    p = sub.add_parser("sample", help="seeded Monte Carlo samples")
    p.add_argument("file", help="network or scenario JSON file")
    p.add_argument("--count", type=int, required=True)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--input-box", metavar="LO:HI,...",
                   help="required when sampling a network file")
    p.add_argument("--out", help="write CSV here instead of stdout")
    p.set_defaults(func=cmd_sample)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return exc.code if isinstance(exc.code, int) else 2
    try:
        return args.func(args)
    except InputError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except (ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except InternalError as exc:
        print(f"internal error: {exc}", file=sys.stderr)
        return 3


def entry():
    sys.exit(main())


if __name__ == "__main__":
    entry()
