"""paintdrone command line: simulate, harvester, inspect, synth, hopfield, rules.

Exit codes: 0 success, 1 runtime failure, 2 usage or config error, 3 validation failure.
"""
from __future__ import annotations

import argparse
import csv
import logging
import os
import sys
from dataclasses import asdict, replace
from pathlib import Path
from typing import Sequence

from . import __version__

EXIT_OK = 0
EXIT_RUNTIME = 1
EXIT_USAGE = 2
EXIT_VALIDATION = 3

CONFIG_DIR_ENV = "PAINTDRONE_CONFIG_DIR"
DATA_DIR = Path(__file__).resolve().parent / "data"

log = logging.getLogger("paintdrone")


class ConfigError(Exception):
    pass


class ValidationFailure(Exception):
    pass


def resolve_config(path: str | None, default_name: str) -> Path:
    """Find a config file: explicit path, then $PAINTDRONE_CONFIG_DIR, then shipped data."""
    env_dir = os.environ.get(CONFIG_DIR_ENV)
    if path is not None:
        p = Path(path)
        if p.is_file():
            return p
        if env_dir and not p.is_absolute() and (Path(env_dir) / p).is_file():
            return Path(env_dir) / p
        raise ConfigError(f"file not found: {path}")
    if env_dir:
        candidate = Path(env_dir) / default_name
        if candidate.is_file():
            return candidate
    return DATA_DIR / default_name


def _out_paths(out: str, default_csv: str) -> tuple[Path, Path]:
    """--out may name a CSV file or a directory; returns (directory, csv path)."""
    p = Path(out)
    if p.suffix.lower() == ".csv":
        return p.parent if str(p.parent) else Path("."), p
    return p, p / default_csv


def _prepare_dir(d: Path) -> Path:
    try:
        d.mkdir(parents=True, exist_ok=True)
    except OSError as exc:
        raise ConfigError(f"cannot create output directory {d}: {exc}") from None
    return d


# ---------------------------------------------------------------- simulate

def cmd_simulate(args) -> int:
    from .flight.config import load_scenario, write_trace
    from .flight.scenario import TRACE_COLUMNS, make_controller, run_scenario
    from .fuzzy.engine import FuzzyController
    from .manifest import RunManifest
    from .plots import plot_trace

    scenario_path = resolve_config(args.scenario, "table4.yaml")
    scenario = load_scenario(scenario_path)
    if args.controller:
        scenario = replace(scenario, controller=args.controller)
    if args.horizon is not None:
        if not args.horizon > 0:
            raise ConfigError("--horizon must be > 0")
        scenario = replace(scenario, horizon=args.horizon)
    rules_path = resolve_config(args.rules, "rules.txt")
    membership_path = resolve_config(args.membership, "membership.yaml")
    fuzzy = FuzzyController.from_files(rules_path, membership_path)
    out_dir = _prepare_dir(Path(args.out))

    config = {"scenario": scenario.to_dict()}
    manifest = RunManifest("simulate", config)
    for p in (scenario_path, rules_path, membership_path):
        manifest.add_input(p)

    controller = make_controller(scenario.controller, scenario.gains, scenario.params, fuzzy)
    result = run_scenario(controller, scenario.disturbance, scenario.params, scenario.horizon)
    name = scenario.controller
    trace_path = write_trace(result, out_dir / f"trace_{name}.csv")
    report = replace(result.report, trace_path=trace_path.name)
    summary_path = out_dir / "settle.csv"
    with summary_path.open("w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh)
        w.writerow(["controller", "settle_time", "peak_dtheta", "peak_dphi", "trace"])
        w.writerow([name, "" if report.settle_time is None else repr(report.settle_time),
                    repr(report.peak_dtheta), repr(report.peak_dphi), report.trace_path])
    fig = plot_trace(result.trace, TRACE_COLUMNS, out_dir / f"trace_{name}.png",
                     f"{name} controller", settle=report.settle_time)
    for p in (trace_path, summary_path, fig):
        manifest.add_output(p, out_dir)
    manifest.results = asdict(report)
    manifest.write(out_dir / "manifest.json")
    print(report.summary())
    print(f"trace: {trace_path}")
    if not report.settled:
        log.error("did not settle within the %.1f s horizon", scenario.horizon)
        return EXIT_RUNTIME
    return EXIT_OK


# --------------------------------------------------------------- harvester

def cmd_harvester(args) -> int:
    from .harvester import (consistency_report, coil_resistance, fit_through_origin,
                            induced_voltage, load_harvester, parse_range, sweep_turns,
                            write_sweep)
    from .manifest import RunManifest
    from .plots import plot_sweep

    spec_path = resolve_config(args.spec, "harvester.yaml")
    spec, env = load_harvester(spec_path)
    turns = parse_range(args.sweep)
    out_dir, csv_path = _out_paths(args.out, "sweep.csv")
    _prepare_dir(out_dir)

    manifest = RunManifest("harvester", {"spec": asdict(spec), "environment": asdict(env),
                                         "sweep": args.sweep})
    manifest.add_input(spec_path)
    points = sweep_turns(spec, env, turns)
    write_sweep(points, csv_path)
    fig = plot_sweep(points, csv_path.with_suffix(".png"))
    report = consistency_report(spec, env)
    report_path = csv_path.with_name(csv_path.stem + "_report.txt")
    report_path.write_text("\n".join(report.lines()) + "\n", encoding="utf-8")
    for p in (csv_path, fig, report_path):
        manifest.add_output(p, out_dir)
    fit = fit_through_origin(points) if len(points) > 1 else {}
    manifest.results = {
        "voltage": induced_voltage(spec, env),
        "resistance": coil_resistance(spec),
        "consistent": report.consistent,
        "calibrated_volume": report.calibrated_volume,
        "fit": fit,
    }
    manifest.write(out_dir / "manifest.json")
    print(f"V = {induced_voltage(spec, env) * 1e3:.2f} mV at N = {spec.N:g}")
    for line in report.lines():
        print(line)
    print(f"sweep: {csv_path}")
    return EXIT_OK


# ----------------------------------------------------------------- inspect

def cmd_inspect(args) -> int:
    from .manifest import RunManifest
    from .plots import plot_inspection
    from .vision.pgm import read_pgm, to_gray
    from .vision.pipeline import InspectionConfig, decision_rows, filter_image, inspect_image
    from .vision.segment import column_profile
    from .vision.synth import write_rows

    image_path = Path(args.image)
    if not image_path.is_file():
        raise ConfigError(f"image not found: {args.image}")
    pixels = read_pgm(image_path)
    config = InspectionConfig(filter=args.filter, scale=args.scale, threshold=args.threshold,
                              tau=args.tau)
    out_dir, csv_path = _out_paths(args.out, "decisions.csv")
    _prepare_dir(out_dir)

    manifest = RunManifest("inspect", {"inspection": asdict(config),
                                       "threshold": config.boundary_threshold})
    manifest.add_input(image_path)
    insp = inspect_image(pixels, config)
    write_rows(csv_path, decision_rows(image_path.name, insp))
    gray = to_gray(pixels)
    filtered = filter_image(gray, config)
    fig = plot_inspection(gray, filtered, column_profile(filtered), config.boundary_threshold,
                          [s.start for s in insp.segments[1:]], csv_path.with_suffix(".png"))
    for p in (csv_path, fig):
        manifest.add_output(p, out_dir)
    manifest.results = {
        "vector": insp.vector,
        "segments": [asdict(s) for s in insp.segments],
        "windows": [d.result.describe() for d in insp.decisions],
    }
    manifest.write(out_dir / "manifest.json")
    print("blocks: [" + ", ".join(str(v) for v in insp.vector) + "]")
    for d in insp.decisions:
        print(f"window {d.triple_index} {list(d.input)}: {d.result.describe()}")
    for a in insp.actions:
        if a.action != "keep":
            print(f"block {a.block_index}: {a.action} {a.color}".rstrip())
    print(f"decisions: {csv_path}")
    return EXIT_OK


# ------------------------------------------------------------------- synth

def cmd_synth(args) -> int:
    from .manifest import RunManifest
    from .vision.pipeline import evaluate_corpus
    from .vision.synth import (CorpusSpec, dump_corpus_spec, generate_synthetic,
                               load_corpus_spec, write_corpus, write_rows)

    spec_path = resolve_config(args.spec, "corpus.yaml") if args.spec else None
    spec = load_corpus_spec(spec_path) if spec_path else CorpusSpec()
    overrides = {k: v for k, v in (("seed", args.seed), ("count", args.count)) if v is not None}
    if overrides:
        spec = replace(spec, **overrides)
    out_dir = _prepare_dir(Path(args.out))

    manifest = RunManifest("synth", {"corpus": asdict(spec), "evaluate": args.evaluate})
    if spec_path:
        manifest.add_input(spec_path)
    images = generate_synthetic(spec)
    written = write_corpus(images, out_dir)
    spec_out = out_dir / "corpus.yaml"
    spec_out.write_text(dump_corpus_spec(spec), encoding="utf-8")
    written.append(spec_out)
    print(f"{len(images)} images written to {out_dir}")
    if args.evaluate:
        score, rows = evaluate_corpus(images)
        written.append(write_rows(out_dir / "decisions.csv", rows))
        manifest.results = {"precision": score.precision, "recall": score.recall,
                            **asdict(score)}
        print(f"precision {score.precision:.4f}, recall {score.recall:.4f} "
              f"({score.true_pos} correct, {score.false_pos} spurious, {score.false_neg} missed)")
    for p in written:
        manifest.add_output(p, out_dir)
    manifest.write(out_dir / "manifest.json")
    return EXIT_OK


# ---------------------------------------------------------------- hopfield

def cmd_hopfield(args) -> int:
    from .vision.hopfield import ALTERNATING, parse_vector, recall, train_hopfield

    try:
        vec = parse_vector(args.input)
        mems = ([parse_vector(m) for m in args.memories.split(";")] if args.memories
                else list(ALTERNATING))
        net = train_hopfield(mems)
    except ValueError as exc:
        raise ConfigError(str(exc)) from None
    res = recall(net, vec)
    print(res.describe())
    if args.verbose:
        for i, s in enumerate(res.states):
            print(f"  state {i}: {list(s)}")
    return EXIT_OK


# ------------------------------------------------------------------- rules

def cmd_rules(args) -> int:
    from .fuzzy.rules import validation_report

    path = resolve_config(args.path, "rules.txt")
    ok, lines = validation_report(path.read_text(encoding="utf-8"))
    print(f"{path}: {'PASS' if ok else 'FAIL'}")
    for line in lines:
        print(f"  {line}")
    if not ok:
        raise ValidationFailure(f"{path} failed validation")
    return EXIT_OK


# -------------------------------------------------------------------- main

def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="paintdrone",
        description="Fuzzy attitude control, harvester model and sidewalk inspection tools.",
        epilog=f"Default config files are read from ${CONFIG_DIR_ENV} when set.",
    )
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    parser.add_argument("-v", "--verbose", action="store_true", help="debug logging")
    sub = parser.add_subparsers(dest="command", metavar="COMMAND")

    p = sub.add_parser("simulate", help="fly a disturbance scenario and measure settle time")
    p.add_argument("--scenario", help="scenario YAML (default: table4.yaml)")
    p.add_argument("--controller", choices=("fuzzy", "pid"), help="override the scenario's controller")
    p.add_argument("--rules", help="rule table file")
    p.add_argument("--membership", help="membership function YAML")
    p.add_argument("--horizon", type=float, help="simulated seconds (default from scenario)")
    p.add_argument("--out", required=True, help="output directory")
    p.set_defaults(func=cmd_simulate)

    p = sub.add_parser("harvester", help="harvester voltage sweep and consistency report")
    p.add_argument("--spec", help="harvester YAML (default: harvester.yaml)")
    p.add_argument("--sweep", default="0:40000:4000", help="turn range N0:N1:step")
    p.add_argument("--out", required=True, help="CSV file or output directory")
    p.set_defaults(func=cmd_harvester)

    p = sub.add_parser("inspect", help="segment a PGM image and decide repaints")
    p.add_argument("--image", required=True, help="8-bit PGM (P2 or P5)")
    p.add_argument("--filter", choices=("mexican-hat", "gabor-pca"), default="mexican-hat")
    p.add_argument("--scale", type=float, default=2.0, help="Mexican-hat scale in pixels")
    p.add_argument("--threshold", type=float, help="column boundary threshold")
    p.add_argument("--tau", type=float, default=0.7, help="majority threshold")
    p.add_argument("--out", required=True, help="CSV file or output directory")
    p.set_defaults(func=cmd_inspect)

    p = sub.add_parser("synth", help="generate a seeded synthetic curb corpus")
    p.add_argument("--spec", help="corpus YAML")
    p.add_argument("--seed", type=int)
    p.add_argument("--count", type=int)
    p.add_argument("--evaluate", action="store_true", help="run the pipeline and score it")
    p.add_argument("--out", required=True, help="output directory")
    p.set_defaults(func=cmd_synth)

    p = sub.add_parser("hopfield", help="recall a ternary triple")
    p.add_argument("--input", required=True, help='e.g. "0,-1,1"')
    p.add_argument("--memories", help='semicolon-separated, default "1,-1,1;-1,1,-1"')
    p.set_defaults(func=cmd_hopfield)

    p = sub.add_parser("rules", help="validate a rule table file")
    p.add_argument("path", nargs="?", help="rule file (default: shipped table)")
    p.set_defaults(func=cmd_rules)
    return parser


def _config_errors() -> tuple[type[BaseException], ...]:
    from .flight.config import ScenarioConfigError
    from .fuzzy.membership import MembershipConfigError
    from .fuzzy.rules import RuleTableError
    from .harvester import HarvesterConfigError
    from .vision.pgm import PGMError
    from .vision.synth import CorpusConfigError

    return (ConfigError, ScenarioConfigError, MembershipConfigError, RuleTableError,
            HarvesterConfigError, PGMError, CorpusConfigError)


def main(argv: Sequence[str] | None = None) -> int:
    argv = list(sys.argv[1:] if argv is None else argv)
    parser = build_parser()
    if not argv:
        parser.print_usage(sys.stderr)
        return EXIT_USAGE
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_OK if exc.code in (0, None) else EXIT_USAGE
    if not getattr(args, "func", None):
        parser.print_usage(sys.stderr)
        return EXIT_USAGE
    logging.basicConfig(level=logging.DEBUG if args.verbose else logging.WARNING,
                        format="%(levelname)s: %(message)s")
    try:
        return args.func(args)
    except ValidationFailure as exc:
        print(f"paintdrone: {exc}", file=sys.stderr)
        return EXIT_VALIDATION
    except _config_errors() as exc:
        print(f"paintdrone {args.command}: config error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except Exception as exc:  # runtime failures are reported, never dumped as tracebacks
        log.debug("runtime failure", exc_info=True)
        print(f"paintdrone {args.command}: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_RUNTIME


if __name__ == "__main__":
    sys.exit(main())
