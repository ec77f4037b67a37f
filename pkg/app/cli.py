"""
Command-line front end
----------------------
Subcommands: validate, infer, sweep, search and reproduce. Exit status is 0 on
success (or when every reproduction check passes), 1 on a domain error or a
failed check, and 2 on I/O or usage errors.
"""

import argparse
import logging
import re
import sys
from pathlib import Path
from typing import Dict, List, Optional, Sequence

from app.config import configure_logging, get_settings
from app.engine.classical import infer_classical
from app.engine.phase_search import grid_search, sweep_pair, sweep_shared_phase
from app.engine.quantum import ThetaVector, infer_quantum, path_count
from app.exceptions import (
    EvidenceError,
    NetworkFormatError,
    NetworkValidationError,
    QBNError,
    SearchError,
)
from app.network.models import Network
from app.network.operations import parse_network, resolve_network
from app.reports.generator import (
    RunReport,
    Stopwatch,
    checks_frame,
    distribution_frame,
    network_ref,
    quantum_frame,
    render_csv,
    render_table,
    search_frame,
    summarize_checks,
    sweep_csv,
)
from app.reports.reproduce import SUITES, run_suites

logger = logging.getLogger(__name__)

REPRODUCE_CHOICES = list(SUITES) + ["all"]


# Argument helpers
def parse_evidence(items: Optional[Sequence[str]]) -> Dict[str, str]:
    """['U=Play', ...] -> {'U': 'Play'}; labels are resolved against the network later"""
    labels: Dict[str, str] = {}
    for item in items or []:
        name, sep, label = item.partition("=")
        if not sep or not name or not label:
            raise EvidenceError(f"evidence '{item}' is not of the form Var=State")
        labels[name.strip()] = label.strip()
    return labels


def parse_floats(text: str) -> List[float]:
    """Comma- or whitespace-separated numbers"""
    parts = [p for p in re.split(r"[,\s]+", text.strip()) if p]
    try:
        return [float(p) for p in parts]
    except ValueError:
        raise QBNError(f"'{text}' is not a list of numbers") from None


def _thetas(args: argparse.Namespace, net: Network, query: str, evidence: Dict[str, int]) -> ThetaVector:
    k = path_count(net, query, evidence)
    if args.theta is not None:
        return ThetaVector(tuple(parse_floats(args.theta)))
    if args.theta_file is not None:
        return ThetaVector(tuple(parse_floats(Path(args.theta_file).read_text(encoding="utf-8"))))
    if k == 1:
        return ThetaVector.zeros(1)
    raise SearchError(f"quantum mode needs --theta or --theta-file with {k} phases for query '{query}'")


def _parameters(args: argparse.Namespace) -> Dict:
    return {key: value for key, value in vars(args).items() if key not in ("handler", "verbose")}


def _emit(text: str, output: Optional[str] = None) -> None:
    if output:
        Path(output).write_text(text, encoding="utf-8", newline="\n")
        logger.info("Wrote %s", output)
    else:
        sys.stdout.write(text)


# Commands
def cmd_validate(args: argparse.Namespace) -> int:
    data = Path(args.path).read_bytes()
    try:
        net = parse_network(data)
    except NetworkValidationError as e:
        for violation in e.violations:
            print(violation)
        return 1
    except NetworkFormatError as e:
        print(f"NetworkFormatError: {e}")
        return 1
    print(f"{net.name}: OK ({len(net.variables)} variables, {net.configuration_count} configurations)")
    return 0


def cmd_infer(args: argparse.Namespace) -> int:
    clock = Stopwatch()
    net = resolve_network(args.net)
    evidence = net.resolve_labels(parse_evidence(args.evidence))

    results: Dict = {}
    if args.mode == "classical":
        distribution = infer_classical(net, args.query, evidence)
        frame = distribution_frame(distribution)
        results["distribution"] = distribution.as_dict()
    else:
        result = infer_quantum(net, args.query, evidence, _thetas(args, net, args.query, evidence))
        frame = quantum_frame(result)
        results.update(
            distribution=dict(zip(result.states, result.distribution)),
            classical_mass=dict(zip(result.states, result.classical_mass)),
            interference=dict(zip(result.states, result.interference)),
            unnormalized=dict(zip(result.states, result.unnormalized)),
            alpha=result.alpha,
            thetas=list(result.thetas.phases),
        )

    if args.state is not None:
        net.variable(args.query).index_of(args.state)
        frame = frame[frame["state"] == args.state]

    if args.format == "json":
        report = RunReport(command="infer", network=network_ref(net, args.net), parameters=_parameters(args),
                           results=results, wall_ms=clock.elapsed_ms)
        _emit(report.to_json())
    elif args.format == "csv":
        _emit(render_csv(frame, args.precision))
    else:
        _emit(render_table(frame, args.precision))
    return 0


def cmd_sweep(args: argparse.Namespace) -> int:
    net = resolve_network(args.net)
    evidence = net.resolve_labels(parse_evidence(args.evidence))

    if args.vary[0] == "shared" and len(args.vary) == 1:
        trace = sweep_shared_phase(net, args.query, evidence, args.step)
    elif args.vary[0] == "pair" and len(args.vary) == 3:
        try:
            i, j = (int(x) - 1 for x in args.vary[1:])
        except ValueError:
            raise SearchError(f"pair indices must be integers, got {args.vary[1:]}") from None
        k = path_count(net, args.query, evidence)
        fixed = ThetaVector(tuple(parse_floats(args.fixed))) if args.fixed else ThetaVector.zeros(k)
        trace = sweep_pair(net, args.query, evidence, fixed, i, j, args.step, start=args.start)
    else:
        raise SearchError("--vary takes 'shared' or 'pair I J'")

    _emit(sweep_csv(trace, args.precision), args.output)
    logger.info("Sweep produced %d rows", len(trace.thetas))
    return 0


def cmd_search(args: argparse.Namespace) -> int:
    clock = Stopwatch()
    net = resolve_network(args.net)
    evidence = net.resolve_labels(parse_evidence(args.evidence))
    result = grid_search(net, args.query, args.state, evidence, step=args.step, strategy=args.strategy,
                         restarts=args.restarts, seed=args.seed, sense=args.sense)

    if args.format == "json":
        report = RunReport(
            command="search",
            network=network_ref(net, args.net),
            parameters=_parameters(args),
            results={
                "best_probability": result.best_probability,
                "best_thetas": list(result.best_thetas.phases),
                "evaluations": result.evaluations,
                "strategy": result.strategy,
                "sense": result.sense,
            },
            seed=result.seed,
            wall_ms=clock.elapsed_ms,
        )
        _emit(report.to_json())
    else:
        _emit(search_frame(result).to_string(index=False) + "\n")
    return 0


def cmd_reproduce(args: argparse.Namespace) -> int:
    checks = run_suites(args.what)
    frame = checks_frame(checks)
    for column in ("expected", "got", "tolerance"):
        frame[column] = frame[column].map(lambda x: f"{x:.6g}")
    _emit(frame.to_string(index=False) + "\n")
    _emit(summarize_checks(checks) + "\n")
    return 0 if all(c.passed for c in checks) else 1


# Parser
def _add_query_arguments(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--net", required=True, help="builtin name or path to a network document")
    parser.add_argument("--query", required=True, help="query variable")
    parser.add_argument("--evidence", nargs="*", default=[], metavar="VAR=STATE", help="observed states")


def build_parser() -> argparse.ArgumentParser:
    settings = get_settings()
    parser = argparse.ArgumentParser(
        prog="run.py",
        description="Classical and interference inference on discrete Bayesian networks",
    )
    parser.add_argument("-v", "--verbose", action="count", default=0, help="-v for INFO, -vv for DEBUG")
    commands = parser.add_subparsers(dest="command", required=True)

    validate = commands.add_parser("validate", help="check a network document")
    validate.add_argument("path")
    validate.set_defaults(handler=cmd_validate)

    infer = commands.add_parser("infer", help="posterior distribution of one variable")
    _add_query_arguments(infer)
    infer.add_argument("--state", help="report only this state")
    infer.add_argument("--mode", choices=["classical", "quantum"], default="classical")
    thetas = infer.add_mutually_exclusive_group()
    thetas.add_argument("--theta", help="comma-separated phases, one per unobserved configuration")
    thetas.add_argument("--theta-file", help="file holding the phases")
    infer.add_argument("--format", choices=["table", "csv", "json"], default="table")
    infer.add_argument("--precision", type=int, default=settings.precision)
    infer.set_defaults(handler=cmd_infer)

    sweep = commands.add_parser("sweep", help="probabilities over a grid of phases, as CSV")
    _add_query_arguments(sweep)
    sweep.add_argument("--step", type=float, help="grid step in radians")
    sweep.add_argument("--vary", nargs="+", default=["shared"], metavar="shared | pair I J",
                       help="phase axes to vary; pair indices are 1-based")
    sweep.add_argument("--fixed", help="phases held fixed in a pair sweep")
    sweep.add_argument("--start", type=float, default=0.0, help="offset added to the varied pair axes")
    sweep.add_argument("--precision", type=int, default=settings.precision)
    sweep.add_argument("--format", choices=["csv"], default="csv")
    sweep.add_argument("--output", help="CSV path (stdout when omitted)")
    sweep.set_defaults(handler=cmd_sweep)

    search = commands.add_parser("search", help="best phases for one query state")
    _add_query_arguments(search)
    search.add_argument("--state", required=True, help="query state to optimise")
    search.add_argument("--step", type=float, help="grid step in radians")
    search.add_argument("--strategy", choices=["exhaustive", "coordinate-ascent"], default="coordinate-ascent")
    search.add_argument("--restarts", type=int)
    search.add_argument("--seed", type=int)
    search.add_argument("--sense", choices=["max", "min"], default="max")
    search.add_argument("--format", choices=["table", "json"], default="table")
    search.set_defaults(handler=cmd_search)

    reproduce = commands.add_parser("reproduce", help="recompute the published tables and check them")
    reproduce.add_argument("--what", choices=REPRODUCE_CHOICES, default="all")
    reproduce.set_defaults(handler=cmd_reproduce)
    return parser


def main(argv: Optional[Sequence[str]] = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    if args.command == "infer" and args.mode == "classical" and (args.theta is not None or args.theta_file is not None):
        parser.error("--theta and --theta-file apply only to --mode quantum")
    configure_logging({0: None, 1: "INFO"}.get(args.verbose, "DEBUG"))
    try:
        return args.handler(args)
    except OSError as e:
        print(f"error: {e}", file=sys.stderr)
        return 2
    except QBNError as e:
        logger.debug("Command failed", exc_info=True)
        print(f"error: {e}", file=sys.stderr)
        return 1
