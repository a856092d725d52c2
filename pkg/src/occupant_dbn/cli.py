"""Command-line interface: ``validate``, ``run`` and ``query``.

Exit codes: 0 success, 1 validation failure, 2 I/O failure, 3 usage error.
"""
from __future__ import annotations

import argparse
import difflib
import json
import logging
import sys
from pathlib import Path

from occupant_dbn.bayes import exact_marginal
from occupant_dbn.cosim import aggregate, run_ensemble
from occupant_dbn.errors import (
    InferenceError,
    OccupantDbnError,
    ParseError,
    UnknownLabelError,
    UnknownNodeError,
    ValidationError,
)
from occupant_dbn.output import aggregate_csv, aggregate_json, trace_csv
from occupant_dbn.scenario import load_scenario

EXIT_OK, EXIT_INVALID, EXIT_IO, EXIT_USAGE = 0, 1, 2, 3

log = logging.getLogger("occupant_dbn")


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def _positive_int(text):
    try:
        value = int(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"invalid integer {text!r}") from None
    if value < 1:
        raise argparse.ArgumentTypeError(f"must be at least 1, got {value}")
    return value


def _report_error(args, kind, message, **extra):
    if getattr(args, "format", "text") == "json":
        print(json.dumps({"error": kind, "message": message, **extra}), file=sys.stderr)
    else:
        where = f" at {extra['path']}" if "path" in extra else ""
        print(f"error ({kind}){where}: {message}", file=sys.stderr)


def _load(args):
    try:
        return load_scenario(args.scenario)
    except OSError as exc:
        _report_error(args, "io", f"cannot read {args.scenario}: {exc.strerror or exc}")
        raise SystemExit(EXIT_IO)
    except ParseError as exc:
        _report_error(args, "parse", str(exc))
        raise SystemExit(EXIT_INVALID)
    except ValidationError as exc:
        _report_error(args, "validation", exc.message, path=exc.path)
        raise SystemExit(EXIT_INVALID)


def cmd_validate(args) -> int:
    sc = _load(args)
    net = sc.network
    summary = {
        "scenario": sc.name,
        "nodes": len(net),
        "slots": len(sc.horizon),
        "cpt_rows": net.cpt_row_count(),
        "temporal_links": len(sc.template.links),
    }
    if args.format == "json":
        print(json.dumps(summary))
    else:
        print(f"{args.scenario}: OK")
        for k, v in summary.items():
            print(f"  {k}: {v}")
    return EXIT_OK


def cmd_run(args) -> int:
    sc = _load(args)
    out = Path(args.out)
    log.info("running %d days of %s with seed %d", args.runs, sc.name, args.seed)
    traces = run_ensemble(sc, args.runs, args.seed, args.workers)
    agg = aggregate(sc, traces, args.seed)
    files = {
        out / "aggregate.json": aggregate_json(agg),
        out / "aggregate.csv": aggregate_csv(agg),
    }
    if args.traces:
        width = max(4, len(str(args.runs - 1)))
        for tr in traces:
            files[out / "traces" / f"run_{tr.run_index:0{width}d}.csv"] = trace_csv(tr)
    try:
        for path, text in files.items():
            path.parent.mkdir(parents=True, exist_ok=True)
            with open(path, "w", encoding="utf-8", newline="") as fh:
                fh.write(text)
    except OSError as exc:
        _report_error(args, "io", f"cannot write output: {exc}")
        return EXIT_IO
    for path in files:
        print(path)
    return EXIT_OK


def _suggest(word, options):
    close = difflib.get_close_matches(word, list(options), n=3)
    return f" (did you mean {', '.join(close)}?)" if close else ""


def cmd_query(args) -> int:
    sc = _load(args)
    net = sc.network
    evidence = dict(sc.template.initial_state)
    try:
        for pair in args.evidence:
            name, sep, label = pair.partition("=")
            if not sep:
                raise UsageError(f"evidence must look like Node=label, got {pair!r}")
            if name not in net:
                raise UsageError(f"unknown node {name!r}{_suggest(name, net.names)}")
            if label not in net.states(name):
                raise UsageError(
                    f"unknown label {label!r} for {name}{_suggest(label, net.states(name))}; "
                    f"choose from {', '.join(net.states(name))}"
                )
            evidence[name] = label
        if args.node not in net:
            raise UsageError(f"unknown node {args.node!r}{_suggest(args.node, net.names)}")
    except UsageError as exc:
        _report_error(args, "usage", str(exc))
        return EXIT_USAGE
    try:
        dist = exact_marginal(net, args.node, evidence)
    except (InferenceError, UnknownNodeError, UnknownLabelError) as exc:
        _report_error(args, "inference", str(exc))
        return EXIT_INVALID
    if args.format == "json":
        print(json.dumps({"node": dist.node, "evidence": evidence, "probabilities": dict(dist.probs)}))
    else:
        print(f"P({dist.node} | {', '.join(f'{k}={v}' for k, v in evidence.items())})")
        for label, p in dist.probs.items():
            print(f"  {label:<16} {p:.6f}")
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="occupant-dbn", description=__doc__.splitlines()[0])
    parser.add_argument("-v", "--verbose", action="count", default=0)
    parser.add_argument("--format", choices=("text", "json"), default="text", help="output and diagnostics format")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = sub.add_parser("validate", help="check a scenario file")
    p.add_argument("scenario")
    p.set_defaults(func=cmd_validate)

    p = sub.add_parser("run", help="run a Monte Carlo ensemble and write results")
    p.add_argument("scenario")
    p.add_argument("--runs", type=_positive_int, default=100)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out", default="out")
    p.add_argument("--traces", action="store_true", help="also write one CSV per run")
    p.add_argument("--workers", type=_positive_int, default=1, help="worker processes")
    p.set_defaults(func=cmd_run)

    p = sub.add_parser("query", help="exact posterior of one node in a single slice")
    p.add_argument("scenario")
    p.add_argument("node")
    p.add_argument("evidence", nargs="*", metavar="NODE=LABEL")
    p.set_defaults(func=cmd_query)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.WARNING - 10 * min(args.verbose, 2), format="%(levelname)s %(message)s")
    try:
        return args.func(args)
    except SystemExit as exc:
        return int(exc.code)
    except OccupantDbnError as exc:
        _report_error(args, type(exc).__name__, str(exc))
        return EXIT_INVALID


if __name__ == "__main__":
    sys.exit(main())
