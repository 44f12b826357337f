"""Command-line interface.

Subcommands operate on a workspace directory of ``.ced``, ``.msl`` and
``.cet`` sources:

    commev parse [ROOT]                  structural summary
    commev lint [ROOT] [--format=json]   diagnostics; exit 0/1/2
    commev render [ROOT] [--dot]         merged precedence graph as DOT
    commev derive [ROOT] [--json|--dot]  derived class model
    commev order [ROOT]                  events in temporal order
    commev template gen EVENT_ID [ROOT]  a prefilled .cet skeleton
    commev template check [ROOT]         template consistency findings

Exit codes: 0 success without errors, 1 the report contains errors,
2 usage, parse or IO failure.  ``CA_NO_COLOR`` disables terminal colour.
"""

from __future__ import annotations

import argparse
import dataclasses
import os
import sys

from .base import ModelError
from .derive import class_model_to_dot, class_model_to_json, derive_class_model
from .diagnostics import Severity
from .dot import graph_to_dot
from .graph import topological_order
from .lint import LintConfig, LintReport, run_lints
from .templates import check_template, generate_template, serialize_template
from .workspace import Workspace, discover

_COLORS = {Severity.ERROR: "\x1b[31m", Severity.WARNING: "\x1b[33m", Severity.INFO: "\x1b[36m"}
_RESET = "\x1b[0m"


def _use_color(stream) -> bool:
    return stream.isatty() and not os.environ.get("CA_NO_COLOR")


def _print_report(report: LintReport, fmt: str, out) -> None:
    if fmt == "json":
        out.write(report.to_json())
        return
    color = _use_color(out)
    for diagnostic in report.diagnostics:
        line = diagnostic.render()
        if color:
            line = _COLORS[diagnostic.severity] + line + _RESET
        out.write(line + "\n")
    out.write(
        f"{report.count(Severity.ERROR)} errors, {report.count(Severity.WARNING)} warnings, "
        f"{report.count(Severity.INFO)} infos\n"
    )


def _workspace(args: argparse.Namespace) -> Workspace:
    ws = discover(args.root, args.config)
    overrides: dict = {}
    if args.stage:
        overrides["stage"] = args.stage
    if getattr(args, "strict_table9_c4", False):
        overrides["strict_table_c4"] = True
    if overrides:
        ws.config = dataclasses.replace(ws.config, **overrides)
    return ws


def _cmd_parse(args: argparse.Namespace) -> int:
    ws = _workspace(args)
    repo = ws.load_repository()
    out = sys.stdout
    for acronym in sorted(repo.processes):
        process = repo.processes[acronym]
        events = [e for e in repo.events if e.process == acronym]
        out.write(f'process {acronym} "{process.name}": {len(events)} events\n')
    for diagram in sorted(repo.diagrams, key=lambda d: d.name):
        out.write(
            f'diagram "{diagram.name}": {len(diagram.events)} events, '
            f"{len(diagram.externs)} externs, {len(diagram.logical)} logical nodes, "
            f"{len(diagram.edges)} edges\n"
        )
    from . import msl

    for name in sorted(repo.message_structures):
        structure = repo.message_structures[name]
        out.write(f"message structure {name}: {len(msl.collect_fields(structure))} fields\n")
    for spec in sorted(repo.templates, key=lambda s: s.header.event_id):
        out.write(f'template "{spec.header.event_id}"\n')
    return 0


def _cmd_lint(args: argparse.Namespace) -> int:
    ws = _workspace(args)
    repo = ws.load_repository()
    report = run_lints(repo, ws.config)
    _print_report(report, args.format, sys.stdout)
    return 1 if report.errors() else 0


def _cmd_render(args: argparse.Namespace) -> int:
    ws = _workspace(args)
    repo = ws.load_repository()
    sys.stdout.write(graph_to_dot(repo))
    return 0


def _cmd_derive(args: argparse.Namespace) -> int:
    ws = _workspace(args)
    repo = ws.load_repository()
    report = run_lints(repo, ws.config)
    if report.errors():
        _print_report(report, "text", sys.stderr)
        sys.stderr.write("derive: refusing to run on a model with errors\n")
        return 1
    model, findings = derive_class_model(repo)
    for diagnostic in findings:
        sys.stderr.write(diagnostic.render() + "\n")
    if args.dot:
        sys.stdout.write(class_model_to_dot(model))
    else:
        sys.stdout.write(class_model_to_json(model))
    return 0


def _cmd_order(args: argparse.Namespace) -> int:
    ws = _workspace(args)
    repo = ws.load_repository()
    for event in topological_order(repo):
        sys.stdout.write(f"{event.id}\t{event.name}\n")
    return 0


def _cmd_template(args: argparse.Namespace) -> int:
    ws = _workspace(args)
    repo = ws.load_repository()
    if args.template_action == "gen":
        spec = generate_template(repo, args.event_id)
        text = serialize_template(spec)
        if args.out:
            with open(args.out, "w", encoding="utf-8") as handle:
                handle.write(text)
        else:
            sys.stdout.write(text)
        return 0
    findings = []
    for spec in repo.templates:
        findings.extend(check_template(spec, repo))
    findings.sort(key=lambda d: d.sort_key)
    report = LintReport(tuple(findings))
    _print_report(report, args.format, sys.stdout)
    return 1 if report.errors() else 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="commev",
        description="Parse, validate and transform communicative event models.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p: argparse.ArgumentParser, root: bool = True) -> None:
        if root:
            p.add_argument("root", nargs="?", default=".", help="workspace directory")
        p.add_argument("--config", default=None, help="configuration file path")
        p.add_argument(
            "--stage",
            choices=("analysis", "design-memory", "design-interface"),
            default=None,
            help="development stage for structure checks",
        )
        p.add_argument(
            "--strict-table9-c4",
            dest="strict_table9_c4",
            action="store_true",
            help="check or nodes as 1 incoming / >=2 outgoing",
        )

    p = sub.add_parser("parse", help="parse the workspace and print a summary")
    common(p)
    p.set_defaults(func=_cmd_parse)

    p = sub.add_parser("lint", help="run all checks")
    common(p)
    p.add_argument("--format", choices=("text", "json"), default="text")
    p.set_defaults(func=_cmd_lint)

    p = sub.add_parser("render", help="emit the merged precedence graph as DOT")
    common(p)
    p.add_argument("--dot", action="store_true", help="DOT output (the default)")
    p.set_defaults(func=_cmd_render)

    p = sub.add_parser("derive", help="derive the class model")
    common(p)
    group = p.add_mutually_exclusive_group()
    group.add_argument("--json", action="store_true", help="JSON output (the default)")
    group.add_argument("--dot", action="store_true", help="DOT output")
    p.set_defaults(func=_cmd_derive)

    p = sub.add_parser("order", help="print events in temporal precedence order")
    common(p)
    p.set_defaults(func=_cmd_order)

    p = sub.add_parser("template", help="generate or check event templates")
    tsub = p.add_subparsers(dest="template_action", required=True)
    tgen = tsub.add_parser("gen", help="write a template skeleton for an event")
    tgen.add_argument("event_id", help='event id, e.g. "SALE 1"')
    common(tgen)
    tgen.add_argument("--out", default=None, help="write to a file instead of stdout")
    tgen.set_defaults(func=_cmd_template)
    tcheck = tsub.add_parser("check", help="check every template in the workspace")
    common(tcheck)
    tcheck.add_argument("--format", choices=("text", "json"), default="text")
    tcheck.set_defaults(func=_cmd_template)

    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return 2 if exc.code not in (0, None) else 0
    try:
        return args.func(args)
    except ModelError as exc:
        sys.stderr.write(f"error: {exc}\n")
        return 2
    except OSError as exc:
        sys.stderr.write(f"error: {exc}\n")
        return 2


if __name__ == "__main__":
    sys.exit(main())
