"""Command line interface: classify, recommend, form, query, validate, serve.

Every subcommand goes through the same library code paths as the HTTP
server, so CLI output is byte-identical to the corresponding endpoint.
Exit codes: 0 success, 1 input error, 2 internal error.
"""

from __future__ import annotations

import argparse
import sys
from pathlib import Path

from .decision import Recommendation, recommend
from .errors import PortalError
from .form import build_form, emit_xml
from .hfs import parse_ontology
from .model import DecisionConfig, Ontology, merge
from .query import answer, bindings_to_json, parse_query
from .reasoner import classify, render_hierarchy
from .server import ServerConfig, serve
from .uiconfig import DEFAULT_UI_CONFIG, UiConfig, parse_ui_config, resolve_config


class CliUsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):  # input errors exit 1, not argparse's 2
        raise CliUsageError(message)


def _build_parser() -> _Parser:
    parser = _Parser(prog="hibou", description="ontology-driven decision-support portal")
    sub = parser.add_subparsers(dest="command", required=True)

    def add_common(p: _Parser, instance: bool = False, ui: bool = False, decision: bool = False):
        p.add_argument("-o", "--ontology", action="append", required=True, type=Path,
                       dest="ontologies", metavar="FILE.hfs",
                       help="ontology file; repeat to merge extensions onto the first")
        if instance:
            p.add_argument("-i", "--instance", required=True, help="individual name")
        if ui:
            p.add_argument("--ui-config", type=Path, help="UI configuration (.uicfg.hfs)")
        if decision:
            p.add_argument("--patient", default="Patient", help="patient class name")
            p.add_argument("--treatment", default="Treatment", help="treatment class name")
            p.add_argument("--reco", default="reco", help="recommendation property name")
        p.add_argument("--out", type=Path, help="write the output document here instead of stdout")

    p_classify = sub.add_parser("classify", help="print the reduced class hierarchy")
    add_common(p_classify)

    p_recommend = sub.add_parser("recommend", help="most specific recommended treatments")
    add_common(p_recommend, instance=True, decision=True)
    fmt = p_recommend.add_mutually_exclusive_group()
    fmt.add_argument("--json", action="store_true", default=True, help="JSON groups (default)")
    fmt.add_argument("--xml", action="store_true", help="recommendations as an XML fragment")

    p_form = sub.add_parser("form", help="generate the form XML for an individual")
    add_common(p_form, instance=True, ui=True, decision=True)
    p_form.add_argument("--xml", action="store_true", default=True, help="XML output (default)")

    p_query = sub.add_parser("query", help="answer a conjunctive query")
    add_common(p_query)
    p_query.add_argument("-q", "--query", required=True, help="query text")

    p_validate = sub.add_parser("validate", help="check ontology files")
    p_validate.add_argument("-o", "--ontology", action="append", required=True, type=Path,
                            dest="ontologies", metavar="FILE.hfs")
    p_validate.add_argument("--out", type=Path)

    p_serve = sub.add_parser("serve", help="run the portal server")
    p_serve.add_argument("--config", type=Path, help="key=value configuration file")
    p_serve.add_argument("--port", type=int, help="listen port (overrides the config file)")

    return parser


def _load_merged(paths: list[Path]) -> Ontology:
    onto = parse_ontology(paths[0].read_text(encoding="utf-8"))
    for path in paths[1:]:
        onto = merge(onto, parse_ontology(path.read_text(encoding="utf-8")))
    return onto


def _decision_config(args) -> DecisionConfig:
    return DecisionConfig(patient_class=args.patient, treatment_class=args.treatment, reco_prop=args.reco)


def _ui_config(args) -> UiConfig:
    if getattr(args, "ui_config", None) is not None:
        return resolve_config(parse_ui_config(args.ui_config.read_text(encoding="utf-8")))
    return resolve_config(DEFAULT_UI_CONFIG)


def _recommendations_xml(rec: Recommendation) -> str:
    if not rec.groups:
        return "<recommendations/>\n"
    lines = ["<recommendations>"]
    for group in rec.groups:
        treatments = "".join(f'<treatment class="{t}"/>' for t in group.members)
        lines.append(f"  <group>{treatments}</group>")
    lines.append("</recommendations>")
    return "\n".join(lines) + "\n"


def _emit(document: str, args) -> None:
    if getattr(args, "out", None) is not None:
        args.out.write_text(document, encoding="utf-8")
    else:
        sys.stdout.write(document)


def _run(args) -> int:
    if args.command == "classify":
        taxonomy = classify(_load_merged(args.ontologies))
        _emit(render_hierarchy(taxonomy), args)
        return 0
    if args.command == "recommend":
        taxonomy = classify(_load_merged(args.ontologies))
        rec = recommend(taxonomy, _decision_config(args), args.instance)
        _emit(_recommendations_xml(rec) if args.xml else rec.to_json(), args)
        return 0
    if args.command == "form":
        onto = _load_merged(args.ontologies)
        taxonomy = classify(onto)
        form = build_form(taxonomy, onto, _ui_config(args), _decision_config(args), args.instance)
        _emit(emit_xml(form), args)
        return 0
    if args.command == "query":
        onto = _load_merged(args.ontologies)
        taxonomy = classify(onto)
        solutions = answer(taxonomy, onto, parse_query(args.query))
        _emit(bindings_to_json(solutions), args)
        return 0
    if args.command == "validate":
        failures = []
        lines = []
        for path in args.ontologies:
            try:
                parse_ontology(path.read_text(encoding="utf-8"))
            except PortalError as exc:
                failures.append(path)
                lines.append(f"{path}: {exc}")
            except OSError as exc:
                failures.append(path)
                lines.append(f"{path}: {exc}")
        document = ("\n".join(lines) + "\n") if lines else "OK\n"
        _emit(document, args)
        return 1 if failures else 0
    if args.command == "serve":
        config = ServerConfig.from_file(args.config) if args.config else ServerConfig()
        if args.port is not None:
            config.port = args.port
        serve(config)
        return 0
    raise CliUsageError(f"unknown command {args.command}")


def main(argv: list[str] | None = None) -> int:
    parser = _build_parser()
    try:
        args = parser.parse_args(argv)
    except CliUsageError as exc:
        print(f"usage error: {exc}", file=sys.stderr)
        return 1
    try:
        return _run(args)
    except CliUsageError as exc:
        print(f"usage error: {exc}", file=sys.stderr)
        return 1
    except PortalError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except KeyboardInterrupt:
        return 130
    except Exception as exc:  # internal fault
        print(f"internal error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
