"""``perdura`` command-line entry point.

Exit codes: 0 success, 1 validation or answerability failure, 2 usage
error, 3 unreadable or unparsable input. Every failure writes a single
``error[CODE]: message`` line to stderr.
"""

from __future__ import annotations

import argparse
import os
import sys
import warnings
from pathlib import Path
from typing import Sequence, TextIO

from . import __version__
from .boro import BoroVerdict, WizardSession, classify_batch, wizard_step
from .documents import canonical_json, load_model, load_op, load_orm, read_json
from .errors import InputError, PerduraError
from .instances import load_instances
from .orm import OrmSchema, print_orm, validate, verbalize
from .quality import extensibility_diff, load_reference, report
from .query import (
    UnboundStateWarning,
    change_points,
    count_parts,
    history,
    load_cqs,
    related,
    state_initiation,
    value_at,
)
from .reengine import load_script, reengineer
from .temporal import format_instant

EXIT_OK, EXIT_INVALID, EXIT_USAGE, EXIT_INPUT = 0, 1, 2, 3


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(message)


def _use_color(stream: TextIO) -> bool:
    flag = os.environ.get("PERDURA_COLOR")
    if flag == "1":
        return True
    if flag == "0":
        return False
    return hasattr(stream, "isatty") and stream.isatty()


def diagnose(code: str, message: str, stream: TextIO | None = None) -> None:
    stream = stream or sys.stderr
    prefix = f"error[{code}]:"
    if _use_color(stream):
        prefix = f"\x1b[31m{prefix}\x1b[0m"
    first_line = " ".join(str(message).split())
    print(f"{prefix} {first_line}", file=stream)


def _emit(text: str, out: str | None) -> None:
    if out:
        Path(out).write_text(text, encoding="utf-8")
    else:
        sys.stdout.write(text)


# ----------------------------------------------------------------- commands


def cmd_parse_orm(args) -> int:
    schema = load_orm(args.input)
    _emit(canonical_json(schema.to_document()), args.output)
    findings = validate(schema)
    for f in findings:
        diagnose(f.kind, f"{f.element}: {f.detail}")
    return EXIT_INVALID if findings else EXIT_OK


def cmd_print_orm(args) -> int:
    _emit(print_orm(load_orm(args.input)), args.output)
    return EXIT_OK


def cmd_verbalize(args) -> int:
    schema = load_orm(args.input)
    _emit("".join(s + "\n" for s in verbalize(schema)), args.output)
    return EXIT_OK


def cmd_classify(args) -> int:
    if args.interactive:
        if args.names or args.batch:
            raise UsageError("--interactive takes a single concept name and no --batch")
        verdict = _run_wizard(args.interactive, sys.stdin, sys.stderr)
        if verdict is None:
            diagnose("InsufficientAnswers", f"input ended before {args.interactive!r} was classified")
            return EXIT_INVALID
        _emit(canonical_json(verdict.to_json()), args.output)
        return EXIT_OK
    if not args.batch or not args.names:
        raise UsageError("classify needs --interactive NAME or --batch ANSWERS NAME...")
    verdicts = classify_batch(args.names, args.batch)
    _emit(canonical_json([v.to_json() for v in verdicts]), args.output)
    return EXIT_OK


_ANSWERS = {"y": True, "yes": True, "n": False, "no": False, "?": None, "": None}


def _run_wizard(name: str, stdin: TextIO, prompt: TextIO) -> BoroVerdict | None:
    session = WizardSession(name)
    while session.verdict is None:
        prompt.write(f"{name}: {session.pending_question} [y/n/?] ")
        prompt.flush()
        line = stdin.readline()
        if not line:
            prompt.write("\n")
            return None
        reply = line.strip().lower()
        if reply not in _ANSWERS:
            prompt.write("please answer y, n or ?\n")
            continue
        if _ANSWERS[reply] is None:
            prompt.write("unknown; the question stays open\n")
            continue
        session, _ = wizard_step(session, _ANSWERS[reply])
    return session.verdict


def cmd_reengineer(args) -> int:
    schema = load_orm(args.input)
    result = reengineer(schema, load_script(args.script))
    _emit(canonical_json(result.ontology.to_document()), args.output)
    if args.provenance:
        Path(args.provenance).write_text(canonical_json(result.provenance), encoding="utf-8")
    return EXIT_OK


def cmd_load(args) -> int:
    ontology = load_instances(load_op(args.schema), read_json(args.instances))
    _emit(canonical_json(ontology.to_document()), args.output)
    return EXIT_OK


def cmd_query(args) -> int:
    ont = load_op(args.ontology)
    q, rest = args.question, args.args
    need = {"count": 3, "related": 2, "value-at": 3, "history": 2, "initiation": 2}[q]
    if len(rest) != need:
        raise UsageError(f"query {q} takes {need} arguments, got {len(rest)}")
    if q == "count":
        result = {"count": count_parts(ont, *rest)}
    elif q == "related":
        result = {"related": sorted(related(ont, *rest))}
    elif q == "value-at":
        result = {"value": value_at(ont, *rest)}
    elif q == "history":
        entries = history(ont, *rest)
        result = {
            "history": [e.to_json() for e in entries],
            "change_points": [format_instant(t) for t in change_points(entries)],
        }
    else:
        with warnings.catch_warnings(record=True) as caught:
            warnings.simplefilter("always", UnboundStateWarning)
            instant = state_initiation(ont, *rest)
        for w in caught:
            print(f"warning: {w.message}", file=sys.stderr)
        result = {"initiation": None if instant is None else format_instant(instant)}
    _emit(canonical_json(result), args.output)
    return EXIT_OK


def cmd_lint(args) -> int:
    schema = load_model(args.input)
    cqs = load_cqs(args.cqs) if args.cqs else []
    provenance = read_json(args.provenance) if args.provenance else None
    previous = load_model(args.previous) if args.previous else None
    rep = report(
        schema,
        load_reference(args.reference),
        cqs,
        provenance=provenance,
        previous=previous,
        trace_ref=args.provenance,
    )
    text = rep.render_text() if args.format == "text" else canonical_json(rep.to_json())
    _emit(text, args.output)
    return EXIT_OK if rep.clean else EXIT_INVALID


def cmd_diff(args) -> int:
    before, after = load_model(args.before), load_model(args.after)
    if isinstance(before, OrmSchema) != isinstance(after, OrmSchema):
        raise UsageError("diff needs two models of the same kind")
    _emit(canonical_json(extensibility_diff(before, after)), args.output)
    return EXIT_OK


def cmd_export_triples(args) -> int:
    _emit(load_op(args.input).export_triples(), args.output)
    return EXIT_OK


# ------------------------------------------------------------------- parser


def build_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="perdura", description="4D ontology engineering toolkit")
    p.add_argument("--version", action="version", version=f"perdura {__version__}")
    sub = p.add_subparsers(dest="verb", parser_class=_Parser, required=True)

    def verb(name, func, help_text):
        sp = sub.add_parser(name, help=help_text)
        sp.set_defaults(func=func)
        sp.add_argument("-o", "--output", help="write to this file instead of stdout")
        return sp

    sp = verb("parse-orm", cmd_parse_orm, "parse an .orm file into canonical JSON")
    sp.add_argument("input")
    sp = verb("print-orm", cmd_print_orm, "print a schema in .orm line syntax")
    sp.add_argument("input")
    sp = verb("verbalize", cmd_verbalize, "render a schema as English sentences")
    sp.add_argument("input")

    sp = verb("classify", cmd_classify, "BORO classification")
    sp.add_argument("--interactive", metavar="NAME")
    sp.add_argument("--batch", metavar="ANSWERS")
    sp.add_argument("names", nargs="*")

    sp = verb("reengineer", cmd_reengineer, "apply a decision script to an ORM schema")
    sp.add_argument("input")
    sp.add_argument("--script", required=True)
    sp.add_argument("--provenance", metavar="PATH", help="also write the provenance trace")

    sp = verb("load", cmd_load, "load instance data onto an OP schema")
    sp.add_argument("schema")
    sp.add_argument("instances")

    sp = verb("query", cmd_query, "instance queries over a populated ontology")
    sp.add_argument("ontology")
    sp.add_argument("question", choices=["count", "related", "value-at", "history", "initiation"])
    sp.add_argument("args", nargs="*")

    sp = verb("lint", cmd_lint, "construct-quality report")
    sp.add_argument("input")
    sp.add_argument("--reference", required=True)
    sp.add_argument("--cqs")
    sp.add_argument("--provenance")
    sp.add_argument("--previous", help="earlier model version, for the extensibility diff")
    sp.add_argument("--format", choices=["json", "text"], default="json")

    sp = verb("diff", cmd_diff, "schema-level extensibility diff")
    sp.add_argument("before")
    sp.add_argument("after")

    sp = verb("export-triples", cmd_export_triples, "line-oriented triple export")
    sp.add_argument("input")
    return p


def run(argv: Sequence[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        return args.func(args)
    except UsageError as exc:
        diagnose("usage", exc)
        return EXIT_USAGE
    except InputError as exc:
        diagnose(exc.code, exc)
        return EXIT_INPUT
    except OSError as exc:
        diagnose(type(exc).__name__, f"{exc.filename or ''}: {exc.strerror}")
        return EXIT_INPUT
    except PerduraError as exc:
        diagnose(exc.code, exc)
        return EXIT_INVALID


def main() -> None:
    sys.exit(run())


if __name__ == "__main__":
    main()
