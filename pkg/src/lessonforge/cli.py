"""Command-line interface: scaffold, generate, inspect, preview, and serve.

Exit codes: 0 on success, 1 when the input lesson has validation errors
(or another content-level failure such as a cycle during linearization),
2 on usage or I/O problems. All output is deterministic for given inputs;
data goes to stdout, diagnostics to stderr.
"""

from __future__ import annotations

import argparse
import sys
from pathlib import Path

from .errors import LessonForgeError, ParseError, UnsupportedSchemaVersion
from .generator import deterministic_generate, full_plan_generate, llm_generate
from .graph import Severity, chain_from_sequence, linearize, validate
from .interchange import (
    export_runtime_sequence,
    load_lesson_file,
    parse_script,
    preview,
    save_lesson,
)
from .library import BUNDLED_LIBRARY_IDS, PhaseCategory, load_library
from .plan import Mode, PlanDocument
from .graph import LessonGraph
from . import service

EXIT_OK = 0
EXIT_VALIDATION = 1
EXIT_USAGE = 2


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="lessonforge",
        description="Author, validate, and preview outcome-oriented VR lesson plans.")
    commands = parser.add_subparsers(dest="command", required=True)

    new_cmd = commands.add_parser("new", help="write an empty lesson file")
    new_cmd.add_argument("--mode", choices=[m.value for m in Mode], default="welding")
    new_cmd.add_argument("--title", default="Untitled lesson")
    new_cmd.add_argument("--out", required=True, help="output lesson path")

    gen_cmd = commands.add_parser("generate",
                                  help="generate a full lesson from outcomes text")
    gen_cmd.add_argument("--outcomes", required=True, help="learning outcomes text")
    gen_cmd.add_argument("--library", default="welding",
                         help="bundled library id or a library file path")
    gen_cmd.add_argument("--generator", choices=["deterministic", "llm"],
                         default="deterministic")
    gen_cmd.add_argument("--title", default=None)
    gen_cmd.add_argument("--out", required=True, help="output lesson path")

    val_cmd = commands.add_parser("validate", help="print diagnostics for a lesson")
    val_cmd.add_argument("lesson", help="lesson file path")

    lin_cmd = commands.add_parser("linearize", help="print the DFS node order")
    lin_cmd.add_argument("lesson", help="lesson file path")

    pre_cmd = commands.add_parser("preview", help="replay the runtime instruction screen")
    pre_cmd.add_argument("lesson", help="lesson file path")
    pre_cmd.add_argument("--script", default=None,
                         help="script file: one next/jump <nodeId>/quit per line "
                              "(default: visit the whole sequence in order)")

    lib_cmd = commands.add_parser("libraries", help="list bundled activity libraries")
    lib_cmd.add_argument("--id", dest="library_id", default=None)
    lib_cmd.add_argument("--phase", default=None)

    serve_cmd = commands.add_parser("serve", help="run the HTTP authoring service")
    serve_cmd.add_argument("--state-dir", default=None,
                           help=f"defaults to ${service.ENV_STATE_DIR} or "
                                f"{service.DEFAULT_STATE_DIR}")
    serve_cmd.add_argument("--bind", default=None,
                           help=f"host:port, defaults to ${service.ENV_BIND_ADDR} or "
                                f"{service.DEFAULT_BIND_ADDR}")
    return parser


def _load_library_arg(value: str):
    return load_library(value if value in BUNDLED_LIBRARY_IDS else Path(value))


def cmd_new(args, out, err) -> int:
    doc = PlanDocument(mode=Mode(args.mode))
    save_lesson(doc, LessonGraph(), args.out, title=args.title)
    print(f"wrote {args.out}", file=err)
    return EXIT_OK


def cmd_generate(args, out, err) -> int:
    library = _load_library_arg(args.library)
    gen = deterministic_generate if args.generator == "deterministic" else llm_generate
    doc = full_plan_generate(args.outcomes, library, gen)
    graph = chain_from_sequence([ref.activity_id for ref in doc.activity_sequence],
                                library)
    title = args.title if args.title is not None else args.outcomes.strip()
    save_lesson(doc, graph, args.out, title=title, library=library)
    print(f"wrote {args.out}", file=err)
    return EXIT_OK


def cmd_validate(args, out, err) -> int:
    lesson = load_lesson_file(args.lesson)
    library = load_library(lesson.mode.value)
    diagnostics = validate(lesson.graph, library, stale_levels=lesson.plan.stale_levels)
    for diagnostic in diagnostics:
        print("\t".join([
            diagnostic.category.value,
            diagnostic.severity.value,
            ",".join(diagnostic.locus),
            diagnostic.message,
        ]), file=out)
    has_errors = any(d.severity is Severity.ERROR for d in diagnostics)
    return EXIT_VALIDATION if has_errors else EXIT_OK


def cmd_linearize(args, out, err) -> int:
    lesson = load_lesson_file(args.lesson)
    for node_id in linearize(lesson.graph):
        print(node_id, file=out)
    return EXIT_OK


def cmd_preview(args, out, err) -> int:
    lesson = load_lesson_file(args.lesson)
    library = load_library(lesson.mode.value)
    sequence = export_runtime_sequence(lesson.graph, library)
    if args.script is not None:
        script = parse_script(Path(args.script).read_text("utf-8"))
    else:
        script = [("next",)] * len(sequence.entries)
    out.write(preview(sequence, script))
    return EXIT_OK


def cmd_libraries(args, out, err) -> int:
    if args.library_id is None:
        for library_id in BUNDLED_LIBRARY_IDS:
            bundle = load_library(library_id)
            print(f"{bundle.library_id}\t{bundle.version}\t{len(bundle)}", file=out)
        return EXIT_OK
    bundle = _load_library_arg(args.library_id)
    descriptors = bundle.descriptors
    if args.phase is not None:
        descriptors = [d for d in descriptors
                       if d.phase is PhaseCategory.from_value(args.phase)]
    for descriptor in descriptors:
        print(f"{descriptor.activity_id}\t{descriptor.phase.value}\t{descriptor.name}",
              file=out)
    return EXIT_OK


def cmd_serve(args, out, err) -> int:
    service.serve(state_dir=args.state_dir, bind_addr=args.bind)
    return EXIT_OK


_COMMANDS = {
    "new": cmd_new,
    "generate": cmd_generate,
    "validate": cmd_validate,
    "linearize": cmd_linearize,
    "preview": cmd_preview,
    "libraries": cmd_libraries,
    "serve": cmd_serve,
}


def main(argv=None, out=None, err=None) -> int:
    out = out if out is not None else sys.stdout
    err = err if err is not None else sys.stderr
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_USAGE if exc.code else EXIT_OK
    try:
        return _COMMANDS[args.command](args, out, err)
    except (ParseError, UnsupportedSchemaVersion) as exc:
        # unreadable input files are operational failures, like missing paths
        print(f"{exc.code}: {exc.message}", file=err)
        return EXIT_USAGE
    except LessonForgeError as exc:
        print(f"{exc.code}: {exc.message}", file=err)
        return EXIT_VALIDATION
    except OSError as exc:
        print(f"IOError: {exc}", file=err)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
