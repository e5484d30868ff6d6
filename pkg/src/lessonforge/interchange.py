"""Canonical lesson-file format, runtime-sequence export, and headless preview.

A lesson file carries both the Backward-design plan and the lesson graph in
one canonical JSON document: keys sorted, arrays in document order, UTF-8,
no insignificant whitespace, line-feed terminated. Serializing the same
content twice always yields identical bytes, which is what etags, golden
files, and cross-machine comparisons rely on.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from pathlib import Path

from .errors import (
    EmptyGraph,
    InvalidScript,
    ParseError,
    UnknownActivity,
    UnknownJumpTarget,
    UnsupportedSchemaVersion,
)
from .graph import Diagnostic, DiagnosticCategory, LessonGraph, linearize, validate
from .library import LibraryBundle, load_library
from .plan import Mode, PlanDocument

LESSON_SCHEMA_VERSION = 1
DEFAULT_TITLE = "Untitled lesson"


def canonical_json_bytes(payload) -> bytes:
    """Canonical encoding shared by lesson files and API bodies."""
    text = json.dumps(payload, ensure_ascii=False, separators=(",", ":"), sort_keys=True)
    return text.encode("utf-8") + b"\n"


@dataclass
class LessonFile:
    """In-memory image of one saved lesson."""

    title: str
    mode: Mode
    plan: PlanDocument
    graph: LessonGraph

    def to_payload(self) -> dict:
        return {
            "graph": self.graph.to_payload(),
            "mode": self.mode.value,
            "plan": self.plan.to_payload(),
            "schemaVersion": LESSON_SCHEMA_VERSION,
            "title": self.title,
        }

    def to_bytes(self) -> bytes:
        return canonical_json_bytes(self.to_payload())


def lesson_bytes(doc: PlanDocument, graph: LessonGraph,
                 title: str = DEFAULT_TITLE) -> bytes:
    return LessonFile(title=title, mode=doc.mode, plan=doc, graph=graph).to_bytes()


def parse_lesson_payload(payload) -> LessonFile:
    if not isinstance(payload, dict):
        raise ParseError("lesson file must be a JSON object")
    version = payload.get("schemaVersion")
    if version != LESSON_SCHEMA_VERSION:
        raise UnsupportedSchemaVersion(f"unsupported lesson schemaVersion {version!r}")
    doc = PlanDocument.from_payload(payload.get("plan") or {})
    graph = LessonGraph.from_payload(payload.get("graph") or {})
    try:
        mode = Mode(payload.get("mode", doc.mode.value))
    except ValueError:
        raise ParseError(f"unknown mode {payload.get('mode')!r}") from None
    doc.mode = mode
    return LessonFile(title=str(payload.get("title", DEFAULT_TITLE)),
                      mode=mode, plan=doc, graph=graph)


def parse_lesson_bytes(data: bytes) -> LessonFile:
    try:
        payload = json.loads(data.decode("utf-8"))
    except (UnicodeDecodeError, json.JSONDecodeError) as exc:
        raise ParseError(f"invalid lesson file: {exc}") from None
    return parse_lesson_payload(payload)


def save_lesson(doc: PlanDocument, graph: LessonGraph, path,
                title: str = DEFAULT_TITLE,
                library: LibraryBundle | None = None) -> bytes:
    """Write the canonical lesson file; returns the bytes written.

    Saving is refused only when a node references an activity missing from
    the active library; every other finding (cycles included) is advisory so
    work in progress can be saved.
    """
    bundle = library if library is not None else load_library(doc.mode.value)
    for diagnostic in validate(graph, bundle):
        if diagnostic.category is DiagnosticCategory.UNKNOWN_ACTIVITY:
            raise UnknownActivity(diagnostic.message, locus=diagnostic.locus[0])
    data = lesson_bytes(doc, graph, title)
    Path(path).write_bytes(data)
    return data


def load_lesson_file(path) -> LessonFile:
    return parse_lesson_bytes(Path(path).read_bytes())


def load_lesson(path) -> tuple[PlanDocument, LessonGraph]:
    lesson = load_lesson_file(path)
    return lesson.plan, lesson.graph


# ----------------------------------------------------------------------
# runtime sequence


@dataclass
class RuntimeEntry:
    """One instruction-screen button with fully resolved properties."""

    node_id: str
    activity_id: str
    label: str
    timing_seconds: float
    message: str
    hint_audio: bool
    hint_visual: bool

    def to_payload(self) -> dict:
        return {
            "activityId": self.activity_id,
            "hintAudio": self.hint_audio,
            "hintVisual": self.hint_visual,
            "label": self.label,
            "message": self.message,
            "nodeId": self.node_id,
            "timingSeconds": self.timing_seconds,
        }


@dataclass
class RuntimeSequence:
    """Linearized lesson plus the advisory findings raised while exporting."""

    entries: list[RuntimeEntry]
    warnings: list[Diagnostic] = field(default_factory=list)


def export_runtime_sequence(graph: LessonGraph,
                            library: LibraryBundle | None = None) -> RuntimeSequence:
    """Entries in DFS order with node-level overrides already resolved.

    Node properties start as the library defaults and carry any per-node
    overrides, so each entry reports exactly what the runtime should use.
    """
    order = linearize(graph)
    entries = []
    for node_id in order:
        node = graph.node(node_id)
        props = node.properties
        entries.append(RuntimeEntry(
            node_id=node.node_id,
            activity_id=node.activity_id,
            label=node.label,
            timing_seconds=props.timing_seconds,
            message=props.message,
            hint_audio=props.hint_audio,
            hint_visual=props.hint_visual,
        ))
    return RuntimeSequence(entries=entries, warnings=validate(graph, library))


# ----------------------------------------------------------------------
# preview


def parse_script(text: str) -> list[tuple]:
    """Parse a preview script: one ``next`` / ``jump <nodeId>`` / ``quit`` per line."""
    directives: list[tuple] = []
    for line_number, raw_line in enumerate(text.splitlines(), 1):
        line = raw_line.strip()
        if not line or line.startswith("#"):
            continue
        parts = line.split()
        if parts[0] == "next" and len(parts) == 1:
            directives.append(("next",))
        elif parts[0] == "quit" and len(parts) == 1:
            directives.append(("quit",))
        elif parts[0] == "jump" and len(parts) == 2:
            directives.append(("jump", parts[1]))
        else:
            raise InvalidScript(f"line {line_number}: unknown directive {line!r}")
    return directives


def _field_text(value: str) -> str:
    # Trace fields are tab-separated; flatten whitespace that would break them.
    return " ".join(str(value).split())


def _flag(value: bool) -> str:
    return "on" if value else "off"


def preview(sequence: RuntimeSequence, script: list[tuple]) -> str:
    """Emulate the instruction screen on a runtime sequence.

    The trace first lists every button in sequence order, then replays the
    script: each visited activity emits one tab-separated line, ``next`` past
    the final entry emits an ``end`` marker, and ``quit`` stops playback.
    """
    if not sequence.entries:
        raise EmptyGraph("cannot preview an empty runtime sequence")
    by_node = {entry.node_id: position for position, entry in enumerate(sequence.entries)}
    lines = []
    for position, entry in enumerate(sequence.entries, 1):
        lines.append(f"button\t{position}\t{entry.node_id}\t{_field_text(entry.label)}")
    cursor = -1
    for directive in script:
        if directive[0] == "next":
            if cursor + 1 < len(sequence.entries):
                cursor += 1
                lines.append(_visit_line(sequence.entries[cursor]))
            else:
                lines.append("end")
        elif directive[0] == "jump":
            target = directive[1]
            if target not in by_node:
                raise UnknownJumpTarget(f"no sequence entry {target!r}", locus=target)
            cursor = by_node[target]
            lines.append(_visit_line(sequence.entries[cursor]))
        else:
            lines.append("quit")
            break
    return "\n".join(lines) + "\n"


def _visit_line(entry: RuntimeEntry) -> str:
    return "\t".join([
        "visit",
        entry.node_id,
        _field_text(entry.label),
        json.dumps(entry.timing_seconds),
        _field_text(entry.message),
        _flag(entry.hint_audio),
        _flag(entry.hint_visual),
    ])
