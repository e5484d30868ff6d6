"""Learning-activity library: instructional phases, descriptor loading and
validation, and keyword queries over a loaded bundle.

Two bundles ship with the package: ``welding`` (27 activities) and ``demo``
(a 12-activity cooking/pizza set used for onboarding). Library files are
UTF-8 JSON with lowerCamelCase keys and a ``schemaVersion`` header.
"""

from __future__ import annotations

import json
import re
from dataclasses import dataclass, field
from enum import Enum
from importlib import resources
from pathlib import Path

from .errors import (
    DuplicateActivityId,
    EmptyPhase,
    InvalidProperty,
    ParseError,
    UnknownActivity,
    UnknownLibrary,
)

LIBRARY_SCHEMA_VERSION = 1

BUNDLED_LIBRARY_IDS = ("welding", "demo")

# The only node parameters an author may configure per activity instance.
EDITABLE_PROPERTY_NAMES = ("timing", "message", "hint")

_TOKEN_RE = re.compile(r"[a-z0-9]+")


class PhaseCategory(Enum):
    """The four instructional phases every library activity belongs to."""

    INTRODUCTION = "introduction"
    PRESENTATION = "presentation"
    PRACTICE = "practice"
    APPLICATION = "application"

    @property
    def order(self) -> int:
        return _PHASE_ORDER.index(self)

    @property
    def color(self) -> str:
        return _PHASE_COLORS[self]

    @classmethod
    def from_value(cls, value: str) -> "PhaseCategory":
        try:
            return cls(str(value).strip().lower())
        except ValueError:
            raise ParseError(f"unknown phase {value!r}") from None


_PHASE_ORDER = (
    PhaseCategory.INTRODUCTION,
    PhaseCategory.PRESENTATION,
    PhaseCategory.PRACTICE,
    PhaseCategory.APPLICATION,
)

# Fixed, distinct display colors used for node color-coding.
_PHASE_COLORS = {
    PhaseCategory.INTRODUCTION: "#4f8df7",
    PhaseCategory.PRESENTATION: "#f2a93b",
    PhaseCategory.PRACTICE: "#3fb68b",
    PhaseCategory.APPLICATION: "#e06666",
}


@dataclass
class NodeProperties:
    """Per-instance activity parameters; defaults come from the descriptor."""

    timing_seconds: float = 60
    message: str = ""
    hint_audio: bool = False
    hint_visual: bool = False

    def validate(self) -> None:
        if not isinstance(self.timing_seconds, (int, float)) or isinstance(self.timing_seconds, bool):
            raise InvalidProperty("timingSeconds must be a number")
        if self.timing_seconds <= 0:
            raise InvalidProperty("timingSeconds must be positive")
        if not isinstance(self.message, str):
            raise InvalidProperty("message must be a string")
        if not isinstance(self.hint_audio, bool) or not isinstance(self.hint_visual, bool):
            raise InvalidProperty("hint flags must be booleans")

    def copy(self) -> "NodeProperties":
        return NodeProperties(self.timing_seconds, self.message, self.hint_audio, self.hint_visual)

    def to_payload(self) -> dict:
        return {
            "hintAudio": self.hint_audio,
            "hintVisual": self.hint_visual,
            "message": self.message,
            "timingSeconds": self.timing_seconds,
        }

    @classmethod
    def from_payload(cls, payload: dict) -> "NodeProperties":
        props = cls(
            timing_seconds=payload.get("timingSeconds", 60),
            message=payload.get("message", ""),
            hint_audio=payload.get("hintAudio", False),
            hint_visual=payload.get("hintVisual", False),
        )
        props.validate()
        return props


@dataclass
class ActivityDescriptor:
    """One library entry; ``keywords[0]`` is the activity's primary topic tag."""

    activity_id: str
    name: str
    phase: PhaseCategory
    description: str
    keywords: tuple[str, ...]
    default_properties: NodeProperties
    editable_properties: tuple[str, ...] = EDITABLE_PROPERTY_NAMES

    def to_payload(self) -> dict:
        return {
            "activityId": self.activity_id,
            "defaultProperties": self.default_properties.to_payload(),
            "description": self.description,
            "editableProperties": list(self.editable_properties),
            "keywords": list(self.keywords),
            "name": self.name,
            "phase": self.phase.value,
        }


@dataclass
class LibraryBundle:
    """An immutable, validated set of activity descriptors."""

    library_id: str
    version: str
    descriptors: list[ActivityDescriptor]
    _by_id: dict[str, ActivityDescriptor] = field(default_factory=dict, repr=False)

    def __post_init__(self):
        self._by_id = {d.activity_id: d for d in self.descriptors}

    def __contains__(self, activity_id: str) -> bool:
        return activity_id in self._by_id

    def __len__(self) -> int:
        return len(self.descriptors)

    def get(self, activity_id: str) -> ActivityDescriptor:
        try:
            return self._by_id[activity_id]
        except KeyError:
            raise UnknownActivity(f"activity {activity_id!r} is not in library "
                                  f"{self.library_id!r}", locus=activity_id) from None

    def to_payload(self) -> dict:
        return {
            "descriptors": [d.to_payload() for d in self.descriptors],
            "libraryId": self.library_id,
            "schemaVersion": LIBRARY_SCHEMA_VERSION,
            "version": self.version,
        }


def tokenize(text: str) -> list[str]:
    """Lowercase alphanumeric tokens of ``text``, in order of appearance."""
    return _TOKEN_RE.findall(text.lower())


def rank_by_keywords(entries, tokens) -> list[tuple]:
    """Rank keyword-bearing entries against a token set.

    Returns ``(entry, match_count)`` pairs for every entry whose keywords
    intersect ``tokens``, ordered by match count descending, then original
    entry order. Pure function of its inputs.
    """
    token_set = frozenset(tokens)
    scored = []
    for position, entry in enumerate(entries):
        count = sum(1 for keyword in entry.keywords if keyword in token_set)
        if count:
            scored.append((position, entry, count))
    scored.sort(key=lambda item: (-item[2], item[0]))
    return [(entry, count) for _position, entry, count in scored]


def match_keywords(bundle: LibraryBundle, tokens) -> list[ActivityDescriptor]:
    """Descriptors with at least one keyword in ``tokens``, rank ordered."""
    return [descriptor for descriptor, _count in rank_by_keywords(bundle.descriptors, tokens)]


def list_by_phase(bundle: LibraryBundle, phase: PhaseCategory) -> list[ActivityDescriptor]:
    """Descriptors of one phase, in library order."""
    return [d for d in bundle.descriptors if d.phase is phase]


_BUNDLE_CACHE: dict[str, LibraryBundle] = {}


def load_library(source) -> LibraryBundle:
    """Load and validate a library from a bundled id or a file path.

    Bundled bundles are cached; they are immutable after load. Validation
    failures carry file/line context where the offending value can be found.
    """
    if isinstance(source, str) and source in BUNDLED_LIBRARY_IDS:
        if source not in _BUNDLE_CACHE:
            text = resources.files("lessonforge.data").joinpath(f"{source}.json").read_text("utf-8")
            _BUNDLE_CACHE[source] = _parse_library(text, origin=f"bundled:{source}")
        return _BUNDLE_CACHE[source]
    path = Path(source)
    if not path.exists():
        raise UnknownLibrary(f"no bundled library or file named {source!r}")
    return _parse_library(path.read_text("utf-8"), origin=str(path))


def _line_of(text: str, needle: str, occurrence: int = 1) -> int | None:
    """1-based line of the n-th occurrence of ``needle``, if present."""
    start = -1
    for _ in range(occurrence):
        start = text.find(needle, start + 1)
        if start < 0:
            return None
    return text.count("\n", 0, start) + 1


def _parse_library(text: str, origin: str) -> LibraryBundle:
    try:
        payload = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ParseError(f"{origin}:{exc.lineno}: invalid JSON: {exc.msg}") from None
    if not isinstance(payload, dict):
        raise ParseError(f"{origin}: library file must be a JSON object")
    if payload.get("schemaVersion") != LIBRARY_SCHEMA_VERSION:
        raise ParseError(f"{origin}: unsupported library schemaVersion "
                         f"{payload.get('schemaVersion')!r}")
    library_id = payload.get("libraryId")
    version = payload.get("version")
    raw_descriptors = payload.get("descriptors")
    if not isinstance(library_id, str) or not library_id:
        raise ParseError(f"{origin}: libraryId must be a non-empty string")
    if not isinstance(version, str) or not version:
        raise ParseError(f"{origin}: version must be a non-empty string")
    if not isinstance(raw_descriptors, list) or not raw_descriptors:
        raise ParseError(f"{origin}: descriptors must be a non-empty array")

    descriptors: list[ActivityDescriptor] = []
    seen: set[str] = set()
    for index, raw in enumerate(raw_descriptors):
        where = f"{origin}: descriptor #{index + 1}"
        if not isinstance(raw, dict):
            raise ParseError(f"{where}: must be an object")
        activity_id = raw.get("activityId")
        if not isinstance(activity_id, str) or not activity_id:
            raise ParseError(f"{where}: activityId must be a non-empty string")
        if activity_id in seen:
            line = _line_of(text, f'"{activity_id}"', occurrence=2)
            at = f"{origin}:{line}" if line else where
            raise DuplicateActivityId(f"{at}: duplicate activityId {activity_id!r}",
                                      locus=activity_id)
        seen.add(activity_id)
        name = raw.get("name")
        if not isinstance(name, str) or not name:
            raise ParseError(f"{where} ({activity_id}): name must be a non-empty string")
        try:
            phase = PhaseCategory.from_value(raw.get("phase"))
        except ParseError as exc:
            raise ParseError(f"{where} ({activity_id}): {exc.message}") from None
        keywords = raw.get("keywords")
        if (not isinstance(keywords, list) or not keywords
                or any(not isinstance(k, str) or not k for k in keywords)):
            raise ParseError(f"{where} ({activity_id}): keywords must be a non-empty "
                             "list of strings")
        if any(k != k.lower() for k in keywords):
            raise ParseError(f"{where} ({activity_id}): keywords must be lowercase")
        try:
            defaults = NodeProperties.from_payload(raw.get("defaultProperties") or {})
        except InvalidProperty as exc:
            raise ParseError(f"{where} ({activity_id}): defaultProperties: {exc.message}") from None
        editable = raw.get("editableProperties", list(EDITABLE_PROPERTY_NAMES))
        if (not isinstance(editable, list)
                or any(p not in EDITABLE_PROPERTY_NAMES for p in editable)):
            raise ParseError(f"{where} ({activity_id}): editableProperties must be a "
                             f"subset of {EDITABLE_PROPERTY_NAMES}")
        descriptors.append(ActivityDescriptor(
            activity_id=activity_id,
            name=name,
            phase=phase,
            description=str(raw.get("description", "")),
            keywords=tuple(keywords),
            default_properties=defaults,
            editable_properties=tuple(editable),
        ))

    for phase in _PHASE_ORDER:
        if not any(d.phase is phase for d in descriptors):
            raise EmptyPhase(f"{origin}: no descriptors in phase {phase.value!r}",
                             locus=phase.value)
    return LibraryBundle(library_id=library_id, version=version, descriptors=descriptors)
