"""Backward-design plan document.

A :class:`PlanDocument` holds the outcome statement plus the generated lists
for objectives, skills, assessment criteria, and the activity sequence.
Edits follow the hierarchy's precedence order: regenerating a level rebuilds
everything below it and never touches anything above it, while local edits
only flag lower levels as stale. Every mutation goes through the document's
undo stack.
"""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum, IntEnum

from .errors import (
    DanglingLink,
    EmptyOutcomes,
    EmptyText,
    GeneratorFailure,
    MissingParentLevel,
    NothingToUndo,
    ParseError,
    UnknownActivity,
    UnknownItem,
)
from .history import Command, History
from .library import LibraryBundle, load_library

DEFAULT_ITEM_COUNT = 3


class HierarchyLevel(IntEnum):
    """The five Backward-design levels; smaller values take precedence."""

    OUTCOMES = 0
    OBJECTIVES = 1
    SKILLS = 2
    ASSESSMENT = 3
    ACTIVITIES = 4

    @property
    def key(self) -> str:
        return self.name.lower()

    @classmethod
    def from_key(cls, key: str) -> "HierarchyLevel":
        normalized = str(key).strip().lower()
        if normalized == "criteria":
            normalized = "assessment"
        for level in cls:
            if level.key == normalized:
                return level
        raise ParseError(f"unknown hierarchy level {key!r}")


ITEM_LEVELS = (HierarchyLevel.OBJECTIVES, HierarchyLevel.SKILLS, HierarchyLevel.ASSESSMENT)
GENERATABLE_LEVELS = ITEM_LEVELS + (HierarchyLevel.ACTIVITIES,)

_ID_PREFIXES = {
    HierarchyLevel.OBJECTIVES: "obj",
    HierarchyLevel.SKILLS: "skl",
    HierarchyLevel.ASSESSMENT: "crt",
}


class Provenance(Enum):
    GENERATED = "generated"
    MANUAL = "manual"


class Mode(Enum):
    DEMO = "demo"
    WELDING = "welding"


@dataclass
class PlanItem:
    """One objective, skill, or assessment criterion."""

    item_id: str
    text: str
    provenance: Provenance = Provenance.GENERATED
    revision: int = 1
    link: str | None = None

    def to_payload(self) -> dict:
        return {
            "id": self.item_id,
            "link": self.link,
            "provenance": self.provenance.value,
            "revision": self.revision,
            "text": self.text,
        }

    @classmethod
    def from_payload(cls, payload: dict) -> "PlanItem":
        try:
            return cls(
                item_id=str(payload["id"]),
                text=str(payload["text"]),
                provenance=Provenance(payload.get("provenance", "generated")),
                revision=int(payload.get("revision", 1)),
                link=payload.get("link"),
            )
        except (KeyError, ValueError, TypeError) as exc:
            raise ParseError(f"malformed plan item: {exc}") from None


@dataclass
class ActivityRef:
    """One entry of the activity sequence: a library id plus an instance id."""

    activity_id: str
    instance_id: str

    def to_payload(self) -> dict:
        return {"activityId": self.activity_id, "instanceId": self.instance_id}

    @classmethod
    def from_payload(cls, payload: dict) -> "ActivityRef":
        try:
            return cls(str(payload["activityId"]), str(payload["instanceId"]))
        except (KeyError, TypeError) as exc:
            raise ParseError(f"malformed activity reference: {exc}") from None


class PlanDocument:
    """Mutable plan state plus its undo history.

    All mutating operations are methods that push a command onto
    ``self.history``; ``undo``/``redo`` restore exact structural state,
    including revision counters, so content hashes round-trip.
    """

    def __init__(self, mode: Mode = Mode.WELDING):
        self.outcomes = ""
        self.objectives: list[PlanItem] = []
        self.skills: list[PlanItem] = []
        self.criteria: list[PlanItem] = []
        self.activity_sequence: list[ActivityRef] = []
        self.mode = mode
        self.document_revision = 0
        self.stale_levels: set[HierarchyLevel] = set()
        self.id_counter = 0
        self.history = History()

    # ------------------------------------------------------------------
    # structure access

    def items_at(self, level: HierarchyLevel) -> list[PlanItem]:
        if level is HierarchyLevel.OBJECTIVES:
            return self.objectives
        if level is HierarchyLevel.SKILLS:
            return self.skills
        if level is HierarchyLevel.ASSESSMENT:
            return self.criteria
        raise ValueError(f"level {level.key} has no item list")

    def get_item(self, level: HierarchyLevel, item_id: str) -> PlanItem:
        for item in self.items_at(level):
            if item.item_id == item_id:
                return item
        raise UnknownItem(f"no item {item_id!r} at level {level.key}", locus=item_id)

    def level_is_empty(self, level: HierarchyLevel) -> bool:
        if level is HierarchyLevel.OUTCOMES:
            return not self.outcomes.strip()
        if level is HierarchyLevel.ACTIVITIES:
            return not self.activity_sequence
        return not self.items_at(level)

    def parent_pairs(self, level: HierarchyLevel) -> list[tuple[str, str]]:
        """(id, text) pairs of the level directly above ``level``."""
        if level is HierarchyLevel.OBJECTIVES:
            return []
        parent_level = HierarchyLevel(level - 1)
        return [(item.item_id, item.text) for item in self.items_at(parent_level)]

    def _mint_id(self, level: HierarchyLevel) -> str:
        self.id_counter += 1
        return f"{_ID_PREFIXES[level]}-{self.id_counter}"

    def _resolve_library(self, library: LibraryBundle | None) -> LibraryBundle:
        return library if library is not None else load_library(self.mode.value)

    @staticmethod
    def _levels_below(level: HierarchyLevel) -> set[HierarchyLevel]:
        return {lv for lv in GENERATABLE_LEVELS if lv > level}

    # ------------------------------------------------------------------
    # serialization

    def to_payload(self) -> dict:
        return {
            "activitySequence": [ref.to_payload() for ref in self.activity_sequence],
            "criteria": [item.to_payload() for item in self.criteria],
            "documentRevision": self.document_revision,
            "idCounter": self.id_counter,
            "mode": self.mode.value,
            "objectives": [item.to_payload() for item in self.objectives],
            "outcomes": self.outcomes,
            "skills": [item.to_payload() for item in self.skills],
            "staleLevels": [lv.key for lv in GENERATABLE_LEVELS if lv in self.stale_levels],
        }

    def level_payload(self, level: HierarchyLevel):
        """JSON-able snapshot of one level's content, used for byte diffs."""
        if level is HierarchyLevel.OUTCOMES:
            return self.outcomes
        if level is HierarchyLevel.ACTIVITIES:
            return [ref.to_payload() for ref in self.activity_sequence]
        return [item.to_payload() for item in self.items_at(level)]

    @classmethod
    def from_payload(cls, payload: dict) -> "PlanDocument":
        if not isinstance(payload, dict):
            raise ParseError("plan section must be an object")
        try:
            mode = Mode(payload.get("mode", "welding"))
        except ValueError:
            raise ParseError(f"unknown mode {payload.get('mode')!r}") from None
        doc = cls(mode=mode)
        doc.outcomes = str(payload.get("outcomes", ""))
        doc.objectives = [PlanItem.from_payload(p) for p in payload.get("objectives", [])]
        doc.skills = [PlanItem.from_payload(p) for p in payload.get("skills", [])]
        doc.criteria = [PlanItem.from_payload(p) for p in payload.get("criteria", [])]
        doc.activity_sequence = [ActivityRef.from_payload(p)
                                 for p in payload.get("activitySequence", [])]
        doc.document_revision = int(payload.get("documentRevision", 0))
        doc.id_counter = int(payload.get("idCounter", 0))
        doc.stale_levels = {HierarchyLevel.from_key(key)
                            for key in payload.get("staleLevels", [])}
        doc._check_links()
        return doc

    def _check_links(self) -> None:
        objective_ids = {item.item_id for item in self.objectives}
        skill_ids = {item.item_id for item in self.skills}
        for item in self.skills:
            if item.link is not None and item.link not in objective_ids:
                raise ParseError(f"skill {item.item_id} links to missing objective {item.link}")
        for item in self.criteria:
            if item.link is not None and item.link not in skill_ids:
                raise ParseError(f"criterion {item.item_id} links to missing skill {item.link}")

    # ------------------------------------------------------------------
    # operations

    def set_outcomes(self, text: str) -> "PlanDocument":
        """Replace the outcome statement; lower levels become stale."""
        if not text.strip():
            raise EmptyOutcomes("outcomes text must not be blank")
        self.history.push(_SetOutcomesCommand(self, text))
        return self

    def set_mode(self, mode: Mode) -> bool:
        """Switch the active library mode. Not undoable; returns True if changed."""
        if mode is self.mode:
            return False
        self.mode = mode
        self.document_revision += 1
        return True

    def local_edit(self, level: HierarchyLevel, item_id: str, new_text: str) -> "PlanDocument":
        """Rewrite one item's text without regenerating anything below it."""
        item = self.get_item(level, item_id)
        if not new_text.strip():
            raise EmptyText("item text must not be blank")
        self.history.push(_LocalEditCommand(
            self, level, item,
            new_text=new_text,
            new_provenance=Provenance.MANUAL,
        ))
        return self

    def add_item(self, level: HierarchyLevel, text: str, link: str | None = None,
                 library: LibraryBundle | None = None) -> "PlanDocument":
        """Append an item at ``level``; for the activities level ``text`` is a
        library activity id."""
        if not text.strip():
            raise EmptyText("item text must not be blank")
        if level is HierarchyLevel.ACTIVITIES:
            if link is not None:
                raise DanglingLink("activity entries do not carry links")
            bundle = self._resolve_library(library)
            if text not in bundle:
                raise UnknownActivity(f"activity {text!r} is not in library "
                                      f"{bundle.library_id!r}", locus=text)
            entry = ActivityRef(activity_id=text, instance_id="")
        elif level in ITEM_LEVELS:
            if link is not None:
                if level is HierarchyLevel.OBJECTIVES:
                    raise DanglingLink("objectives cannot link upward")
                parent_ids = {pid for pid, _text in self.parent_pairs(level)}
                if link not in parent_ids:
                    raise DanglingLink(f"link target {link!r} does not exist one "
                                       f"level above {level.key}", locus=link)
            entry = PlanItem(item_id="", text=text, provenance=Provenance.MANUAL,
                             revision=1, link=link)
        else:
            raise ValueError(f"cannot add items at level {level.key}")
        self.history.push(_AddItemCommand(self, level, entry))
        return self

    def local_delete(self, level: HierarchyLevel, item_id: str) -> "PlanDocument":
        """Remove one item; links from its children are severed, not deleted."""
        if level is HierarchyLevel.ACTIVITIES:
            for index, ref in enumerate(self.activity_sequence):
                if ref.instance_id == item_id:
                    self.history.push(_LocalDeleteCommand(self, level, ref, index, []))
                    return self
            raise UnknownItem(f"no activity entry {item_id!r}", locus=item_id)
        item = self.get_item(level, item_id)
        index = self.items_at(level).index(item)
        severed = []
        if level in (HierarchyLevel.OBJECTIVES, HierarchyLevel.SKILLS):
            child_level = HierarchyLevel(level + 1)
            for child in self.items_at(child_level):
                if child.link == item_id:
                    severed.append((child, child.link, child.revision))
        self.history.push(_LocalDeleteCommand(self, level, item, index, severed))
        return self

    def delete_level(self, level: HierarchyLevel) -> "PlanDocument":
        """Clear an entire level (outcomes text, an item list, or the sequence)."""
        severed = []
        if level in (HierarchyLevel.OBJECTIVES, HierarchyLevel.SKILLS):
            child_level = HierarchyLevel(level + 1)
            for child in self.items_at(child_level):
                if child.link is not None:
                    severed.append((child, child.link, child.revision))
        self.history.push(_DeleteLevelCommand(self, level, severed))
        return self

    def set_activity_sequence(self, activity_ids: list[str],
                              library: LibraryBundle | None = None) -> "PlanDocument":
        """Replace the activity sequence with fresh references to library ids."""
        bundle = self._resolve_library(library)
        for activity_id in activity_ids:
            if activity_id not in bundle:
                raise UnknownActivity(f"activity {activity_id!r} is not in library "
                                      f"{bundle.library_id!r}", locus=activity_id)
        self.history.push(_SetActivitySequenceCommand(self, list(activity_ids)))
        return self

    def global_update(self, level: HierarchyLevel, gen,
                      library: LibraryBundle | None = None) -> "PlanDocument":
        """Regenerate ``level`` and everything below it through ``gen``.

        Levels above ``level`` are left byte-identical. All generation runs
        before any state changes, so a generator failure leaves the document
        untouched.
        """
        from .generator import GeneratorRequest

        level = HierarchyLevel(level)
        if level not in GENERATABLE_LEVELS:
            raise ValueError("outcomes are entered by the author, not generated")
        for upper in HierarchyLevel:
            if upper >= level:
                break
            if self.level_is_empty(upper):
                raise MissingParentLevel(f"level {upper.key} is empty; fill it before "
                                         f"updating {level.key}", locus=upper.key)
        bundle = self._resolve_library(library)
        catalog = list(bundle.descriptors)
        counter = self.id_counter
        staged: dict[HierarchyLevel, list] = {}
        parents = self.parent_pairs(level)
        for target in GENERATABLE_LEVELS:
            if target < level:
                continue
            desired = DEFAULT_ITEM_COUNT if target is not HierarchyLevel.ACTIVITIES else None
            request = GeneratorRequest(
                target_level=target,
                outcomes_text=self.outcomes,
                parent_items=list(parents),
                library_catalog=catalog,
                desired_count=desired,
            )
            try:
                result = gen(request)
            except Exception as exc:
                raise GeneratorFailure(f"generation failed at level {target.key}: {exc}",
                                       locus=target.key, cause=exc) from exc
            if target is HierarchyLevel.ACTIVITIES:
                refs = []
                for activity_id in result.items:
                    if activity_id not in bundle:
                        raise GeneratorFailure(
                            f"generator returned unknown activity {activity_id!r}",
                            locus=target.key)
                    counter += 1
                    refs.append(ActivityRef(activity_id, f"act-{counter}"))
                staged[target] = refs
            else:
                if len(result.items) != desired:
                    raise GeneratorFailure(
                        f"generator returned {len(result.items)} items at "
                        f"{target.key}, expected {desired}", locus=target.key)
                parent_ids = {pid for pid, _text in parents}
                fresh: list[PlanItem] = []
                for produced in result.items:
                    if not produced.text.strip():
                        raise GeneratorFailure("generator returned a blank item",
                                               locus=target.key)
                    counter += 1
                    fresh.append(PlanItem(
                        item_id=f"{_ID_PREFIXES[target]}-{counter}",
                        text=produced.text,
                        provenance=Provenance.GENERATED,
                        revision=1,
                        link=produced.link if produced.link in parent_ids else None,
                    ))
                staged[target] = fresh
                parents = [(item.item_id, item.text) for item in fresh]
        self.history.push(_GlobalUpdateCommand(self, level, staged, counter))
        return self

    def undo(self) -> "PlanDocument":
        self.history.undo()
        return self

    def redo(self) -> "PlanDocument":
        self.history.redo()
        return self

    def undo_item(self, level: HierarchyLevel, item_id: str) -> "PlanDocument":
        """Per-item undo: revert the most recent local edit of one item.

        This is a filtered view of the document stack: the newest local edit
        of the item that has not already been reverted is inverted and pushed
        as a fresh command, so document-level undo stays consistent.
        """
        self.get_item(level, item_id)
        pending = 0
        target: _LocalEditCommand | None = None
        for command in reversed(self.history.undo_stack):
            if not isinstance(command, _LocalEditCommand):
                continue
            if command.level is not level or command.item_id != item_id:
                continue
            if command.is_item_undo:
                pending += 1
            elif pending:
                pending -= 1
            else:
                target = command
                break
        if target is None:
            raise NothingToUndo(f"no local edit of {item_id} left to revert",
                                locus=item_id)
        item = self.get_item(level, item_id)
        self.history.push(_LocalEditCommand(
            self, level, item,
            new_text=target.old_text,
            new_provenance=target.old_provenance,
            is_item_undo=True,
        ))
        return self


# ----------------------------------------------------------------------
# commands


class _PlanCommand(Command):
    """Base for plan commands: tracks revision and stale-flag transitions."""

    def __init__(self, doc: PlanDocument, stale_after: set[HierarchyLevel]):
        self.doc = doc
        self.old_revision = doc.document_revision
        self.new_revision = doc.document_revision + 1
        self.old_stale = set(doc.stale_levels)
        self.new_stale = set(stale_after)

    def _install(self, revision: int, stale: set[HierarchyLevel]) -> None:
        self.doc.document_revision = revision
        self.doc.stale_levels = set(stale)

    def _forward(self) -> None:
        self._install(self.new_revision, self.new_stale)

    def _backward(self) -> None:
        self._install(self.old_revision, self.old_stale)


class _SetOutcomesCommand(_PlanCommand):
    kind = "SetOutcomes"
    level = HierarchyLevel.OUTCOMES

    def __init__(self, doc: PlanDocument, text: str):
        super().__init__(doc, doc.stale_levels | set(GENERATABLE_LEVELS))
        self.old_text = doc.outcomes
        self.new_text = text

    def apply(self):
        self.doc.outcomes = self.new_text
        self._forward()

    def revert(self):
        self.doc.outcomes = self.old_text
        self._backward()


class _LocalEditCommand(_PlanCommand):
    kind = "LocalEdit"

    def __init__(self, doc: PlanDocument, level: HierarchyLevel, item: PlanItem,
                 new_text: str, new_provenance: Provenance, is_item_undo: bool = False):
        super().__init__(doc, doc.stale_levels | doc._levels_below(level))
        self.level = level
        self.item = item
        self.item_id = item.item_id
        self.is_item_undo = is_item_undo
        self.old_text = item.text
        self.old_provenance = item.provenance
        self.old_item_revision = item.revision
        self.new_text = new_text
        self.new_provenance = new_provenance
        self.new_item_revision = item.revision + 1

    def apply(self):
        self.item.text = self.new_text
        self.item.provenance = self.new_provenance
        self.item.revision = self.new_item_revision
        self._forward()

    def revert(self):
        self.item.text = self.old_text
        self.item.provenance = self.old_provenance
        self.item.revision = self.old_item_revision
        self._backward()


class _AddItemCommand(_PlanCommand):
    kind = "AddItem"

    def __init__(self, doc: PlanDocument, level: HierarchyLevel, entry):
        super().__init__(doc, doc.stale_levels | doc._levels_below(level))
        self.level = level
        self.entry = entry
        self.old_counter = doc.id_counter
        self.new_counter = doc.id_counter + 1
        if isinstance(entry, ActivityRef):
            entry.instance_id = f"act-{self.new_counter}"
        else:
            entry.item_id = f"{_ID_PREFIXES[level]}-{self.new_counter}"

    def _target_list(self) -> list:
        if self.level is HierarchyLevel.ACTIVITIES:
            return self.doc.activity_sequence
        return self.doc.items_at(self.level)

    def apply(self):
        self._target_list().append(self.entry)
        self.doc.id_counter = self.new_counter
        self._forward()

    def revert(self):
        self._target_list().remove(self.entry)
        self.doc.id_counter = self.old_counter
        self._backward()


class _LocalDeleteCommand(_PlanCommand):
    kind = "LocalDelete"

    def __init__(self, doc: PlanDocument, level: HierarchyLevel, entry, index: int,
                 severed: list[tuple[PlanItem, str | None, int]]):
        super().__init__(doc, doc.stale_levels | doc._levels_below(level))
        self.level = level
        self.entry = entry
        self.index = index
        self.severed = severed

    def _target_list(self) -> list:
        if self.level is HierarchyLevel.ACTIVITIES:
            return self.doc.activity_sequence
        return self.doc.items_at(self.level)

    def apply(self):
        del self._target_list()[self.index]
        for child, _old_link, old_revision in self.severed:
            child.link = None
            child.revision = old_revision + 1
        self._forward()

    def revert(self):
        self._target_list().insert(self.index, self.entry)
        for child, old_link, old_revision in self.severed:
            child.link = old_link
            child.revision = old_revision
        self._backward()


class _DeleteLevelCommand(_PlanCommand):
    kind = "DeleteLevel"

    def __init__(self, doc: PlanDocument, level: HierarchyLevel,
                 severed: list[tuple[PlanItem, str | None, int]]):
        super().__init__(doc, doc.stale_levels | doc._levels_below(level))
        self.level = level
        self.severed = severed
        if level is HierarchyLevel.OUTCOMES:
            self.old_content = doc.outcomes
        elif level is HierarchyLevel.ACTIVITIES:
            self.old_content = list(doc.activity_sequence)
        else:
            self.old_content = list(doc.items_at(level))

    def apply(self):
        if self.level is HierarchyLevel.OUTCOMES:
            self.doc.outcomes = ""
        elif self.level is HierarchyLevel.ACTIVITIES:
            self.doc.activity_sequence[:] = []
        else:
            self.doc.items_at(self.level)[:] = []
        for child, _old_link, old_revision in self.severed:
            child.link = None
            child.revision = old_revision + 1
        self._forward()

    def revert(self):
        if self.level is HierarchyLevel.OUTCOMES:
            self.doc.outcomes = self.old_content
        elif self.level is HierarchyLevel.ACTIVITIES:
            self.doc.activity_sequence[:] = self.old_content
        else:
            self.doc.items_at(self.level)[:] = self.old_content
        for child, old_link, old_revision in self.severed:
            child.link = old_link
            child.revision = old_revision
        self._backward()


class _SetActivitySequenceCommand(_PlanCommand):
    kind = "SetActivitySequence"
    level = HierarchyLevel.ACTIVITIES

    def __init__(self, doc: PlanDocument, activity_ids: list[str]):
        super().__init__(doc, doc.stale_levels)
        self.old_sequence = list(doc.activity_sequence)
        self.old_counter = doc.id_counter
        counter = doc.id_counter
        self.new_sequence = []
        for activity_id in activity_ids:
            counter += 1
            self.new_sequence.append(ActivityRef(activity_id, f"act-{counter}"))
        self.new_counter = counter

    def apply(self):
        self.doc.activity_sequence[:] = self.new_sequence
        self.doc.id_counter = self.new_counter
        self._forward()

    def revert(self):
        self.doc.activity_sequence[:] = self.old_sequence
        self.doc.id_counter = self.old_counter
        self._backward()


class _GlobalUpdateCommand(_PlanCommand):
    kind = "GlobalUpdate"

    def __init__(self, doc: PlanDocument, level: HierarchyLevel,
                 staged: dict[HierarchyLevel, list], new_counter: int):
        stale_after = doc.stale_levels - {lv for lv in GENERATABLE_LEVELS if lv >= level}
        super().__init__(doc, stale_after)
        self.level = level
        self.staged = staged
        self.old_counter = doc.id_counter
        self.new_counter = new_counter
        self.old_content = {}
        for target in staged:
            if target is HierarchyLevel.ACTIVITIES:
                self.old_content[target] = list(doc.activity_sequence)
            else:
                self.old_content[target] = list(doc.items_at(target))

    def _install_content(self, content: dict, counter: int) -> None:
        for target, entries in content.items():
            if target is HierarchyLevel.ACTIVITIES:
                self.doc.activity_sequence[:] = entries
            else:
                self.doc.items_at(target)[:] = entries
        self.doc.id_counter = counter

    def apply(self):
        self._install_content(self.staged, self.new_counter)
        self._forward()

    def revert(self):
        self._install_content(self.old_content, self.old_counter)
        self._backward()
