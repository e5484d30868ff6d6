"""Exception hierarchy shared by the engine, file formats, service, and CLI.

Every error carries a machine-readable ``code`` (the class name) and an
optional ``locus`` naming the item/node/edge/level it refers to, so the
HTTP layer and CLI can report failures without string matching.
"""

from __future__ import annotations


class LessonForgeError(Exception):
    """Base class for all domain errors."""

    def __init__(self, message: str = "", locus: str | None = None):
        super().__init__(message or self.__class__.__name__)
        self.message = message or self.__class__.__name__
        self.locus = locus

    @property
    def code(self) -> str:
        return self.__class__.__name__

    def to_payload(self) -> dict:
        payload = {"code": self.code, "message": self.message}
        if self.locus is not None:
            payload["locus"] = self.locus
        return payload


# --- plan-core -------------------------------------------------------------

class EmptyOutcomes(LessonForgeError):
    pass


class EmptyText(LessonForgeError):
    pass


class UnknownItem(LessonForgeError):
    pass


class DanglingLink(LessonForgeError):
    pass


class MissingParentLevel(LessonForgeError):
    pass


class NothingToUndo(LessonForgeError):
    pass


class NothingToRedo(LessonForgeError):
    pass


class GeneratorFailure(LessonForgeError):
    """Wraps a generator error, identifying the level that was being built."""

    def __init__(self, message: str = "", locus: str | None = None,
                 cause: Exception | None = None):
        super().__init__(message, locus)
        self.cause = cause


# --- generator -------------------------------------------------------------

class NoLibraryMatch(LessonForgeError):
    pass


class TransportError(LessonForgeError):
    pass


class MalformedResponse(LessonForgeError):
    pass


class UnknownActivityIds(LessonForgeError):
    pass


# --- lesson graph ----------------------------------------------------------

class UnknownNode(LessonForgeError):
    pass


class UnknownEdge(LessonForgeError):
    pass


class DuplicateEdge(LessonForgeError):
    pass


class SelfLoop(LessonForgeError):
    pass


class InvalidProperty(LessonForgeError):
    pass


class CyclicGraph(LessonForgeError):
    pass


class EmptyGraph(LessonForgeError):
    pass


# --- activity library ------------------------------------------------------

class UnknownActivity(LessonForgeError):
    pass


class ParseError(LessonForgeError):
    pass


class DuplicateActivityId(LessonForgeError):
    pass


class EmptyPhase(LessonForgeError):
    pass


class UnknownLibrary(LessonForgeError):
    pass


# --- interchange -----------------------------------------------------------

class UnsupportedSchemaVersion(LessonForgeError):
    pass


class UnknownJumpTarget(LessonForgeError):
    pass


class InvalidScript(LessonForgeError):
    pass


# --- service ---------------------------------------------------------------

class UnknownDocument(LessonForgeError):
    pass


class StateDirUnwritable(LessonForgeError):
    pass
