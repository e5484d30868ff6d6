"""Bounded undo/redo command stack shared by plan documents and lesson graphs."""

from __future__ import annotations

from .errors import NothingToRedo, NothingToUndo

HISTORY_LIMIT = 200


class Command:
    """One undoable edit.

    A command captures both the prior and the new state of whatever it
    touches at construction time, so ``apply`` and ``revert`` can be replayed
    any number of times (redo after undo, undo after redo).
    """

    kind = "Command"

    def apply(self) -> None:
        raise NotImplementedError

    def revert(self) -> None:
        raise NotImplementedError


class History:
    """Undo/redo stacks bounded at ``limit`` entries; oldest entries drop."""

    def __init__(self, limit: int = HISTORY_LIMIT):
        self.limit = limit
        self.undo_stack: list[Command] = []
        self.redo_stack: list[Command] = []

    def push(self, command: Command) -> None:
        """Apply a fresh command; clears the redo stack."""
        command.apply()
        self.undo_stack.append(command)
        if len(self.undo_stack) > self.limit:
            del self.undo_stack[0]
        self.redo_stack.clear()

    def undo(self) -> Command:
        if not self.undo_stack:
            raise NothingToUndo("the undo stack is empty")
        command = self.undo_stack.pop()
        command.revert()
        self.redo_stack.append(command)
        return command

    def redo(self) -> Command:
        if not self.redo_stack:
            raise NothingToRedo("the redo stack is empty")
        command = self.redo_stack.pop()
        command.apply()
        self.undo_stack.append(command)
        return command

    @property
    def can_undo(self) -> bool:
        return bool(self.undo_stack)

    @property
    def can_redo(self) -> bool:
        return bool(self.redo_stack)
