"""Command log with undo/redo and document save/load.

Every mutation of a document goes through :meth:`Document.execute`, which
records the serialized command together with a full pre-state snapshot.
Undo restores snapshots; redo re-applies commands (deterministically, so a
replay of the applied sub-log from the initial document reproduces the
current document byte-identically). Rejected commands are logged for audit
but are transparent to undo/redo.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field

from . import moves, persistence
from .errors import (
    MorseflowError,
    NothingToRedo,
    NothingToUndo,
    ParseError,
    SchemaVersionError,
)
from .model import SCHEMA_VERSION, Skeleton

APPLIED = "applied"
REJECTED = "rejected"


@dataclass
class HistoryEntry:
    seq: int
    command: dict
    outcome: str  # "applied" | "rejected"
    error: dict | None = None

    def to_json(self):
        out = {"seq": self.seq, "command": self.command, "outcome": self.outcome}
        if self.error is not None:
            out["error"] = self.error
        return out

    @classmethod
    def from_json(cls, data):
        return cls(int(data["seq"]), dict(data["command"]), data["outcome"],
                   data.get("error"))


@dataclass
class HistoryStack:
    entries: list[HistoryEntry] = field(default_factory=list)
    cursor: int = 0  # number of applied entries currently in effect
    snapshots: list[Skeleton] = field(default_factory=list)  # pre-state per applied entry

    def applied(self) -> list[HistoryEntry]:
        return [e for e in self.entries if e.outcome == APPLIED]

    def record_applied(self, command: dict, pre_snapshot: Skeleton):
        applied = self.applied()
        if self.cursor < len(applied):
            # drop the redo tail (entries and snapshots past the cursor)
            kept_applied = 0
            kept_entries = []
            for e in self.entries:
                if e.outcome == APPLIED:
                    if kept_applied == self.cursor:
                        break
                    kept_applied += 1
                kept_entries.append(e)
            self.entries = kept_entries
            self.snapshots = self.snapshots[: self.cursor]
        self.entries.append(HistoryEntry(len(self.entries), command, APPLIED))
        self.snapshots.append(pre_snapshot)
        self.cursor += 1

    def record_rejected(self, command: dict, error: dict):
        self.entries.append(HistoryEntry(len(self.entries), command, REJECTED, error))

    def to_json(self):
        return {"entries": [e.to_json() for e in self.entries], "cursor": self.cursor}


class Document:
    """A skeleton plus its command history."""

    def __init__(self, skeleton: Skeleton, initial: Skeleton | None = None):
        self.skeleton = skeleton
        self.initial = (initial or skeleton).copy()
        self.stack = HistoryStack()

    # ------------------------------------------------------------- commands
    def execute(self, command: dict):
        """Apply one serialized command; record it whether it succeeds or is
        rejected. Returns the command's result payload."""
        pre = self.skeleton.copy()
        try:
            result, new_skel = apply_command(self.skeleton, command)
        except MorseflowError as exc:
            self.stack.record_rejected(command, exc.to_json())
            raise
        self.skeleton = new_skel
        self.stack.record_applied(command, pre)
        return result

    def undo(self, n: int = 1) -> Skeleton:
        if n < 1:
            raise NothingToUndo("undo count must be positive")
        for _ in range(n):
            if self.stack.cursor == 0:
                raise NothingToUndo("nothing to undo")
            self.stack.cursor -= 1
            self.skeleton = self.stack.snapshots[self.stack.cursor].copy()
        return self.skeleton

    def redo(self, n: int = 1) -> Skeleton:
        applied = self.stack.applied()
        if n < 1:
            raise NothingToRedo("redo count must be positive")
        for _ in range(n):
            if self.stack.cursor >= len(applied):
                raise NothingToRedo("nothing to redo")
            command = applied[self.stack.cursor].command
            _result, self.skeleton = apply_command(self.skeleton, command)
            self.stack.cursor += 1
        return self.skeleton


def apply_command(skel: Skeleton, command: dict):
    """Interpret one serialized mutation. Returns (result payload, skeleton)."""
    try:
        op = command["op"]
    except (KeyError, TypeError):
        raise ParseError("command needs an 'op' field") from None

    if op == "move":
        req = moves.MoveRequest.from_json(command)
        outcome = moves.apply_move(skel, req)
        return outcome.to_json(), outcome.skeleton
    if op == "connect":
        work = skel.copy()
        eid = work.connect(command["saddle"], command["saddleAngle"],
                           command["extremum"], command["extremumAngle"],
                           command["class"])
        return {"separatrix": eid}, work
    if op == "disconnect":
        work = skel.copy()
        work.disconnect(command["separatrix"])
        return {}, work
    if op == "drag":
        work = skel.copy()
        work.drag_singularity(command["singularity"], (command["x"], command["y"]))
        return {}, work
    if op == "control-point":
        work = skel.copy()
        action = command.get("action", "move")
        eid = command["separatrix"]
        if action == "move":
            work.move_control_point(eid, command["index"], (command["x"], command["y"]))
        elif action == "add":
            work.add_control_point(eid, command["index"], (command["x"], command["y"]))
        elif action == "remove":
            work.remove_control_point(eid, command["index"])
        else:
            raise ParseError(f"unknown control-point action {action!r}")
        return {}, work
    if op == "set-value":
        new_skel = persistence.set_value(skel, command["singularity"], command["value"])
        return {}, new_skel
    if op == "simplify":
        pair = (command["extremum"], command["saddle"])
        new_skel, barcode = persistence.simplify(skel, pair)
        return {"barcode": barcode.to_json()}, new_skel
    raise ParseError(f"unknown command op {op!r}")


# ------------------------------------------------------------------ save/load

def _canonical(data) -> bytes:
    return json.dumps(data, sort_keys=True, separators=(",", ":")).encode()


def save(document: Document | Skeleton, include_history: bool = False) -> bytes:
    """Serialize a document per the versioned JSON schema."""
    skel = document.skeleton if isinstance(document, Document) else document
    payload = skel.to_document()
    if include_history and isinstance(document, Document):
        payload["history"] = {
            "initial": document.initial.to_document(),
            "entries": [e.to_json() for e in document.stack.entries],
        }
    return _canonical(payload)


def load(data: bytes | str) -> Document:
    try:
        payload = json.loads(data)
    except (json.JSONDecodeError, TypeError) as exc:
        raise ParseError(f"not valid JSON: {exc}") from exc
    if not isinstance(payload, dict):
        raise ParseError("document must be a JSON object")
    version = payload.get("version")
    if version != SCHEMA_VERSION:
        raise SchemaVersionError(
            f"unsupported schema version {version!r} (expected {SCHEMA_VERSION})",
            version=version,
        )
    skel = Skeleton.from_document(payload)
    doc = Document(skel)
    hist = payload.get("history")
    if hist:
        doc.initial = Skeleton.from_document(hist["initial"])
        doc.stack.entries = [HistoryEntry.from_json(e) for e in hist.get("entries", [])]
        doc.stack.cursor = len(doc.stack.applied())
    return doc


def replay(history_payload: dict) -> Document:
    """Rebuild a document by re-applying the applied sub-log from the initial
    document. Determinism makes the result byte-identical to the original."""
    if "initial" not in history_payload:
        raise ParseError("history payload needs an 'initial' document")
    initial = Skeleton.from_document(history_payload["initial"])
    doc = Document(initial.copy(), initial=initial)
    for raw in history_payload.get("entries", []):
        entry = HistoryEntry.from_json(raw) if not isinstance(raw, HistoryEntry) else raw
        if entry.outcome != APPLIED:
            continue
        doc.execute(entry.command)
    return doc
