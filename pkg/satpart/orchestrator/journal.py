"""
Append-only run journal.

One JSON object per line. Every record has a ``kind`` (run, item, estimate, trace, summary) and a
``checksum``: the first 16 hex digits of sha256 over the record's canonical JSON (sorted keys,
compact separators) without the checksum field. The journal doubles as the checkpoint: replaying
it restores the completed item set.
"""
import hashlib
import json
import os
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, Dict, List, Optional, Union

from monitoring import get_logger
from satpart.utils.exceptions import CheckpointCorruptedError

logger = get_logger(__name__)

RECORD_KINDS = ("run", "item", "estimate", "trace", "summary")


def canonical_json(record: Dict[str, Any]) -> str:
    return json.dumps(record, sort_keys=True, separators=(",", ":"))


def record_checksum(record: Dict[str, Any]) -> str:
    body = {key: value for key, value in record.items() if key != "checksum"}
    return hashlib.sha256(canonical_json(body).encode("utf-8")).hexdigest()[:16]


def _scan(path: Union[str, Path]) -> tuple:
    """Parse a journal; returns (records, byte length of the intact prefix)."""
    records: List[Dict[str, Any]] = []
    intact = 0
    with open(path, "rb") as handle:
        data = handle.read()
    lines = data.split(b"\n")
    complete = lines[:-1]
    for line_number, raw in enumerate(complete, start=1):
        if raw.strip():
            try:
                record = json.loads(raw.decode("utf-8"))
            except (UnicodeDecodeError, json.JSONDecodeError):
                raise CheckpointCorruptedError("unparsable record", line_number) from None
            if not isinstance(record, dict) or "checksum" not in record:
                raise CheckpointCorruptedError("record without checksum", line_number)
            if record_checksum(record) != record["checksum"]:
                raise CheckpointCorruptedError("checksum mismatch", line_number)
            records.append(record)
        intact += len(raw) + 1
    if lines[-1].strip():
        logger.warning("Ignoring torn final journal line", path=str(path), line=len(complete) + 1)
    return records, intact


def read_journal(path: Union[str, Path]) -> List[Dict[str, Any]]:
    """
    Read and verify every record.

    Raises:
        CheckpointCorruptedError: a complete line fails to parse or its checksum does not match
    """
    return _scan(path)[0]


class Journal:
    """Leader-owned writer; not thread-safe by itself."""

    def __init__(self, path: Union[str, Path], fsync: bool = False):
        self.path = Path(path)
        self.fsync = fsync
        self._handle = None

    def __enter__(self) -> "Journal":
        self.open()
        return self

    def __exit__(self, exc_type, exc, tb) -> None:
        self.close()

    def open(self) -> List[Dict[str, Any]]:
        """Open for appending, dropping a torn final line; returns the existing records."""
        records: List[Dict[str, Any]] = []
        if self.path.exists():
            records, intact = _scan(self.path)
            if intact != self.path.stat().st_size:
                with open(self.path, "r+b") as handle:
                    handle.truncate(intact)
        else:
            self.path.parent.mkdir(parents=True, exist_ok=True)
        self._handle = open(self.path, "a", encoding="utf-8")
        return records

    def close(self) -> None:
        if self._handle is not None:
            self._handle.close()
            self._handle = None

    def append(self, kind: str, **fields: Any) -> Dict[str, Any]:
        if kind not in RECORD_KINDS:
            raise ValueError(f"unknown journal record kind {kind!r}")
        if self._handle is None:
            self.open()
        record = {"kind": kind, **fields}
        record["checksum"] = record_checksum(record)
        self._handle.write(canonical_json(record) + "\n")
        self._handle.flush()
        if self.fsync:
            os.fsync(self._handle.fileno())
        return record


@dataclass
class JournalState:
    """Replay of a journal: header, first completed record per item, and everything else."""
    header: Optional[Dict[str, Any]] = None
    items: Dict[int, Dict[str, Any]] = field(default_factory=dict)
    duplicates: int = 0
    estimates: List[Dict[str, Any]] = field(default_factory=list)
    traces: List[Dict[str, Any]] = field(default_factory=list)
    summary: Optional[Dict[str, Any]] = None

    @classmethod
    def replay(cls, records: List[Dict[str, Any]]) -> "JournalState":
        state = cls()
        for record in records:
            kind = record.get("kind")
            if kind == "run" and state.header is None:
                state.header = record
            elif kind == "item":
                item_id = int(record["item_id"])
                if item_id in state.items:
                    state.duplicates += 1
                else:
                    state.items[item_id] = record
            elif kind == "estimate":
                state.estimates.append(record)
            elif kind == "trace":
                state.traces.append(record)
            elif kind == "summary":
                state.summary = record
        return state

    @classmethod
    def load(cls, path: Union[str, Path]) -> "JournalState":
        return cls.replay(read_journal(path))
