"""JSON Lines experiment records."""

from __future__ import annotations

import json
from dataclasses import asdict, dataclass, field
from datetime import datetime, timezone
from pathlib import Path
from typing import Any, Iterable

from . import __version__

TOOL_VERSION = f"esprod {__version__}"


def utc_now() -> str:
    """Current UTC time in RFC 3339 form with a Z suffix."""
    return datetime.now(timezone.utc).isoformat(timespec="microseconds").replace("+00:00", "Z")


def parse_timestamp(s: str) -> datetime:
    return datetime.fromisoformat(s.replace("Z", "+00:00"))


@dataclass
class ExperimentRecord:
    command: str
    params: dict[str, Any]
    seed: int
    started_at: str
    finished_at: str
    outputs: dict[str, Any] = field(default_factory=dict)
    tool_version: str = TOOL_VERSION

    def to_json(self) -> str:
        # sorted keys and fixed separators keep lines byte-stable across runs
        return json.dumps(asdict(self), sort_keys=True, separators=(",", ":"), allow_nan=False)

    @classmethod
    def from_json(cls, line: str) -> "ExperimentRecord":
        d = json.loads(line)
        if not isinstance(d, dict):
            raise ValueError("record line is not a JSON object")
        return cls(**d)

    def without_timestamps(self) -> dict:
        d = asdict(self)
        d.pop("started_at")
        d.pop("finished_at")
        return d


def write_records(path, records: Iterable[ExperimentRecord], append: bool = True) -> None:
    with open(path, "a" if append else "w", encoding="utf-8") as fh:
        for r in records:
            fh.write(r.to_json() + "\n")


def read_records(path) -> list[ExperimentRecord]:
    return [ExperimentRecord.from_json(line)
            for line in Path(path).read_text(encoding="utf-8").splitlines() if line.strip()]
