"""Student checkpoint and dataset persistence."""

from __future__ import annotations

import json
from pathlib import Path

from ..learnkit import load_checkpoint, save_checkpoint
from .student import StudentPolicy


def save_student(path: str | Path, policy: StudentPolicy, meta: dict | None = None,
                 kind: str = "student") -> None:
    save_checkpoint(path, kind=kind, modules=policy.to_modules(), meta=meta or {})


def load_student(path: str | Path, expected_kinds=("student", "baseline")) -> tuple[StudentPolicy, dict]:
    doc = load_checkpoint(path)
    if doc["kind"] not in expected_kinds:
        raise ValueError(f"{path}: expected one of {expected_kinds}, got {doc['kind']!r}")
    return StudentPolicy.from_modules(doc["modules"]), doc["meta"]


def write_rows(path: str | Path, rows: list[dict]) -> None:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with path.open("w") as f:
        for row in rows:
            f.write(json.dumps(row) + "\n")


def read_rows(path: str | Path) -> list[dict]:
    with Path(path).open() as f:
        return [json.loads(line) for line in f if line.strip()]
