"""Loading, normalizing, and writing instruction datasets.

Input records are unified into (instruction, response) pairs: for the
alpaca-style triplet format a non-empty ``input`` is appended to the
instruction after a newline.  Output files are byte-stable JSONL (UTF-8,
LF, fixed key order).
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from pathlib import Path
from typing import TYPE_CHECKING, Iterable, Mapping

from .errors import DataError

if TYPE_CHECKING:  # pragma: no cover
    from .engine import MosaicSample

FORMAT_TAGS = ("alpaca-triplet", "pair")

UNIFY_SEPARATOR = "\n"


@dataclass(frozen=True)
class InstructionRecord:
    """One original pair: unified instruction text and its response."""

    id: int
    instruction: str
    response: str
    input: str = ""
    cluster: int | None = None


@dataclass
class Dataset:
    records: list[InstructionRecord]
    source_path: str
    format_tag: str
    dropped_count: int = 0

    def __len__(self) -> int:
        return len(self.records)


def _require_str(obj: Mapping, key: str, where: str) -> str:
    value = obj.get(key)
    if not isinstance(value, str):
        raise DataError(f"{where}: key {key!r} missing or not a string")
    return value


def _parse_raw(obj: object, format_tag: str, where: str) -> tuple[str, str, str, int | None] | None:
    """Raw row -> (instruction, response, input, cluster); None if dropped."""
    if not isinstance(obj, Mapping):
        raise DataError(f"{where}: expected a JSON object, got {type(obj).__name__}")
    if format_tag == "alpaca-triplet":
        instruction = _require_str(obj, "instruction", where).strip()
        if "output" in obj:
            response = _require_str(obj, "output", where).strip()
        else:
            response = _require_str(obj, "response", where).strip()
        raw_input = obj.get("input", "")
        if not isinstance(raw_input, str):
            raise DataError(f"{where}: key 'input' must be a string")
        raw_input = raw_input.strip()
        if raw_input:
            instruction = instruction + UNIFY_SEPARATOR + raw_input
    elif format_tag == "pair":
        instruction = _require_str(obj, "instruction", where).strip()
        response = _require_str(obj, "response", where).strip()
        raw_input = ""
    else:
        raise DataError(f"unknown format_tag {format_tag!r}; expected one of {FORMAT_TAGS}")

    cluster = obj.get("cluster")
    if cluster is not None and (not isinstance(cluster, int) or isinstance(cluster, bool) or cluster < 0):
        raise DataError(f"{where}: key 'cluster' must be a non-negative integer")

    if not instruction or not response:
        return None  # dropped, not fatal
    return instruction, response, raw_input, cluster


def from_records(rows: Iterable[Mapping], format_tag: str = "alpaca-triplet",
                 source_path: str = "<memory>") -> Dataset:
    """Build a Dataset from in-memory rows; ids are contiguous from 0."""
    records: list[InstructionRecord] = []
    dropped = 0
    for i, row in enumerate(rows):
        parsed = _parse_raw(row, format_tag, f"{source_path}: record {i}")
        if parsed is None:
            dropped += 1
            continue
        instruction, response, raw_input, cluster = parsed
        records.append(InstructionRecord(
            id=len(records), instruction=instruction, response=response,
            input=raw_input, cluster=cluster,
        ))
    if not records:
        raise DataError(f"{source_path}: no valid records")
    return Dataset(records=records, source_path=source_path,
                   format_tag=format_tag, dropped_count=dropped)


def load_dataset(path: str | Path, format_tag: str = "alpaca-triplet") -> Dataset:
    """Load a JSONL file or JSON array of instruction rows."""
    path = Path(path)
    try:
        text = path.read_text(encoding="utf-8")
    except OSError as exc:
        raise DataError(f"cannot read {path}: {exc}") from exc

    if text.lstrip().startswith("["):
        try:
            rows = json.loads(text)
        except json.JSONDecodeError as exc:
            raise DataError(f"{path}: invalid JSON array: {exc}") from exc
        if not isinstance(rows, list):
            raise DataError(f"{path}: top-level JSON value is not an array")
    else:
        rows = []
        for lineno, line in enumerate(text.splitlines(), start=1):
            if not line.strip():
                continue
            try:
                rows.append(json.loads(line))
            except json.JSONDecodeError as exc:
                raise DataError(f"{path}: line {lineno}: invalid JSON: {exc.msg}") from exc

    return from_records(rows, format_tag=format_tag, source_path=str(path))


def sample_rows(samples: Iterable["MosaicSample"], include_metadata: bool = True) -> list[dict]:
    """Serialize samples to output rows with a fixed key order."""
    rows = []
    for s in samples:
        row: dict = {"instruction": s.overall_instruction, "output": s.overall_response}
        if include_metadata:
            row["strategy"] = s.strategy
            row["rule"] = s.rule.name if s.rule is not None else None
            row["k"] = s.k
            row["member_ids"] = list(s.member_ids)
            row["epoch"] = s.epoch
            row["seed"] = s.seed
        rows.append(row)
    return rows


def write_mosaics(samples: list["MosaicSample"], path: str | Path,
                  include_metadata: bool = True) -> None:
    """Write samples as newline-terminated JSONL; byte-stable per input."""
    if not samples:
        raise DataError("refusing to write an empty sample list")
    write_jsonl(sample_rows(samples, include_metadata), path)


def write_jsonl(rows: Iterable[Mapping], path: str | Path) -> None:
    path = Path(path)
    try:
        with path.open("w", encoding="utf-8", newline="") as fh:
            for row in rows:
                fh.write(json.dumps(row, ensure_ascii=False))
                fh.write("\n")
    except OSError as exc:
        raise DataError(f"cannot write {path}: {exc}") from exc


def read_jsonl(path: str | Path) -> list[dict]:
    path = Path(path)
    try:
        text = path.read_text(encoding="utf-8")
    except OSError as exc:
        raise DataError(f"cannot read {path}: {exc}") from exc
    rows = []
    for lineno, line in enumerate(text.splitlines(), start=1):
        if not line.strip():
            continue
        try:
            rows.append(json.loads(line))
        except json.JSONDecodeError as exc:
            raise DataError(f"{path}: line {lineno}: invalid JSON: {exc.msg}") from exc
    return rows
