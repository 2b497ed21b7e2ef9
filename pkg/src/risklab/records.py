"""Choice records and their delimited round trips.

One record is one decision by one subject: a price-list row (part 1) or one
of the two decisions on a spread-pair screen (part 2).  The CSV column order
is the export contract::

    session_id,subject_id,part,screen,pair,chosen,display_seed,timestamp

``pair`` is empty for part-1 records (JSONL uses ``null``).  ``screen`` is
the row index ("1".."10") in part 1 and the case id in part 2.
"""

from __future__ import annotations

import csv
import io
import json
from dataclasses import asdict, dataclass
from pathlib import Path
from typing import Iterable, Sequence


class RecordError(ValueError):
    """Raised for records that violate the schema."""


CSV_COLUMNS = (
    "session_id",
    "subject_id",
    "part",
    "screen",
    "pair",
    "chosen",
    "display_seed",
    "timestamp",
)


@dataclass(frozen=True)
class ChoiceRecord:
    """One decision, as stored in session logs and analysis inputs."""

    session_id: str
    subject_id: str
    part: int
    screen: str
    pair: str | None
    chosen: str
    display_seed: int
    timestamp: str

    def __post_init__(self) -> None:
        if not self.session_id or not self.subject_id:
            raise RecordError("session_id and subject_id must be non-empty")
        if not self.timestamp:
            raise RecordError("timestamp must be non-empty")
        if self.part == 1:
            if self.pair is not None:
                raise RecordError("part-1 records carry no decision pair")
            if self.chosen not in ("safe", "risky"):
                raise RecordError(
                    f"part-1 choice must be 'safe' or 'risky', got {self.chosen!r}"
                )
            try:
                row = int(self.screen)
            except ValueError:
                row = -1
            if not 1 <= row <= 10:
                raise RecordError(f"part-1 screen must be a row 1..10, got {self.screen!r}")
        elif self.part == 2:
            if self.pair not in ("AB", "AC"):
                raise RecordError(f"part-2 pair must be 'AB' or 'AC', got {self.pair!r}")
            if self.chosen not in self.pair:
                raise RecordError(
                    f"choice {self.chosen!r} is not an option of pair {self.pair!r}"
                )
        else:
            raise RecordError(f"part must be 1 or 2, got {self.part!r}")


def records_to_csv_text(records: Sequence[ChoiceRecord]) -> str:
    buffer = io.StringIO()
    writer = csv.writer(buffer, lineterminator="\n")
    writer.writerow(CSV_COLUMNS)
    for r in records:
        writer.writerow(
            (
                r.session_id,
                r.subject_id,
                r.part,
                r.screen,
                "" if r.pair is None else r.pair,
                r.chosen,
                r.display_seed,
                r.timestamp,
            )
        )
    return buffer.getvalue()


def records_from_csv_text(text: str) -> list[ChoiceRecord]:
    reader = csv.reader(io.StringIO(text))
    try:
        header = next(reader)
    except StopIteration:
        raise RecordError("empty CSV input") from None
    if tuple(header) != CSV_COLUMNS:
        raise RecordError(f"unexpected CSV header {header!r}")
    records = []
    for row in reader:
        if not row:
            continue
        if len(row) != len(CSV_COLUMNS):
            raise RecordError(f"CSV row has {len(row)} fields: {row!r}")
        records.append(
            ChoiceRecord(
                session_id=row[0],
                subject_id=row[1],
                part=int(row[2]),
                screen=row[3],
                pair=row[4] or None,
                chosen=row[5],
                display_seed=int(row[6]),
                timestamp=row[7],
            )
        )
    return records


def records_to_jsonl_text(records: Sequence[ChoiceRecord]) -> str:
    lines = [json.dumps(asdict(r), separators=(",", ":")) for r in records]
    return "".join(line + "\n" for line in lines)


def records_from_jsonl_text(text: str) -> list[ChoiceRecord]:
    records = []
    for lineno, line in enumerate(text.splitlines(), start=1):
        if not line.strip():
            continue
        try:
            data = json.loads(line)
        except json.JSONDecodeError as exc:
            raise RecordError(f"bad JSON on line {lineno}: {exc}") from exc
        unknown = set(data) - set(CSV_COLUMNS)
        if unknown:
            raise RecordError(f"unknown record fields on line {lineno}: {sorted(unknown)}")
        records.append(ChoiceRecord(**data))
    return records


def write_records(records: Sequence[ChoiceRecord], path: str | Path) -> None:
    """Write records to ``path``; format chosen by suffix (.csv or .jsonl)."""
    path = Path(path)
    if path.suffix == ".csv":
        path.write_text(records_to_csv_text(records))
    else:
        path.write_text(records_to_jsonl_text(records))


def read_records(path: str | Path) -> list[ChoiceRecord]:
    """Read records from ``path``; format chosen by suffix (.csv or .jsonl)."""
    path = Path(path)
    text = path.read_text()
    if path.suffix == ".csv":
        return records_from_csv_text(text)
    return records_from_jsonl_text(text)
