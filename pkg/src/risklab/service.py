"""Live-session service: durable event logs, a pure state fold, exact payouts.

Every session is one append-only JSONL file of events (created, subject
registered, choice submitted, subject finalized, session closed).  The
in-memory :class:`SessionState` is a pure fold over those events, so a
restart that re-reads the directory reconstructs exactly the state whose
writes were acknowledged, and exporting twice yields byte-identical output.

Protocol enforced at submission time (invalid requests are rejected before
anything is appended):

* the price list is answered first, rows in order, and a safe choice after
  a risky one (a second switch) is refused;
* each spread-screen decision is answered once; the two decisions of one
  screen may arrive in either order after the price list is done;
* re-sending a decision with the same value is acknowledged idempotently,
  with a different value it is a conflict;
* finalizing requires a complete subject and happens once.

Payouts draw one price-list row and one spread-screen decision, then
realize the lottery the subject chose there by inverse CDF with a 64-bit
uniform compared as an exact rational, so the transcript (seed, drawn bits,
realized prizes) replays bit-for-bit.
"""

from __future__ import annotations

import hashlib
import json
import random
import re
import secrets
import threading
from dataclasses import dataclass, field
from datetime import datetime, timezone
from fractions import Fraction
from pathlib import Path
from typing import Callable, Mapping, Sequence

from .geometry import geometry_json
from .lottery import Lottery
from .rationals import format_rational
from .records import ChoiceRecord, records_to_csv_text, records_to_jsonl_text
from .tasks import (
    DisplayPlan,
    MpsCase,
    PriceListRow,
    battery_from_json,
    battery_to_json,
    display_plan,
    price_list_battery,
    standard_battery,
)

_ID_PATTERN = re.compile(r"^[A-Za-z0-9][A-Za-z0-9_-]{0,63}$")


class ServiceError(Exception):
    """A rejected request; ``status`` is the HTTP status it maps to."""

    def __init__(self, status: int, code: str, message: str):
        super().__init__(message)
        self.status = status
        self.code = code
        self.message = message


def _bad(code: str, message: str) -> ServiceError:
    return ServiceError(400, code, message)


def _conflict(code: str, message: str) -> ServiceError:
    return ServiceError(409, code, message)


def _missing(code: str, message: str) -> ServiceError:
    return ServiceError(404, code, message)


# --- payout draws ------------------------------------------------------------


def realize_prize(lottery: Lottery, bits: int) -> Fraction:
    """The prize hit by the uniform ``bits``/2**64 under the lottery's CDF."""
    if not 0 <= bits < 2**64:
        raise ValueError("draw bits must be a 64-bit integer")
    u = Fraction(bits, 2**64)
    cumulative = Fraction(0)
    for prize, p in zip(lottery.prizes.amounts, lottery.probs):
        cumulative += p
        if u < cumulative:
            return prize
    return lottery.prizes.amounts[-1]  # unreachable: probabilities sum to 1


def payout_seed(session_seed: int, subject_id: str) -> int:
    """The default, reproducible payout seed for a subject."""
    digest = hashlib.sha256(f"{session_seed}|{subject_id}|payout".encode()).digest()
    return int.from_bytes(digest[:8], "big")


def compute_payout(
    cases: Sequence[MpsCase],
    rows: Sequence[PriceListRow],
    list_choices: Mapping[int, str],
    screen_choices: Mapping[str, Mapping[str, str]],
    seed: int,
) -> dict:
    """Draw and realize the payout for a completed subject (pure function)."""
    stream = random.Random(seed)

    row = rows[stream.randrange(len(rows))]
    row_choice = list_choices[row.index]
    row_bits = stream.getrandbits(64)
    row_lottery = row.safe if row_choice == "safe" else row.risky
    row_prize = realize_prize(row_lottery, row_bits)

    decisions = [(case, pair) for case in cases for pair in case.decisions]
    case, pair = decisions[stream.randrange(len(decisions))]
    case_choice = screen_choices[case.case_id][pair]
    case_bits = stream.getrandbits(64)
    case_prize = realize_prize(case.option(case_choice), case_bits)

    return {
        # stringified like draw_bits: payout seeds exceed 2**53, which JSON
        # consumers with double-precision numbers would silently corrupt
        "seed": str(seed),
        "price_list": {
            "row_index": row.index,
            "chosen": row_choice,
            "draw_bits": str(row_bits),
            "prize": format_rational(row_prize),
        },
        "spread_screen": {
            "case_id": case.case_id,
            "pair": pair,
            "chosen": case_choice,
            "draw_bits": str(case_bits),
            "prize": format_rational(case_prize),
        },
        "total": format_rational(row_prize + case_prize),
    }


# --- session state (pure fold) -------------------------------------------------


@dataclass
class SubjectState:
    token: str
    list_choices: dict[int, str] = field(default_factory=dict)
    screen_choices: dict[str, dict[str, str]] = field(default_factory=dict)
    submitted_at: dict[str, str] = field(default_factory=dict)
    order: list[tuple[int, str, str | None, str, str]] = field(default_factory=list)
    payout: dict | None = None


@dataclass
class SessionState:
    session_id: str
    seed: int
    cases: tuple[MpsCase, ...]
    rows: tuple[PriceListRow, ...]
    created_at: str
    closed: bool = False
    subjects: dict[str, SubjectState] = field(default_factory=dict)

    def apply(self, event: Mapping) -> None:
        kind = event["type"]
        if kind == "subject_registered":
            self.subjects[event["subject_id"]] = SubjectState(token=event["token"])
        elif kind == "choice_submitted":
            subject = self.subjects[event["subject_id"]]
            part = event["part"]
            screen = event["screen"]
            pair = event["pair"]
            chosen = event["chosen"]
            if part == 1:
                subject.list_choices[int(screen)] = chosen
            else:
                subject.screen_choices.setdefault(screen, {})[pair] = chosen
            subject.order.append((part, screen, pair, chosen, event["submitted_at"]))
        elif kind == "subject_finalized":
            self.subjects[event["subject_id"]].payout = event["draw"]
        elif kind == "session_closed":
            self.closed = True
        elif kind != "session_created":
            raise ValueError(f"unknown event type {kind!r}")

    @classmethod
    def from_events(cls, events: Sequence[Mapping]) -> "SessionState":
        if not events or events[0]["type"] != "session_created":
            raise ValueError("event log must start with session_created")
        head = events[0]
        cases, rows = battery_from_json(head["battery"])
        state = cls(
            session_id=head["session_id"],
            seed=head["seed"],
            cases=cases,
            rows=rows,
            created_at=head["created_at"],
        )
        for event in events[1:]:
            state.apply(event)
        return state

    def snapshot(self) -> dict:
        """A plain-data view of the full state, for comparisons and dashboards."""
        return {
            "session_id": self.session_id,
            "seed": self.seed,
            "closed": self.closed,
            "battery": battery_to_json(self.cases, self.rows),
            "subjects": {
                sid: {
                    "token": s.token,
                    "list_choices": {str(k): v for k, v in sorted(s.list_choices.items())},
                    "screen_choices": {
                        case: dict(sorted(pairs.items()))
                        for case, pairs in sorted(s.screen_choices.items())
                    },
                    "order": [list(item) for item in s.order],
                    "payout": s.payout,
                }
                for sid, s in sorted(self.subjects.items())
            },
        }

    # -- protocol helpers --

    def subject(self, subject_id: str) -> SubjectState:
        try:
            return self.subjects[subject_id]
        except KeyError:
            raise _missing("unknown_subject", f"no subject {subject_id!r}") from None

    def part1_complete(self, subject: SubjectState) -> bool:
        return len(subject.list_choices) == len(self.rows)

    def part2_complete(self, subject: SubjectState) -> bool:
        return all(
            pair in subject.screen_choices.get(case.case_id, {})
            for case in self.cases
            for pair in case.decisions
        )

    def next_row_index(self, subject: SubjectState) -> int | None:
        for row in self.rows:
            if row.index not in subject.list_choices:
                return row.index
        return None

    def pending_decisions(self, subject: SubjectState) -> list[tuple[str, str]]:
        return [
            (case.case_id, pair)
            for case in self.cases
            for pair in case.decisions
            if pair not in subject.screen_choices.get(case.case_id, {})
        ]


# --- the store -----------------------------------------------------------------


def _now_iso() -> str:
    return datetime.now(timezone.utc).isoformat()


class SessionStore:
    """Durable multi-session store over a directory of JSONL event logs."""

    def __init__(self, data_dir: str | Path, clock: Callable[[], str] = _now_iso):
        self.data_dir = Path(data_dir)
        self.data_dir.mkdir(parents=True, exist_ok=True)
        self._clock = clock
        self._lock = threading.RLock()
        self._states: dict[str, SessionState] = {}
        for path in sorted(self.data_dir.glob("*.jsonl")):
            events = [
                json.loads(line)
                for line in path.read_text().splitlines()
                if line.strip()
            ]
            if events:
                state = SessionState.from_events(events)
                self._states[state.session_id] = state

    # -- internals --

    def _path(self, session_id: str) -> Path:
        return self.data_dir / f"{session_id}.jsonl"

    def _append(self, session_id: str, event: dict) -> None:
        line = json.dumps(event, separators=(",", ":"))
        with open(self._path(session_id), "a") as fh:
            fh.write(line + "\n")
            fh.flush()

    def _state(self, session_id: str) -> SessionState:
        try:
            return self._states[session_id]
        except KeyError:
            raise _missing("unknown_session", f"no session {session_id!r}") from None

    def _open_state(self, session_id: str) -> SessionState:
        state = self._state(session_id)
        if state.closed:
            raise _conflict("session_closed", f"session {session_id!r} is closed")
        return state

    def _authorized(self, state: SessionState, subject_id: str, token: str) -> SubjectState:
        subject = state.subject(subject_id)
        if token != subject.token:
            raise ServiceError(403, "bad_token", "subject token does not match")
        return subject

    # -- operations --

    def create_session(
        self,
        session_id: str | None = None,
        seed: int = 0,
        battery: Mapping | None = None,
    ) -> dict:
        with self._lock:
            if session_id is None:
                session_id = "s" + secrets.token_hex(4)
                while session_id in self._states:
                    session_id = "s" + secrets.token_hex(4)
            if not _ID_PATTERN.match(session_id):
                raise _bad("bad_id", f"invalid session id {session_id!r}")
            if session_id in self._states or self._path(session_id).exists():
                raise _conflict("duplicate_session", f"session {session_id!r} exists")
            if seed < 0:
                raise _bad("bad_seed", "seed must be non-negative")
            if battery is None:
                cases, rows = standard_battery(), price_list_battery()
            else:
                try:
                    cases, rows = battery_from_json(battery)
                except Exception as exc:
                    raise _bad("bad_battery", f"battery JSON rejected: {exc}") from exc
                if not cases or not rows:
                    raise _bad("bad_battery", "battery needs screens and price-list rows")
            event = {
                "type": "session_created",
                "session_id": session_id,
                "seed": seed,
                "battery": battery_to_json(cases, rows),
                "created_at": self._clock(),
            }
            self._append(session_id, event)
            self._states[session_id] = SessionState.from_events([event])
            return {"session_id": session_id, "seed": seed}

    def register_subject(self, session_id: str, subject_id: str | None = None) -> dict:
        with self._lock:
            state = self._open_state(session_id)
            if subject_id is None:
                subject_id = f"S{len(state.subjects) + 1:03d}"
                while subject_id in state.subjects:
                    subject_id = "S" + secrets.token_hex(3)
            if not _ID_PATTERN.match(subject_id):
                raise _bad("bad_id", f"invalid subject id {subject_id!r}")
            if subject_id in state.subjects:
                raise _conflict("duplicate_subject", f"subject {subject_id!r} exists")
            token = secrets.token_hex(16)
            event = {
                "type": "subject_registered",
                "subject_id": subject_id,
                "token": token,
                "registered_at": self._clock(),
            }
            self._append(session_id, event)
            state.apply(event)
            return {"subject_id": subject_id, "token": token}

    def next_step(self, session_id: str, subject_id: str) -> dict:
        with self._lock:
            state = self._state(session_id)
            subject = state.subject(subject_id)
            plan = display_plan(state.seed, subject_id, state.cases, state.rows)

            row_index = state.next_row_index(subject)
            if row_index is not None:
                row = state.rows[row_index - 1]
                return {
                    "kind": "price_list_row",
                    "part": 1,
                    "screen": str(row.index),
                    "row_index": row.index,
                    "p": format_rational(row.p),
                    "options": {
                        "safe": row.safe.to_json_dict(),
                        "risky": row.risky.to_json_dict(),
                    },
                    "option_order": list(plan.row_option_order[row.index - 1]),
                }

            by_case = {case.case_id: case for case in state.cases}
            pending = {
                case_id: [
                    pair
                    for pair in plan.pair_order[case_id]
                    if pair not in subject.screen_choices.get(case_id, {})
                ]
                for case_id in plan.case_order
            }
            for case_id in plan.case_order:
                if pending[case_id]:
                    pair = pending[case_id][0]
                    case = by_case[case_id]
                    return {
                        "kind": "spread_decision",
                        "part": 2,
                        "screen": case_id,
                        "pair": pair,
                        "options": {
                            label: case.option(label).to_json_dict() for label in pair
                        },
                        "option_order": list(plan.option_order[case_id][pair]),
                    }

            if subject.payout is None:
                return {"kind": "finalize"}
            return {"kind": "done", "payout": subject.payout}

    def submit_choice(
        self,
        session_id: str,
        subject_id: str,
        token: str,
        part: int,
        screen: str,
        pair: str | None,
        chosen: str,
    ) -> dict:
        with self._lock:
            state = self._open_state(session_id)
            subject = self._authorized(state, subject_id, token)
            if subject.payout is not None:
                raise _conflict("already_finalized", "subject is finalized")

            if part == 1:
                self._validate_row_submission(state, subject, screen, pair, chosen)
                duplicate = int(screen) in subject.list_choices
            elif part == 2:
                self._validate_screen_submission(state, subject, screen, pair, chosen)
                duplicate = pair in subject.screen_choices.get(screen, {})
            else:
                raise _bad("bad_part", f"part must be 1 or 2, got {part!r}")

            if duplicate:
                # _validate_* raised already unless the value matches: idempotent ack.
                return {"status": "ok", "duplicate": True}

            event = {
                "type": "choice_submitted",
                "subject_id": subject_id,
                "part": part,
                "screen": screen,
                "pair": pair,
                "chosen": chosen,
                "submitted_at": self._clock(),
            }
            self._append(session_id, event)
            state.apply(event)
            return {"status": "ok", "duplicate": False}

    def _validate_row_submission(
        self,
        state: SessionState,
        subject: SubjectState,
        screen: str,
        pair: str | None,
        chosen: str,
    ) -> None:
        if pair is not None:
            raise _bad("bad_pair", "price-list submissions carry no pair")
        try:
            index = int(screen)
        except ValueError:
            raise _bad("bad_screen", f"price-list screen must be a row index, got {screen!r}")
        if not 1 <= index <= len(state.rows):
            raise _bad("bad_screen", f"row {index} outside 1..{len(state.rows)}")
        if chosen not in ("safe", "risky"):
            raise _bad("bad_choice", f"price-list choice must be safe/risky, got {chosen!r}")
        if index in subject.list_choices:
            if subject.list_choices[index] != chosen:
                raise _conflict("conflict", f"row {index} already answered differently")
            return  # identical duplicate: idempotent
        expected = state.next_row_index(subject)
        if index != expected:
            raise _conflict(
                "wrong_screen",
                f"expected row {expected}, got {index} (rows are answered in order)",
            )
        if chosen == "safe" and any(
            c == "risky" for c in subject.list_choices.values()
        ):
            raise _conflict(
                "multi_switch",
                "safe after risky would be a second switch point; refused",
            )

    def _validate_screen_submission(
        self,
        state: SessionState,
        subject: SubjectState,
        screen: str,
        pair: str | None,
        chosen: str,
    ) -> None:
        if not state.part1_complete(subject):
            raise _conflict("wrong_screen", "the price list is answered first")
        by_case = {case.case_id: case for case in state.cases}
        if screen not in by_case:
            raise _bad("bad_screen", f"unknown screen {screen!r}")
        case = by_case[screen]
        if pair not in case.decisions:
            raise _bad("bad_pair", f"screen {screen!r} has no decision {pair!r}")
        if chosen not in pair:
            raise _bad("bad_choice", f"choice {chosen!r} is not an option of {pair!r}")
        existing = subject.screen_choices.get(screen, {}).get(pair)
        if existing is not None and existing != chosen:
            raise _conflict("conflict", f"decision {pair} on {screen} already answered differently")

    def finalize_subject(
        self,
        session_id: str,
        subject_id: str,
        token: str,
        seed: int | None = None,
    ) -> dict:
        with self._lock:
            state = self._open_state(session_id)
            subject = self._authorized(state, subject_id, token)
            if subject.payout is not None:
                raise _conflict("already_finalized", "subject is already finalized")
            if not (state.part1_complete(subject) and state.part2_complete(subject)):
                raise _conflict("incomplete", "subject has unanswered decisions")
            if seed is None:
                seed = payout_seed(state.seed, subject_id)
            if seed < 0:
                raise _bad("bad_seed", "payout seed must be non-negative")
            draw = compute_payout(
                state.cases, state.rows, subject.list_choices, subject.screen_choices, seed
            )
            event = {
                "type": "subject_finalized",
                "subject_id": subject_id,
                "draw": draw,
                "finalized_at": self._clock(),
            }
            self._append(session_id, event)
            state.apply(event)
            return draw

    def close_session(self, session_id: str) -> dict:
        with self._lock:
            state = self._open_state(session_id)
            event = {"type": "session_closed", "closed_at": self._clock()}
            self._append(session_id, event)
            state.apply(event)
            return {"session_id": session_id, "closed": True}

    def export_records(self, session_id: str) -> list[ChoiceRecord]:
        with self._lock:
            state = self._state(session_id)
            records = []
            for subject_id, subject in sorted(state.subjects.items()):
                for part, screen, pair, chosen, submitted_at in subject.order:
                    records.append(
                        ChoiceRecord(
                            session_id=state.session_id,
                            subject_id=subject_id,
                            part=part,
                            screen=screen,
                            pair=pair,
                            chosen=chosen,
                            display_seed=state.seed,
                            timestamp=submitted_at,
                        )
                    )
            return records

    def export_text(self, session_id: str, fmt: str) -> str:
        records = self.export_records(session_id)
        if fmt == "csv":
            return records_to_csv_text(records)
        if fmt == "jsonl":
            return records_to_jsonl_text(records)
        raise _bad("bad_format", f"format must be csv or jsonl, got {fmt!r}")

    def dashboard(self, session_id: str) -> dict:
        with self._lock:
            state = self._state(session_id)
            pattern_counts: dict[str, dict[str, int]] = {
                case.case_id: {"AA": 0, "BA": 0, "AC": 0, "BC": 0}
                for case in state.cases
            }
            histogram: dict[str, int] = {}
            progress = {}
            for subject_id, subject in sorted(state.subjects.items()):
                done1 = state.part1_complete(subject)
                done2 = state.part2_complete(subject)
                progress[subject_id] = {
                    "price_list_rows": len(subject.list_choices),
                    "screen_decisions": sum(
                        len(pairs) for pairs in subject.screen_choices.values()
                    ),
                    "complete": done1 and done2,
                    "finalized": subject.payout is not None,
                }
                if done1:
                    s = sum(1 for c in subject.list_choices.values() if c == "safe")
                    histogram[str(s)] = histogram.get(str(s), 0) + 1
                if done2:
                    for case in state.cases:
                        pairs = subject.screen_choices[case.case_id]
                        if "AB" in pairs and "AC" in pairs:
                            key = pairs["AB"] + pairs["AC"]
                            pattern_counts[case.case_id][key] += 1
            return {
                "session_id": state.session_id,
                "seed": state.seed,
                "closed": state.closed,
                "n_subjects": len(state.subjects),
                "progress": progress,
                "pattern_counts": pattern_counts,
                "safe_count_histogram": dict(sorted(histogram.items(), key=lambda kv: int(kv[0]))),
                "geometry": geometry_json(),
            }


# --- HTTP layer ------------------------------------------------------------------


def create_app(store: SessionStore):
    """The FastAPI application over a store (framework imported lazily)."""
    from .webapi import build_app

    return build_app(store)
