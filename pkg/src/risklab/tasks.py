"""Task construction: spread-pair screens, the safe/risky price list, display plans.

The standard battery consists of six screens on the shared prize grid
(1, 16, 21, 38.5).  Each screen starts from a base lottery A and derives two
one-step mean-preserving spreads: B moves the mass off 16, C moves the mass
off 21.  A subject answers two decisions per screen (A vs B, A vs C), so the
battery is scored as six choice patterns.  The companion price list is ten
safe/risky rows indexed by i = 1..10: the safe option pays 16 with chance
1 - i/10 and 21 with chance i/10, the risky option pays 1 and 38.5 with the
same chances.  In the final row the safe option (21 for sure) is dominated
by the risky one (38.5 for sure), which anchors the scale.

Display order never affects task identity: :func:`display_plan` derives all
screen, pair, and button orders from (session seed, subject id, screen
label) through a keyed hash, so every ordering is reproducible and distinct
screens get independent-looking permutations.
"""

from __future__ import annotations

import hashlib
import random
from dataclasses import dataclass
from fractions import Fraction
from typing import Mapping, Sequence

from .geometry import STANDARD_PRIZES
from .lottery import Lottery, LotteryError, MpsFamily, mps_family
from .rationals import as_fraction, format_rational


class TaskError(ValueError):
    """Raised for malformed batteries, unknown options, or bad display keys."""


#: Spread position -> option label on a four-prize screen.
_POSITION_LABELS = {2: "B", 3: "C"}


@dataclass(frozen=True)
class MpsCase:
    """One spread-pair screen: a base lottery A and its spreads B and/or C."""

    case_id: str
    family: MpsFamily

    def __post_init__(self) -> None:
        if len(self.family.base.prizes) != 4:
            raise TaskError("spread-pair screens require a four-prize grid")
        if not self.family.spreads:
            raise TaskError(
                f"case {self.case_id!r} has no defined spreads and no decisions"
            )

    @property
    def base(self) -> Lottery:
        return self.family.base

    @property
    def partial(self) -> bool:
        return self.family.partial

    @property
    def decisions(self) -> tuple[str, ...]:
        """Available decision pairs, in canonical order ('AB', 'AC')."""
        return tuple(
            "A" + _POSITION_LABELS[k] for k in self.family.spread_positions
        )

    def option(self, label: str) -> Lottery:
        """The lottery shown under ``label`` ('A', 'B', or 'C')."""
        if label == "A":
            return self.family.base
        for position, name in _POSITION_LABELS.items():
            if label == name:
                try:
                    return self.family.spread(position)
                except LotteryError as exc:
                    raise TaskError(
                        f"case {self.case_id!r} has no option {label!r} "
                        f"(no mass at position {position})"
                    ) from exc
        raise TaskError(f"unknown option label {label!r}")

    def to_json_dict(self) -> dict:
        return {
            "id": self.case_id,
            "partial": self.partial,
            "base": self.base.to_json_dict(),
            "spreads": {
                str(k): spread.to_json_dict() for k, spread in self.family.spreads
            },
        }

    @classmethod
    def from_json_dict(cls, data: Mapping) -> "MpsCase":
        base = Lottery.from_json_dict(data["base"])
        spreads = tuple(
            (int(k), Lottery.from_json_dict(v)) for k, v in data["spreads"].items()
        )
        return cls(data["id"], MpsFamily(base, spreads))


@dataclass(frozen=True)
class PriceListRow:
    """One safe/risky row; ``p`` is the chance of the better prize on each side."""

    index: int
    p: Fraction
    safe: Lottery
    risky: Lottery


_STANDARD_TABLE: dict[str, dict[str, tuple[int, int, int, int]]] = {
    # Percent chances over the prizes (1, 16, 21, 38.5).  B and C are the
    # embedded spread vectors; construction re-derives them from A and
    # refuses to hand out a battery where the two disagree.
    "C1": {"A": (21, 16, 63, 0), "B": (25, 0, 75, 0), "C": (21, 65, 0, 14)},
    "C2": {"A": (27, 64, 9, 0), "B": (43, 0, 57, 0), "C": (27, 71, 0, 2)},
    "C3": {"A": (57, 16, 27, 0), "B": (61, 0, 39, 0), "C": (57, 37, 0, 6)},
    "C4": {"A": (0, 16, 63, 21), "B": (4, 0, 75, 21), "C": (0, 65, 0, 35)},
    "C5": {"A": (0, 64, 27, 9), "B": (16, 0, 75, 9), "C": (0, 85, 0, 15)},
    "C6": {"A": (0, 16, 27, 57), "B": (4, 0, 39, 57), "C": (0, 37, 0, 63)},
}

CASE_IDS = tuple(_STANDARD_TABLE)


def standard_battery() -> tuple[MpsCase, ...]:
    """The six standard spread-pair screens (C1..C6), self-checked.

    Every case's B and C are regenerated from its base; if regeneration ever
    disagreed with the embedded table the battery would be corrupt, so this
    raises rather than returning it.
    """
    cases = []
    for case_id, row in _STANDARD_TABLE.items():
        base = Lottery.from_percents(STANDARD_PRIZES, row["A"])
        family = mps_family(base)
        case = MpsCase(case_id, family)
        for label in ("B", "C"):
            expected = Lottery.from_percents(STANDARD_PRIZES, row[label])
            if case.option(label) != expected:
                raise TaskError(
                    f"embedded option {label} of case {case_id} does not match "
                    "its regenerated mean-preserving spread"
                )
        cases.append(case)
    return tuple(cases)


def custom_battery(
    bases: Sequence[Lottery], ids: Sequence[str] | None = None
) -> tuple[MpsCase, ...]:
    """Spread-pair screens built from caller-supplied four-prize base lotteries.

    All bases must share one prize vector.  Bases with an interior zero yield
    partial cases (one decision instead of two); a base with no interior mass
    at all has no decisions and is rejected.
    """
    if not bases:
        raise TaskError("custom battery needs at least one base lottery")
    if ids is None:
        ids = tuple(f"U{i}" for i in range(1, len(bases) + 1))
    if len(ids) != len(bases):
        raise TaskError(f"{len(ids)} ids for {len(bases)} bases")
    if len(set(ids)) != len(ids):
        raise TaskError("case ids must be unique")
    prizes = bases[0].prizes
    for base in bases[1:]:
        if base.prizes != prizes:
            raise TaskError("all bases in a battery must share one prize vector")
    return tuple(
        MpsCase(case_id, mps_family(base)) for case_id, base in zip(ids, bases)
    )


def price_list_battery() -> tuple[PriceListRow, ...]:
    """The ten safe/risky rows, p = 1/10 .. 10/10 on the standard grid."""
    rows = []
    for index in range(1, 11):
        p = Fraction(index, 10)
        safe = Lottery(STANDARD_PRIZES, (Fraction(0), 1 - p, p, Fraction(0)))
        risky = Lottery(STANDARD_PRIZES, (1 - p, Fraction(0), Fraction(0), p))
        rows.append(PriceListRow(index, p, safe, risky))
    return tuple(rows)


# --- display plans ----------------------------------------------------------


def _prf(session_seed: int, subject_id: str, label: str) -> random.Random:
    """An independent deterministic stream per (seed, subject, screen label)."""
    key = f"{session_seed}|{subject_id}|{label}".encode()
    digest = hashlib.sha256(key).digest()
    return random.Random(int.from_bytes(digest[:8], "big"))


@dataclass(frozen=True)
class DisplayPlan:
    """Reproducible presentation orders for one subject's screens.

    Pure data: the plan changes what is drawn where, never which lotteries a
    decision compares.
    """

    session_seed: int
    subject_id: str
    case_order: tuple[str, ...]
    pair_order: dict[str, tuple[str, ...]]
    option_order: dict[str, dict[str, tuple[str, str]]]
    row_option_order: tuple[tuple[str, str], ...]

    def to_json_dict(self) -> dict:
        return {
            "session_seed": self.session_seed,
            "subject_id": self.subject_id,
            "case_order": list(self.case_order),
            "pair_order": {k: list(v) for k, v in self.pair_order.items()},
            "option_order": {
                k: {pair: list(sides) for pair, sides in v.items()}
                for k, v in self.option_order.items()
            },
            "row_option_order": [list(pair) for pair in self.row_option_order],
        }

    @classmethod
    def from_json_dict(cls, data: Mapping) -> "DisplayPlan":
        return cls(
            session_seed=int(data["session_seed"]),
            subject_id=data["subject_id"],
            case_order=tuple(data["case_order"]),
            pair_order={k: tuple(v) for k, v in data["pair_order"].items()},
            option_order={
                k: {pair: (sides[0], sides[1]) for pair, sides in v.items()}
                for k, v in data["option_order"].items()
            },
            row_option_order=tuple(
                (pair[0], pair[1]) for pair in data["row_option_order"]
            ),
        )


def display_plan(
    session_seed: int,
    subject_id: str,
    cases: Sequence[MpsCase] | None = None,
    rows: Sequence[PriceListRow] | None = None,
) -> DisplayPlan:
    """Derive a subject's full presentation plan from (seed, subject id).

    Each screen's permutation comes from its own keyed hash stream, so
    reordering one screen's options never perturbs another's, and the same
    inputs always give the same plan.
    """
    if not subject_id:
        raise TaskError("subject id must be non-empty")
    if cases is None:
        cases = standard_battery()
    if rows is None:
        rows = price_list_battery()

    case_ids = [case.case_id for case in cases]
    _prf(session_seed, subject_id, "case-order").shuffle(case_ids)

    pair_order: dict[str, tuple[str, ...]] = {}
    option_order: dict[str, dict[str, tuple[str, str]]] = {}
    for case in cases:
        pairs = list(case.decisions)
        _prf(session_seed, subject_id, f"pairs|{case.case_id}").shuffle(pairs)
        pair_order[case.case_id] = tuple(pairs)
        sides: dict[str, tuple[str, str]] = {}
        for pair in case.decisions:
            stream = _prf(session_seed, subject_id, f"options|{case.case_id}|{pair}")
            left_first = stream.random() < 0.5
            sides[pair] = (pair[0], pair[1]) if left_first else (pair[1], pair[0])
        option_order[case.case_id] = sides

    row_option_order = []
    for row in rows:
        stream = _prf(session_seed, subject_id, f"row|{row.index}")
        safe_left = stream.random() < 0.5
        row_option_order.append(("safe", "risky") if safe_left else ("risky", "safe"))

    return DisplayPlan(
        session_seed=session_seed,
        subject_id=subject_id,
        case_order=tuple(case_ids),
        pair_order=pair_order,
        option_order=option_order,
        row_option_order=tuple(row_option_order),
    )


# --- battery serialization ---------------------------------------------------


def battery_to_json(
    cases: Sequence[MpsCase], rows: Sequence[PriceListRow]
) -> dict:
    """Wire form of a full battery (spread cases plus price list)."""
    return {
        "prizes": cases[0].base.prizes.to_json() if cases else STANDARD_PRIZES.to_json(),
        "mps_cases": [case.to_json_dict() for case in cases],
        "price_list": [
            {
                "index": row.index,
                "p": format_rational(row.p),
                "safe": row.safe.to_json_dict(),
                "risky": row.risky.to_json_dict(),
            }
            for row in rows
        ],
    }


def battery_from_json(data: Mapping) -> tuple[tuple[MpsCase, ...], tuple[PriceListRow, ...]]:
    cases = tuple(MpsCase.from_json_dict(item) for item in data["mps_cases"])
    rows = tuple(
        PriceListRow(
            index=int(item["index"]),
            p=as_fraction(item["p"]),
            safe=Lottery.from_json_dict(item["safe"]),
            risky=Lottery.from_json_dict(item["risky"]),
        )
        for item in data["price_list"]
    )
    return cases, rows
