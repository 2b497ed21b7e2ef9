"""Bundled aggregate results from a 72-subject two-part study.

Seventy-two subjects completed the ten-row safe/risky price list and all six
spread-pair screens (432 choice patterns in total).  Only aggregates are
distributed — per-case pattern counts, the safe-count histogram, the
(A, A)-share cross-tab by safe count, and three subject-consistency
constants; the raw per-subject records are not recoverable from them.  The
loader verifies a checksum and the internal marginals before handing the
numbers out, so a silent edit of one count cannot slip through.
"""

from __future__ import annotations

import hashlib
import json
from dataclasses import dataclass
from fractions import Fraction


class ReferenceDataError(ValueError):
    """Raised when the bundled aggregates fail their integrity checks."""


_PAYLOAD = {
    "n_subjects": 72,
    # Pattern counts per spread-pair screen, patterns ordered AA, BA, AC, BC.
    "pattern_counts": {
        "C1": {"AA": 15, "BA": 17, "AC": 23, "BC": 17},
        "C2": {"AA": 19, "BA": 5, "AC": 44, "BC": 4},
        "C3": {"AA": 18, "BA": 17, "AC": 26, "BC": 11},
        "C4": {"AA": 23, "BA": 17, "AC": 21, "BC": 11},
        "C5": {"AA": 31, "BA": 15, "AC": 18, "BC": 8},
        "C6": {"AA": 22, "BA": 12, "AC": 25, "BC": 13},
    },
    # Subjects by price-list safe count, s = 0..9 (none chose safe in row 10).
    "safe_count_histogram": [0, 1, 0, 2, 19, 5, 12, 16, 11, 6],
    # s -> [(A, A) choices, total choices] over the subjects with that count.
    "aa_by_safe_count": {
        "4": [37, 114],
        "5": [6, 30],
        "6": [22, 72],
        "7": [31, 96],
        "8": [23, 66],
        "9": [7, 36],
    },
    # Subject-level consistency constants (documented, not recomputable here).
    "consistency": {
        "perfect": 2,
        "majority": 31,
        "most_consistent_16": {"n": 16, "red_share": 0.25, "middle_share": 0.688},
    },
}

_CHECKSUM = "e1d1dc0863d7004963a90447bec157476ea4aa304e6129c124178ff85a0f74a7"


@dataclass(frozen=True)
class ReferenceDataset:
    """The bundled aggregates, validated."""

    n_subjects: int
    case_ids: tuple[str, ...]
    pattern_counts: dict[str, dict[str, int]]
    safe_count_histogram: tuple[int, ...]
    aa_by_safe_count: dict[int, tuple[int, int]]
    perfect_consistency: int
    majority_consistency: int
    most_consistent_n: int
    most_consistent_red_share: float
    most_consistent_middle_share: float

    def pooled_counts(self) -> dict[str, int]:
        pooled: dict[str, int] = {}
        for counts in self.pattern_counts.values():
            for key, n in counts.items():
                pooled[key] = pooled.get(key, 0) + n
        return pooled

    def aa_share(self, safe_count: int) -> Fraction:
        aa, total = self.aa_by_safe_count[safe_count]
        return Fraction(aa, total)


def _canonical_bytes() -> bytes:
    return json.dumps(_PAYLOAD, sort_keys=True, separators=(",", ":")).encode()


def load_reference_dataset() -> ReferenceDataset:
    """Validate and return the bundled aggregates."""
    digest = hashlib.sha256(_canonical_bytes()).hexdigest()
    if digest != _CHECKSUM:
        raise ReferenceDataError(
            f"reference aggregates failed their checksum ({digest})"
        )
    n = _PAYLOAD["n_subjects"]
    counts = {case: dict(row) for case, row in _PAYLOAD["pattern_counts"].items()}
    for case, row in counts.items():
        if sum(row.values()) != n:
            raise ReferenceDataError(f"pattern counts of {case} do not sum to {n}")
    histogram = tuple(_PAYLOAD["safe_count_histogram"])
    if len(histogram) != 10 or sum(histogram) != n:
        raise ReferenceDataError("safe-count histogram does not cover the panel")
    cross = {int(s): (aa, total) for s, (aa, total) in _PAYLOAD["aa_by_safe_count"].items()}
    for s, (aa, total) in cross.items():
        if total != 6 * histogram[s]:
            raise ReferenceDataError(
                f"cross-tab at safe count {s} disagrees with the histogram"
            )
        if not 0 <= aa <= total:
            raise ReferenceDataError(f"impossible (A, A) count at safe count {s}")
    consistency = _PAYLOAD["consistency"]
    top = consistency["most_consistent_16"]
    return ReferenceDataset(
        n_subjects=n,
        case_ids=tuple(counts),
        pattern_counts=counts,
        safe_count_histogram=histogram,
        aa_by_safe_count=cross,
        perfect_consistency=consistency["perfect"],
        majority_consistency=consistency["majority"],
        most_consistent_n=top["n"],
        most_consistent_red_share=top["red_share"],
        most_consistent_middle_share=top["middle_share"],
    )
