"""Statistical analysis of choice records and of the bundled reference aggregates.

The pipeline turns raw :class:`~risklab.records.ChoiceRecord` rows into
per-subject summaries, pattern tables, safe-count histograms, and a small
set of chi-square tests:

* ``random_behavior_test`` — pooled pattern counts against the uniform
  quarter-share benchmark (df 3);
* ``case_homogeneity_test`` — the cases-by-patterns contingency table;
* ``flat_aa_share_test`` — per-safe-count (A, A) counts against a constant
  share, the dissociation check between the two elicitation methods.

Exclusions are listwise per part (a subject missing price-list rows still
counts in the pattern table, and vice versa) and every exclusion or protocol
violation is reported as a flag string, never silently dropped.  A safe
count of 10 (safe in the dominated final row) is flagged and left out of
safe-count inversions and the cross-tab.
"""

from __future__ import annotations

from collections import Counter
from dataclasses import dataclass
from fractions import Fraction
from typing import Mapping, Sequence

from .chisq import chi2_sf
from .geometry import PATTERN_ORDER, ChoicePattern
from .records import ChoiceRecord
from .reference_data import ReferenceDataset, load_reference_dataset
from .tasks import CASE_IDS


class AnalysisError(ValueError):
    """Raised for malformed inputs to the statistics layer."""


@dataclass(frozen=True)
class ChiSquareResult:
    statistic: float
    df: int
    p_value: float

    def to_json_dict(self) -> dict:
        return {"statistic": self.statistic, "df": self.df, "p_value": self.p_value}


def chisq_goodness_of_fit(
    observed: Sequence[float],
    expected: Sequence[float],
    df: int | None = None,
    rescale: bool = True,
) -> ChiSquareResult:
    """Pearson goodness of fit of counts against expected weights.

    With ``rescale`` (the multinomial convention) ``expected`` may be
    proportions or counts and is scaled to the observed total.  With
    ``rescale=False`` the expected values are taken as absolute counts —
    the right convention when each cell has its own denominator, as in the
    flat-share test.  ``df`` defaults to cells minus one.
    """
    if len(observed) != len(expected):
        raise AnalysisError(
            f"{len(observed)} observed cells vs {len(expected)} expected"
        )
    if len(observed) < 2:
        raise AnalysisError("goodness of fit needs at least two cells")
    total = float(sum(observed))
    if total <= 0:
        raise AnalysisError("observed counts sum to zero")
    weight_total = float(sum(expected))
    if weight_total <= 0:
        raise AnalysisError("expected weights sum to zero")
    scale = total / weight_total if rescale else 1.0
    statistic = 0.0
    for o, w in zip(observed, expected):
        e = float(w) * scale
        if e <= 0:
            raise AnalysisError(f"expected cell is not positive: {w}")
        statistic += (float(o) - e) ** 2 / e
    if df is None:
        df = len(observed) - 1
    return ChiSquareResult(statistic, df, chi2_sf(statistic, df))


def chisq_homogeneity(table: Sequence[Sequence[float]]) -> ChiSquareResult:
    """Pearson chi-square for an r-by-c contingency table, df (r-1)(c-1)."""
    rows = [list(map(float, row)) for row in table]
    if len(rows) < 2 or any(len(row) != len(rows[0]) for row in rows):
        raise AnalysisError("contingency table must be rectangular with >= 2 rows")
    if len(rows[0]) < 2:
        raise AnalysisError("contingency table needs at least two columns")
    row_sums = [sum(row) for row in rows]
    col_sums = [sum(col) for col in zip(*rows)]
    total = sum(row_sums)
    if any(s <= 0 for s in row_sums) or any(s <= 0 for s in col_sums):
        raise AnalysisError("every row and column must have positive total")
    statistic = 0.0
    for i, row in enumerate(rows):
        for j, o in enumerate(row):
            e = row_sums[i] * col_sums[j] / total
            statistic += (o - e) ** 2 / e
    df = (len(rows) - 1) * (len(rows[0]) - 1)
    return ChiSquareResult(statistic, df, chi2_sf(statistic, df))


# --- per-subject summaries ---------------------------------------------------


@dataclass(frozen=True)
class SubjectSummary:
    """One subject's choices, grouped and completeness-checked."""

    subject_id: str
    list_choices: dict[int, str]
    patterns: dict[str, ChoicePattern]
    expected_cases: tuple[str, ...]
    n_rows: int
    flags: tuple[str, ...]

    @property
    def complete_part1(self) -> bool:
        return len(self.list_choices) == self.n_rows

    @property
    def complete_part2(self) -> bool:
        return all(case in self.patterns for case in self.expected_cases)

    @property
    def safe_count(self) -> int | None:
        if not self.complete_part1:
            return None
        return sum(1 for c in self.list_choices.values() if c == "safe")

    @property
    def single_switch(self) -> bool | None:
        if not self.complete_part1:
            return None
        choices = [self.list_choices[i] for i in sorted(self.list_choices)]
        s = sum(1 for c in choices if c == "safe")
        return choices == ["safe"] * s + ["risky"] * (len(choices) - s)

    @property
    def modal_count(self) -> int | None:
        if not self.patterns:
            return None
        return Counter(p.key for p in self.patterns.values()).most_common(1)[0][1]


def summarize_subjects(
    records: Sequence[ChoiceRecord],
    case_ids: Sequence[str] | None = None,
    n_rows: int = 10,
) -> list[SubjectSummary]:
    """Group records by subject, audit them, and summarize each subject.

    Duplicate submissions for one decision keep the first occurrence and add
    a flag; partially answered screens simply leave that case out of the
    subject's patterns.
    """
    if case_ids is None:
        case_ids = CASE_IDS
    by_subject: dict[str, list[ChoiceRecord]] = {}
    for record in records:
        by_subject.setdefault(record.subject_id, []).append(record)

    summaries = []
    for subject_id, rows in by_subject.items():
        flags: list[str] = []
        list_choices: dict[int, str] = {}
        part2: dict[str, dict[str, str]] = {}
        for record in rows:
            if record.part == 1:
                index = int(record.screen)
                if index in list_choices:
                    flags.append(f"duplicate price-list row {index}")
                    continue
                list_choices[index] = record.chosen
            else:
                screen = part2.setdefault(record.screen, {})
                if record.pair in screen:
                    flags.append(f"duplicate decision {record.pair} on {record.screen}")
                    continue
                screen[record.pair] = record.chosen
        patterns: dict[str, ChoicePattern] = {}
        for case_id, decisions in part2.items():
            if "AB" in decisions and "AC" in decisions:
                patterns[case_id] = ChoicePattern(decisions["AB"], decisions["AC"])
        if len(list_choices) not in (0, n_rows):
            flags.append(f"incomplete price list ({len(list_choices)}/{n_rows} rows)")
        missing = [c for c in case_ids if c not in patterns]
        if part2 and missing:
            flags.append("incomplete screens (" + ", ".join(missing) + ")")
        if list_choices.get(n_rows) == "safe":
            flags.append("safe in the dominated final row (protocol violation)")
        summaries.append(
            SubjectSummary(
                subject_id=subject_id,
                list_choices=list_choices,
                patterns=patterns,
                expected_cases=tuple(case_ids),
                n_rows=n_rows,
                flags=tuple(flags),
            )
        )
    summaries.sort(key=lambda s: s.subject_id)
    return summaries


# --- pattern tables -----------------------------------------------------------


@dataclass(frozen=True)
class PatternTable:
    """Pattern counts per spread-pair screen, plus pooled marginals."""

    case_ids: tuple[str, ...]
    counts: dict[str, dict[str, int]]

    def pooled(self) -> dict[str, int]:
        pooled = {key: 0 for key in PATTERN_ORDER}
        for case in self.case_ids:
            for key, n in self.counts[case].items():
                pooled[key] += n
        return pooled

    def matrix(self) -> list[list[int]]:
        return [
            [self.counts[case][key] for key in PATTERN_ORDER] for case in self.case_ids
        ]

    @property
    def n_choices(self) -> int:
        return sum(self.pooled().values())

    def pooled_shares(self) -> dict[str, float]:
        total = self.n_choices
        if total == 0:
            raise AnalysisError("empty pattern table has no shares")
        return {key: n / total for key, n in self.pooled().items()}

    def to_json_dict(self) -> dict:
        return {
            "case_ids": list(self.case_ids),
            "counts": {case: dict(self.counts[case]) for case in self.case_ids},
            "pooled": self.pooled(),
        }


def pattern_table(
    summaries: Sequence[SubjectSummary],
    case_ids: Sequence[str] | None = None,
) -> PatternTable:
    """Tabulate patterns over subjects with all screens answered."""
    if case_ids is None:
        case_ids = CASE_IDS
    counts = {case: {key: 0 for key in PATTERN_ORDER} for case in case_ids}
    for summary in summaries:
        if not summary.complete_part2:
            continue
        for case in case_ids:
            counts[case][summary.patterns[case].key] += 1
    return PatternTable(tuple(case_ids), counts)


def reference_pattern_table(dataset: ReferenceDataset | None = None) -> PatternTable:
    """The bundled study's pattern table."""
    if dataset is None:
        dataset = load_reference_dataset()
    counts = {
        case: {key: dataset.pattern_counts[case][key] for key in PATTERN_ORDER}
        for case in dataset.case_ids
    }
    return PatternTable(dataset.case_ids, counts)


# --- headline tests -----------------------------------------------------------


def random_behavior_test(table: PatternTable) -> ChiSquareResult:
    """Pooled pattern counts against uniform quarter shares (df 3)."""
    pooled = table.pooled()
    observed = [pooled[key] for key in PATTERN_ORDER]
    return chisq_goodness_of_fit(observed, [1, 1, 1, 1])


def case_homogeneity_test(table: PatternTable) -> ChiSquareResult:
    """Whether the pattern mix differs across screens (contingency chi-square).

    Conditions on the observed pattern margin: patterns nobody ever chose
    contribute no information and are dropped, with the degrees of freedom
    shrinking accordingly.  At least two patterns must occur.
    """
    pooled = table.pooled()
    active = [key for key in PATTERN_ORDER if pooled[key] > 0]
    if len(active) < 2:
        raise AnalysisError(
            "homogeneity needs at least two observed patterns, "
            f"got {len(active)}"
        )
    matrix = [
        [table.counts[case][key] for key in active] for case in table.case_ids
    ]
    return chisq_homogeneity(matrix)


# --- consistency ----------------------------------------------------------------


@dataclass(frozen=True)
class ConsistencyReport:
    """How repeatable each subject's pattern is across the six screens."""

    n_subjects: int
    modal_count_histogram: dict[int, int]
    perfect: int
    majority: int

    def to_json_dict(self) -> dict:
        return {
            "n_subjects": self.n_subjects,
            "modal_count_histogram": dict(self.modal_count_histogram),
            "perfect": self.perfect,
            "majority": self.majority,
        }


def consistency_report(summaries: Sequence[SubjectSummary]) -> ConsistencyReport:
    """Modal-pattern multiplicities over subjects with all screens answered.

    ``perfect`` subjects repeat one pattern on every screen; ``majority``
    subjects repeat one on more than half of them.  With six screens and a
    uniformly random pattern each time, the perfect share would be
    (1/4) ** 5 in expectation — the benchmark for how far observed behavior
    sits from noise.
    """
    complete = [s for s in summaries if s.complete_part2 and s.patterns]
    histogram: dict[int, int] = {}
    perfect = 0
    majority = 0
    for summary in complete:
        modal = summary.modal_count
        histogram[modal] = histogram.get(modal, 0) + 1
        n_cases = len(summary.expected_cases)
        if modal == n_cases:
            perfect += 1
        if modal > n_cases / 2:
            majority += 1
    return ConsistencyReport(
        n_subjects=len(complete),
        modal_count_histogram=dict(sorted(histogram.items())),
        perfect=perfect,
        majority=majority,
    )


# --- safe-count cross-tab --------------------------------------------------------


@dataclass(frozen=True)
class CrossTabCell:
    """(A, A) incidence among subjects with one safe count."""

    n_subjects: int
    aa_choices: int
    total_choices: int

    @property
    def share(self) -> Fraction:
        return Fraction(self.aa_choices, self.total_choices)

    def to_json_dict(self) -> dict:
        return {
            "n_subjects": self.n_subjects,
            "aa_choices": self.aa_choices,
            "total_choices": self.total_choices,
            "share": str(self.share),
            "share_float": float(self.share),
        }


def safe_count_cross_tab(
    summaries: Sequence[SubjectSummary],
) -> dict[int, CrossTabCell]:
    """(A, A) shares grouped by price-list safe count.

    Uses subjects complete in both parts; safe count 10 is a protocol
    violation and stays out (it is flagged on the subject summary).
    """
    cells: dict[int, list[int]] = {}
    for summary in summaries:
        if not (summary.complete_part1 and summary.complete_part2):
            continue
        s = summary.safe_count
        if s == summary.n_rows:
            continue
        bucket = cells.setdefault(s, [0, 0, 0])
        bucket[0] += 1
        bucket[1] += sum(1 for p in summary.patterns.values() if p.key == "AA")
        bucket[2] += len(summary.patterns)
    return {
        s: CrossTabCell(n, aa, total)
        for s, (n, aa, total) in sorted(cells.items())
    }


def reference_cross_tab(dataset: ReferenceDataset | None = None) -> dict[int, CrossTabCell]:
    if dataset is None:
        dataset = load_reference_dataset()
    return {
        s: CrossTabCell(dataset.safe_count_histogram[s], aa, total)
        for s, (aa, total) in sorted(dataset.aa_by_safe_count.items())
    }


def flat_aa_share_test(
    cross_tab: Mapping[int, CrossTabCell],
    share: Fraction | float,
    df: int | None = None,
) -> ChiSquareResult:
    """Per-group (A, A) counts against a constant share of each group's choices.

    ``share`` is normally the pooled (A, A) share of the full pattern table.
    ``df`` defaults to groups minus one.
    """
    groups = sorted(cross_tab)
    if len(groups) < 2:
        raise AnalysisError("flat-share test needs at least two safe-count groups")
    observed = [cross_tab[s].aa_choices for s in groups]
    expected = [float(share) * cross_tab[s].total_choices for s in groups]
    return chisq_goodness_of_fit(observed, expected, df=df, rescale=False)


# --- full reports ----------------------------------------------------------------


@dataclass(frozen=True)
class AnalysisReport:
    """Everything the report path writes: tables, tests, histogram, flags."""

    source: str
    n_subjects: int
    table: PatternTable
    random_behavior: ChiSquareResult
    homogeneity: ChiSquareResult | None
    consistency: ConsistencyReport | None
    safe_count_histogram: dict[int, int]
    share_safe_5plus: float | None
    cross_tab: dict[int, CrossTabCell]
    flat_aa_share: ChiSquareResult | None
    pooled_aa_share: float
    flags: tuple[str, ...]

    def to_json_dict(self) -> dict:
        return {
            "source": self.source,
            "n_subjects": self.n_subjects,
            "pattern_table": self.table.to_json_dict(),
            "pooled_shares": self.table.pooled_shares(),
            "random_behavior_test": self.random_behavior.to_json_dict(),
            "case_homogeneity_test": None
            if self.homogeneity is None
            else self.homogeneity.to_json_dict(),
            "consistency": None if self.consistency is None else self.consistency.to_json_dict(),
            "safe_count_histogram": {str(k): v for k, v in self.safe_count_histogram.items()},
            "share_safe_5plus": self.share_safe_5plus,
            "aa_share_by_safe_count": {
                str(s): cell.to_json_dict() for s, cell in self.cross_tab.items()
            },
            "flat_aa_share_test": None if self.flat_aa_share is None else self.flat_aa_share.to_json_dict(),
            "pooled_aa_share": self.pooled_aa_share,
            "flags": list(self.flags),
        }


def _histogram_and_share(
    summaries: Sequence[SubjectSummary],
) -> tuple[dict[int, int], float | None]:
    histogram: dict[int, int] = {}
    valid = 0
    high = 0
    for summary in summaries:
        s = summary.safe_count
        if s is None:
            continue
        histogram[s] = histogram.get(s, 0) + 1
        if s < summary.n_rows:
            valid += 1
            if s >= 5:
                high += 1
    share = high / valid if valid else None
    return dict(sorted(histogram.items())), share


def analyze_records(records: Sequence[ChoiceRecord]) -> AnalysisReport:
    """The full report for a set of raw records (simulated or collected)."""
    if not records:
        raise AnalysisError("no records to analyze")
    summaries = summarize_subjects(records)
    table = pattern_table(summaries)
    if table.n_choices == 0:
        raise AnalysisError("no subject completed all screens; nothing to tabulate")
    histogram, share_5plus = _histogram_and_share(summaries)
    cross = safe_count_cross_tab(summaries)
    pooled = table.pooled()
    pooled_share = Fraction(pooled["AA"], table.n_choices)
    flat = (
        flat_aa_share_test(cross, pooled_share) if len(cross) >= 2 else None
    )
    flags = tuple(
        f"{summary.subject_id}: {flag}"
        for summary in summaries
        for flag in summary.flags
    )
    observed_patterns = sum(1 for n in pooled.values() if n > 0)
    return AnalysisReport(
        source="records",
        n_subjects=len(summaries),
        table=table,
        random_behavior=random_behavior_test(table),
        homogeneity=case_homogeneity_test(table) if observed_patterns >= 2 else None,
        consistency=consistency_report(summaries),
        safe_count_histogram=histogram,
        share_safe_5plus=share_5plus,
        cross_tab=cross,
        flat_aa_share=flat,
        pooled_aa_share=float(pooled_share),
        flags=flags,
    )


def analyze_reference() -> AnalysisReport:
    """The same report computed from the bundled aggregates."""
    dataset = load_reference_dataset()
    table = reference_pattern_table(dataset)
    cross = reference_cross_tab(dataset)
    pooled = table.pooled()
    pooled_share = Fraction(pooled["AA"], table.n_choices)
    histogram = {s: n for s, n in enumerate(dataset.safe_count_histogram)}
    high = sum(n for s, n in histogram.items() if s >= 5)
    return AnalysisReport(
        source="reference",
        n_subjects=dataset.n_subjects,
        table=table,
        random_behavior=random_behavior_test(table),
        homogeneity=case_homogeneity_test(table),
        consistency=ConsistencyReport(
            n_subjects=dataset.n_subjects,
            modal_count_histogram={},
            perfect=dataset.perfect_consistency,
            majority=dataset.majority_consistency,
        ),
        safe_count_histogram=histogram,
        share_safe_5plus=high / dataset.n_subjects,
        cross_tab=cross,
        flat_aa_share=flat_aa_share_test(cross, pooled_share),
        pooled_aa_share=float(pooled_share),
        flags=(),
    )
