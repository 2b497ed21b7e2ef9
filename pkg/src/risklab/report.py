"""Report rendering: delimited tables plus figures, written side by side.

This is the only module that draws.  The analysis and geometry layers hand
over plain data; here it becomes CSV/JSON files and PNG figures in one
output directory, so a report is always machine-readable and eyeballable
from the same run.
"""

from __future__ import annotations

import csv
import json
from fractions import Fraction
from pathlib import Path
from typing import Mapping, Sequence

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt

from .analysis import AnalysisReport, CrossTabCell
from .geometry import (
    PATTERN_ORDER,
    REGION_ORDER,
    Region,
    crra_curve,
    crra_interval,
    feasible_triangle,
    geometry_json,
    overlap_report,
    region_polygon,
)

_REGION_FILL = {
    Region.RED: "#d62728",
    Region.YELLOW: "#e6c229",
    Region.GREEN: "#2ca02c",
    Region.BLUE: "#1f77b4",
}

_PATTERN_LABEL = {"AA": "(A, A)", "BA": "(B, A)", "AC": "(A, C)", "BC": "(B, C)"}


def _write_csv(path: Path, header: Sequence[str], rows: Sequence[Sequence]) -> None:
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(header)
        writer.writerows(rows)


# --- figures ---------------------------------------------------------------


def fig_regions(path: Path, show_triangles: bool = True, show_crra: bool = True) -> None:
    """The utility simplex: four regions, feasible triangles, CRRA curve."""
    fig, ax = plt.subplots(figsize=(6.4, 6.0))
    for region in REGION_ORDER:
        xs, ys = zip(*region_polygon(region).vertices_float())
        ax.fill(xs, ys, color=_REGION_FILL[region], alpha=0.45, linewidth=0)
        ax.plot(xs + (xs[0],), ys + (ys[0],), color=_REGION_FILL[region], linewidth=1.2)
    if show_triangles:
        for s in range(10):
            xs, ys = zip(*feasible_triangle(s).vertices_float())
            ax.plot(xs + (xs[0],), ys + (ys[0],), color="0.25", linewidth=0.5, alpha=0.6)
    if show_crra:
        pts = crra_curve([i / 100 for i in range(-500, 501)])
        ax.plot([p[1] for p in pts], [p[2] for p in pts], color="black", linewidth=1.4)
    labels = {
        Region.RED: (0.78, 0.955),
        Region.YELLOW: (0.22, 0.80),
        Region.GREEN: (0.62, 0.50),
        Region.BLUE: (0.06, 0.16),
    }
    for region, (x, y) in labels.items():
        ax.text(
            x, y, _PATTERN_LABEL[region.pattern.key],
            ha="center", va="center", fontsize=9,
        )
    ax.plot([0, 1, 0, 0], [0, 1, 1, 0], color="black", linewidth=1.0)
    ax.set_xlim(-0.02, 1.02)
    ax.set_ylim(-0.02, 1.02)
    ax.set_xlabel("normalized u(16)")
    ax.set_ylabel("normalized u(21)")
    ax.set_aspect("equal")
    ax.set_title("Utility simplex: choice-pattern regions")
    fig.tight_layout()
    fig.savefig(path, dpi=150)
    plt.close(fig)


def fig_pattern_counts(
    counts: Mapping[str, Mapping[str, int]], path: Path, title: str
) -> None:
    """Grouped bars: pattern counts per screen plus the pooled margin."""
    cases = list(counts)
    groups = cases + ["pooled"]
    pooled = {key: sum(counts[c][key] for c in cases) for key in PATTERN_ORDER}
    fig, ax = plt.subplots(figsize=(9.0, 4.2))
    width = 0.2
    for j, key in enumerate(PATTERN_ORDER):
        xs = [i + (j - 1.5) * width for i in range(len(groups))]
        ys = [counts[c][key] for c in cases] + [pooled[key] / len(cases)]
        region = REGION_ORDER[j]
        ax.bar(xs, ys, width, label=_PATTERN_LABEL[key], color=_REGION_FILL[region], alpha=0.85)
    ax.set_xticks(range(len(groups)))
    ax.set_xticklabels(groups)
    ax.set_ylabel("subjects (pooled: mean per screen)")
    ax.set_title(title)
    ax.legend(ncol=4, fontsize=8)
    fig.tight_layout()
    fig.savefig(path, dpi=150)
    plt.close(fig)


def fig_safe_histogram(histogram: Mapping[int, int], path: Path) -> None:
    fig, ax = plt.subplots(figsize=(7.0, 4.0))
    xs = list(range(11))
    ys = [histogram.get(s, 0) for s in xs]
    ax.bar(xs, ys, color="#4878a8")
    ax.set_xticks(xs)
    ax.set_xlabel("safe choices on the price list")
    ax.set_ylabel("subjects")
    ax.set_title("Safe-count histogram")
    fig.tight_layout()
    fig.savefig(path, dpi=150)
    plt.close(fig)


def fig_aa_shares(
    cross_tab: Mapping[int, CrossTabCell], pooled_share: float, path: Path
) -> None:
    fig, ax = plt.subplots(figsize=(7.0, 4.0))
    groups = sorted(cross_tab)
    shares = [float(cross_tab[s].share) for s in groups]
    ax.bar([str(s) for s in groups], shares, color="#b24a4a")
    ax.axhline(pooled_share, color="black", linestyle="--", linewidth=1.2,
               label=f"pooled share {pooled_share:.1%}")
    ax.set_xlabel("safe choices on the price list")
    ax.set_ylabel("share of (A, A) choices")
    ax.set_ylim(0, 1)
    ax.set_title("(A, A) share by safe count")
    ax.legend(fontsize=8)
    fig.tight_layout()
    fig.savefig(path, dpi=150)
    plt.close(fig)


# --- report writers -----------------------------------------------------------


def write_analysis_report(
    report: AnalysisReport, out_dir: str | Path, figures: bool = True
) -> list[Path]:
    """Write report.json, the CSV tables, and (optionally) the figures."""
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    written = []

    path = out / "report.json"
    path.write_text(json.dumps(report.to_json_dict(), indent=2) + "\n")
    written.append(path)

    path = out / "pattern_counts.csv"
    _write_csv(
        path,
        ("case",) + PATTERN_ORDER,
        [
            (case,) + tuple(report.table.counts[case][key] for key in PATTERN_ORDER)
            for case in report.table.case_ids
        ]
        + [("pooled",) + tuple(report.table.pooled()[key] for key in PATTERN_ORDER)],
    )
    written.append(path)

    path = out / "safe_count_histogram.csv"
    _write_csv(
        path,
        ("safe_count", "subjects"),
        [(s, n) for s, n in sorted(report.safe_count_histogram.items())],
    )
    written.append(path)

    path = out / "aa_share_by_safe_count.csv"
    _write_csv(
        path,
        ("safe_count", "n_subjects", "aa_choices", "total_choices", "share", "share_float"),
        [
            (
                s,
                cell.n_subjects,
                cell.aa_choices,
                cell.total_choices,
                str(cell.share),
                float(cell.share),
            )
            for s, cell in sorted(report.cross_tab.items())
        ],
    )
    written.append(path)

    tests = [("random_behavior", report.random_behavior)]
    if report.homogeneity is not None:
        tests.append(("case_homogeneity", report.homogeneity))
    if report.flat_aa_share is not None:
        tests.append(("flat_aa_share", report.flat_aa_share))
    path = out / "tests.csv"
    _write_csv(
        path,
        ("test", "statistic", "df", "p_value"),
        [(name, r.statistic, r.df, r.p_value) for name, r in tests],
    )
    written.append(path)

    if figures:
        fig_pattern_counts(
            report.table.counts,
            out / "pattern_counts.png",
            f"Choice patterns per screen ({report.source})",
        )
        fig_safe_histogram(report.safe_count_histogram, out / "safe_count_histogram.png")
        if report.cross_tab:
            fig_aa_shares(report.cross_tab, report.pooled_aa_share, out / "aa_share.png")
        fig_regions(out / "regions.png")
        written += [
            out / "pattern_counts.png",
            out / "safe_count_histogram.png",
            out / "regions.png",
        ]
        if report.cross_tab:
            written.append(out / "aa_share.png")
    return written


def write_geometry_exports(
    out_dir: str | Path,
    crra_lo: float = -5.0,
    crra_hi: float = 5.0,
    crra_steps: int = 1001,
    figures: bool = True,
) -> list[Path]:
    """Write the geometry JSON, overlap/interval/curve CSVs, and the simplex figure."""
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    written = []

    path = out / "regions.json"
    path.write_text(json.dumps(geometry_json(), indent=2) + "\n")
    written.append(path)

    overlaps = overlap_report()
    path = out / "overlap_areas.csv"
    _write_csv(
        path,
        ("safe_count", "region", "area", "area_float"),
        [
            (s, region.value, str(overlaps[s][region]), float(overlaps[s][region]))
            for s in range(10)
            for region in REGION_ORDER
        ],
    )
    written.append(path)

    path = out / "crra_intervals.csv"
    rows = []
    for s in range(10):
        interval = crra_interval(s)
        lo2, hi2 = interval.rounded()
        rows.append((s, interval.lower, interval.upper, lo2, hi2))
    _write_csv(path, ("safe_count", "lower", "upper", "lower_2dp", "upper_2dp"), rows)
    written.append(path)

    if crra_steps < 2:
        raise ValueError("crra_steps must be at least 2")
    step = (crra_hi - crra_lo) / (crra_steps - 1)
    curve = crra_curve([crra_lo + i * step for i in range(crra_steps)])
    path = out / "crra_curve.csv"
    _write_csv(path, ("r", "u1", "u2"), curve)
    written.append(path)

    if figures:
        fig_regions(out / "regions.png")
        written.append(out / "regions.png")
    return written
