"""Exact geometry of the normalized-utility simplex for the four-prize grid.

With prizes (1, 16, 21, 38.5) and utility normalized so u(1) = 0 and
u(38.5) = 1, a subject's preferences reduce to the point
(u1, u2) = (u(16), u(21)) inside the triangle 0 <= u1 <= u2 <= 1.  The two
mean-preserving-spread comparisons split that triangle into four regions
along two straight lines whose coefficients follow from the prize gaps:

    base preferred to the spread at 16   <=>  u2 <= (4/3)  * u1
    base preferred to the spread at 21   <=>  u2 >= (7/9)  * u1 + 2/9

Both hold on the red region (choice pattern (A, A), concave on the grid),
exactly one on yellow (B, A) and green (A, C), neither on blue (B, C).  All
four meet at the corner (2/5, 8/15).  Boundaries belong to the region where
the corresponding weak preference still holds, so precedence on ties is
red, then yellow/green, then blue.

A ten-row safe/risky price list adds a second, coarser partition: choosing
the safe option in exactly the first ``s`` rows pins (u1, u2) to a triangle
with vertices (0, 1), (s/10, s/10), ((s+1)/10, (s+1)/10), and pins a CRRA
coefficient to an interval.  Everything here is exact rational arithmetic
(``fractions.Fraction``); only the CRRA curve itself is evaluated in
floating point, and those floats are converted exactly when they enter any
comparison.  This module computes and classifies; it does not plot.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass
from fractions import Fraction
from typing import ClassVar, Iterable, Mapping, Sequence

from .lottery import PrizeVector, TabulatedUtility
from .rationals import as_fraction, format_rational


class GeometryError(ValueError):
    """Raised for points outside the simplex, bad polygons, bad safe counts."""


#: The four-prize money grid the simplex picture is specific to.
STANDARD_PRIZES = PrizeVector((1, 16, 21, Fraction(77, 2)))

_P1, _P2, _P3, _P4 = STANDARD_PRIZES.amounts

#: Base preferred to the spread at position 2  <=>  u2 <= UPPER_SLOPE * u1.
UPPER_SLOPE = (_P3 - _P1) / (_P2 - _P1)  # 4/3
#: Base preferred to the spread at position 3  <=>
#: u2 >= LOWER_SLOPE * u1 + LOWER_INTERCEPT.
LOWER_SLOPE = (_P4 - _P3) / (_P4 - _P2)  # 7/9
LOWER_INTERCEPT = (_P3 - _P2) / (_P4 - _P2)  # 2/9

#: Where the two boundary lines cross: (2/5, 8/15).
CORNER = (
    LOWER_INTERCEPT / (UPPER_SLOPE - LOWER_SLOPE),
    UPPER_SLOPE * LOWER_INTERCEPT / (UPPER_SLOPE - LOWER_SLOPE),
)


@dataclass(frozen=True)
class ChoicePattern:
    """A pair of decisions: base-vs-spread-at-2 (A/B) and base-vs-spread-at-3 (A/C)."""

    ab: str
    ac: str

    def __post_init__(self) -> None:
        if self.ab not in ("A", "B"):
            raise GeometryError(f"first decision must be 'A' or 'B', got {self.ab!r}")
        if self.ac not in ("A", "C"):
            raise GeometryError(f"second decision must be 'A' or 'C', got {self.ac!r}")

    @property
    def key(self) -> str:
        return self.ab + self.ac

    @classmethod
    def from_key(cls, key: str) -> "ChoicePattern":
        if len(key) != 2:
            raise GeometryError(f"pattern key must have two letters, got {key!r}")
        return cls(key[0], key[1])


#: Canonical tabulation order for the four patterns.
PATTERN_ORDER = ("AA", "BA", "AC", "BC")


class Region(enum.Enum):
    """The four simplex regions, named by their conventional colors."""

    RED = "red"
    YELLOW = "yellow"
    GREEN = "green"
    BLUE = "blue"

    @property
    def pattern(self) -> ChoicePattern:
        return region_to_pattern(self)


#: Region order matching PATTERN_ORDER.
REGION_ORDER = (Region.RED, Region.YELLOW, Region.GREEN, Region.BLUE)

_REGION_TO_PATTERN = {
    Region.RED: ChoicePattern("A", "A"),
    Region.YELLOW: ChoicePattern("B", "A"),
    Region.GREEN: ChoicePattern("A", "C"),
    Region.BLUE: ChoicePattern("B", "C"),
}
_PATTERN_TO_REGION = {p.key: r for r, p in _REGION_TO_PATTERN.items()}


def region_to_pattern(region: Region) -> ChoicePattern:
    return _REGION_TO_PATTERN[region]


def pattern_to_region(pattern: ChoicePattern) -> Region:
    return _PATTERN_TO_REGION[pattern.key]


@dataclass(frozen=True)
class UtilityPoint:
    """A normalized utility pair (u1, u2) with 0 <= u1 <= u2 <= 1, exact."""

    u1: Fraction
    u2: Fraction

    def __post_init__(self) -> None:
        u1 = as_fraction(self.u1)
        u2 = as_fraction(self.u2)
        if not 0 <= u1 <= u2 <= 1:
            raise GeometryError(f"({u1}, {u2}) is outside the utility simplex")
        object.__setattr__(self, "u1", u1)
        object.__setattr__(self, "u2", u2)

    def floats(self) -> tuple[float, float]:
        return (float(self.u1), float(self.u2))


def normalize_utility(utility: TabulatedUtility) -> UtilityPoint:
    """Map a four-entry utility table to its simplex point.

    Requires strictly higher utility at the top prize than at the bottom one;
    a flat table has no normalization and raises ``GeometryError``.
    """
    if len(utility) != 4:
        raise GeometryError(
            f"normalization needs a four-entry utility table, got {len(utility)}"
        )
    v0, v1, v2, v3 = utility.exact()
    span = v3 - v0
    if span == 0:
        raise GeometryError("flat utility table cannot be normalized")
    return UtilityPoint((v1 - v0) / span, (v2 - v0) / span)


def classify_point(point: UtilityPoint) -> Region:
    """The region containing ``point``; boundary ties resolve toward red.

    Each weak inequality below is one base-versus-spread preference, so the
    tie precedence (red over yellow/green over blue) is exactly the
    ties-go-to-the-base rule applied twice.
    """
    base_over_first = point.u2 <= UPPER_SLOPE * point.u1
    base_over_second = point.u2 >= LOWER_SLOPE * point.u1 + LOWER_INTERCEPT
    if base_over_first and base_over_second:
        return Region.RED
    if base_over_second:
        return Region.YELLOW
    if base_over_first:
        return Region.GREEN
    return Region.BLUE


Point = tuple[Fraction, Fraction]


def _cross(o: Point, a: Point, b: Point) -> Fraction:
    return (a[0] - o[0]) * (b[1] - o[1]) - (a[1] - o[1]) * (b[0] - o[0])


def _shoelace_twice(vertices: Sequence[Point]) -> Fraction:
    total = Fraction(0)
    n = len(vertices)
    for i in range(n):
        x1, y1 = vertices[i]
        x2, y2 = vertices[(i + 1) % n]
        total += x1 * y2 - x2 * y1
    return total


def _clean_ring(points: Sequence[Point]) -> tuple[Point, ...]:
    """Drop consecutive duplicates and collinear middles from a vertex ring."""
    deduped: list[Point] = []
    for p in points:
        if not deduped or p != deduped[-1]:
            deduped.append(p)
    while len(deduped) > 1 and deduped[0] == deduped[-1]:
        deduped.pop()
    if len(deduped) < 3:
        return tuple(deduped)
    cleaned: list[Point] = []
    n = len(deduped)
    for i in range(n):
        prev, cur, nxt = deduped[i - 1], deduped[i], deduped[(i + 1) % n]
        if _cross(prev, cur, nxt) != 0:
            cleaned.append(cur)
    return tuple(cleaned)


@dataclass(frozen=True)
class Polygon:
    """A convex polygon with exact rational vertices, counterclockwise.

    Vertices are canonicalized (duplicates and collinear middles removed,
    rotated so the lexicographically smallest vertex comes first) so equal
    point sets compare equal.  The empty polygon is ``Polygon.EMPTY``.
    """

    vertices: tuple[Point, ...]

    EMPTY: ClassVar["Polygon"]  # set right after the class body

    def __post_init__(self) -> None:
        points = tuple(
            (as_fraction(x), as_fraction(y)) for x, y in self.vertices
        )
        if not points:
            object.__setattr__(self, "vertices", ())
            return
        cleaned = _clean_ring(points)
        if len(cleaned) < 3:
            raise GeometryError("a polygon needs at least three non-collinear vertices")
        n = len(cleaned)
        for i in range(n):
            if _cross(cleaned[i - 1], cleaned[i], cleaned[(i + 1) % n]) <= 0:
                raise GeometryError(
                    "vertices must wind counterclockwise around a convex polygon"
                )
        start = min(range(n), key=lambda i: cleaned[i])
        object.__setattr__(self, "vertices", cleaned[start:] + cleaned[:start])

    @property
    def is_empty(self) -> bool:
        return not self.vertices

    def area(self) -> Fraction:
        if self.is_empty:
            return Fraction(0)
        return _shoelace_twice(self.vertices) / 2

    def contains(self, point: UtilityPoint | Point, strict: bool = False) -> bool:
        """Membership test; boundary points count unless ``strict``."""
        if self.is_empty:
            return False
        if isinstance(point, UtilityPoint):
            p: Point = (point.u1, point.u2)
        else:
            p = (as_fraction(point[0]), as_fraction(point[1]))
        n = len(self.vertices)
        for i in range(n):
            side = _cross(self.vertices[i], self.vertices[(i + 1) % n], p)
            if side < 0 or (strict and side == 0):
                return False
        return True

    def vertices_float(self) -> list[tuple[float, float]]:
        return [(float(x), float(y)) for x, y in self.vertices]

    def to_json(self) -> dict:
        return {
            "vertices": [
                [format_rational(x), format_rational(y)] for x, y in self.vertices
            ]
        }

    @classmethod
    def from_json(cls, data: Mapping) -> "Polygon":
        return cls(tuple((as_fraction(x), as_fraction(y)) for x, y in data["vertices"]))


Polygon.EMPTY = Polygon(())


#: The whole normalized-utility simplex, for reference and plotting bounds.
SIMPLEX = Polygon(((Fraction(0), Fraction(0)), (Fraction(1), Fraction(1)), (Fraction(0), Fraction(1))))

_CORNER: Point = (CORNER[0], CORNER[1])

_REGION_POLYGONS = {
    Region.RED: Polygon((_CORNER, (Fraction(1), Fraction(1)), (Fraction(3, 4), Fraction(1)))),
    Region.YELLOW: Polygon(
        (_CORNER, (Fraction(3, 4), Fraction(1)), (Fraction(0), Fraction(1)), (Fraction(0), LOWER_INTERCEPT))
    ),
    Region.GREEN: Polygon(((Fraction(0), Fraction(0)), (Fraction(1), Fraction(1)), _CORNER)),
    Region.BLUE: Polygon(((Fraction(0), Fraction(0)), _CORNER, (Fraction(0), LOWER_INTERCEPT))),
}


def region_polygon(region: Region) -> Polygon:
    """The closed polygon of a region (boundaries shared with its neighbours)."""
    return _REGION_POLYGONS[region]


def feasible_triangle(safe_count: int) -> Polygon:
    """Utility points consistent with ``safe_count`` safe rows on the price list.

    Row ``i`` of the list pays the middle prizes (16 with chance 1-i/10, 21
    with chance i/10) against the extremes (1 and 38.5 with the same
    chances).  Safe in exactly the first ``s`` rows means the normalized
    point satisfies (1-p)u1 + p*u2 >= p at p = s/10 and <= at p = (s+1)/10,
    carving the triangle with vertices (0,1), (s/10, s/10),
    ((s+1)/10, (s+1)/10).
    """
    s = _checked_safe_count(safe_count)
    return Polygon(
        (
            (Fraction(0), Fraction(1)),
            (Fraction(s, 10), Fraction(s, 10)),
            (Fraction(s + 1, 10), Fraction(s + 1, 10)),
        )
    )


def _checked_safe_count(safe_count: int) -> int:
    if safe_count == 10:
        raise GeometryError(
            "safe count 10 means the dominated safe option was taken in the "
            "final row; that is a protocol violation, not an invertible choice"
        )
    if not 0 <= safe_count <= 9:
        raise GeometryError(f"safe count must be in 0..9, got {safe_count}")
    return safe_count


def _halfplane_clip(points: Sequence[Point], e1: Point, e2: Point) -> list[Point]:
    """Keep the part of a vertex ring on the left of the directed edge e1->e2."""
    result: list[Point] = []
    if not points:
        return result
    prev = points[-1]
    prev_side = _cross(e1, e2, prev)
    for cur in points:
        cur_side = _cross(e1, e2, cur)
        if cur_side >= 0:
            if prev_side < 0:
                result.append(_edge_intersection(e1, e2, prev, cur))
            result.append(cur)
        elif prev_side >= 0:
            result.append(_edge_intersection(e1, e2, prev, cur))
        prev, prev_side = cur, cur_side
    return result


def _edge_intersection(e1: Point, e2: Point, a: Point, b: Point) -> Point:
    """Where segment a-b crosses the line through e1-e2 (exact)."""
    side_a = _cross(e1, e2, a)
    side_b = _cross(e1, e2, b)
    t = side_a / (side_a - side_b)
    return (a[0] + t * (b[0] - a[0]), a[1] + t * (b[1] - a[1]))


def polygon_intersection(a: Polygon, b: Polygon) -> Polygon:
    """Exact intersection of two convex polygons; ``Polygon.EMPTY`` if degenerate.

    Shared edges and single shared points have zero area and also come back
    empty, so a nonempty result always has positive area.
    """
    if a.is_empty or b.is_empty:
        return Polygon.EMPTY
    points: list[Point] = list(a.vertices)
    n = len(b.vertices)
    for i in range(n):
        points = _halfplane_clip(points, b.vertices[i], b.vertices[(i + 1) % n])
        if not points:
            return Polygon.EMPTY
    cleaned = _clean_ring(tuple(points))
    if len(cleaned) < 3 or _shoelace_twice(cleaned) == 0:
        return Polygon.EMPTY
    return Polygon(cleaned)


def overlap_report() -> dict[int, dict[Region, Fraction]]:
    """Exact area of every feasible triangle's overlap with every region."""
    return {
        s: {
            region: polygon_intersection(
                feasible_triangle(s), region_polygon(region)
            ).area()
            for region in REGION_ORDER
        }
        for s in range(10)
    }


# --- CRRA curve and price-list inversion -----------------------------------

_LN16 = math.log(float(_P2))
_LN21 = math.log(float(_P3))
_LN_TOP = math.log(float(_P4))


def _crra_pair(r: float) -> tuple[float, float]:
    """(u1, u2) for CRRA u(x) = x**(1-r)/(1-r), normalized on the prize grid."""
    t = 1.0 - r
    if t == 0.0:
        return (_LN16 / _LN_TOP, _LN21 / _LN_TOP)
    a16, a21, a_top = t * _LN16, t * _LN21, t * _LN_TOP
    if a_top > 709.0:
        # expm1 would overflow; the -1 corrections are negligible out here.
        return (math.exp(a16 - a_top), math.exp(a21 - a_top))
    den = math.expm1(a_top)
    return (math.expm1(a16) / den, math.expm1(a21) / den)


def crra_point(r: float) -> UtilityPoint:
    """The simplex point of the CRRA utility with coefficient ``r``.

    Continuous through r = 1, where the logarithmic limit gives
    (ln 16 / ln 38.5, ln 21 / ln 38.5).
    """
    u1, u2 = _crra_pair(float(r))
    return UtilityPoint(Fraction(u1), Fraction(u2))


def crra_curve(r_values: Iterable[float]) -> list[tuple[float, float, float]]:
    """(r, u1, u2) samples of the CRRA curve through the simplex."""
    out = []
    for r in r_values:
        u1, u2 = _crra_pair(float(r))
        out.append((float(r), u1, u2))
    return out


@dataclass(frozen=True)
class CrraInterval:
    """CRRA coefficients consistent with a price-list safe count.

    ``lower`` is ``-inf`` for safe count 0 and ``upper`` is ``+inf`` for
    safe count 9; interior bounds are indifference points solved to 1e-9.
    """

    safe_count: int
    lower: float
    upper: float

    def rounded(self, ndigits: int = 2) -> tuple[float, float]:
        return (round(self.lower, ndigits), round(self.upper, ndigits))

    def label(self, ndigits: int = 2) -> str:
        def fmt(x: float) -> str:
            if math.isinf(x):
                return "-inf" if x < 0 else "+inf"
            return f"{x:.{ndigits}f}"

        return f"[{fmt(self.lower)}, {fmt(self.upper)}]"


_BISECTION_TOL = 1e-9
_BRACKET = (-20.0, 20.0)


def _indifference_gap(r: float, p: float) -> float:
    """Safe-minus-risky expected utility for a CRRA agent at list probability p."""
    u1, u2 = _crra_pair(r)
    return (1.0 - p) * u1 + p * u2 - p


def _indifference_r(p: Fraction) -> float:
    """The CRRA coefficient indifferent at list probability ``p`` (increasing in r)."""
    pf = float(p)
    lo, hi = _BRACKET
    f_lo = _indifference_gap(lo, pf)
    f_hi = _indifference_gap(hi, pf)
    if not (f_lo < 0.0 < f_hi):
        raise GeometryError(
            f"indifference point at p={p} does not bracket inside {_BRACKET}"
        )
    while hi - lo > _BISECTION_TOL:
        mid = 0.5 * (lo + hi)
        if _indifference_gap(mid, pf) < 0.0:
            lo = mid
        else:
            hi = mid
    return 0.5 * (lo + hi)


def crra_interval(safe_count: int) -> CrraInterval:
    """The CRRA coefficient interval implied by a price-list safe count."""
    s = _checked_safe_count(safe_count)
    lower = -math.inf if s == 0 else _indifference_r(Fraction(s, 10))
    upper = math.inf if s == 9 else _indifference_r(Fraction(s + 1, 10))
    return CrraInterval(s, lower, upper)


def geometry_json() -> dict:
    """Everything a display layer needs to draw the simplex picture.

    Regions (with their choice patterns), the feasible triangle of every
    safe count, the simplex outline, and the corner point, all as exact
    rational strings.
    """
    return {
        "simplex": SIMPLEX.to_json(),
        "corner": [format_rational(CORNER[0]), format_rational(CORNER[1])],
        "regions": {
            region.value: {
                "pattern": region.pattern.key,
                **region_polygon(region).to_json(),
            }
            for region in REGION_ORDER
        },
        "triangles": {
            str(s): feasible_triangle(s).to_json() for s in range(10)
        },
    }
