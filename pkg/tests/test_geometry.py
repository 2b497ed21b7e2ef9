"""Tests for the simplex regions, feasible triangles, overlaps, and CRRA inversion."""

import math
import random
from fractions import Fraction

import pytest

from risklab import (
    CORNER,
    LOWER_INTERCEPT,
    LOWER_SLOPE,
    PATTERN_ORDER,
    REGION_ORDER,
    SIMPLEX,
    STANDARD_PRIZES,
    UPPER_SLOPE,
    ChoicePattern,
    GeometryError,
    Polygon,
    Region,
    TabulatedUtility,
    UtilityPoint,
    classify_point,
    crra_curve,
    crra_interval,
    crra_point,
    expected_utility_exact,
    feasible_triangle,
    geometry_json,
    mps_family,
    normalize_utility,
    overlap_report,
    pattern_to_region,
    polygon_intersection,
    region_polygon,
    region_to_pattern,
    standard_battery,
)

F = Fraction


class TestDerivedConstants:
    def test_boundary_lines_follow_from_prize_gaps(self):
        assert UPPER_SLOPE == F(4, 3)
        assert LOWER_SLOPE == F(7, 9)
        assert LOWER_INTERCEPT == F(2, 9)

    def test_corner(self):
        assert CORNER == (F(2, 5), F(8, 15))

    def test_corner_lies_on_both_lines(self):
        u1, u2 = CORNER
        assert u2 == UPPER_SLOPE * u1
        assert u2 == LOWER_SLOPE * u1 + LOWER_INTERCEPT


class TestPatterns:
    def test_pattern_validation(self):
        with pytest.raises(GeometryError):
            ChoicePattern("C", "A")
        with pytest.raises(GeometryError):
            ChoicePattern("A", "B")

    def test_key_round_trip(self):
        for key in PATTERN_ORDER:
            assert ChoicePattern.from_key(key).key == key

    def test_region_pattern_bijection(self):
        for region in REGION_ORDER:
            assert pattern_to_region(region_to_pattern(region)) is region
        assert tuple(r.pattern.key for r in REGION_ORDER) == PATTERN_ORDER


class TestUtilityPoint:
    def test_validation(self):
        UtilityPoint(F(1, 2), F(1, 2))
        with pytest.raises(GeometryError):
            UtilityPoint(F(1, 2), F(2, 5))  # u2 < u1
        with pytest.raises(GeometryError):
            UtilityPoint(F(-1, 10), F(1, 2))
        with pytest.raises(GeometryError):
            UtilityPoint(F(1, 2), F(11, 10))

    def test_normalize_dyadic_table_is_exact(self):
        point = normalize_utility(TabulatedUtility((0.0, 0.5, 0.75, 1.0)))
        assert (point.u1, point.u2) == (F(1, 2), F(3, 4))

    def test_normalize_shifts_and_scales(self):
        point = normalize_utility(TabulatedUtility((2.0, 4.0, 5.0, 10.0)))
        assert (point.u1, point.u2) == (F(1, 4), F(3, 8))

    def test_normalize_rejects_flat_and_wrong_length(self):
        with pytest.raises(GeometryError):
            normalize_utility(TabulatedUtility((1.0, 1.0, 1.0, 1.0)))
        with pytest.raises(GeometryError):
            normalize_utility(TabulatedUtility((0.0, 0.5, 1.0)))


class TestClassification:
    @pytest.mark.parametrize(
        "u1, u2, region",
        [
            (F(3, 5), F(7, 10), Region.RED),
            (F(1, 5), F(9, 10), Region.YELLOW),
            (F(1, 2), F(11, 20), Region.GREEN),
            (F(1, 10), F(3, 20), Region.BLUE),
        ],
    )
    def test_interior_examples(self, u1, u2, region):
        assert classify_point(UtilityPoint(u1, u2)) is region

    def test_corner_goes_to_red(self):
        assert classify_point(UtilityPoint(*CORNER)) is Region.RED

    def test_boundary_ties_keep_the_weak_preference(self):
        # Upper line above the corner: red/yellow boundary -> red.
        assert classify_point(UtilityPoint(F(3, 5), F(4, 5))) is Region.RED
        # Lower line right of the corner: red/green boundary -> red.
        assert classify_point(UtilityPoint(F(3, 5), F(31, 45))) is Region.RED
        # Upper line below the corner: green/blue boundary -> green.
        assert classify_point(UtilityPoint(F(3, 10), F(2, 5))) is Region.GREEN
        # Lower line left of the corner: yellow/blue boundary -> yellow.
        assert classify_point(UtilityPoint(F(1, 10), F(3, 10))) is Region.YELLOW

    def test_classification_matches_choice_behaviour(self):
        # The region pattern must equal the pattern of exact lottery choices.
        rng = random.Random(20260816)
        cases = standard_battery()
        for _ in range(300):
            vals = sorted(rng.random() for _ in range(4))
            if vals[0] == vals[3]:
                continue
            table = TabulatedUtility(tuple(vals))
            region = classify_point(normalize_utility(table))
            want = region.pattern
            for case in cases:
                fam = case.family
                base_eu = expected_utility_exact(fam.base, table)
                ab = "A" if base_eu >= expected_utility_exact(fam.spread(2), table) else "B"
                ac = "A" if base_eu >= expected_utility_exact(fam.spread(3), table) else "C"
                assert (ab, ac) == (want.ab, want.ac)


class TestPolygon:
    def test_canonicalization_makes_equal_sets_equal(self):
        a = Polygon(((0, 0), (1, 0), (1, 1)))
        b = Polygon(((1, 1), (0, 0), (1, 0)))
        assert a == b
        assert a.vertices[0] == (0, 0)

    def test_collinear_middle_vertices_are_dropped(self):
        a = Polygon(((0, 0), (F(1, 2), 0), (1, 0), (1, 1)))
        assert a == Polygon(((0, 0), (1, 0), (1, 1)))

    def test_rejects_clockwise(self):
        with pytest.raises(GeometryError):
            Polygon(((0, 0), (1, 1), (1, 0)))

    def test_rejects_degenerate(self):
        with pytest.raises(GeometryError):
            Polygon(((0, 0), (1, 1)))
        with pytest.raises(GeometryError):
            Polygon(((0, 0), (F(1, 2), F(1, 2)), (1, 1)))

    def test_empty_polygon(self):
        assert Polygon.EMPTY.is_empty
        assert Polygon.EMPTY.area() == 0
        assert not Polygon.EMPTY.contains((F(1, 2), F(1, 2)))

    def test_area_and_containment(self):
        tri = Polygon(((0, 0), (1, 0), (0, 1)))
        assert tri.area() == F(1, 2)
        assert tri.contains((F(1, 4), F(1, 4)))
        assert tri.contains((F(1, 2), F(1, 2)))  # boundary, weak
        assert not tri.contains((F(1, 2), F(1, 2)), strict=True)
        assert not tri.contains((F(3, 4), F(3, 4)))

    def test_json_round_trip(self):
        tri = feasible_triangle(4)
        assert Polygon.from_json(tri.to_json()) == tri


class TestRegions:
    def test_region_areas(self):
        areas = {r: region_polygon(r).area() for r in REGION_ORDER}
        assert areas[Region.RED] == F(7, 120)
        assert areas[Region.YELLOW] == F(119, 360)
        assert areas[Region.GREEN] == F(1, 15)
        assert areas[Region.BLUE] == F(2, 45)

    def test_regions_partition_the_simplex(self):
        total = sum(region_polygon(r).area() for r in REGION_ORDER)
        assert total == SIMPLEX.area() == F(1, 2)
        for i, a in enumerate(REGION_ORDER):
            for b in REGION_ORDER[i + 1 :]:
                inter = polygon_intersection(region_polygon(a), region_polygon(b))
                assert inter.is_empty

    def test_classification_agrees_with_polygons(self):
        # classify_point must pick the first region (in precedence order)
        # whose closed polygon contains the point -- including boundaries.
        rng = random.Random(4051)
        points = []
        for _ in range(4000):
            u2 = rng.random()
            u1 = rng.random() * u2
            points.append(UtilityPoint(F(u1), F(u2)))
        for _ in range(1000):
            den = rng.randint(1, 12)
            u2_num = rng.randint(0, den)
            u1_num = rng.randint(0, u2_num)
            points.append(UtilityPoint(F(u1_num, den), F(u2_num, den)))
        for point in points:
            containing = [
                r for r in REGION_ORDER if region_polygon(r).contains(point)
            ]
            assert containing, point
            assert classify_point(point) is containing[0]


# Exact overlap area of each feasible triangle with each region, frozen from
# an independent rational computation.
OVERLAP_TABLE = {
    0: {"red": F(0), "yellow": F(49, 1584), "green": F(1, 620), "blue": F(857, 49104)},
    1: {"red": F(0), "yellow": F(245, 7568), "green": F(23, 4960), "blue": F(6095, 469216)},
    2: {"red": F(0), "yellow": F(35, 1032), "green": F(13, 1760), "blue": F(395, 45408)},
    3: {"red": F(0), "yellow": F(35, 984), "green": F(37, 3740), "blue": F(835, 184008)},
    4: {"red": F(1, 3360), "yellow": F(319, 8610), "green": F(97, 8160), "blue": F(8, 10455)},
    5: {"red": F(31, 8736), "yellow": F(1, 28), "green": F(67, 6240), "blue": F(0)},
    6: {"red": F(1655, 219336), "yellow": F(5, 148), "green": F(257, 29640), "blue": F(0)},
    7: {"red": F(65, 5624), "yellow": F(45, 1406), "green": F(181, 28120), "blue": F(0)},
    8: {"red": F(20555, 1316016), "yellow": F(15, 494), "green": F(107, 26640), "blue": F(0)},
    9: {"red": F(37, 1872), "yellow": F(3, 104), "green": F(1, 720), "blue": F(0)},
}


class TestFeasibleTriangles:
    def test_vertices(self):
        assert feasible_triangle(0) == Polygon(((0, 1), (0, 0), (F(1, 10), F(1, 10))))
        assert feasible_triangle(5) == Polygon(
            ((0, 1), (F(1, 2), F(1, 2)), (F(3, 5), F(3, 5)))
        )
        assert feasible_triangle(9) == Polygon(
            ((0, 1), (F(9, 10), F(9, 10)), (1, 1))
        )

    def test_every_triangle_has_area_one_twentieth(self):
        for s in range(10):
            assert feasible_triangle(s).area() == F(1, 20)

    def test_triangles_tile_the_simplex(self):
        assert sum(feasible_triangle(s).area() for s in range(10)) == SIMPLEX.area()
        for s in range(9):
            inter = polygon_intersection(feasible_triangle(s), feasible_triangle(s + 1))
            assert inter.is_empty

    def test_safe_count_ten_is_a_protocol_violation(self):
        with pytest.raises(GeometryError, match="protocol violation"):
            feasible_triangle(10)
        with pytest.raises(GeometryError):
            feasible_triangle(-1)

    def test_overlap_report_matches_frozen_table(self):
        report = overlap_report()
        for s in range(10):
            for region in REGION_ORDER:
                assert report[s][region] == OVERLAP_TABLE[s][region.value], (
                    s,
                    region,
                )

    def test_overlap_rows_sum_to_triangle_area(self):
        report = overlap_report()
        for s in range(10):
            assert sum(report[s].values()) == F(1, 20)

    def test_yellow_and_green_meet_every_triangle(self):
        report = overlap_report()
        for s in range(10):
            assert report[s][Region.YELLOW] > 0
            assert report[s][Region.GREEN] > 0


class TestIntersection:
    def test_idempotent(self):
        for s in (0, 4, 9):
            tri = feasible_triangle(s)
            assert polygon_intersection(tri, tri) == tri

    def test_commutative_area(self):
        for s in range(10):
            tri = feasible_triangle(s)
            for region in REGION_ORDER:
                poly = region_polygon(region)
                assert (
                    polygon_intersection(tri, poly).area()
                    == polygon_intersection(poly, tri).area()
                )

    def test_disjoint_is_empty(self):
        assert polygon_intersection(
            feasible_triangle(0), region_polygon(Region.RED)
        ).is_empty

    def test_contained_in_simplex(self):
        for region in REGION_ORDER:
            poly = region_polygon(region)
            assert polygon_intersection(poly, SIMPLEX) == poly

    def test_shared_edge_is_empty(self):
        a = Polygon(((0, 0), (1, 0), (1, 1)))
        b = Polygon(((0, 0), (1, 1), (0, 1)))
        assert polygon_intersection(a, b).is_empty


# Nine interior indifference points of the price list, frozen from a
# high-precision root solve, with their two-decimal display labels.
CRRA_BOUNDS = [
    (-1.7415, -1.74),
    (-0.9817, -0.98),
    (-0.5242, -0.52),
    (-0.1816, -0.18),
    (0.1068, 0.11),
    (0.3717, 0.37),
    (0.6364, 0.64),
    (0.9309, 0.93),
    (1.3284, 1.33),
]


class TestCrra:
    def test_point_at_zero_is_the_linear_point(self):
        point = crra_point(0.0)
        assert point.floats() == pytest.approx((0.4, float(F(8, 15))), abs=1e-15)

    def test_point_at_one_uses_log_limit(self):
        point = crra_point(1.0)
        expect = (math.log(16) / math.log(38.5), math.log(21) / math.log(38.5))
        assert point.floats() == pytest.approx(expect, abs=1e-15)

    def test_curve_is_continuous_through_one(self):
        eps = 1e-9
        below = crra_point(1.0 - eps).floats()
        above = crra_point(1.0 + eps).floats()
        at = crra_point(1.0).floats()
        assert below == pytest.approx(at, abs=1e-7)
        assert above == pytest.approx(at, abs=1e-7)

    def test_extreme_coefficients_stay_in_simplex(self):
        for r in (-60.0, -5.0, 5.0, 60.0, 500.0):
            point = crra_point(r)
            assert 0 <= point.u1 <= point.u2 <= 1

    def test_curve_moves_up_with_risk_aversion(self):
        rs = [-3.0 + 0.25 * i for i in range(25)]
        samples = crra_curve(rs)
        for (r0, a1, a2), (r1, b1, b2) in zip(samples, samples[1:]):
            assert r0 < r1
            assert a1 < b1
            assert a2 < b2

    def test_interval_bounds_match_frozen_values(self):
        for s in range(10):
            interval = crra_interval(s)
            assert interval.safe_count == s
            if s == 0:
                assert interval.lower == -math.inf
            else:
                frozen, label = CRRA_BOUNDS[s - 1]
                assert interval.lower == pytest.approx(frozen, abs=5e-4)
                assert abs(interval.lower - label) <= 0.005
                assert round(interval.lower, 2) == label
            if s == 9:
                assert interval.upper == math.inf
            else:
                frozen, label = CRRA_BOUNDS[s]
                assert interval.upper == pytest.approx(frozen, abs=5e-4)
                assert abs(interval.upper - label) <= 0.005
                assert round(interval.upper, 2) == label

    def test_adjacent_intervals_share_bounds(self):
        for s in range(9):
            assert crra_interval(s).upper == crra_interval(s + 1).lower

    def test_rounded_and_label(self):
        assert crra_interval(6).rounded() == (0.37, 0.64)
        assert crra_interval(6).label() == "[0.37, 0.64]"
        assert crra_interval(0).label() == "[-inf, -1.74]"
        assert crra_interval(9).label() == "[1.33, +inf]"

    def test_safe_count_ten_rejected(self):
        with pytest.raises(GeometryError, match="protocol violation"):
            crra_interval(10)

    def test_interval_midpoints_land_in_their_triangle(self):
        for s in range(10):
            interval = crra_interval(s)
            lo = interval.lower if math.isfinite(interval.lower) else interval.upper - 2
            hi = interval.upper if math.isfinite(interval.upper) else interval.lower + 2
            mid = 0.5 * (lo + hi)
            point = crra_point(mid)
            assert feasible_triangle(s).contains(point), (s, mid)

    def test_indifference_defines_the_triangle_edges(self):
        # At each interior bound the CRRA point sits on the shared edge
        # (1-p)u1 + p*u2 = p up to solver tolerance.
        for s in range(1, 10):
            r = crra_interval(s).lower
            u1, u2 = crra_point(r).floats()
            p = s / 10
            assert (1 - p) * u1 + p * u2 - p == pytest.approx(0.0, abs=1e-7)


class TestGeometryJson:
    def test_structure_and_spot_values(self):
        data = geometry_json()
        assert data["corner"] == ["2/5", "8/15"]
        assert set(data["regions"]) == {"red", "yellow", "green", "blue"}
        assert data["regions"]["red"]["pattern"] == "AA"
        assert data["regions"]["blue"]["pattern"] == "BC"
        assert len(data["triangles"]) == 10
        red = Polygon.from_json(data["regions"]["red"])
        assert red == region_polygon(Region.RED)
        for s in range(10):
            assert Polygon.from_json(data["triangles"][str(s)]) == feasible_triangle(s)

    def test_standard_prizes_exposed(self):
        assert STANDARD_PRIZES.floats() == (1.0, 16.0, 21.0, 38.5)
        fam = mps_family  # imported; ensures public surface stays wired
        assert callable(fam)
