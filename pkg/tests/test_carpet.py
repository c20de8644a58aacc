from fractions import Fraction

import pytest

from carpetcurl.carpet import (
    CarpetSpec,
    NonOddReciprocal,
    Prefractal,
    RatioOutOfRange,
    SpecError,
    StageBeyondSpec,
    TailDiverges,
    cell_grid,
    column_obstacles,
    enumerate_holes,
    enumerate_squares,
    gap_height,
    geometry_json_records,
    parse_spec_config,
    prefractal_measure,
    side_length,
    square_count,
    tail_measure_bounds,
    validate_spec,
)
from carpetcurl.geometry import clip_to_box, polygon_area

F = Fraction

UNIT = ((F(0), F(0)), (F(1), F(0)), (F(1), F(1)), (F(0), F(1)))


class TestValidateSpec:
    def test_shrink_ratio_diagnostics(self, spec357):
        diag = validate_spec(spec357)
        assert diag["shrink_ratios"] == (F(3), F(5, 3), F(7, 15))
        assert diag["shrink_monotone_nonincreasing"]

    def test_even_reciprocal_rejected(self):
        with pytest.raises(NonOddReciprocal) as err:
            validate_spec(CarpetSpec((F(1, 4),)))
        assert err.value.index == 1

    def test_ratio_above_one_third_rejected(self):
        with pytest.raises(RatioOutOfRange):
            validate_spec(CarpetSpec((F(1, 2),)))

    def test_constant_sequence_fails_the_hypothesis(self):
        # shrink ratios 3, 1, 1/3 do tend to zero; what fails for the
        # self-similar carpet is square summability (zero area in the limit)
        diag = validate_spec(CarpetSpec((F(1, 3),) * 3, generator="constant"))
        assert diag["shrink_ratios"] == (F(3), F(1), F(1, 3))
        assert diag["square_summable"] is False
        assert diag["hypothesis_satisfied"] is False

    def test_generated_sequence_satisfies_the_hypothesis(self):
        diag = validate_spec(CarpetSpec((), generator="odd-reciprocal"))
        assert diag["hypothesis_satisfied"] is True


class TestScales:
    def test_side_lengths(self, spec357):
        assert side_length(spec357, 0) == 1
        assert side_length(spec357, 2) == F(1, 15)
        assert side_length(spec357, 3) == F(1, 105)

    def test_gap_heights(self, spec35, spec357):
        assert gap_height(spec35, 1) == F(2, 3)
        assert gap_height(spec35, 2) == F(4, 15)
        assert gap_height(spec357, 3) == F(2, 35)

    def test_gap_is_side_difference(self, spec357):
        for n in (1, 2, 3):
            assert gap_height(spec357, n) == side_length(spec357, n - 1) - side_length(spec357, n)

    def test_stage_beyond_spec(self, spec35):
        with pytest.raises(StageBeyondSpec):
            side_length(spec35, 3)

    def test_generator_extends(self):
        spec = CarpetSpec((F(1, 3),), generator="odd-reciprocal")
        assert spec.ratio(2) == F(1, 5)
        assert side_length(spec, 3) == F(1, 105)


class TestHoles:
    def test_first_stage_single_central_hole(self, spec35):
        holes = list(enumerate_holes(spec35, 1))
        assert len(holes) == 1
        assert holes[0].center == (F(1, 2), F(1, 2))
        assert holes[0].side == F(1, 3)

    def test_second_stage_holes_at_surviving_centers(self, spec35):
        holes = list(enumerate_holes(spec35, 2))
        assert len(holes) == 8
        assert all(h.side == F(1, 15) for h in holes)
        centers = {(F(a, 6), F(b, 6)) for a in (1, 3, 5) for b in (1, 3, 5)}
        centers.discard((F(1, 2), F(1, 2)))
        assert {h.center for h in holes} == centers

    def test_third_stage_count(self, spec357):
        holes = list(enumerate_holes(spec357, 3))
        assert len(holes) == 192
        assert all(h.side == F(1, 105) for h in holes)

    def test_json_records_shape(self, spec35):
        recs = geometry_json_records(spec35, 1)
        assert recs == [{"stage": 1, "center": [1, 2, 1, 2], "side": [1, 3]}]


class TestMeasure:
    def test_known_values(self, spec3, spec35, spec357):
        assert prefractal_measure(spec3, 1) == F(8, 9)
        assert prefractal_measure(spec35, 2) == F(64, 75)
        assert prefractal_measure(spec357, 0) == 1

    @pytest.mark.parametrize("m", [1, 2, 3])
    def test_counting_oracle(self, spec357, m):
        d = side_length(spec357, m)
        total = sum(d * d for _ in enumerate_squares(spec357, m))
        assert total == prefractal_measure(spec357, m)
        assert prefractal_measure(spec357, m) == square_count(spec357, m) * d * d


class TestCellGrid:
    def test_first_stage(self, spec35):
        grid = cell_grid(spec35, 1)
        assert grid.x_cuts == (F(1, 2),)
        assert len(grid.cells) == 4

    def test_second_stage(self, spec35):
        grid = cell_grid(spec35, 2)
        assert grid.x_cuts == (F(1, 6), F(1, 2), F(5, 6))
        assert len(grid.cells) == 16
        cell = next(c for c in grid.cells if c[0] == F(1, 6) and c[1] == F(1, 6))
        d1 = side_length(spec35, 1)
        assert (cell[2] - cell[0]) ** 2 + (cell[3] - cell[1]) ** 2 == 2 * d1 * d1

    def test_third_stage_cuts_match_hole_centers(self, spec357):
        grid = cell_grid(spec357, 3)
        xs = {h.center[0] for h in enumerate_holes(spec357, 3)}
        assert set(grid.x_cuts) == xs
        assert len(grid.x_cuts) == 15
        assert len(grid.cells) == (len(grid.x_cuts) + 1) ** 2

    def test_cells_cover_unit_square(self, spec35):
        grid = cell_grid(spec35, 2)
        total = sum((x1 - x0) * (y1 - y0) for (x0, y0, x1, y1) in grid.cells)
        assert total == 1

    def test_every_hole_center_on_cut_lines(self, spec35):
        grid = cell_grid(spec35, 2)
        for h in enumerate_holes(spec35, 2):
            assert h.center[0] in grid.x_cuts
            assert h.center[1] in grid.y_cuts


class TestRegionMeasure:
    def test_full_square_equals_measure(self, pf3_1):
        assert pf3_1.region_measure(UNIT) == F(8, 9)

    def test_hole_has_zero_measure(self, pf3_1):
        hole = ((F(1, 3), F(1, 3)), (F(2, 3), F(1, 3)), (F(2, 3), F(2, 3)), (F(1, 3), F(2, 3)))
        assert pf3_1.region_measure(hole) == 0

    def test_quadrant_by_symmetry(self, pf35_2):
        quad = ((F(0), F(0)), (F(1, 2), F(0)), (F(1, 2), F(1, 2)), (F(0), F(1, 2)))
        assert pf35_2.region_measure(quad) == F(16, 75)
        assert pf35_2.region_measure(quad) == prefractal_measure(pf35_2.spec, 2) / 4

    def test_brute_force_oracle_on_a_triangle(self, spec35, pf35_2):
        tri = ((F(0), F(0)), (F(1), F(0)), (F(0), F(1)))
        d = side_length(spec35, 2)
        expected = F(0)
        for (x0, y0) in enumerate_squares(spec35, 2):
            piece = clip_to_box(tri, x0, y0, x0 + d, y0 + d)
            if piece:
                expected += polygon_area(piece)
        assert pf35_2.region_measure(tri) == expected

    def test_monotone_in_depth(self, spec357):
        tri = ((F(0), F(0)), (F(1), F(0)), (F(1, 3), F(2, 3)))
        vals = [Prefractal(spec357, m).region_measure(tri) for m in (0, 1, 2, 3)]
        assert all(a >= b for a, b in zip(vals, vals[1:]))

    def test_additive_over_partition(self, pf35_2):
        quad = ((F(1, 7), F(1, 9)), (F(6, 7), F(1, 9)), (F(6, 7), F(5, 6)), (F(1, 7), F(5, 6)))
        a = ((F(1, 7), F(1, 9)), (F(6, 7), F(1, 9)), (F(6, 7), F(5, 6)))
        b = ((F(1, 7), F(1, 9)), (F(6, 7), F(5, 6)), (F(1, 7), F(5, 6)))
        assert pf35_2.region_measure(quad) == \
            pf35_2.region_measure(a) + pf35_2.region_measure(b)

    def test_nonconvex_region_is_triangulated(self, pf3_1):
        ell = ((F(0), F(0)), (F(1), F(0)), (F(1), F(1, 3)), (F(1, 3), F(1, 3)),
               (F(1, 3), F(1)), (F(0), F(1)))
        direct = pf3_1.region_measure(ell)
        parts = [
            ((F(0), F(0)), (F(1), F(0)), (F(1), F(1, 3)), (F(0), F(1, 3))),
            ((F(0), F(1, 3)), (F(1, 3), F(1, 3)), (F(1, 3), F(1)), (F(0), F(1))),
        ]
        assert direct == sum(pf3_1.region_measure(p) for p in parts)

    def test_second_moment_recursion_against_hand_integral(self, pf3_1):
        # integral of x^2 over the level-1 set: 1/3 minus 7/243 over the hole
        assert pf3_1.integrate(UNIT, {(2, 0): F(1)}) == F(74, 243)

    def test_f64_mode_close_to_exact(self, pf35_2):
        tri = ((F(0), F(0)), (F(1), F(0)), (F(0), F(1)))
        exact = pf35_2.region_measure(tri)
        approx = pf35_2.region_measure(tri, mode="f64")
        assert abs(approx - float(exact)) < 1e-12
        assert approx == pf35_2.region_measure(tri, mode="f64")


class TestTailBounds:
    def test_generated_tail_after_two_stages(self):
        spec = CarpetSpec((F(1, 3), F(1, 5)), generator="odd-reciprocal")
        tail = tail_measure_bounds(spec, 2)
        assert tail.lower == F(11, 12)
        assert tail.lower >= F(3, 4)
        assert tail.upper == 1

    def test_full_product_inside_interval(self):
        spec = CarpetSpec((), generator="odd-reciprocal")
        tail = tail_measure_bounds(spec, 0)
        product = 1.0
        for n in range(1, 4000):
            product *= 1 - 1.0 / (2 * n + 1) ** 2
        assert float(tail.lower) <= product <= float(tail.upper)

    def test_constant_tail_diverges(self):
        spec = CarpetSpec((F(1, 3),), generator="constant")
        with pytest.raises(TailDiverges):
            tail_measure_bounds(spec, 5)

    def test_no_generator_raises(self, spec35):
        with pytest.raises(StageBeyondSpec):
            tail_measure_bounds(spec35, 1)


class TestHoleMembership:
    def test_points(self, pf35_2):
        assert pf35_2.strictly_inside_hole((F(1, 2), F(1, 2)))
        assert pf35_2.strictly_inside_hole((F(1, 6), F(1, 6)), up_to_stage=2)
        assert not pf35_2.strictly_inside_hole((F(1, 6), F(1, 6)), up_to_stage=1)
        # hole boundaries belong to the carpet
        assert not pf35_2.strictly_inside_hole((F(1, 3), F(1, 2)))
        assert pf35_2.contains((F(0), F(0)))


class TestColumnObstacles:
    def test_center_column_sees_the_big_hole(self, spec35):
        obs = column_obstacles(spec35, 2, F(1, 2))
        assert obs == [(F(2, 15), F(1, 5), 2), (F(1, 3), F(2, 3), 1), (F(4, 5), F(13, 15), 2)]

    def test_side_column_sees_three_small_holes(self, spec35):
        obs = column_obstacles(spec35, 2, F(1, 6))
        assert [stage for (_, _, stage) in obs] == [2, 2, 2]


class TestConfigParsing:
    def test_ratios_and_generator(self):
        spec = parse_spec_config("ratios = 1/3, 1/5\ngenerator = odd-reciprocal\n")
        assert spec.ratios == (F(1, 3), F(1, 5))
        assert spec.generator == "odd-reciprocal"

    def test_malformed_line_rejected(self):
        with pytest.raises(SpecError):
            parse_spec_config("ratios 1/3\n")

    def test_bad_ratio_rejected(self):
        with pytest.raises(SpecError):
            parse_spec_config("ratios = 1/3, zebra\n")
