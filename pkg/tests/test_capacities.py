"""
Tests for capacity sequences, the product rule and embedding obstructions.
"""

import math

import pytest

from ehcap.capacities import (
    CapacityInterval,
    DomainSpec,
    distinguish_products,
    embedding_consistency,
    known_capacities,
    obstruction_report,
    product_capacities,
    separation_threshold,
)
from ehcap.errors import ValidationError

from conftest import SQRT27


def _lowers(values):
    return [c.lower for c in values]


class TestDomainSpec:
    def test_parse_single(self):
        assert DomainSpec.parse("ball:4") == DomainSpec.ball(4)
        assert DomainSpec.parse("complex-bidisc") == DomainSpec.complex_bidisc()
        assert DomainSpec.parse("Ellipsoid: 2pi, 3") == DomainSpec.ellipsoid(2 * math.pi, 3)

    def test_parse_product_flattens(self):
        spec = DomainSpec.parse("bidisc * disc:0.5 * ball:1")
        assert spec.kind == "product"
        assert [f.kind for f in spec.factors] == ["bidisc", "disc", "ball"]
        assert (DomainSpec.bidisc() * DomainSpec.disc(0.5)) * DomainSpec.ball(1) == spec

    def test_unknown_kind_suggests(self):
        with pytest.raises(ValidationError, match="did you mean 'bidisc'"):
            DomainSpec.parse("bidsc")

    @pytest.mark.parametrize("text", ["ball", "ball:-1", "ellipsoid:1", "approximant:2.5", "ball:x", "bidisc*"])
    def test_rejects_bad_parameters(self, text):
        with pytest.raises(ValidationError):
            DomainSpec.parse(text)

    def test_label(self):
        assert DomainSpec.parse("bidisc*disc:0.95").label() == "bidisc x disc:0.95"


class TestKnownCapacities:
    def test_bidisc_first_three(self):
        values = known_capacities(DomainSpec.bidisc(), 3)
        assert _lowers(values) == pytest.approx([4.0, SQRT27, 8.0])
        assert all(c.exact for c in values)
        assert {c.provenance for c in values} == {"theorem"}

    def test_bidisc_odd_and_even(self):
        values = known_capacities(DomainSpec.bidisc(), 7)
        assert values[4].lower == values[4].upper == 12.0
        assert (values[3].lower, values[3].upper) == (8.0, 12.0)
        assert not values[5].exact

    def test_ball_and_ellipsoid(self):
        assert _lowers(known_capacities(DomainSpec.ball(4), 5)) == [4, 4, 8, 8, 12]
        assert _lowers(known_capacities(DomainSpec.ellipsoid(4, SQRT27), 3)) == pytest.approx([4, SQRT27, 8])

    def test_disc_is_linear(self):
        assert _lowers(known_capacities(DomainSpec.disc(1.0), 3)) == pytest.approx([math.pi, 2 * math.pi, 3 * math.pi])

    def test_approximant_brackets_the_bidisc(self):
        values = known_capacities(DomainSpec.approximant(10), 3)
        assert values[1].lower == pytest.approx(SQRT27)
        assert values[1].upper == pytest.approx(1.1 * SQRT27)

    def test_rejects_bad_kmax(self):
        for kmax in (0, -1, 2.0, True):
            with pytest.raises(ValidationError):
                known_capacities(DomainSpec.bidisc(), kmax)

    def test_empty_interval_is_rejected(self):
        with pytest.raises(ValidationError):
            CapacityInterval(1, 2.0, 1.0)


class TestProductRule:
    def test_polydisc_matches_product_of_discs(self):
        a, b = DomainSpec.disc(1.0), DomainSpec.disc(0.8)
        product = product_capacities([a, b], 6)
        polydisc = known_capacities(DomainSpec.polydisc(math.pi, math.pi * 0.64), 6)
        assert _lowers(product) == pytest.approx(_lowers(polydisc))

    def test_bidisc_times_disc(self):
        area = math.pi * 0.95 ** 2
        values = known_capacities(DomainSpec.parse("bidisc*disc:0.95"), 3)
        assert _lowers(values) == pytest.approx([area, SQRT27, 8.0])

    def test_single_factor_passes_through(self):
        assert product_capacities([DomainSpec.bidisc()], 3) == known_capacities(DomainSpec.bidisc(), 3)


class TestObstructions:
    def test_complex_bidisc_into_bidisc(self):
        report = obstruction_report(DomainSpec.complex_bidisc(), DomainSpec.bidisc(), 3)
        assert report.first_violation == 2
        assert 3 in report.violations
        assert "c_2" in report.summary()

    def test_ball_into_bidisc_is_unobstructed(self):
        report = obstruction_report(DomainSpec.ball(4), DomainSpec.bidisc(), 3)
        assert report.first_violation is None
        assert report.summary() == "no obstruction found up to k=3"

    def test_bidisc_into_ball(self):
        report = obstruction_report(DomainSpec.bidisc(), DomainSpec.ball(4), 3)
        assert report.first_violation == 2

    def test_even_brackets_do_not_certify(self):
        report = obstruction_report(DomainSpec.polydisc(2.5, 2.5), DomainSpec.bidisc(), 7)
        assert report.violations == [5, 7]

    def test_consistency_checks(self):
        assert all(embedding_consistency().values())

    def test_report_serializes(self):
        d = obstruction_report(DomainSpec.complex_bidisc(), DomainSpec.bidisc(), 3).to_dict()
        assert d["first_violation"] == 2
        assert len(d["source_values"]) == 3


class TestDistinguish:
    def test_large_disc_separates_at_two(self):
        assert distinguish_products(0.95, 5).separating_k == 2

    def test_area_just_above_two(self):
        R = math.sqrt(2.05 / math.pi)
        report = distinguish_products(R, 60)
        assert report.separating_k == 41
        assert report.area == pytest.approx(2.05)

    def test_area_below_two_never_separates(self):
        R = math.sqrt(1.9 / math.pi)
        assert distinguish_products(R, 101).separating_k is None

    def test_rejects_radius_outside_unit_interval(self):
        for R in (0.0, 1.0, 1.5):
            with pytest.raises(ValidationError):
                distinguish_products(R, 5)

    def test_threshold_for_kmax_101(self):
        threshold = separation_threshold(101)
        assert threshold.area == pytest.approx(204 / 101, abs=1e-9)
        assert 2.0 < threshold.area < 2.05
        assert threshold.separating_k == 101
