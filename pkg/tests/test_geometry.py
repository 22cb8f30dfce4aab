from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, strategies as st

from cantor_hfun.exceptions import CapacityError, GeometryError
from cantor_hfun.geometry import (Basepoint, CircularDomain, SlitDomain, cantor_level,
                                  gap_schedule, initial_circles, mirror_pairs)


def test_level_zero_is_unit_slit():
    d = cantor_level(0)
    assert d.m == 1 and d.length == 1.0 and d.centers == (0.0,)


def test_level_one_and_two_centers():
    d1 = cantor_level(1)
    assert d1.exact_centers == (Fraction(-1, 3), Fraction(1, 3))
    assert d1.exact_length == Fraction(1, 3)
    assert np.allclose(d1.left_ends, [-0.5, 1 / 6])
    d2 = cantor_level(2)
    assert d2.exact_centers == tuple(Fraction(k, 9) for k in (-4, -2, 2, 4))
    assert d2.length == pytest.approx(1 / 9, abs=0)


def test_capacity_and_bad_levels():
    with pytest.raises(CapacityError):
        cantor_level(13)
    assert cantor_level(12).m == 4096
    for bad in (-1, 1.5, True):
        with pytest.raises(GeometryError):
            cantor_level(bad)


@given(st.integers(min_value=0, max_value=9))
def test_level_invariants(level):
    d = cantor_level(level)
    assert d.m == 2 ** level
    assert d.exact_length == Fraction(1, 3 ** level)
    assert sum(d.exact_centers) == 0
    assert d.exact_centers == tuple(-c for c in reversed(d.exact_centers))
    assert min(d.exact_centers) - d.exact_length / 2 == Fraction(-1, 2)
    assert max(d.exact_centers) + d.exact_length / 2 == Fraction(1, 2)
    assert d.total_measure() == pytest.approx((2 / 3) ** level, rel=1e-14)
    assert np.all(np.diff(d.centers) > d.length)


@given(st.integers(min_value=0, max_value=7))
def test_levels_are_nested(level):
    outer, inner = cantor_level(level), cantor_level(level + 1)
    half_o, half_i = outer.exact_length / 2, inner.exact_length / 2
    for c in inner.exact_centers:
        assert any(co - half_o <= c - half_i and c + half_i <= co + half_o for co in outer.exact_centers)


def test_gap_schedule_examples():
    s = gap_schedule(cantor_level(1), "left")
    assert s.zero_interval == (0.0, 1.0) and s.one_threshold == 2.0
    assert s.steps == ((pytest.approx(4 / 3), pytest.approx(5 / 3), 1),)
    s0 = gap_schedule(cantor_level(0), Basepoint.LEFT_EXTERIOR)
    assert len(s0) == 0 and s0.zero_interval[1] == 1.0 and s0.one_threshold == 2.0
    sc = gap_schedule(cantor_level(2), "center")
    assert sc.zero_interval[1] == pytest.approx(1 / 6) and sc.one_threshold == 0.5
    (lo, hi, k), = sc.steps
    assert (lo, hi, k) == (pytest.approx(5 / 18), pytest.approx(7 / 18), 1)


@given(st.integers(min_value=1, max_value=8), st.sampled_from(["left", "center"]))
def test_gap_schedule_ordering(level, bp):
    d = cantor_level(level)
    s = gap_schedule(d, bp)
    expected = d.m - 1 if bp == "left" else d.m // 2 - 1
    assert len(s) == expected
    bounds = [s.zero_interval[1]] + [x for lo, hi, _ in s.steps for x in (lo, hi)] + [s.one_threshold]
    assert np.all(np.diff(bounds) > 0)
    assert [k for *_, k in s.steps] == list(range(1, expected + 1))


def test_center_schedule_rejects_single_slit():
    with pytest.raises(GeometryError):
        gap_schedule(cantor_level(0), "center")


def test_basepoint_parsing():
    assert Basepoint.parse("Left") is Basepoint.LEFT_EXTERIOR
    assert Basepoint.parse("centre").z0 == 0.0
    assert Basepoint.LEFT_EXTERIOR.z0 == -1.5
    with pytest.raises(GeometryError):
        Basepoint.parse("right")


def test_initial_circles():
    c1 = initial_circles(cantor_level(1))
    assert np.allclose(c1.centers, [-1 / 3, 1 / 3]) and np.allclose(c1.radii, 1 / 6)
    c0 = initial_circles(cantor_level(0))
    assert c0.centers[0] == 0 and c0.radii[0] == 0.5
    assert np.allclose(initial_circles(cantor_level(2)).radii, 1 / 18)


def test_circular_domain_validation_and_roundtrip():
    with pytest.raises(GeometryError):
        CircularDomain([0, 0.1], [0.1, 0.1])
    with pytest.raises(GeometryError):
        CircularDomain([0], [-1.0])
    dom = CircularDomain([-0.3, 0.3 + 0.1j], [0.1, 0.05])
    back = CircularDomain.from_dict(dom.to_dict())
    assert np.array_equal(back.centers, dom.centers) and np.array_equal(back.radii, dom.radii)
    with pytest.raises(ValueError):
        dom.radii[0] = 1.0


def test_slit_domain_validation_and_roundtrip():
    with pytest.raises(GeometryError):
        SlitDomain(level=None, length=0.5, centers=(0.0, 0.3))
    d = cantor_level(2)
    back = SlitDomain.from_dict(d.to_dict())
    assert back.centers == d.centers and back.length == d.length
    assert d.contains(-4 / 9) and not d.contains(0.0)


def test_mirror_pairs():
    assert mirror_pairs(4) == [(1, 2), (0, 3)]
