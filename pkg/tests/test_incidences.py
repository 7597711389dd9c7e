import random

import pytest

from fqlab.field import field_of_order
from fqlab.geometry import GeometryError, PointSet, all_points, enumerate_hyperplanes, enumerate_mflats, line
from fqlab.incidences import count_incidences, vinh_check, vinh_check_hd


def brute_incidences(E, L):
    return sum(1 for h in L for x in E if h.field.dot(x, h.normal) == h.offset)


def test_count_examples():
    f = field_of_order(3)
    lines = enumerate_hyperplanes(f, 2)
    assert count_incidences(PointSet.full(f, 2), lines) == 36
    assert count_incidences(PointSet.of(f, [(1, 1)]), lines) == 4
    assert count_incidences(PointSet.of(f, [(0, 0), (1, 1)]), [line(f, (1, 2), 0)]) == 2


def test_mixed_fields_rejected():
    with pytest.raises(GeometryError):
        count_incidences(PointSet.full(field_of_order(3), 2), enumerate_hyperplanes(field_of_order(5), 2))


def test_multiplicity_counts():
    f = field_of_order(3)
    ell = line(f, (0, 1), 0)
    assert count_incidences(PointSet.full(f, 2), [ell, ell]) == 6


@pytest.mark.parametrize("q", [3, 5, 7])
def test_vinh_random(q):
    f = field_of_order(q)
    rng = random.Random(100 + q)
    pts = list(all_points(f, 2))
    lines = enumerate_hyperplanes(f, 2)
    for _ in range(30):
        E = PointSet(f, 2, tuple(rng.sample(pts, rng.randint(0, len(pts)))))
        L = rng.sample(lines, rng.randint(0, len(lines)))
        rep = vinh_check(E, L)
        assert rep.count == brute_incidences(E, L)
        assert rep.holds and rep.ok and rep.ratio <= 1


def test_vinh_twelve_points_fourteen_lines():
    f = field_of_order(5)
    rng = random.Random(0)
    E = PointSet(f, 2, tuple(rng.sample(list(all_points(f, 2)), 12)))
    L = rng.sample(enumerate_hyperplanes(f, 2), 14)
    assert vinh_check(E, L).holds


@pytest.mark.parametrize("q", [3, 5])
def test_zero_deviation_cases(q):
    f = field_of_order(q)
    rng = random.Random(q)
    lines = enumerate_hyperplanes(f, 2)
    pts = list(all_points(f, 2))
    full = PointSet.full(f, 2)
    L = rng.sample(lines, 5)
    assert vinh_check(full, L).deviation_sq_scaled == 0
    E = PointSet(f, 2, tuple(rng.sample(pts, 7)))
    assert vinh_check(E, lines).deviation_sq_scaled == 0


def test_forced_incidence_flag():
    f = field_of_order(3)
    rep = vinh_check(PointSet.full(f, 2), enumerate_hyperplanes(f, 2))
    assert rep.forces_incidence and rep.count > 0


@pytest.mark.parametrize("q", [2, 3])
def test_vinh_hd(q):
    f = field_of_order(q)
    rng = random.Random(q)
    pts = list(all_points(f, 3))
    H = enumerate_hyperplanes(f, 3)
    for _ in range(20):
        E = PointSet(f, 3, tuple(rng.sample(pts, rng.randint(0, len(pts)))))
        Hs = rng.sample(H, rng.randint(0, len(H)))
        rep = vinh_check_hd(E, Hs)
        assert rep.count == brute_incidences(E, Hs)
        assert rep.ok
    assert vinh_check_hd(PointSet.full(f, 3), H[:4]).deviation_sq_scaled == 0


def test_hd_rejects_lower_flats_and_planar_check_rejects_space():
    f = field_of_order(2)
    with pytest.raises(GeometryError):
        vinh_check_hd(PointSet.full(f, 3), enumerate_mflats(f, 3, 1))
    with pytest.raises(GeometryError):
        vinh_check(PointSet.full(f, 3), [])
