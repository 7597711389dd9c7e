import itertools

import pytest
from hypothesis import given, settings, strategies as st

from fqlab.field import field_of_order
from fqlab.geometry import (
    Flat, GeometryError, PointSet, all_points, canonical_normals, enumerate_hyperplanes,
    enumerate_mflats, format_points, gaussian_binomial, incidence_count, incidence_profile,
    line, parse_points, project, read_points, write_points,
)


def brute_flats(f, d, m):
    """Every translate of every m-dim span, found by closing m-tuples of vectors."""
    pts = list(all_points(f, d))
    found = set()
    for ws in itertools.combinations(pts, m):
        span = set()
        for cs in itertools.product(f.elements(), repeat=m):
            x = (0,) * d
            for c, w in zip(cs, ws):
                x = f.vadd(x, f.scale(c, w))
            span.add(x)
        if len(span) != f.q**m:
            continue
        for x0 in pts:
            found.add(frozenset(f.vadd(x0, s) for s in span))
    return found


def brute_hyperplanes(f, d):
    out = set()
    for normal in all_points(f, d):
        if any(normal):
            for t in f.elements():
                out.add(frozenset(x for x in all_points(f, d) if f.dot(x, normal) == t))
    return out


@pytest.mark.parametrize("q,d,expected", [(2, 2, 6), (3, 2, 12), (3, 3, 39), (4, 2, 20)])
def test_hyperplane_counts(q, d, expected):
    f = field_of_order(q)
    hs = enumerate_hyperplanes(f, d)
    assert len(hs) == expected == q * (q**d - 1) // (q - 1)
    assert {h.key() for h in hs} == brute_hyperplanes(f, d)


@pytest.mark.parametrize("q,d,m", [(2, 2, 1), (2, 3, 1), (2, 3, 2), (3, 2, 1), (3, 3, 1), (3, 3, 2),
                                   (2, 4, 2), (4, 2, 1)])
def test_mflats_match_closure_oracle(q, d, m):
    f = field_of_order(q)
    flats = enumerate_mflats(f, d, m)
    keys = [fl.key() for fl in flats]
    assert len(set(keys)) == len(keys), "an m-flat was listed twice"
    assert set(keys) == brute_flats(f, d, m)
    assert len(flats) == gaussian_binomial(d, m, q) * q ** (d - m)


def test_mflat_examples():
    assert len(enumerate_mflats(field_of_order(2), 3, 1)) == 28
    f3 = field_of_order(3)
    assert {fl.key() for fl in enumerate_mflats(f3, 2, 1)} == {h.key() for h in enumerate_hyperplanes(f3, 2)}
    assert len(enumerate_mflats(field_of_order(2), 2, 1)) == 6


def test_mflat_range_errors():
    f = field_of_order(2)
    for m in (0, 3):
        with pytest.raises(GeometryError):
            enumerate_mflats(f, 3, m)
    with pytest.raises(GeometryError):
        enumerate_hyperplanes(f, 1)


def test_mflat_basepoint_is_smallest_point():
    f = field_of_order(3)
    for fl in enumerate_mflats(f, 3, 1):
        assert fl.basepoint == min(fl.points())
        assert all(x in fl for x in fl.points())


def test_gaussian_binomial_values():
    assert gaussian_binomial(3, 1, 2) == 7
    assert gaussian_binomial(4, 2, 2) == 35
    assert gaussian_binomial(3, 2, 3) == 13


def test_canonical_normals_shape():
    f = field_of_order(3)
    ns = canonical_normals(f, 2)
    assert ns == [(0, 1), (1, 1), (2, 1), (1, 0)]


def test_line_normalises():
    f = field_of_order(5)
    a = line(f, (2, 4), 3)
    b = line(f, (1, 2), f.div(3, 2))
    assert a == b and a.normal[-1] == 1
    with pytest.raises(GeometryError):
        line(f, (0, 0), 1)


def test_incidence_examples():
    f = field_of_order(3)
    ell = line(f, (1, 2), 0)
    assert incidence_count(PointSet(f, 2, ()), ell) == 0
    assert incidence_count(PointSet.full(f, 2), ell) == 3
    assert incidence_count(PointSet.of(f, [(0, 0), (1, 1)]), ell) == 2
    with pytest.raises(GeometryError):
        incidence_count(PointSet.full(f, 3), ell)


def test_projection_examples():
    f = field_of_order(3)
    assert project(PointSet.full(f, 2), (1, 0)) == frozenset(range(3))
    assert project(PointSet.of(f, [(0, 0)]), (2, 1)) == {0}
    assert project(PointSet.of(f, [(1, 0), (0, 1), (1, 1)]), (1, 1)) == {1, 2}
    with pytest.raises(GeometryError):
        project(PointSet.full(f, 2), (1, 0, 0))


def test_point_set_validation():
    f = field_of_order(3)
    with pytest.raises(GeometryError):
        PointSet(f, 2, ((0, 3),))
    with pytest.raises(GeometryError):
        PointSet(f, 2, ((0, 1, 2),))
    with pytest.raises(GeometryError):
        PointSet.of(f, [])
    E = PointSet.of(f, [(2, 1), (0, 0), (2, 1)])
    assert E.points == ((0, 0), (2, 1))
    assert (2, 1) in E and [0, 0] in E and (1, 1) not in E


point_lists = st.lists(st.tuples(st.integers(0, 4), st.integers(0, 4)), max_size=25)


@settings(max_examples=60)
@given(point_lists)
def test_profile_matches_direct_count(pts):
    f = field_of_order(5)
    E = PointSet(f, 2, tuple(pts))
    prof = incidence_profile(E)
    assert len(prof) == 30
    for h in enumerate_hyperplanes(f, 2):
        assert prof[h.normal, h.offset] == incidence_count(E, h)


@settings(max_examples=40)
@given(point_lists)
def test_points_file_round_trip(tmp_path_factory, pts):
    f = field_of_order(5)
    E = PointSet(f, 2, tuple(pts))
    path = tmp_path_factory.mktemp("pts") / "e.txt"
    write_points(path, E)
    assert read_points(path, f, 2) == E


def test_parse_points_comments_and_errors(tmp_path):
    assert parse_points("# header\n1,2\n\n 0, 1  # trailing\n") == [(1, 2), (0, 1)]
    with pytest.raises(GeometryError):
        parse_points("1;2\n")
    p = tmp_path / "empty.txt"
    p.write_text("# nothing\n")
    f = field_of_order(3)
    with pytest.raises(GeometryError):
        read_points(p, f)
    assert len(read_points(p, f, 2)) == 0
    assert format_points(PointSet.of(f, [(1, 2)])) == "1,2\n"


def test_flat_membership_without_normal():
    f = field_of_order(2)
    fl = Flat(f, 3, basepoint=(0, 0, 1), directions=((1, 0, 0),))
    assert fl.flat_dim == 1 and not fl.is_hyperplane
    assert sorted(fl.points()) == [(0, 0, 1), (1, 0, 1)]
    assert (1, 1, 1) not in fl
