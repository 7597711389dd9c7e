"""Algebraic distances and pinned distance sets in F_q^2, q odd.

A general line is moved onto span(1,1) by a similarity
``x -> M (x - p0)`` with ``M = [[a, -b], [b, a]]``.  Such a map multiplies
every algebraic distance by the nonzero constant ``a^2 + b^2``, so pinned
distance sets keep their cardinality.  Lines with an isotropic direction
(``w . w = 0``) cannot be moved onto the diagonal and are rejected.
"""

from __future__ import annotations

from dataclasses import dataclass, replace
from typing import Iterable, Sequence

from .field import FieldSpec
from .geometry import Flat, GeometryError, Point, PointSet, canonical_normals, incidence_profile, line, project
from .moments import find_good_direction
from .sumproduct import Witness, difference_set


class UnsupportedLine(GeometryError):
    pass


def _require_odd(f: FieldSpec) -> None:
    if f.p == 2:
        raise GeometryError(f"pinned distance machinery needs odd q, got {f!r}")


def algebraic_distance(f: FieldSpec, u: Sequence[int], v: Sequence[int]) -> int:
    if len(u) != len(v):
        raise GeometryError("points of different dimensions")
    w = f.vsub(u, v)
    return f.dot(w, w)


def pinned_distances(E: PointSet, e: Sequence[int]) -> frozenset[int]:
    f = E.field
    return frozenset(algebraic_distance(f, u, e) for u in E)


def distance_set(E: PointSet) -> frozenset[int]:
    f = E.field
    return frozenset(algebraic_distance(f, u, v) for u in E for v in E)


def eprime_map(f: FieldSpec, u: Sequence[int]) -> Point:
    u1, u2 = u
    return (f.add(f.square(u1), f.square(u2)), f.mul(f.scalar(-2), f.add(u1, u2)))


def transform_eprime(E: PointSet) -> PointSet:
    """{(u1^2 + u2^2, -2(u1 + u2))}; at most two points share an image."""
    f = E.field
    _require_odd(f)
    if E.dim != 2:
        raise GeometryError("transform is planar")
    return PointSet(f, 2, tuple(eprime_map(f, u) for u in E))


@dataclass(frozen=True)
class Similarity:
    field: FieldSpec
    origin: Point
    a: int
    b: int

    @property
    def scale(self) -> int:
        f = self.field
        return f.add(f.square(self.a), f.square(self.b))

    def forward(self, x: Sequence[int]) -> Point:
        f = self.field
        y1, y2 = f.vsub(x, self.origin)
        return (f.sub(f.mul(self.a, y1), f.mul(self.b, y2)),
                f.add(f.mul(self.b, y1), f.mul(self.a, y2)))

    def backward(self, y: Sequence[int]) -> Point:
        f = self.field
        c = f.inv(self.scale)
        y1, y2 = y
        x = (f.mul(c, f.add(f.mul(self.a, y1), f.mul(self.b, y2))),
             f.mul(c, f.sub(f.mul(self.a, y2), f.mul(self.b, y1))))
        return f.vadd(x, self.origin)


def diagonal_line(f: FieldSpec) -> Flat:
    return line(f, (f.neg(1), 1), 0)


def line_direction(fl: Flat) -> Point:
    n1, n2 = fl.normal
    return (n2, fl.field.neg(n1))


def similarity_to_diagonal(fl: Flat) -> Similarity:
    """A similarity mapping the line ``fl`` onto span(1,1)."""
    f = fl.field
    if fl.dim != 2 or not fl.is_hyperplane:
        raise GeometryError("expected a line of F_q^2")
    n1, n2 = fl.normal
    # canonical normals are (a, 1) or (1, 0)
    origin = (0, fl.offset) if n2 else (fl.offset, 0)
    w1, w2 = line_direction(fl)
    det = f.add(f.square(w1), f.square(w2))
    if det == 0:
        raise UnsupportedLine(f"line with normal {fl.normal} has an isotropic direction")
    c = f.inv(det)
    return Similarity(f, origin, f.mul(c, f.add(w1, w2)), f.mul(c, f.sub(w1, w2)))


@dataclass(frozen=True)
class DistanceReport:
    pin: Point | None
    dist_set: frozenset[int]
    threshold_holds: bool
    q: int
    line_hits: int = 0  # |E cap l|
    eprime_size: int = 0
    # |Delta_(t,t)(E)| == |E' . (1, t)| at the chosen pin
    identity_holds: bool = True

    @property
    def beats_half(self) -> bool:
        return 2 * len(self.dist_set) > self.q

    @property
    def ok(self) -> bool:
        return self.identity_holds and (self.beats_half or not self.threshold_holds)


def pinned_distance_witness(E: PointSet, ell: Flat | None = None) -> DistanceReport:
    """Pin e on ``ell`` (default span(1,1)) with |Delta_e(E)| > q/2 when |E||E cap ell| > 2q^2."""
    f = E.field
    _require_odd(f)
    if E.dim != 2:
        raise GeometryError("pinned distances are planar here")
    q = f.q
    S = similarity_to_diagonal(ell if ell is not None else diagonal_line(f))
    Es = E.with_points(S.forward(u) for u in E)
    Theta = frozenset(x for x, y in Es if x == y)
    threshold = len(E) * len(Theta) > 2 * q * q
    if not Theta:
        return DistanceReport(None, frozenset(), threshold, q)
    Ep = transform_eprime(Es)
    gd = find_good_direction(Ep, Theta)
    pin = S.backward((gd.theta, gd.theta))
    dists = pinned_distances(E, pin)
    return DistanceReport(pin, dists, threshold, q, len(Theta), len(Ep), len(dists) == gd.proj_size)


def rich_line(E: PointSet) -> tuple[Flat, int]:
    """A non-isotropic line with the most points of E (first in enumeration order)."""
    f = E.field
    prof = incidence_profile(E)
    best = None
    for e in canonical_normals(f, 2):
        if f.dot(e, e) == 0:
            continue
        for t in f.elements():
            if best is None or prof[e, t] > best[1]:
                best = (Flat(f, 2, e, t), prof[e, t])
    return best


def pinned_distance_anypoint(E: PointSet) -> DistanceReport:
    """Pin e in E with |Delta_e(E)| > q/2, promised when |E|^2 > 8 q^3."""
    f = E.field
    _require_odd(f)
    ell, _ = rich_line(E)
    rep = pinned_distance_witness(E, ell)
    return replace(rep, threshold_holds=len(E) ** 2 > 8 * f.q**3)


def diag_distance_set(f: FieldSpec, A: Iterable[int], a: int) -> frozenset[int]:
    """(a - A)^2 + D^2 with D = A - A."""
    A = list(A)
    D = difference_set(f, A)
    return frozenset(f.add(f.square(f.sub(a, b)), f.square(s)) for b in A for s in D)


def diag_distance_points(f: FieldSpec, A: Iterable[int]) -> PointSet:
    A = list(A)
    D = difference_set(f, A)
    m2 = f.scalar(-2)
    return PointSet(f, 2, tuple((f.add(f.square(b), f.square(s)), f.mul(m2, b)) for b in A for s in D))


def diag_distance_witness(f: FieldSpec, A: Iterable[int]) -> Witness:
    """a in A with |(a - A)^2 + D^2| > q/2 when |A|^2 |A - A| > 2 q^2."""
    _require_odd(f)
    A = frozenset(A)
    if not A:
        raise ValueError("A must be nonempty")
    q = f.q
    D = difference_set(f, A)
    E = diag_distance_points(f, A)
    gd = find_good_direction(E, A)
    a = gd.theta
    literal = diag_distance_set(f, A, a)
    # E . (1, a) shifted by a^2 is the literal set
    shifted = frozenset(f.add(t, f.square(a)) for t in project(E, (1, a)))
    consistent = literal == shifted and 2 * len(E) >= len(A) * len(D)
    threshold = len(A) ** 2 * len(D) > 2 * q * q
    return Witness(a, len(literal), threshold, q, a, consistent)

