"""Direction sets, dot-product sets and pinned sum-product witnesses.

Every witness search picks the pin with the largest pinned set, breaking
ties by the smallest code, so results are reproducible.  Fractional-power
thresholds are checked as integer power inequalities.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from typing import Iterable

from .field import FieldSpec
from .geometry import GeometryError, PointSet, project
from .moments import find_good_direction, find_good_direction_hd


@dataclass(frozen=True)
class DirectionSet:
    dirs: frozenset[int]
    excluded: int  # points with first coordinate 0, which determine no slope


@dataclass(frozen=True)
class Witness:
    pin: tuple | int | None
    achieved_size: int
    threshold_holds: bool
    q: int
    theta: object = None
    # the pinned set size agrees with the projection size the search used
    consistent: bool = True

    @property
    def beats_half(self) -> bool:
        return 2 * self.achieved_size > self.q

    @property
    def ok(self) -> bool:
        """The theorem's promise: threshold implies a pinned set above q/2."""
        return self.consistent and (self.beats_half or not self.threshold_holds)


def direction_set(E: PointSet) -> DirectionSet:
    if E.dim != 2:
        raise GeometryError("direction sets are defined in F_q^2")
    f = E.field
    dirs = set()
    excluded = 0
    for a, b in E:
        if a == 0:
            excluded += 1
        else:
            dirs.add(f.div(b, a))
    return DirectionSet(frozenset(dirs), excluded)


def ratio_set(f: FieldSpec, A: Iterable[int]) -> frozenset[int]:
    """A A^{-1} = {a b^{-1} : a, b in A, b != 0}."""
    A = list(A)
    return frozenset(f.div(a, b) for a in A for b in A if b)


def difference_set(f: FieldSpec, A: Iterable[int]) -> frozenset[int]:
    A = list(A)
    return frozenset(f.sub(a, b) for a in A for b in A)


def cartesian(f: FieldSpec, A: Iterable[int], d: int = 2) -> PointSet:
    return PointSet(f, d, tuple(itertools.product(sorted(set(A)), repeat=d)))


def dot_product_set(E: PointSet) -> frozenset[int]:
    f = E.field
    return frozenset(f.dot(u, v) for u in E for v in E)


def _best_pin(E: PointSet, pins) -> tuple:
    best = None
    for e in sorted(pins):
        size = len(project(E, e))
        if best is None or size > best[1]:
            best = (e, size)
    return best


def pinned_dot_witness(E: PointSet) -> Witness:
    """e in E with |E . e| > q/2, when |E||Dir(E)| > q^2."""
    f = E.field
    q = f.q
    D = direction_set(E)
    threshold = len(E) * len(D.dirs) > q * q
    if D.dirs:
        gd = find_good_direction(E, D.dirs)
        theta = gd.theta
        # (1, theta) = lambda e for the smallest e = (a, a theta), a != 0
        e = min(pt for pt in E if pt[0] and f.div(pt[1], pt[0]) == theta)
        size = len(project(E, e))
        return Witness(e, size, threshold, q, theta, size == gd.proj_size)
    if not E:
        return Witness(None, 0, threshold, q)
    e, size = _best_pin(E, E)
    return Witness(e, size, threshold, q)


def pinned_linear_witness(f: FieldSpec, A: Iterable[int], Theta: Iterable[int]) -> Witness:
    """theta in Theta with |A + theta A| large, rescaled to a pair (a, b) from A.

    With Theta = A this is the |A| > q^(2/3) statement; with Theta = A A^{-1}
    the pin (a, b) satisfies b = theta a and |aA + bA| = |A + theta A|.
    """
    A = frozenset(A)
    Theta = frozenset(Theta)
    if not A:
        raise ValueError("A must be nonempty")
    q = f.q
    E = cartesian(f, A)
    gd = find_good_direction(E, Theta)
    theta = gd.theta
    pairs = [(a, b) for a in sorted(A) if a for b in sorted(A) if b == f.mul(theta, a)]
    pin = pairs[0] if pairs else (1, theta)
    a, b = pin
    achieved = len(sum_of_dilates(f, A, (a, b)))
    threshold = len(A) ** 2 * len(Theta) > q * q
    return Witness(pin, achieved, threshold, q, theta, achieved == gd.proj_size)


def sum_of_dilates(f: FieldSpec, A: Iterable[int], coeffs: Iterable[int]) -> frozenset[int]:
    """{c_1 a_1 + ... + c_n a_n : a_i in A}."""
    A = sorted(set(A))
    out = {0}
    for c in coeffs:
        scaled = {f.mul(c, a) for a in A}
        out = {f.add(s, t) for s in out for t in scaled}
    return frozenset(out)


def product_shift_set(f: FieldSpec, A: Iterable[int], a: int) -> frozenset[int]:
    """A(a + A) = {b (a + c) : b, c in A}."""
    A = list(A)
    return frozenset(f.mul(b, f.add(a, c)) for b in A for c in A)


def product_shift_points(f: FieldSpec, A: Iterable[int]) -> PointSet:
    A = list(A)
    return PointSet(f, 2, tuple((f.mul(b, c), b) for b in A for c in A))


def product_shift_witness(f: FieldSpec, A: Iterable[int]) -> Witness:
    """a in A with |A(a + A)| > q/2, when 0 is not in A and |A|^3 > q^2."""
    A = frozenset(A)
    if 0 in A:
        raise ValueError("A must not contain 0")
    if not A:
        raise ValueError("A must be nonempty")
    q = f.q
    E = product_shift_points(f, A)
    if len(E) != len(A) ** 2:
        raise AssertionError("(b, c) -> (bc, b) failed to be injective")
    gd = find_good_direction(E, A)
    a = gd.theta
    achieved = len(product_shift_set(f, A, a))
    return Witness(a, achieved, len(A) ** 3 > q * q, q, a, achieved == gd.proj_size)


def hd_dot_witness(f: FieldSpec, A: Iterable[int], d: int, z: int = 1) -> Witness:
    """(a_1..a_{d-1}) in A^{d-1} with |a_1 A + ... + a_{d-1} A + z A| > q/2."""
    if d < 2:
        raise GeometryError("dimension must be at least 2")
    if z == 0:
        raise ValueError("z must be nonzero")
    A = frozenset(A)
    if not A:
        raise ValueError("A must be nonempty")
    q = f.q
    E = cartesian(f, A, d)
    Theta = list(itertools.product(sorted(A), repeat=d - 1))
    gd = find_good_direction_hd(E, Theta, z)
    achieved = len(sum_of_dilates(f, A, gd.theta + (z,)))
    threshold = len(A) ** (2 * d - 1) > q**d
    return Witness(gd.theta, achieved, threshold, q, gd.theta, achieved == gd.proj_size)
