"""Second moments of the incidence function and good projection directions."""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Sequence

from .geometry import GeometryError, PointSet, incidence_profile, project


@dataclass(frozen=True)
class MomentReport:
    sum_sq: int
    expected_identity: int
    variance_sum: Fraction
    variance_bound: Fraction
    # closed form of variance_sum where one is known (design case)
    variance_exact: Fraction | None = None

    @property
    def identity_holds(self) -> bool:
        return self.sum_sq == self.expected_identity

    @property
    def bound_holds(self) -> bool:
        return self.variance_sum <= self.variance_bound

    @property
    def ok(self) -> bool:
        exact = self.variance_exact is None or self.variance_exact == self.variance_sum
        return self.identity_holds and self.bound_holds and exact

    @property
    def ratio(self) -> float:
        if self.variance_bound == 0:
            return 0.0 if self.variance_sum == 0 else float("inf")
        return float(self.variance_sum / self.variance_bound)


def _moment_from_counts(counts: Iterable[int], n: int, q: int, expected: int, bound: int) -> MomentReport:
    counts = list(counts)
    mean = Fraction(n, q)
    return MomentReport(
        sum_sq=sum(c * c for c in counts),
        expected_identity=expected,
        variance_sum=squared_deviation_sum(counts, mean),
        variance_bound=Fraction(bound),
    )


def second_moment_hyperplanes(E: PointSet) -> MomentReport:
    """Sum of i(h)^2 over all q(q^d-1)/(q-1) hyperplanes of F_q^d."""
    if E.dim < 2:
        raise GeometryError("dimension must be at least 2")
    q, d, n = E.field.q, E.dim, len(E)
    lam = (q ** (d - 1) - 1) // (q - 1)
    return _moment_from_counts(
        incidence_profile(E).values(), n, q,
        expected=lam * n * n + q ** (d - 1) * n,
        bound=q ** (d - 1) * n,
    )


def second_moment_lines(E: PointSet) -> MomentReport:
    """Sum of i(l)^2 over all q(q+1) lines of F_q^2; equals |E|^2 + q|E|."""
    if E.dim != 2:
        raise GeometryError(f"lines live in dimension 2, got {E.dim}")
    return second_moment_hyperplanes(E)


@dataclass(frozen=True)
class GoodDirection:
    theta: object  # field element, or tuple of them in dimension d
    direction: tuple[int, ...]
    proj_size: int
    bound: Fraction
    # |E||Theta| against q^d: the regime where the projection beats q/2
    over_threshold: bool
    q: int

    @property
    def bound_holds(self) -> bool:
        return self.proj_size >= self.bound

    @property
    def half_strict(self) -> bool:
        return 2 * self.proj_size > self.q

    @property
    def half_weak(self) -> bool:
        return 2 * self.proj_size >= self.q

    @property
    def ok(self) -> bool:
        return self.bound_holds and (self.half_strict or not self.over_threshold)


def _best(E: PointSet, Theta: Sequence, to_direction) -> tuple[object, tuple[int, ...], int]:
    best = None
    for theta in sorted(Theta):
        v = to_direction(theta)
        size = len(project(E, v))
        if best is None or size > best[2]:
            best = (theta, v, size)
    return best


def find_good_direction(E: PointSet, Theta: Iterable[int]) -> GoodDirection:
    """theta in Theta maximising |E . (1, theta)|, ties to the smallest code.

    The maximiser always satisfies |E.(1,theta)| >= q|E||Theta|/(q^2+|E||Theta|).
    """
    Theta = frozenset(Theta)
    if E.dim != 2:
        raise GeometryError("find_good_direction works in F_q^2; use find_good_direction_hd")
    if not E or not Theta:
        raise ValueError("point set and direction set must be nonempty")
    q = E.field.q
    theta, v, size = _best(E, Theta, lambda t: (1, t))
    m = len(E) * len(Theta)
    return GoodDirection(theta, v, size, Fraction(q * m, q * q + m), m > q * q, q)


def find_good_direction_hd(E: PointSet, Theta: Iterable[Sequence[int]], z: int) -> GoodDirection:
    """theta in Theta maximising |E . (theta, z)| in F_q^d."""
    f, d = E.field, E.dim
    if z == 0:
        raise ValueError("z must be a nonzero field element")
    f.check(z)
    Theta = frozenset(tuple(t) for t in Theta)
    if not E or not Theta:
        raise ValueError("point set and direction set must be nonempty")
    if any(len(t) != d - 1 for t in Theta):
        raise GeometryError(f"directions must have {d - 1} coordinates")
    q = f.q
    theta, v, size = _best(E, Theta, lambda t: t + (z,))
    m = len(E) * len(Theta)
    return GoodDirection(theta, v, size, Fraction(q * m, q**d + m), m > q**d, q)


@dataclass(frozen=True)
class MarstrandResult:
    xi: int
    proj_size: int
    target: int  # min(|E|, q); the guarantee is 2 * proj_size >= target

    @property
    def ok(self) -> bool:
        return 2 * self.proj_size >= self.target


def marstrand_direction(E: PointSet) -> MarstrandResult:
    if not E:
        raise ValueError("point set must be nonempty")
    gd = find_good_direction(E, E.field.elements())
    return MarstrandResult(gd.theta, gd.proj_size, min(len(E), E.field.q))


def good_direction_bound(q: int, d: int, m: int) -> Fraction:
    """q m / (q^d + m) with m = |E||Theta|."""
    return Fraction(q * m, q**d + m)


def squared_deviation_sum(counts: Iterable[int], mean: Fraction) -> Fraction:
    return sum(((c - mean) ** 2 for c in counts), Fraction(0))

