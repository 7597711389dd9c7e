"""Incidence counts and Vinh's deviation bound.

All comparisons are done on squared, denominator-cleared integers:
``|I - |E||L|/q| <= sqrt(B)`` becomes ``(q I - |E||L|)^2 <= q^2 B``.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence

from .geometry import Flat, GeometryError, PointSet, incidence_count


@dataclass(frozen=True)
class IncidenceReport:
    count: int
    main_term: Fraction
    deviation_sq_scaled: int
    bound_sq_scaled: int
    # |E||L| > q^3 (resp. the design analogue) forces at least one incidence
    forces_incidence: bool = False

    @property
    def holds(self) -> bool:
        return self.deviation_sq_scaled <= self.bound_sq_scaled

    @property
    def ok(self) -> bool:
        return self.holds and (self.count >= 1 or not self.forces_incidence)

    @property
    def ratio(self) -> float:
        """(deviation / bound)^2; at most 1 when the bound holds."""
        if self.bound_sq_scaled == 0:
            return 0.0 if self.deviation_sq_scaled == 0 else float("inf")
        return self.deviation_sq_scaled / self.bound_sq_scaled


def count_incidences(E: PointSet, L: Sequence[Flat]) -> int:
    """Sum of i(l) over L; repeated flats count with multiplicity."""
    for fl in L:
        if fl.field != E.field:
            raise GeometryError(f"flat over {fl.field!r} mixed with points over {E.field!r}")
    return sum(incidence_count(E, fl) for fl in L)


def _vinh(E: PointSet, L: Sequence[Flat], spread: int) -> IncidenceReport:
    q = E.field.q
    count = count_incidences(E, L)
    mass = len(E) * len(L)
    return IncidenceReport(
        count=count,
        main_term=Fraction(mass, q),
        deviation_sq_scaled=(q * count - mass) ** 2,
        bound_sq_scaled=q * q * spread * mass,
        forces_incidence=mass > q * q * spread,
    )


def vinh_check(E: PointSet, L: Sequence[Flat]) -> IncidenceReport:
    if E.dim != 2:
        raise GeometryError(f"point-line bound is planar, got dimension {E.dim}")
    return _vinh(E, L, E.field.q)


def vinh_check_hd(E: PointSet, H: Sequence[Flat]) -> IncidenceReport:
    if E.dim < 2:
        raise GeometryError("dimension must be at least 2")
    if any(not h.is_hyperplane for h in H):
        raise GeometryError("vinh_check_hd expects hyperplanes")
    return _vinh(E, H, E.field.q ** (E.dim - 1))
