"""Points, hyperplanes and affine flats of F_q^d."""

from __future__ import annotations

import itertools
from collections import Counter
from dataclasses import dataclass
from functools import cached_property
from pathlib import Path
from typing import Iterable, Iterator, Sequence

from .field import FieldSpec

Point = tuple[int, ...]


class GeometryError(ValueError):
    pass


@dataclass(frozen=True)
class PointSet:
    """A finite subset of F_q^d.  Points are kept sorted and deduplicated."""

    field: FieldSpec
    dim: int
    points: tuple[Point, ...]

    def __post_init__(self):
        q = self.field.q
        pts = sorted(set(tuple(p) for p in self.points))
        for pt in pts:
            if len(pt) != self.dim:
                raise GeometryError(f"point {pt} does not have {self.dim} coordinates")
            if any(not 0 <= c < q for c in pt):
                raise GeometryError(f"point {pt} has a coordinate outside 0..{q - 1}")
        object.__setattr__(self, "points", tuple(pts))

    @classmethod
    def of(cls, f: FieldSpec, points: Iterable[Sequence[int]], dim: int | None = None) -> "PointSet":
        pts = [tuple(p) for p in points]
        if dim is None:
            if not pts:
                raise GeometryError("dimension of an empty point set must be given")
            dim = len(pts[0])
        return cls(f, dim, tuple(pts))

    @classmethod
    def full(cls, f: FieldSpec, dim: int) -> "PointSet":
        return cls(f, dim, tuple(all_points(f, dim)))

    def __len__(self) -> int:
        return len(self.points)

    def __iter__(self) -> Iterator[Point]:
        return iter(self.points)

    def __contains__(self, pt) -> bool:
        return tuple(pt) in self._members

    @cached_property
    def _members(self) -> frozenset[Point]:
        return frozenset(self.points)

    def with_points(self, points: Iterable[Sequence[int]]) -> "PointSet":
        return PointSet(self.field, self.dim, tuple(tuple(p) for p in points))


def all_points(f: FieldSpec, d: int) -> Iterator[Point]:
    return itertools.product(range(f.q), repeat=d)


@dataclass(frozen=True)
class Flat:
    """An affine flat of F_q^d.

    Hyperplanes are stored as ``{x : x . normal = offset}`` with ``normal``
    in canonical form (last nonzero coordinate equal to 1).  Lower
    dimensional flats are stored as ``basepoint + span(directions)`` with the
    directions in reduced row echelon form and the basepoint the
    lexicographically smallest point of the flat.
    """

    field: FieldSpec
    dim: int
    normal: Point | None = None
    offset: int | None = None
    basepoint: Point | None = None
    directions: tuple[Point, ...] = ()

    @property
    def is_hyperplane(self) -> bool:
        return self.normal is not None

    @property
    def flat_dim(self) -> int:
        return self.dim - 1 if self.is_hyperplane else len(self.directions)

    def __contains__(self, x) -> bool:
        f = self.field
        if self.is_hyperplane:
            return f.dot(x, self.normal) == self.offset
        return not _reduce(f, f.vsub(x, self.basepoint), self.directions, self._pivots)

    @cached_property
    def _pivots(self) -> tuple[int, ...]:
        return tuple(next(j for j, c in enumerate(row) if c) for row in self.directions)

    def points(self) -> list[Point]:
        f = self.field
        if self.is_hyperplane:
            return [x for x in all_points(f, self.dim) if f.dot(x, self.normal) == self.offset]
        pts = []
        for coeffs in itertools.product(range(f.q), repeat=len(self.directions)):
            x = self.basepoint
            for c, w in zip(coeffs, self.directions):
                x = f.vadd(x, f.scale(c, w))
            pts.append(x)
        return sorted(pts)

    def key(self) -> frozenset[Point]:
        return frozenset(self.points())


def canonical_normals(f: FieldSpec, d: int) -> list[Point]:
    """Directions (*,...,*,1), (*,...,1,0), ..., (1,0,...,0), stars in code order."""
    out = []
    for lead in range(d - 1, -1, -1):
        for head in itertools.product(range(f.q), repeat=lead):
            out.append(head + (1,) + (0,) * (d - 1 - lead))
    return out


def line(f: FieldSpec, normal: Sequence[int], offset: int) -> Flat:
    """The hyperplane {x : x . normal = offset}, normalised to canonical form."""
    normal = tuple(normal)
    nz = [i for i, c in enumerate(normal) if c]
    if not nz:
        raise GeometryError("normal vector must be nonzero")
    c = f.inv(normal[nz[-1]])
    return Flat(f, len(normal), f.scale(c, normal), f.mul(c, offset))


def enumerate_hyperplanes(f: FieldSpec, d: int) -> list[Flat]:
    if d < 2:
        raise GeometryError("ambient dimension must be at least 2")
    return [Flat(f, d, e, t) for e in canonical_normals(f, d) for t in f.elements()]


def _check_compatible(E: PointSet, fl: Flat) -> None:
    if E.field != fl.field or E.dim != fl.dim:
        raise GeometryError(f"point set in {E.field!r}^{E.dim} vs flat in {fl.field!r}^{fl.dim}")


def incidence_count(E: PointSet, fl: Flat) -> int:
    _check_compatible(E, fl)
    return sum(1 for v in E if v in fl)


def incidence_profile(E: PointSet) -> dict[tuple[Point, int], int]:
    """i(h) for every hyperplane h = (normal, offset), zeros included."""
    f = E.field
    prof = {}
    for e in canonical_normals(f, E.dim):
        hits = Counter(f.dot(v, e) for v in E)
        for t in f.elements():
            prof[e, t] = hits.get(t, 0)
    return prof


def project(E: PointSet, v: Sequence[int]) -> frozenset[int]:
    if len(v) != E.dim:
        raise GeometryError(f"direction {tuple(v)} does not live in dimension {E.dim}")
    f = E.field
    return frozenset(f.dot(u, v) for u in E)


# -- affine subspaces ----------------------------------------------------------

def _reduce(f: FieldSpec, x: Sequence[int], rows: Sequence[Point], pivots: Sequence[int]) -> list[int]:
    """Reduce ``x`` modulo the span of RREF ``rows``; returns nonzero coords."""
    x = list(x)
    for row, j in zip(rows, pivots):
        c = x[j]
        if c:
            x = [f.sub(a, f.mul(c, b)) for a, b in zip(x, row)]
    return [c for c in x if c]


def rref_subspaces(f: FieldSpec, d: int, m: int) -> Iterator[tuple[tuple[Point, ...], tuple[int, ...]]]:
    """All m-dimensional linear subspaces of F_q^d as (RREF basis, pivots)."""
    q = f.q
    for pivots in itertools.combinations(range(d), m):
        # free slots: row i, column j > pivots[i], j not a pivot column
        slots = [(i, j) for i, pi in enumerate(pivots) for j in range(pi + 1, d) if j not in pivots]
        for vals in itertools.product(range(q), repeat=len(slots)):
            rows = [[0] * d for _ in range(m)]
            for i, pi in enumerate(pivots):
                rows[i][pi] = 1
            for (i, j), c in zip(slots, vals):
                rows[i][j] = c
            yield tuple(tuple(r) for r in rows), pivots


def enumerate_mflats(f: FieldSpec, d: int, m: int) -> list[Flat]:
    """Every m-dimensional affine subspace of F_q^d, once each.

    For an RREF basis the coset representatives with zero pivot coordinates
    are exactly the lexicographically smallest points of their cosets.
    """
    if not 1 <= m <= d - 1:
        raise GeometryError(f"flat dimension must lie in 1..{d - 1}, got {m}")
    out = []
    for rows, pivots in rref_subspaces(f, d, m):
        free = [j for j in range(d) if j not in pivots]
        for vals in itertools.product(range(f.q), repeat=len(free)):
            base = [0] * d
            for j, c in zip(free, vals):
                base[j] = c
            out.append(Flat(f, d, basepoint=tuple(base), directions=rows))
    return out


def gaussian_binomial(n: int, m: int, q: int) -> int:
    num = den = 1
    for i in range(m):
        num *= q ** (n - i) - 1
        den *= q ** (i + 1) - 1
    return num // den


# -- point-set files -------------------------------------------------------------

def parse_points(text: str) -> list[Point]:
    pts = []
    for lineno, raw in enumerate(text.splitlines(), 1):
        s = raw.split("#", 1)[0].strip()
        if not s:
            continue
        try:
            pts.append(tuple(int(tok) for tok in s.split(",")))
        except ValueError:
            raise GeometryError(f"line {lineno}: cannot parse {raw!r}") from None
    return pts


def read_points(path: str | Path, f: FieldSpec, dim: int | None = None) -> PointSet:
    pts = parse_points(Path(path).read_text())
    if dim is None and pts:
        dim = len(pts[0])
    if dim is None:
        raise GeometryError(f"{path}: empty point file and no dimension given")
    return PointSet(f, dim, tuple(pts))


def format_points(E: PointSet) -> str:
    return "".join(",".join(map(str, p)) + "\n" for p in E)


def write_points(path: str | Path, E: PointSet) -> None:
    Path(path).write_text(format_points(E))
