"""(v, k, lambda) block designs: validation, geometric families, moments, Gram checks."""

from __future__ import annotations

import itertools
import json
from collections import Counter
from dataclasses import dataclass
from fractions import Fraction
from pathlib import Path
from typing import Hashable, Iterable, Sequence

import numpy as np

from .field import FieldSpec, field_of_order
from .geometry import all_points, enumerate_hyperplanes, enumerate_mflats
from .incidences import IncidenceReport
from .moments import MomentReport, squared_deviation_sum

# materialise the incidence array only up to this many entries
DENSE_LIMIT = 10**7


class DesignError(ValueError):
    pass


class BlockSizeError(DesignError):
    def __init__(self, block_index: int, size: int, expected: int):
        super().__init__(f"block {block_index} has {size} points, expected {expected}")
        self.block_index, self.size, self.expected = block_index, size, expected


class PairCountError(DesignError):
    def __init__(self, pair, count: int, expected: int):
        super().__init__(f"points {pair[0]!r} and {pair[1]!r} share {count} blocks, expected {expected}")
        self.pair, self.count, self.expected = pair, count, expected


class ReplicationError(DesignError):
    def __init__(self, point, count: int, expected: int):
        super().__init__(f"point {point!r} lies on {count} blocks, expected {expected}")
        self.point, self.count, self.expected = point, count, expected


@dataclass(frozen=True)
class BlockDesign:
    points: tuple[Hashable, ...]
    blocks: tuple[frozenset, ...]
    v: int
    k: int
    lam: int
    r: int

    @property
    def params(self) -> tuple[int, int, int, int]:
        return self.v, self.k, self.lam, self.r

    @property
    def b(self) -> int:
        return len(self.blocks)

    def index(self) -> dict:
        return {x: i for i, x in enumerate(self.points)}


def pair_counts(blocks: Iterable[Iterable]) -> Counter:
    cnt = Counter()
    for blk in blocks:
        for pair in itertools.combinations(sorted(blk), 2):
            cnt[pair] += 1
    return cnt


def validate_design(points: Sequence[Hashable], blocks: Iterable[Iterable[Hashable]]) -> BlockDesign:
    """Check the design axioms; raise a DesignError subclass naming a counterexample."""
    points = tuple(points)
    if not points:
        raise DesignError("a design needs at least one point")
    pos = {x: i for i, x in enumerate(points)}
    if len(pos) != len(points):
        raise DesignError("duplicate point ids")
    blocks = tuple(frozenset(blk) for blk in blocks)
    if not blocks:
        raise DesignError("a design needs at least one block")
    for i, blk in enumerate(blocks):
        bad = [x for x in blk if x not in pos]
        if bad:
            raise DesignError(f"block {i} references unknown point {bad[0]!r}")
    k = len(blocks[0])
    for i, blk in enumerate(blocks):
        if len(blk) != k:
            raise BlockSizeError(i, len(blk), k)

    v = len(points)
    # pairs as index pairs (i < j)
    idx_blocks = [sorted(pos[x] for x in blk) for blk in blocks]
    pc = pair_counts(idx_blocks)
    lam = pc.get((0, 1), 0) if v > 1 else 0
    for i, j in itertools.combinations(range(v), 2):
        c = pc.get((i, j), 0)
        if c != lam:
            raise PairCountError((points[i], points[j]), c, lam)

    rep = Counter(i for blk in idx_blocks for i in blk)
    r = rep.get(0, 0)
    for i in range(v):
        if rep.get(i, 0) != r:
            raise ReplicationError(points[i], rep.get(i, 0), r)

    if r * (k - 1) != lam * (v - 1):
        raise DesignError(f"r(k-1) = {r * (k - 1)} but lambda(v-1) = {lam * (v - 1)}")
    if r * v != k * len(blocks):
        raise DesignError(f"r v = {r * v} but k |L| = {k * len(blocks)}")
    return BlockDesign(points, blocks, v, k, lam, r)


def _as_field(q: int | FieldSpec) -> FieldSpec:
    return q if isinstance(q, FieldSpec) else field_of_order(q)


def points_hyperplanes_design(q: int | FieldSpec, d: int) -> BlockDesign:
    f = _as_field(q)
    pts = list(all_points(f, d))
    blocks = [frozenset(h.points()) for h in enumerate_hyperplanes(f, d)]
    return validate_design(pts, blocks)


def points_lines_design(q: int | FieldSpec) -> BlockDesign:
    return points_hyperplanes_design(q, 2)


def points_mflats_design(q: int | FieldSpec, d: int, m: int) -> BlockDesign:
    f = _as_field(q)
    pts = list(all_points(f, d))
    blocks = [frozenset(fl.points()) for fl in enumerate_mflats(f, d, m)]
    return validate_design(pts, blocks)


def complete_design(v: int, k: int) -> BlockDesign:
    """All k-subsets of v points."""
    return validate_design(range(v), itertools.combinations(range(v), k))


def _check_subset(D: BlockDesign, E) -> frozenset:
    E = frozenset(E)
    members = set(D.points)
    stray = [x for x in E if x not in members]
    if stray:
        raise DesignError(f"{stray[0]!r} is not a point of the design")
    return E


def incidence_vector(D: BlockDesign, E) -> list[int]:
    E = _check_subset(D, E)
    return [len(blk & E) for blk in D.blocks]


def design_second_moment(D: BlockDesign, E: Iterable[Hashable]) -> MomentReport:
    """sum i(l)^2 = lambda |E|^2 + (r - lambda)|E|, plus the exact variance."""
    E = _check_subset(D, E)
    n, lam, r, b = len(E), D.lam, D.r, D.b
    counts = incidence_vector(D, E)
    return MomentReport(
        sum_sq=sum(c * c for c in counts),
        expected_identity=lam * n * n + (r - lam) * n,
        variance_sum=squared_deviation_sum(counts, Fraction(r * n, b)),
        variance_bound=Fraction((r - lam) * n),
        variance_exact=(lam - Fraction(r * r, b)) * n * n + (r - lam) * n,
    )


def lund_saraf_check(D: BlockDesign, P: Iterable[Hashable], Q: Iterable[int]) -> IncidenceReport:
    """|I(P,Q) - |P||Q| r/|L|| <= sqrt((r - lambda)|P||Q|); Q holds block indices."""
    P = _check_subset(D, P)
    Q = list(Q)
    if any(not 0 <= j < D.b for j in Q):
        raise DesignError("block index out of range")
    count = sum(len(D.blocks[j] & P) for j in Q)
    b, mass = D.b, len(P) * len(Q)
    return IncidenceReport(
        count=count,
        main_term=Fraction(mass * D.r, b),
        deviation_sq_scaled=(b * count - mass * D.r) ** 2,
        bound_sq_scaled=b * b * (D.r - D.lam) * mass,
        forces_incidence=mass * D.r * D.r > b * b * (D.r - D.lam),
    )


# -- Gram identities --------------------------------------------------------------

@dataclass(frozen=True)
class GramEvidence:
    diagonal_value: int | None
    offdiag_value: int | None
    gram_ok: bool
    balanced_eigen_ok: bool
    norm_ok: bool
    variance_ok: bool
    subsets_checked: int

    @property
    def ok(self) -> bool:
        return self.gram_ok and self.balanced_eigen_ok and self.norm_ok and self.variance_ok


def incidence_array(D: BlockDesign) -> np.ndarray:
    """|L| x |X| 0/1 array with entry (l, x) = l(x)."""
    pos = D.index()
    A = np.zeros((D.b, D.v), dtype=np.int64)
    for j, blk in enumerate(D.blocks):
        for x in blk:
            A[j, pos[x]] = 1
    return A


def _gram_entries(D: BlockDesign) -> tuple[set[int], set[int]]:
    """Distinct diagonal and off-diagonal values of A^T A."""
    if D.v * D.b <= DENSE_LIMIT:
        A = incidence_array(D)
        G = A.T @ A
        diag = np.diag(G)
        off = G[~np.eye(D.v, dtype=bool)]
        return set(diag.tolist()), set(off.tolist())
    pos = D.index()
    idx = [sorted(pos[x] for x in blk) for blk in D.blocks]
    rep = Counter(i for blk in idx for i in blk)
    pc = pair_counts(idx)
    total_pairs = D.v * (D.v - 1) // 2
    off = set(pc.values()) | ({0} if len(pc) < total_pairs else set())
    return {rep.get(i, 0) for i in range(D.v)}, off


def _gram_apply(D: BlockDesign, g: Sequence[int]) -> tuple[list[int], list[int]]:
    """(A g, A^T A g) for an integer vector g, without forming A."""
    pos = D.index()
    idx = [[pos[x] for x in blk] for blk in D.blocks]
    Ag = [sum(g[i] for i in blk) for blk in idx]
    out = [0] * D.v
    for val, blk in zip(Ag, idx):
        for i in blk:
            out[i] += val
    return Ag, out


def gram_check(D: BlockDesign, subsets: Iterable[Iterable[Hashable]] = ()) -> GramEvidence:
    """A^T A = (r - lambda) I + lambda J, and the balanced-function identities.

    For f = chi_E - |E|/|X| the vector g = |X| f is integral, so
    A^T A f = (r - lambda) f and <Af, Af> = (r - lambda)(1 - e)|E| are checked
    on g exactly and reported back in rationals.
    """
    diag, off = _gram_entries(D)
    gram_ok = diag == {D.r} and (off == {D.lam} or (D.v == 1 and not off))
    eigen_ok = norm_ok = var_ok = True
    pos = D.index()
    n_checked = 0
    for E in subsets:
        E = _check_subset(D, E)
        n_checked += 1
        v, n = D.v, len(E)
        g = [-n] * v
        for x in E:
            g[pos[x]] += v
        Ag, AtAg = _gram_apply(D, g)
        eigen_ok &= AtAg == [(D.r - D.lam) * gi for gi in g]
        af_sq = Fraction(sum(a * a for a in Ag), v * v)
        e = Fraction(n, v)
        norm_ok &= af_sq == (D.r - D.lam) * (1 - e) * n
        # cross check against the variance of the incidence function
        var = squared_deviation_sum(incidence_vector(D, E), Fraction(D.r * n, D.b))
        var_ok &= af_sq == var
    return GramEvidence(
        diagonal_value=min(diag) if len(diag) == 1 else None,
        offdiag_value=min(off) if len(off) == 1 else None,
        gram_ok=gram_ok,
        balanced_eigen_ok=bool(eigen_ok),
        norm_ok=bool(norm_ok),
        variance_ok=bool(var_ok),
        subsets_checked=n_checked,
    )


# -- design files -----------------------------------------------------------------

def design_to_json(D: BlockDesign) -> dict:
    pos = D.index()
    return {"v": D.v, "blocks": [sorted(pos[x] for x in blk) for blk in D.blocks]}


def design_from_json(obj: dict) -> BlockDesign:
    try:
        v = int(obj["v"])
        blocks = [[int(i) for i in blk] for blk in obj["blocks"]]
    except (KeyError, TypeError, ValueError) as exc:
        raise DesignError(f"malformed design document: {exc}") from None
    return validate_design(range(v), blocks)


def load_design(path: str | Path) -> BlockDesign:
    return design_from_json(json.loads(Path(path).read_text()))


def save_design(path: str | Path, D: BlockDesign) -> None:
    Path(path).write_text(json.dumps(design_to_json(D)) + "\n")
