"""Sidon sets in products of cyclic groups.

Group elements are mixed-radix integers: ``(c_1, ..., c_t)`` in
``Z_{n_1} x ... x Z_{n_t}`` encodes as ``((c_1 n_2 + c_2) n_3 + c_3) ...``,
so code order is lexicographic coordinate order.
"""

from __future__ import annotations

import itertools
import json
import math
from dataclasses import dataclass
from fractions import Fraction
from functools import cached_property
from pathlib import Path
from typing import Iterable, Sequence

from .designs import DesignError, pair_counts, validate_design
from .designs import points_lines_design
from .field import is_prime


@dataclass(frozen=True)
class AbelianGroup:
    moduli: tuple[int, ...]

    def __post_init__(self):
        object.__setattr__(self, "moduli", tuple(int(n) for n in self.moduli))
        if not self.moduli or any(n < 1 for n in self.moduli):
            raise ValueError(f"moduli must be positive integers, got {self.moduli}")

    @property
    def order(self) -> int:
        return math.prod(self.moduli)

    def elements(self) -> range:
        return range(self.order)

    def encode(self, coords: Sequence[int]) -> int:
        if len(coords) != len(self.moduli):
            raise ValueError(f"{tuple(coords)} does not match moduli {self.moduli}")
        code = 0
        for c, n in zip(coords, self.moduli):
            code = code * n + c % n
        return code

    def decode(self, code: int) -> tuple[int, ...]:
        out = []
        for n in reversed(self.moduli):
            code, c = divmod(code, n)
            out.append(c)
        return tuple(reversed(out))

    @cached_property
    def _coords(self) -> tuple[tuple[int, ...], ...]:
        return tuple(self.decode(x) for x in self.elements())

    def add(self, x: int, y: int) -> int:
        cx, cy = self._coords[x], self._coords[y]
        return self.encode([a + b for a, b in zip(cx, cy)])

    def neg(self, x: int) -> int:
        return self.encode([-a for a in self._coords[x]])

    def sub(self, x: int, y: int) -> int:
        cx, cy = self._coords[x], self._coords[y]
        return self.encode([a - b for a, b in zip(cx, cy)])

    def shift(self, x: int, B: Iterable[int]) -> frozenset[int]:
        return frozenset(self.add(x, b) for b in B)


@dataclass(frozen=True)
class SidonVerdict:
    is_sidon: bool
    difference: int | None = None
    representations: tuple[tuple[int, int], ...] = ()

    def __bool__(self) -> bool:
        return self.is_sidon


@dataclass(frozen=True)
class SidonInstance:
    group: AbelianGroup
    S: frozenset[int]

    @property
    def size(self) -> int:
        return len(self.S)

    @property
    def delta_sign(self) -> int:
        """Sign of sqrt|G| - |S|, decided on squares."""
        g, s = self.group.order, self.size
        return (s * s < g) - (s * s > g)

    @property
    def delta(self) -> float:
        """Approximate sqrt|G| - |S|, for display only."""
        return math.sqrt(self.group.order) - self.size

    @property
    def size_bound_holds(self) -> bool:
        """|S| <= sqrt|G| + 1/2 as (2|S| - 1)^2 <= 4|G|."""
        return len(self.S) == 0 or (2 * self.size - 1) ** 2 <= 4 * self.group.order


def rep_count(G: AbelianGroup, A: Iterable[int], B: Iterable[int], x: int) -> int:
    """r_{A-B}(x) = |A cap (x + B)|."""
    return len(frozenset(A) & G.shift(x, B))


def difference_counts(G: AbelianGroup, A: Iterable[int], B: Iterable[int]) -> list[int]:
    """r_{A-B}(x) for every x in G, by direct pair enumeration."""
    out = [0] * G.order
    B = list(B)
    for a in A:
        for b in B:
            out[G.sub(a, b)] += 1
    return out


def is_sidon(G: AbelianGroup, S: Iterable[int]) -> SidonVerdict:
    """On failure, reports the smallest-code difference with two representations."""
    reps: dict[int, list[tuple[int, int]]] = {}
    for s, t in itertools.permutations(sorted(set(S)), 2):
        reps.setdefault(G.sub(s, t), []).append((s, t))
    bad = [x for x, rs in reps.items() if len(rs) > 1]
    if not bad:
        return SidonVerdict(True)
    x = min(bad)
    return SidonVerdict(False, x, tuple(sorted(reps[x])[:2]))


def parabola_sidon(p: int) -> SidonInstance:
    """{(x, x^2)} in Z_p x Z_p."""
    if p == 2 or not is_prime(p):
        raise ValueError(f"parabola construction needs an odd prime, got {p}")
    G = AbelianGroup((p, p))
    S = frozenset(G.encode((x, x * x)) for x in range(p))
    inst = SidonInstance(G, S)
    if not is_sidon(G, S):
        raise AssertionError("parabola failed to be Sidon")  # unreachable for odd p
    return inst


def _require_sidon(G: AbelianGroup, S) -> frozenset[int]:
    S = frozenset(S)
    verdict = is_sidon(G, S)
    if not verdict:
        raise ValueError(f"S is not a Sidon set: {verdict.difference} has representations {verdict.representations}")
    return S


@dataclass(frozen=True)
class VarianceReport:
    lhs: Fraction
    rhs: Fraction

    @property
    def holds(self) -> bool:
        return self.lhs <= self.rhs

    @property
    def ok(self) -> bool:
        return self.holds

    @property
    def ratio(self) -> float:
        if self.rhs == 0:
            return 0.0 if self.lhs == 0 else float("inf")
        return float(self.lhs / self.rhs)


def cilleruelo_variance_check(G: AbelianGroup, S: Iterable[int], A: Iterable[int]) -> VarianceReport:
    """sum_x (r_{S-A}(x) - |S||A|/|G|)^2 <= |A|(|S|-1) + |A|^2 (1 - |S|^2/|G|)."""
    S = _require_sidon(G, S)
    A = frozenset(A)
    g, s, a = G.order, len(S), len(A)
    mean = Fraction(s * a, g)
    lhs = sum(((c - mean) ** 2 for c in difference_counts(G, S, A)), Fraction(0))
    rhs = a * (s - 1) + a * a * (1 - Fraction(s * s, g))
    return VarianceReport(lhs, rhs)


def surd_sign(a: int, b: int, n: int) -> int:
    """Sign of a + b sqrt(n) for integers, n >= 0."""
    if b == 0 or n == 0:
        return (a > 0) - (a < 0)
    if a == 0:
        return (b > 0) - (b < 0)
    if (a > 0) == (b > 0):
        return 1 if a > 0 else -1
    # opposite signs: compare a^2 with b^2 n
    d = a * a - b * b * n
    big = 1 if a > 0 else -1
    return big if d > 0 else (-big if d < 0 else 0)


@dataclass(frozen=True)
class TheoremReport:
    hits: int  # |{(a, b) in A x B : a + b in S}|
    scaled_deviation: int  # |G| hits - |S||A||B|
    margin_sign: int  # sign of bound^4 - theta^4 (positive means |theta| < bound)
    theta_approx: float
    bound_approx: float

    @property
    def holds(self) -> bool:
        return self.margin_sign > 0

    @property
    def ok(self) -> bool:
        return self.holds

    @property
    def ratio(self) -> float:
        return abs(self.theta_approx) / self.bound_approx if self.bound_approx else 0.0


def cilleruelo_theorem_check(G: AbelianGroup, S: Iterable[int], A: Iterable[int], B: Iterable[int]) -> TheoremReport:
    """hits = |S||A||B|/|G| + theta (|A||B|)^(1/2) |G|^(1/4) with |theta| < 1 + max(delta, 0)|A|/|G|.

    With X = |G| hits - |S||A||B| the claim reads
    ``|X| < |G|^(1/4) (|A||B|)^(1/2) (|G| + max(delta,0)|A|)``; both sides are
    raised to the fourth power, and sqrt|G| (from delta) is handled as a
    quadratic surd, so the verdict is exact.
    """
    S = _require_sidon(G, S)
    A, B = frozenset(A), frozenset(B)
    g, s, na, nb = G.order, len(S), len(A), len(B)
    hits = sum(1 for a in A for x in S if G.sub(x, a) in B)
    X = g * hits - s * na * nb
    inst = SidonInstance(G, S)
    if na == 0 or nb == 0:
        # theta is 0 by convention: no pairs, no deviation
        return TheoremReport(hits, X, 1, 0.0, 1.0)
    if inst.delta_sign > 0:
        # base = g + |A| (sqrt g - s) = alpha + beta sqrt g
        alpha, beta = g - s * na, na
    else:
        alpha, beta = g, 0
    # (alpha + beta h)^4 = P + Q h with h^2 = g
    P = alpha**4 + 6 * alpha**2 * beta**2 * g + beta**4 * g * g
    Q = 4 * alpha**3 * beta + 4 * alpha * beta**3 * g
    lhs = X**4
    scale = g * (na * nb) ** 2
    margin = surd_sign(scale * P - lhs, scale * Q, g)
    theta = X / (g * math.sqrt(na * nb) * g**0.25)
    bound = 1 + max(inst.delta, 0.0) * na / g
    return TheoremReport(hits, X, margin, theta, bound)


@dataclass(frozen=True)
class NearDesignReport:
    blocks: int
    block_size: int
    replication: set[int]
    max_pair: int
    pairs_match: bool  # lambda_{x,x'} == r_{S-S}(x - x') for every pair
    is_design: bool  # whether the axioms of a genuine design happen to hold

    @property
    def ok(self) -> bool:
        return self.replication == {self.block_size} and self.max_pair <= 1 and self.pairs_match


def near_design_blocks(G: AbelianGroup, S: Iterable[int]) -> list[frozenset[int]]:
    S = list(S)
    return [frozenset(G.sub(y, s) for s in S) for y in G.elements()]


def sidon_near_design(G: AbelianGroup, S: Iterable[int]) -> NearDesignReport:
    """Blocks y - S; pair multiplicities are r_{S-S}(x - x') <= 1."""
    S = _require_sidon(G, S)
    blocks = near_design_blocks(G, S)
    rep = [0] * G.order
    for blk in blocks:
        for x in blk:
            rep[x] += 1
    pc = pair_counts(blocks)
    diff = difference_counts(G, S, S)
    # pairs with no common block are absent from pc and need r_{S-S} = 0
    matches = all(diff[G.sub(x, y)] == c for (x, y), c in pc.items())
    zero_pairs_ok = sum(1 for x, y in itertools.combinations(G.elements(), 2)
                        if diff[G.sub(x, y)] and (x, y) not in pc) == 0
    try:
        validate_design(list(G.elements()), blocks)
        is_design = True
    except DesignError:
        is_design = False
    return NearDesignReport(
        blocks=len(blocks),
        block_size=len(S),
        replication=set(rep),
        max_pair=max(pc.values(), default=0),
        pairs_match=matches and zero_pairs_ok,
        is_design=is_design,
    )


@dataclass(frozen=True)
class NearMomentReport:
    sum_sq: int
    upper_bound: int  # r|A| + lambda |A|(|A| - 1) with lambda = 1
    variance_sum: Fraction
    variance_bound: Fraction

    @property
    def ok(self) -> bool:
        return self.sum_sq <= self.upper_bound and self.variance_sum <= self.variance_bound


def near_design_second_moment(G: AbelianGroup, S: Iterable[int], A: Iterable[int]) -> NearMomentReport:
    S = _require_sidon(G, S)
    A = frozenset(A)
    a, s, g = len(A), len(S), G.order
    counts = [len(blk & A) for blk in near_design_blocks(G, S)]
    mean = Fraction(s * a, g)
    return NearMomentReport(
        sum_sq=sum(c * c for c in counts),
        upper_bound=s * a + a * (a - 1),
        variance_sum=sum(((c - mean) ** 2 for c in counts), Fraction(0)),
        variance_bound=s * a + a * (a - 1) - Fraction(s * s * a * a, g),
    )


@dataclass(frozen=True)
class K22Report:
    q: int
    pairs: int
    max_shared: int
    min_shared: int
    replication: int

    @property
    def ok(self) -> bool:
        return self.max_shared <= 1 and self.replication == self.q + 1


def k22_free_remark_check(q: int) -> K22Report:
    """No two distinct points of F_q^2 share two distinct lines."""
    D = points_lines_design(q)
    pc = pair_counts([sorted(blk) for blk in D.blocks])
    total = D.v * (D.v - 1) // 2
    shared = list(pc.values()) + [0] * (total - len(pc))
    return K22Report(q, total, max(shared, default=0), min(shared, default=0), D.r)


# -- instance files -----------------------------------------------------------------

def load_sidon(path: str | Path) -> SidonInstance:
    obj = json.loads(Path(path).read_text())
    G = AbelianGroup(tuple(obj["moduli"]))
    S = frozenset(G.encode(c if isinstance(c, list) else [c]) for c in obj["S"])
    return SidonInstance(G, S)


def sidon_to_json(inst: SidonInstance) -> dict:
    G = inst.group
    return {"moduli": list(G.moduli), "S": [list(G.decode(x)) for x in sorted(inst.S)]}


def save_sidon(path: str | Path, inst: SidonInstance) -> None:
    Path(path).write_text(json.dumps(sidon_to_json(inst)) + "\n")
