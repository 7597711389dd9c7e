"""Exact arithmetic in GF(p^k).

Elements are plain integers ``0 .. q-1``.  For ``k > 1`` the integer is the
base-``p`` digit vector of the coefficient list of a polynomial in ``x``,
least significant digit first, so ``2`` in GF(4) is ``x`` and ``3`` is
``x + 1``.  Arithmetic is polynomial arithmetic modulo a fixed monic
irreducible, chosen as the one with the smallest encoding of its non-leading
coefficients.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from functools import cached_property
from typing import Iterable, Sequence

MAX_ORDER = 2**16
# Fields up to this order get full addition/multiplication tables and
# inverses found by exhaustive search; larger ones use extended Euclid.
TABLE_LIMIT = 256


class FieldError(ValueError):
    pass


def is_prime(n: int) -> bool:
    if n < 2:
        return False
    if n % 2 == 0:
        return n == 2
    i = 3
    while i * i <= n:
        if n % i == 0:
            return False
        i += 2
    return True


def prime_power(q: int) -> tuple[int, int]:
    """Return ``(p, k)`` with ``q == p**k``, or raise FieldError."""
    if q < 2:
        raise FieldError(f"{q} is not a prime power")
    p = next(d for d in range(2, q + 1) if q % d == 0)
    k, rest = 0, q
    while rest % p == 0:
        rest //= p
        k += 1
    if rest != 1:
        raise FieldError(f"{q} is not a prime power")
    return p, k


# -- polynomials over Z_p as coefficient lists, constant term first ---------

def _trim(a: list[int]) -> list[int]:
    while a and a[-1] == 0:
        a.pop()
    return a


def _poly_mod(a: Sequence[int], m: Sequence[int], p: int) -> list[int]:
    a = _trim(list(a))
    dm = len(m) - 1
    inv_lead = pow(m[-1], -1, p)
    while len(a) - 1 >= dm:
        c = a[-1] * inv_lead % p
        shift = len(a) - 1 - dm
        for i, mc in enumerate(m):
            a[shift + i] = (a[shift + i] - c * mc) % p
        _trim(a)
    return a


def _poly_mul(a: Sequence[int], b: Sequence[int], p: int) -> list[int]:
    if not a or not b:
        return []
    out = [0] * (len(a) + len(b) - 1)
    for i, x in enumerate(a):
        if x:
            for j, y in enumerate(b):
                out[i + j] = (out[i + j] + x * y) % p
    return out


def _poly_sub(a: Sequence[int], b: Sequence[int], p: int) -> list[int]:
    n = max(len(a), len(b))
    a = list(a) + [0] * (n - len(a))
    b = list(b) + [0] * (n - len(b))
    return _trim([(x - y) % p for x, y in zip(a, b)])


def _poly_divmod(a, m, p):
    a = _trim(list(a))
    quot = [0] * max(len(a) - len(m) + 1, 0)
    inv_lead = pow(m[-1], -1, p)
    while len(a) >= len(m):
        c = a[-1] * inv_lead % p
        shift = len(a) - len(m)
        quot[shift] = c
        for i, mc in enumerate(m):
            a[shift + i] = (a[shift + i] - c * mc) % p
        _trim(a)
    return _trim(quot), a


def is_irreducible(poly: Sequence[int], p: int) -> bool:
    """Trial division by every monic polynomial of degree 1 .. deg/2."""
    poly = _trim(list(poly))
    deg = len(poly) - 1
    if deg < 1:
        return False
    for dd in range(1, deg // 2 + 1):
        for low in itertools.product(range(p), repeat=dd):
            if not _poly_mod(poly, list(low) + [1], p):
                return False
    return True


def smallest_irreducible(p: int, k: int) -> tuple[int, ...]:
    for code in range(p**k):
        low = [(code // p**i) % p for i in range(k)]
        cand = low + [1]
        if is_irreducible(cand, p):
            return tuple(cand)
    raise FieldError(f"no irreducible of degree {k} over Z_{p}")  # unreachable


@dataclass(frozen=True)
class FieldSpec:
    """GF(p^k).  ``modulus`` is empty for prime fields."""

    p: int
    k: int
    modulus: tuple[int, ...] = field(default=(), compare=True)

    @property
    def q(self) -> int:
        return self.p**self.k

    @property
    def is_prime_field(self) -> bool:
        return self.k == 1

    def __repr__(self) -> str:
        if self.k == 1:
            return f"GF({self.p})"
        return f"GF({self.p}^{self.k})"

    # -- encoding ----------------------------------------------------------

    def coeffs(self, a: int) -> list[int]:
        p = self.p
        return [(a // p**i) % p for i in range(self.k)]

    def encode(self, coeffs: Iterable[int]) -> int:
        code, base = 0, 1
        for c in coeffs:
            code += (c % self.p) * base
            base *= self.p
        return code

    def elements(self) -> range:
        return range(self.q)

    def scalar(self, n: int) -> int:
        """Image of the integer ``n`` in the prime subfield."""
        return n % self.p

    def check(self, a: int) -> int:
        if not 0 <= a < self.q:
            raise FieldError(f"{a} is not an element of {self!r}")
        return a

    # -- slow paths ---------------------------------------------------------

    def _add_slow(self, a: int, b: int) -> int:
        if self.k == 1:
            return (a + b) % self.p
        return self.encode(x + y for x, y in zip(self.coeffs(a), self.coeffs(b)))

    def _neg_slow(self, a: int) -> int:
        if self.k == 1:
            return -a % self.p
        return self.encode(-x for x in self.coeffs(a))

    def _mul_slow(self, a: int, b: int) -> int:
        if self.k == 1:
            return a * b % self.p
        prod = _poly_mul(_trim(self.coeffs(a)), _trim(self.coeffs(b)), self.p)
        return self.encode(_poly_mod(prod, self.modulus, self.p))

    def _inv_euclid(self, a: int) -> int:
        if self.k == 1:
            return pow(a, -1, self.p)
        p = self.p
        r0, r1 = list(self.modulus), _trim(self.coeffs(a))
        s0, s1 = [], [1]
        while r1:
            quot, rem = _poly_divmod(r0, r1, p)
            r0, r1 = r1, rem
            s0, s1 = s1, _poly_sub(s0, _poly_mul(quot, s1, p), p)
        # r0 is a nonzero constant since the modulus is irreducible
        c = pow(r0[0], -1, p)
        return self.encode(x * c for x in s0)

    # -- tables ---------------------------------------------------------------

    @cached_property
    def _tables(self):
        q = self.q
        if q > TABLE_LIMIT:
            return None
        add = tuple(tuple(self._add_slow(a, b) for b in range(q)) for a in range(q))
        mul = tuple(tuple(self._mul_slow(a, b) for b in range(q)) for a in range(q))
        neg = tuple(self._neg_slow(a) for a in range(q))
        inv = [0] * q
        for a in range(1, q):
            inv[a] = next(b for b in range(1, q) if mul[a][b] == 1)
        return add, mul, neg, tuple(inv)

    # -- public arithmetic -----------------------------------------------------

    def add(self, a: int, b: int) -> int:
        if self.k == 1:
            return (a + b) % self.p
        t = self._tables
        return t[0][a][b] if t else self._add_slow(a, b)

    def neg(self, a: int) -> int:
        if self.k == 1:
            return -a % self.p
        t = self._tables
        return t[2][a] if t else self._neg_slow(a)

    def sub(self, a: int, b: int) -> int:
        return self.add(a, self.neg(b))

    def mul(self, a: int, b: int) -> int:
        if self.k == 1:
            return a * b % self.p
        t = self._tables
        return t[1][a][b] if t else self._mul_slow(a, b)

    def inv(self, a: int) -> int:
        if a == 0:
            raise ZeroDivisionError(f"0 has no inverse in {self!r}")
        t = self._tables
        return t[3][a] if t else self._inv_euclid(a)

    def div(self, a: int, b: int) -> int:
        return self.mul(a, self.inv(b))

    def square(self, a: int) -> int:
        return self.mul(a, a)

    def dot(self, u: Sequence[int], v: Sequence[int]) -> int:
        if self.k == 1:
            return sum(x * y for x, y in zip(u, v)) % self.p
        acc = 0
        for x, y in zip(u, v):
            acc = self.add(acc, self.mul(x, y))
        return acc

    def scale(self, c: int, v: Sequence[int]) -> tuple[int, ...]:
        return tuple(self.mul(c, x) for x in v)

    def vsub(self, u: Sequence[int], v: Sequence[int]) -> tuple[int, ...]:
        return tuple(self.sub(x, y) for x, y in zip(u, v))

    def vadd(self, u: Sequence[int], v: Sequence[int]) -> tuple[int, ...]:
        return tuple(self.add(x, y) for x, y in zip(u, v))

    def squares(self) -> frozenset[int]:
        return frozenset(self.square(a) for a in self.elements())


def make_field(p: int, k: int = 1) -> FieldSpec:
    """Build GF(p^k); raises FieldError on bad parameters."""
    if not is_prime(p):
        raise FieldError(f"{p} is not prime")
    if k < 1:
        raise FieldError("extension degree must be at least 1")
    if p**k > MAX_ORDER:
        raise FieldError(f"q = {p}^{k} exceeds the enumeration guard {MAX_ORDER}")
    if k == 1:
        return FieldSpec(p, 1)
    return FieldSpec(p, k, smallest_irreducible(p, k))


def field_of_order(q: int) -> FieldSpec:
    p, k = prime_power(q)
    return make_field(p, k)


_OPS = {"add", "sub", "mul", "inv", "neg"}


def arith(f: FieldSpec, op: str, a: int, b: int | None = None) -> int:
    """Dispatch a named field operation on element codes."""
    if op not in _OPS:
        raise FieldError(f"unknown operation {op!r}")
    f.check(a)
    if op in ("inv", "neg"):
        return getattr(f, op)(a)
    if b is None:
        raise FieldError(f"{op} needs two operands")
    return getattr(f, op)(a, f.check(b))
