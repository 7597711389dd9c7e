import itertools

import pytest
from hypothesis import given, settings, strategies as st

from fqlab.field import (
    FieldError, FieldSpec, arith, field_of_order, is_irreducible, is_prime, make_field,
    prime_power, smallest_irreducible,
)

ORDERS = [2, 3, 4, 5, 7, 8, 9, 11, 13, 16, 25, 27]


def monic(p, k):
    """All monic polynomials of degree k, low coefficient first."""
    for low in itertools.product(range(p), repeat=k):
        yield tuple(low) + (1,)


def poly_mul(a, b, p):
    out = [0] * (len(a) + len(b) - 1)
    for i, x in enumerate(a):
        for j, y in enumerate(b):
            out[i + j] = (out[i + j] + x * y) % p
    return tuple(out)


def reducible_by_products(p, k):
    """Every monic degree-k product of two monic factors of positive degree."""
    red = set()
    for i in range(1, k // 2 + 1):
        for a in monic(p, i):
            for b in monic(p, k - i):
                red.add(poly_mul(a, b, p))
    return red


def encoding(poly, p):
    return sum(c * p**i for i, c in enumerate(poly))


@pytest.mark.parametrize("p,k", [(2, 2), (2, 3), (2, 4), (3, 2), (3, 3), (5, 2), (7, 2)])
def test_irreducibility_against_product_sieve(p, k):
    red = reducible_by_products(p, k)
    for poly in monic(p, k):
        assert is_irreducible(poly, p) == (poly not in red), poly


@pytest.mark.parametrize("p,k", [(2, 2), (2, 3), (2, 4), (3, 2), (3, 3), (5, 2)])
def test_smallest_irreducible_is_minimal_encoding(p, k):
    red = reducible_by_products(p, k)
    irreducibles = [poly for poly in monic(p, k) if poly not in red]
    best = min(irreducibles, key=lambda poly: encoding(poly, p))
    assert smallest_irreducible(p, k) == best


def test_known_moduli():
    assert make_field(3, 1).modulus == ()
    assert make_field(2, 2).modulus == (1, 1, 1)
    assert make_field(3, 2).modulus == (1, 0, 1)


def test_gf4_examples():
    f = make_field(2, 2)
    assert f.mul(2, 2) == 3
    assert f.inv(2) == 3
    assert list(f.elements()) == [0, 1, 2, 3]
    assert arith(f, "mul", 2, 2) == 3
    assert arith(f, "inv", 2) == 3


@pytest.mark.parametrize("q,expected", [(2, [0, 1]), (3, [0, 1, 2]), (4, [0, 1, 2, 3])])
def test_elements(q, expected):
    assert list(field_of_order(q).elements()) == expected


@pytest.mark.parametrize("bad", [(4, 1), (1, 1), (2, 0), (6, 2)])
def test_make_field_errors(bad):
    with pytest.raises(FieldError):
        make_field(*bad)


def test_enumeration_guard():
    with pytest.raises(FieldError):
        make_field(2, 17)


def test_prime_power():
    assert prime_power(8) == (2, 3)
    assert prime_power(49) == (7, 2)
    with pytest.raises(FieldError):
        prime_power(12)
    assert [n for n in range(30) if is_prime(n)] == [2, 3, 5, 7, 11, 13, 17, 19, 23, 29]


def test_inverse_of_zero_is_an_error():
    for q in (3, 4):
        with pytest.raises(ZeroDivisionError):
            field_of_order(q).inv(0)


def test_checked_dispatch_rejects_out_of_range():
    f = field_of_order(4)
    with pytest.raises(FieldError):
        arith(f, "mul", 4, 1)
    with pytest.raises(FieldError):
        arith(f, "add", 1)
    with pytest.raises(FieldError):
        arith(f, "pow", 1, 1)
    with pytest.raises(FieldError):
        f.check(-1)


@pytest.mark.parametrize("q", ORDERS)
def test_field_axioms_exhaustive(q):
    f = field_of_order(q)
    els = list(f.elements())
    for a in els:
        assert f.mul(1, a) == a
        assert f.add(a, f.neg(a)) == 0
        if a:
            assert f.mul(a, f.inv(a)) == 1
    # the multiplicative group is cyclic of order q-1: no zero divisors
    for a, b in itertools.product(els[1:], repeat=2):
        assert f.mul(a, b) != 0
    # characteristic p: p copies of 1 add to 0
    acc = 0
    for _ in range(f.p):
        acc = f.add(acc, 1)
    assert acc == 0


def test_prime_field_matches_integers_mod_p():
    f = field_of_order(13)
    for a, b in itertools.product(range(13), repeat=2):
        assert f.add(a, b) == (a + b) % 13
        assert f.mul(a, b) == (a * b) % 13


@pytest.mark.parametrize("q", [4, 9, 16, 27])
def test_table_and_euclid_inverses_agree(q):
    f = field_of_order(q)
    for a in range(1, q):
        assert f._inv_euclid(a) == f.inv(a)
        assert f._mul_slow(a, f.inv(a)) == 1


def test_big_field_uses_euclid():
    f = make_field(2, 10)  # q = 1024, above the table limit
    for a in (1, 2, 3, 500, 1023):
        assert f.mul(a, f.inv(a)) == 1


elems = st.integers(min_value=0, max_value=8)


@settings(max_examples=200)
@given(elems, elems, elems)
def test_gf9_distributivity(a, b, c):
    f = field_of_order(9)
    assert f.mul(a, f.add(b, c)) == f.add(f.mul(a, b), f.mul(a, c))
    assert f.mul(f.mul(a, b), c) == f.mul(a, f.mul(b, c))
    assert f.add(a, b) == f.add(b, a)


def test_frozen_fieldspec_is_hashable():
    assert {make_field(3, 2), make_field(3, 2)} == {make_field(3, 2)}
    assert isinstance(make_field(3, 2), FieldSpec)
