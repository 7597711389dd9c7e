import itertools
import random
from decimal import Decimal, getcontext

import pytest
from hypothesis import given, settings, strategies as st

from fqlab.sidon import (
    AbelianGroup, SidonInstance, cilleruelo_theorem_check, cilleruelo_variance_check, difference_counts,
    is_sidon, k22_free_remark_check, load_sidon, near_design_blocks, near_design_second_moment,
    parabola_sidon, rep_count, save_sidon, sidon_near_design, sidon_to_json, surd_sign,
)


def test_group_encoding():
    G = AbelianGroup((3, 4))
    assert G.order == 12
    assert [G.decode(x) for x in G.elements()][:5] == [(0, 0), (0, 1), (0, 2), (0, 3), (1, 0)]
    for x, y in itertools.product(G.elements(), repeat=2):
        assert G.decode(G.add(x, y)) == tuple((a + b) % m for a, b, m in zip(G.decode(x), G.decode(y), (3, 4)))
        assert G.add(G.sub(x, y), y) == x
    assert G.add(5, G.neg(5)) == 0


def test_sidon_examples():
    Z9 = AbelianGroup((9,))
    v = is_sidon(Z9, {0, 1, 2})
    assert not v and v.difference == 1 and set(v.representations) == {(1, 0), (2, 1)}
    assert is_sidon(AbelianGroup((3, 3)), parabola_sidon(3).S)
    assert is_sidon(Z9, {4}) and is_sidon(Z9, set())


def test_rep_counts_agree():
    G = AbelianGroup((7,))
    A, B = {0, 1, 3}, {2, 3}
    counts = difference_counts(G, A, B)
    assert counts == [rep_count(G, A, B, x) for x in G.elements()]
    assert sum(counts) == 6


@pytest.mark.parametrize("p", [3, 5, 7, 11, 13])
def test_parabola(p):
    inst = parabola_sidon(p)
    assert inst.size == p and inst.group.order == p * p
    assert is_sidon(inst.group, inst.S)
    assert inst.size_bound_holds and inst.delta_sign == 0


@pytest.mark.parametrize("bad", [2, 9, 1])
def test_parabola_rejects(bad):
    with pytest.raises(ValueError):
        parabola_sidon(bad)


def test_non_sidon_rejected_by_checks():
    G = AbelianGroup((9,))
    with pytest.raises(ValueError):
        cilleruelo_variance_check(G, {0, 1, 2}, {0})


def test_variance_random():
    inst = parabola_sidon(5)
    rng = random.Random(0)
    for _ in range(30):
        A = rng.sample(range(25), 7)
        assert cilleruelo_variance_check(inst.group, inst.S, A).holds


getcontext().prec = 80


@settings(max_examples=300)
@given(st.integers(-10**6, 10**6), st.integers(-10**4, 10**4), st.integers(0, 10**4))
def test_surd_sign_matches_high_precision(a, b, n):
    val = Decimal(a) + Decimal(b) * Decimal(n).sqrt()
    expected = (val > 0) - (val < 0)
    r = int(Decimal(n).sqrt())
    if r * r == n or b == 0:
        exact = a + b * r
        expected = (exact > 0) - (exact < 0)
    assert surd_sign(a, b, n) == expected


@pytest.mark.parametrize("p", [3, 5, 7])
def test_theorem_agrees_with_floats(p):
    inst = parabola_sidon(p)
    rng = random.Random(p)
    n = p * p
    for _ in range(40):
        A = rng.sample(range(n), rng.randint(0, n))
        B = rng.sample(range(n), rng.randint(0, n))
        rep = cilleruelo_theorem_check(inst.group, inst.S, A, B)
        assert rep.hits == sum(1 for a in A for b in B if inst.group.add(a, b) in inst.S)
        assert rep.holds
        if abs(abs(rep.theta_approx) - rep.bound_approx) > 1e-9:
            assert rep.holds == (abs(rep.theta_approx) < rep.bound_approx)


def test_theorem_with_positive_delta():
    # {0, 1, 3} is Sidon in Z_7 (a perfect difference set), |S|^2 = 9 > 7: delta < 0
    G = AbelianGroup((7,))
    rep = cilleruelo_theorem_check(G, {0, 1, 3}, range(7), range(7))
    assert rep.scaled_deviation == 0 and rep.holds
    # {0, 1} in Z_11: |S|^2 = 4 < 11, so delta > 0 takes the surd branch
    G = AbelianGroup((11,))
    inst = SidonInstance(G, frozenset({0, 1}))
    assert inst.delta_sign > 0
    for A in ([0], [0, 1, 2], list(range(11))):
        rep = cilleruelo_theorem_check(G, {0, 1}, A, [0, 5])
        assert rep.holds


def test_near_design():
    rep = sidon_near_design(AbelianGroup((3, 3)), parabola_sidon(3).S)
    assert rep.blocks == 9 and rep.block_size == 3 and rep.replication == {3}
    assert rep.max_pair == 1 and rep.pairs_match and not rep.is_design and rep.ok
    rep5 = sidon_near_design(AbelianGroup((5, 5)), parabola_sidon(5).S)
    assert rep5.ok and rep5.max_pair <= 1


def test_singleton_near_design_is_a_trivial_design():
    rep = sidon_near_design(AbelianGroup((4,)), {2})
    assert rep.is_design and rep.max_pair == 0


def test_near_design_moment():
    inst = parabola_sidon(3)
    for r in range(10):
        for A in itertools.combinations(range(9), r):
            assert near_design_second_moment(inst.group, inst.S, A).ok
    assert len(near_design_blocks(inst.group, inst.S)) == 9


@pytest.mark.parametrize("q", [2, 3, 4, 5])
def test_k22(q):
    rep = k22_free_remark_check(q)
    assert rep.ok and rep.max_shared == 1 and rep.replication == q + 1


def test_sidon_file_round_trip(tmp_path):
    inst = parabola_sidon(5)
    path = tmp_path / "s.json"
    save_sidon(path, inst)
    back = load_sidon(path)
    assert back == inst
    assert sidon_to_json(back)["moduli"] == [5, 5]
    (tmp_path / "z.json").write_text('{"moduli": [7], "S": [0, 1, 3]}')
    assert load_sidon(tmp_path / "z.json").S == {0, 1, 3}
