import itertools
from math import factorial

import pytest
from hypothesis import given, strategies as st

from adbundle.numfield import base_rationals, generated_subfield
from adbundle.profinite import (EtaleAlgebra, FiniteTower, TowerStructureError,
                                compatible_families, compositum_tower, is_trivial_etale,
                                limit_element, linear_tower, mu_tower_maps, shift_count,
                                shift_obstruction, zhat_truncation)

from conftest import extension, field


def brute_shift(w, n, offset=1):
    """Direct oracle: maps on bit tuples, constraints over every x in F_2^(w+1)."""
    pts = list(itertools.product((0, 1), repeat=w))
    xs = list(itertools.product((0, 1), repeat=w + 1))
    count = 0
    for vals in itertools.product(range(n), repeat=len(pts)):
        g = dict(zip(pts, vals))
        if all(g[x[1:]] == (g[x[:-1]] + offset) % n for x in xs):
            count += 1
    return count


@pytest.mark.parametrize("w,n", [(w, n) for w in (1, 2, 3) for n in (2, 3, 4)])
def test_shift_obstruction_zero(w, n):
    r = shift_obstruction(w, n)
    assert r.count == 0 and r.count_other_convention == 0
    assert "constant" in r.witness


@pytest.mark.parametrize("w,n", [(1, 2), (1, 3), (2, 2), (2, 3), (3, 2)])
def test_shift_count_matches_brute_force(w, n):
    for offset in range(n):
        assert shift_count(w, n, offset) == brute_shift(w, n, offset)


@given(st.integers(1, 3), st.integers(2, 4))
def test_offset_zero_control(w, n):
    # without the +1 only constant maps survive on a connected shift graph: n of them
    assert shift_count(w, n, 0) == n
    assert shift_count(w, n, 0, convention="right") == n


def test_shift_parallel_matches_serial():
    assert shift_count(2, 3, 0, jobs=2) == shift_count(2, 3, 0)


def test_shift_bound():
    with pytest.raises(ValueError, match="window too large"):
        shift_obstruction(4, 4, bound=1000)


@pytest.mark.parametrize("n", range(1, 7))
def test_zhat(n):
    t = zhat_truncation(n)
    assert [len(c) for c in t.carriers] == [factorial(k) for k in range(1, n + 1)]
    assert t.surjective()
    t.check()
    assert limit_element(t) == [0] * n
    assert compatible_families(t) == factorial(n)


def test_mu_tower_maps():
    assert len(mu_tower_maps(4, base_rationals())) == 3


def test_set_towers():
    t = linear_tower([[0], [0, 1], list(range(6))], [(0, 0), (0, 1, 0, 1, 0, 1)])
    assert limit_element(t) == [0, 0, 0]
    t = linear_tower([["a", "b"]] * 3, [(0, 1), (0, 1)])
    assert limit_element(t) == ["a", "a", "a"] and compatible_families(t) == 2
    t = linear_tower([[0, 1, 2], [0, 1], [0, 1]], [(2, 0), (1, 1)])
    fam = limit_element(t)
    assert t.maps[(0, 2)][fam[2]] == fam[0]


@given(st.lists(st.integers(1, 4), min_size=1, max_size=4), st.data())
def test_random_surjective_chains_have_limits(sizes, data):
    sizes = sorted(sizes)
    steps = []
    for lo, hi in zip(sizes, sizes[1:]):
        m = list(range(lo)) + data.draw(st.lists(st.integers(0, lo - 1), min_size=hi - lo,
                                                 max_size=hi - lo))
        steps.append(tuple(m))
    t = linear_tower([list(range(s)) for s in sizes], steps)
    fam = limit_element(t)
    for (i, j), m in t.maps.items():
        assert m[fam[j]] == fam[i]
    assert compatible_families(t) == sizes[-1]


def test_tower_errors():
    with pytest.raises(TowerStructureError, match="empty level"):
        limit_element(linear_tower([[0], []], [()]))
    bad = FiniteTower([[0, 1], [0, 1], [0, 1]], {(0, 0), (1, 1), (2, 2), (0, 1), (1, 2), (0, 2)},
                      {(0, 0): (0, 1), (1, 1): (0, 1), (2, 2): (0, 1), (0, 1): (1, 0),
                       (1, 2): (1, 0), (0, 2): (1, 0)})
    with pytest.raises(TowerStructureError, match="compose"):
        bad.check()


def test_s3_compositum_lattice():
    ext = extension("s3")
    L = ext.L
    subs = [generated_subfield(L, []), generated_subfield(L, [L.gen(0)]),
            generated_subfield(L, [L.gen(1)])]
    ct = compositum_tower(L, ext.action, subs)
    assert len(ct.subfields) == 4 and ct.added == [3]
    assert ct.subfields[3].degree == 6 and ct.minimal
    assert [len(c) for c in ct.tower.carriers] == [1, 2, 3, 6]
    assert limit_element(ct.tower) is not None


def test_small_compositum_towers():
    ext = extension("q_zeta5")
    L = ext.L
    one = compositum_tower(L, ext.action, [generated_subfield(L, [L.gen(0)])])
    assert len(one.subfields) == 1
    two = compositum_tower(L, ext.action, [generated_subfield(L, []),
                                           generated_subfield(L, [L.gen(0)])])
    assert len(two.subfields) == 2 and two.minimal


def test_etale():
    Q = base_rationals()
    Qi = field("q_i")[0]
    assert is_trivial_etale(EtaleAlgebra(Q, [Q, Q, Q])) == (True, 3)
    assert is_trivial_etale(EtaleAlgebra(Q, [Qi])) == (False, None)
    Qi_over = field("q_i_over_q_i")[0]
    assert is_trivial_etale(EtaleAlgebra(Qi, [Qi_over, Qi_over])) == (True, 2)
    assert is_trivial_etale(EtaleAlgebra(Q, [Q, Qi])) == (False, None)
