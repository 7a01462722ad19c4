import itertools

import pytest
from hypothesis import given, strategies as st
from sympy.combinatorics import Permutation, PermutationGroup

from adbundle.grp import (GroupError, FiniteGroup, conjugacy_classes, cycles_to_perm,
                          cyclic_group, double_cosets, find_isomorphism, group_from_generators,
                          perm_to_cycles, product_class_set, quotient)

S3_GENS = [cycles_to_perm(3, [[1, 2]]), cycles_to_perm(3, [[1, 2, 3]])]


def perms(n):
    return st.permutations(list(range(n))).map(tuple)


def sympy_class_sizes(n, gens):
    P = PermutationGroup([Permutation(list(g)) for g in gens])
    return sorted(len(c) for c in P.conjugacy_classes()), P.order()


@given(st.integers(2, 5).flatmap(lambda n: st.tuples(st.just(n), st.lists(perms(n), min_size=1, max_size=3))))
def test_classes_match_sympy(args):
    n, gens = args
    G = group_from_generators(n, gens)
    sizes, order = sympy_class_sizes(n, gens)
    cd = conjugacy_classes(G)
    assert G.order == order
    assert sorted(cd.class_sizes) == sizes
    # class equation and orbit-stabilizer
    assert sum(cd.class_sizes) == G.order
    assert all(len(c) * s == G.order for c, s in zip(cd.centralizers, cd.class_sizes))


@given(st.integers(2, 4).flatmap(lambda n: st.tuples(st.just(n), st.lists(perms(n), min_size=1, max_size=2))))
def test_product_class_sets_closed_and_convention_free(args):
    n, gens = args
    G = group_from_generators(n, gens)
    cd = conjugacy_classes(G)
    op = G.opposite()
    cdo = conjugacy_classes(op)
    for a, b in itertools.product(range(G.order), repeat=2):
        got = product_class_set(G, a, b, cd)
        raw = {G.mul(G.conj(x, a), G.conj(y, b)) for x in range(G.order) for y in range(G.order)}
        assert got == {cd.class_of[z] for z in raw}
        assert sum(cd.class_sizes[c] for c in got) == len(raw)
        assert got == product_class_set(op, a, b, cdo)


def test_s3_classes_and_elements():
    G = group_from_generators(3, S3_GENS)
    cd = conjugacy_classes(G)
    assert G.order == 6 and cd.class_sizes == [1, 3, 2]
    assert perm_to_cycles(G.labels[cd.reps[2]]) == [[1, 2, 3]]
    assert G.element_order(cd.reps[1]) == 2


def test_double_cosets_sizes():
    G = group_from_generators(3, S3_GENS)
    cd = conjugacy_classes(G)
    for Ca, Cb in itertools.product(cd.centralizers, repeat=2):
        dc = double_cosets(G, Ca, Cb)
        assert sum(dc.coset_sizes) == 6
        # |HgK| = |H||K|/|H ∩ gKg^-1|
        for r, s in zip(dc.reps, dc.coset_sizes):
            conj = {G.conj(r, k) for k in Cb}
            assert s * len(set(Ca) & conj) == len(Ca) * len(Cb)
    # C_e \ G / C_e has one coset
    assert len(double_cosets(G, list(range(6)), list(range(6))).reps) == 1


def test_quotient_and_isomorphism():
    G = group_from_generators(3, S3_GENS)
    A3 = [g for g in range(6) if G.element_order(g) in (1, 3)]
    Q, pi = quotient(G, A3)
    assert Q.order == 2 and pi.kernel() == sorted(A3)
    assert find_isomorphism(Q, cyclic_group(2)) is not None
    assert find_isomorphism(G, cyclic_group(6)) is None
    with pytest.raises(GroupError):
        quotient(G, G.subgroup_generated([conjugacy_classes(G).reps[1]]))  # not normal


def test_table_validation():
    with pytest.raises(GroupError):
        FiniteGroup.from_table([[0, 1], [1, 1]])
    with pytest.raises(GroupError):
        group_from_generators(3, [(0, 0, 1)])
    with pytest.raises(GroupError):
        group_from_generators(5, [cycles_to_perm(5, [[1, 2, 3, 4, 5]]),
                                  cycles_to_perm(5, [[1, 2]])], order_bound=50)
    # Latin square that is not associative
    bad = [[0, 1, 2, 3, 4], [1, 0, 3, 4, 2], [2, 4, 0, 1, 3], [3, 2, 4, 0, 1], [4, 3, 1, 2, 0]]
    with pytest.raises(GroupError):
        FiniteGroup.from_table(bad)


@given(st.integers(1, 12))
def test_cyclic_is_abelian_with_singleton_classes(n):
    G = cyclic_group(n)
    assert G.is_abelian()
    assert conjugacy_classes(G).class_sizes == [1] * n
