import random

import pytest
from hypothesis import given, strategies as st

from adbundle import formats
from adbundle.grp import cyclic_group, group_from_generators
from adbundle.hopf import (CharacterData, FactorData, HopfError, HopfMorphism, cartier_iso,
                           grouplike_points, is_identity_matrix, mu_factor_data, mu_hopf,
                           mutation_sensitivity, perturb, schur_block_check,
                           trivial_bundle_factor_data, trivial_bundle_hopf, verify_hopf)
from adbundle.numfield import base_rationals

from conftest import field

Q = base_rationals()


def groups():
    def mk(args):
        n, gens = args
        return group_from_generators(n, gens)
    return st.integers(1, 3).flatmap(
        lambda n: st.tuples(st.just(n), st.lists(st.permutations(list(range(n))).map(tuple),
                                                 min_size=1, max_size=2))).map(mk)


@given(groups())
def test_trivial_bundle_axioms_and_points(G):
    H = trivial_bundle_hopf(G, Q)
    assert verify_hopf(H).ok
    P = grouplike_points(H, trivial_bundle_factor_data(G, Q))
    assert P.table == G.table


@given(st.integers(1, 7))
def test_mu_hopf_axioms(n):
    assert verify_hopf(mu_hopf(n, Q)).ok


@pytest.mark.parametrize("n,fname,zeta", [(2, None, ["-1"]), (3, "q_omega", ["0", "1"]),
                                          (4, "q_i", ["0", "1"])])
def test_cartier(n, fname, zeta):
    A = field(fname)[0] if fname else Q
    z = A.elem(zeta)
    phi = cartier_iso(n, A, z)
    assert phi.check().ok
    assert is_identity_matrix(phi.inverse().compose(phi).matrix)
    assert is_identity_matrix(phi.compose(phi.inverse()).matrix)
    # independent oracle: the character matrix entries are zeta^(jk)
    for j in range(n):
        for k in range(n):
            assert phi.matrix[j][k] == z ** (j * k)
    Gp = grouplike_points(phi.source, mu_factor_data(n, A, z))
    assert Gp.order == n and any(Gp.element_order(g) == n for g in range(n))


def test_cartier_rejects_non_primitive_root():
    A = field("q_i")[0]
    with pytest.raises(HopfError, match="primitive"):
        cartier_iso(4, A, A.elem(["-1", "0"]))
    with pytest.raises(HopfError, match="primitive"):
        cartier_iso(3, A, A.elem(["0", "1"]))


def test_wrong_dimension_morphism_is_not_iso():
    A = field("q_i")[0]
    H2 = trivial_bundle_hopf(cyclic_group(2), A)
    one, zero = A.one(), A.zero()
    bad = HopfMorphism(H2, H2, [[one, one], [zero, one]])
    assert not bad.check().ok


@pytest.mark.parametrize("seed", range(5))
def test_perturbations_break_axioms(seed):
    G = group_from_generators(3, [(1, 0, 2), (1, 2, 0)])
    H = trivial_bundle_hopf(G, Q)
    rng = random.Random(seed)
    for _ in range(4):
        H2, where = perturb(H, rng)
        assert not verify_hopf(H2).ok, where
    assert verify_hopf(H).ok  # perturb copies


def test_mutation_sensitivity_on_mu():
    assert mutation_sensitivity(mu_hopf(4, Q), 20, seed=3) == []


def test_grouplike_points_rejects_bad_decomposition():
    G = cyclic_group(2)
    H = trivial_bundle_hopf(G, Q)
    data = trivial_bundle_factor_data(G, Q)
    broken = FactorData(data.overfield, [data.idempotents[0], data.idempotents[0]], data.points)
    with pytest.raises(HopfError, match="bad decomposition"):
        grouplike_points(H, broken)


def test_schur_blocks():
    G = group_from_generators(3, [(1, 0, 2), (1, 2, 0)])
    rep = schur_block_check(CharacterData(G, [1, 1, 2], [[0], [1], [2]]))
    assert rep.blocks == [1, 1, 4] and rep.total == 6
    Z3 = cyclic_group(3)
    assert schur_block_check(CharacterData(Z3, [1, 1, 1], [[0], [1, 2]])).blocks == [1, 2]
    with pytest.raises(HopfError, match="bad character data"):
        schur_block_check(CharacterData(G, [1, 1, 1], [[0], [1], [2]]))


@given(groups())
def test_dump_roundtrip(G):
    H = trivial_bundle_hopf(G, Q)
    text = formats.dumps(formats.hopf_dump(H))
    H2 = formats.hopf_from_dump(formats.json.loads(text))
    assert formats.dumps(formats.hopf_dump(H2)) == text


def test_dump_roundtrip_over_extension():
    A = field("q_i")[0]
    G = group_from_generators(3, [(1, 0, 2), (1, 2, 0)])
    H = trivial_bundle_hopf(G, A)
    text = formats.dumps(formats.hopf_dump(H))
    H2 = formats.hopf_from_dump(formats.json.loads(text))
    assert verify_hopf(H2).ok
