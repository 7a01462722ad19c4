import itertools

import pytest
from hypothesis import given, settings, strategies as st

from adbundle.adjoint import (Inconsistency, TowerError, abelian_collapse, fiber_group,
                              kernel_action, make_extension, model_isomorphisms,
                              pullback_splitting_check, restrict_extension, tower_maps,
                              verify_adjoint)
from adbundle.grp import conjugacy_classes
from adbundle.hopf import verify_hopf
from adbundle.numfield import generated_subfield

from conftest import EXTENSIONS, adjoint, extension

# names of every corpus extension whose group is non-trivial
NONTRIVIAL = [e for e in EXTENSIONS if e != "q_i_over_q_i"]


def _lin(ad, vec_sparse):
    """Function of a sparse K-vector of the product model."""
    n = ad.dim
    K = ad.hopf.base
    return ad.function_of([vec_sparse.get(i, K.zero()) for i in range(n)])


@pytest.mark.parametrize("name", EXTENSIONS)
def test_basis_functions_are_twisted(name):
    # f(h g h^-1) = h(f(g)), checked straight from the group action
    ad = adjoint(name)
    G, act = ad.ext.G, ad.ext.action
    for i in range(ad.dim):
        f = ad.function_of_basis(i)
        for h, g in itertools.product(range(G.order), repeat=2):
            assert f[G.conj(h, g)] == act[h](f[g])


@pytest.mark.parametrize("name", EXTENSIONS)
def test_structure_constants_against_functions(name):
    # product, coproduct, counit and antipode of the stored algebra, evaluated
    # as functions on G: pointwise product, f(g1 g2), f(e), f(g^-1)
    ad = adjoint(name)
    H, G, L = ad.hopf, ad.ext.G, ad.ext.L
    n = ad.dim
    fs = [ad.function_of_basis(i) for i in range(n)]
    for i, j in itertools.product(range(n), repeat=2):
        assert _lin(ad, H.algebra.mult[i][j]) == [a * b for a, b in zip(fs[i], fs[j])]
    for i in range(n):
        for g1, g2 in itertools.product(range(G.order), repeat=2):
            s = L.zero()
            for (j, k), c in H.comult[i].items():
                s = s + L.embed(c) * fs[j][g1] * fs[k][g2]
            assert s == fs[i][G.mul(g1, g2)]
        assert L.embed(H.counit[i]) == fs[i][G.identity]
        assert _lin(ad, H.antipode[i]) == [fs[i][G.inverse[g]] for g in range(G.order)]


@pytest.mark.parametrize("name", EXTENSIONS)
def test_points_and_residue_degrees(name):
    # residue degree [L^{C_c}:K] = [G:C_c] = size of the class, by orbit-stabilizer
    ad = adjoint(name)
    cd = conjugacy_classes(ad.ext.G)
    assert [p.degree for p in ad.points] == cd.class_sizes
    assert sum(p.degree for p in ad.points) == ad.dim == ad.ext.G.order


def test_s3_worked_example():
    ad = adjoint("s3")
    assert len(ad.points) == 3
    assert [p.degree for p in ad.points] == [1, 3, 2]
    assert verify_hopf(ad.hopf).ok


@pytest.mark.parametrize("name", EXTENSIONS)
def test_verify_adjoint_all_green(name):
    checks = verify_adjoint(adjoint(name))
    bad = {k: v for k, v in checks.items() if not v[0]}
    assert not bad


@pytest.mark.parametrize("name", EXTENSIONS)
def test_model_isomorphisms(name):
    for key, phi in model_isomorphisms(adjoint(name)).items():
        assert phi.check().ok, key
        assert phi.is_invertible(), key


@pytest.mark.parametrize("name", EXTENSIONS)
def test_fiber_is_galois_group(name):
    fr = fiber_group(adjoint(name))
    assert fr.evaluation_is_iso
    assert fr.group.table == adjoint(name).ext.G.table


@pytest.mark.parametrize("name", ["q_i", "q_zeta5", "q_zeta7"])
def test_abelian_collapse(name):
    phi = abelian_collapse(adjoint(name))
    assert phi.check().ok and phi.is_invertible()


def test_abelian_collapse_refuses_s3():
    with pytest.raises(ValueError):
        abelian_collapse(adjoint("s3"))


def test_s3_tower():
    ext = extension("s3")
    L = ext.L
    M = generated_subfield(L, [L.gen(0)])
    T = restrict_extension(ext, M)
    res = tower_maps(T, adjoint("s3"))
    assert res.dims == (3, 2, 6)
    sizes = sorted(res.outer.classes.class_sizes[c] for c in res.kernel_classes)
    assert sizes == [1, 2]
    assert verify_hopf(res.kernel).ok
    assert pullback_splitting_check(T, res).ok
    rep = kernel_action(T, L.gen(0), L.gen(1), 3)
    assert rep.cyclotomic == {1: True, 2: True}
    # the non-trivial coset acts on the 3-cycles by inversion
    G = ext.G
    for q, row in zip(T.quotient.labels, rep.table):
        for k, x in enumerate(T.N):
            assert T.N[row[k]] == G.conj(q, x)


def test_kummer4_tower():
    ext = extension("kummer4")
    L = ext.L
    M = generated_subfield(L, [L.gen(0)])
    T = restrict_extension(ext, M)
    res = tower_maps(T, adjoint("kummer4"))
    assert res.dims == (4, 2, 8)
    assert pullback_splitting_check(T, res).ok
    assert kernel_action(T, L.gen(0), L.gen(1), 4).cyclotomic == {1: True, 3: True}


def test_non_normal_middle_field_rejected():
    ext = extension("s3")
    L = ext.L
    with pytest.raises(TowerError, match="tower not Galois"):
        restrict_extension(ext, generated_subfield(L, [L.gen(1)]))


def test_inconsistent_action_halts():
    ext = extension("q_i")
    with pytest.raises(Inconsistency):
        make_extension(ext.L, ext.G, [ext.action[0], ext.action[0]])


@settings(max_examples=30)
@given(st.sampled_from(NONTRIVIAL), st.data())
def test_convolution_of_evaluations(name, data):
    # evaluation at g1 convolved with evaluation at g2 is evaluation at g1 g2
    ad = adjoint(name)
    G, L, H = ad.ext.G, ad.ext.L, ad.hopf
    g1 = data.draw(st.integers(0, G.order - 1))
    g2 = data.draw(st.integers(0, G.order - 1))
    fs = [ad.function_of_basis(i) for i in range(ad.dim)]
    ev = [[f[g] for f in fs] for g in range(G.order)]
    conv = []
    for i in range(ad.dim):
        s = L.zero()
        for (j, k), c in H.comult[i].items():
            s = s + L.embed(c) * ev[g1][j] * ev[g2][k]
        conv.append(s)
    assert conv == ev[G.mul(g1, g2)]
