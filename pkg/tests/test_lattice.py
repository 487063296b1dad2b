import itertools

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from fskel.groups import construct_group, enumerate_subgroups, normal_subgroups, subgroup_generated
from fskel.lattice import (
    LatticeError,
    SkeletonIndex,
    build_index_family,
    chain_sup,
    index_join,
    index_leq,
    index_meet,
    is_directed,
    maximal_chains,
)


def sub(g, *labels):
    return subgroup_generated(g, [g.index_of_label(x) for x in labels])


@pytest.fixture
def z4():
    g = construct_group("cyclic:4")
    return g, sub(g, "2")


def test_z4_family(z4):
    g, o = z4
    fam = build_index_family(g, o)
    pairs = {(i.B.elements, i.K.elements) for i in fam}
    assert pairs == {((0, 2), (0,)), ((0, 2), (0, 2)), ((0, 1, 2, 3), (0,)), ((0, 1, 2, 3), (0, 2))}
    assert sorted(i.range_dimension() for i in fam) == [1, 2, 2, 4]


def test_O_equals_G_collapses():
    g = construct_group("dihedral:8")
    fam = build_index_family(g, g.whole)
    assert {i.B for i in fam} == {g.whole}
    assert {i.K for i in fam} == set(normal_subgroups(g.whole))


def test_trivial_group_family():
    g = construct_group("cyclic:1")
    fam = build_index_family(g, g.whole)
    assert len(fam) == 1


def test_normalizer_filter_s3():
    g = construct_group("symmetric:3")
    o = sub(g, "(1 2)")
    full = build_index_family(g, o)
    filt = build_index_family(g, o, normalizer_filter=True)
    bad = SkeletonIndex(o, g.whole, o)
    assert bad in full
    assert bad not in filt
    assert len(filt) == len(full) - 1


def test_index_validation():
    g = construct_group("symmetric:3")
    o = sub(g, "(1 2)")
    with pytest.raises(LatticeError):
        SkeletonIndex(o, g.trivial, g.trivial)  # O not inside B
    with pytest.raises(LatticeError):
        SkeletonIndex(g.whole, g.whole, o)  # K not normal in O


def test_order_examples(z4):
    g, o = z4
    bottom = SkeletonIndex(o, o, o)
    top = SkeletonIndex(o, g.whole, g.trivial)
    assert index_leq(bottom, top)
    assert not index_leq(top, bottom)
    assert not index_leq(SkeletonIndex(o, o, g.trivial), SkeletonIndex(o, g.whole, o))


def test_meet_join_examples():
    g = construct_group("cyclic:12")
    o = sub(g, "2")
    i = SkeletonIndex(o, g.whole, sub(g, "4"))
    j = SkeletonIndex(o, o, sub(g, "6"))
    assert index_meet(i, j) == SkeletonIndex(o, o, o)
    assert index_meet(i, i) == i
    k1, k2 = sub(g, "4"), sub(g, "6")
    assert index_join(SkeletonIndex(o, o, k1), SkeletonIndex(o, o, k2)) == SkeletonIndex(o, o, g.trivial)


def test_chain_sup_examples():
    g = construct_group("cyclic:8")
    o = sub(g, "2")
    i = SkeletonIndex(o, o, o)
    assert chain_sup([i, i, i]) == i
    assert chain_sup([i]) == i
    chain = [SkeletonIndex(o, o, sub(g, "2")), SkeletonIndex(o, o, sub(g, "4")), SkeletonIndex(o, g.whole, sub(g, "4"))]
    assert chain_sup(chain) == SkeletonIndex(o, g.whole, sub(g, "4"))
    with pytest.raises(LatticeError):
        chain_sup([chain[2], chain[0]])


@pytest.mark.parametrize("spec", ["cyclic:4", "symmetric:3", "dihedral:8", "quaternion"])
def test_maximal_chains_are_maximal(spec):
    g = construct_group(spec)
    for o in enumerate_subgroups(g):
        fam = build_index_family(g, o)
        chains = maximal_chains(fam)
        assert chains
        for c in chains:
            assert c[0] == fam.bottom() and c[-1] == fam.top()
            for a, b in zip(c, c[1:]):
                assert index_leq(a, b) and a != b
                # nothing strictly between consecutive members
                assert not any(index_leq(a, x) and index_leq(x, b) and x not in (a, b) for x in fam)


def test_unfiltered_family_is_directed():
    g = construct_group("symmetric:3")
    for o in enumerate_subgroups(g):
        directed, bad = is_directed(build_index_family(g, o))
        assert directed and not bad


@settings(max_examples=60, deadline=None)
@given(st.sampled_from(["cyclic:12", "dihedral:8", "symmetric:3", "quaternion", "dihedral:6"]), st.data())
def test_meet_is_glb(spec, data):
    g = construct_group(spec)
    o = data.draw(st.sampled_from(enumerate_subgroups(g)))
    fam = list(build_index_family(g, o))
    i, j = data.draw(st.sampled_from(fam)), data.draw(st.sampled_from(fam))
    m, u = index_meet(i, j), index_join(i, j)
    assert m in fam and u in fam
    assert index_leq(m, i) and index_leq(m, j)
    assert index_leq(i, u) and index_leq(j, u)
    for x in fam:
        if index_leq(x, i) and index_leq(x, j):
            assert index_leq(x, m)
        if index_leq(i, x) and index_leq(j, x):
            assert index_leq(u, x)


def test_partial_order_axioms_exhaustive():
    g = construct_group("dihedral:8")
    for o in enumerate_subgroups(g):
        fam = list(build_index_family(g, o))
        for a, b, c in itertools.product(fam, repeat=3):
            if index_leq(a, b) and index_leq(b, c):
                assert index_leq(a, c)
        for a, b in itertools.product(fam, repeat=2):
            if index_leq(a, b) and index_leq(b, a):
                assert a == b
