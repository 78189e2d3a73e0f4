from __future__ import annotations

import pytest
from hypothesis import given, settings

from conftest import VARIETIES, small_transformation_semigroups
from oracles import literal_saturation, maximal
from pointlikes import corpus
from pointlikes.errors import CapExceeded, InputError, UniverseMismatch
from pointlikes.groups import FiniteGroup, KernelFunctor, kernel_positions
from pointlikes.saturation import (elements_of, is_pointlike, mask_of, pointlike_pairs,
                                   power_product, saturate)
from pointlikes.semigroup import from_table, maximal_subgroup

Z2 = corpus.semigroup("z2")
S3 = corpus.semigroup("s3")
A3, ODD = mask_of([0, 4, 5]), mask_of([1, 2, 3])


def sets(c):
    return {frozenset(elements_of(m)) for m in c.maximal}


def test_power_product_examples():
    rz2 = corpus.semigroup("rz2")
    assert power_product(rz2, 0b01, 0b10) == 0b10
    assert power_product(Z2, 0b11, 0b11) == 0b11
    # identity element 0 of S3
    for x in (A3, ODD, 0b111111):
        assert power_product(S3, x, 0b1) == x
    with pytest.raises(UniverseMismatch):
        power_product(Z2, 0, 1)
    with pytest.raises(UniverseMismatch):
        power_product(Z2, 0b100, 1)


def test_named_saturations():
    assert sets(saturate(Z2, KernelFunctor.trivial())) == {frozenset({0, 1})}
    assert sets(saturate(Z2, KernelFunctor.abelian())) == {frozenset({0}), frozenset({1})}
    assert set(saturate(S3, KernelFunctor.abelian()).maximal) == {A3, ODD}
    assert set(saturate(S3, KernelFunctor.trivial()).maximal) == {0b111111}
    assert len(saturate(corpus.semigroup("rz2"), KernelFunctor.trivial()).maximal) == 2


def test_rule_steps_from_singletons():
    c = saturate(Z2, KernelFunctor.trivial())
    added = [e.added for e in c.trace if e.rule == "kernel"]
    assert added == [0b11]
    assert not [e for e in saturate(Z2, KernelFunctor.all()).trace if e.rule == "kernel"]
    rz2 = corpus.semigroup("rz2")
    assert not [e for e in saturate(rz2, KernelFunctor.abelian()).trace if e.rule == "kernel"]


def test_pseudo_rule_examples():
    c = saturate(Z2, KernelFunctor.trivial(), "pseudo")
    assert set(c.maximal) == {0b11}
    c = saturate(S3, KernelFunctor.abelian(), "pseudo")
    assert set(c.maximal) == {A3, ODD}


def test_pointlike_queries():
    c = saturate(Z2, KernelFunctor.trivial())
    assert is_pointlike(c, 0b11) and is_pointlike(c, [0, 1])
    assert not is_pointlike(saturate(Z2, KernelFunctor.abelian()), 0b11)
    for s in (Z2, S3, corpus.semigroup("b2")):
        c = saturate(s, KernelFunctor.all())
        assert all(is_pointlike(c, 1 << x) for x in range(s.size))
    assert pointlike_pairs(c) == []
    pairs = pointlike_pairs(saturate(S3, KernelFunctor.abelian()))
    assert sorted(pairs) == [(0, 4), (0, 5), (1, 2), (1, 3), (2, 3), (4, 5)]


def test_caps():
    big = from_table(9, [[(i + j) % 9 for j in range(9)] for i in range(9)])
    with pytest.raises(CapExceeded):
        saturate(big, KernelFunctor.trivial())
    with pytest.raises(CapExceeded):
        saturate(S3, KernelFunctor.abelian(), "pseudo", tuple_cap=1)
    with pytest.raises(InputError):
        saturate(S3, KernelFunctor.all(), "pseudo")


def test_lazy_products_for_larger_universes():
    z9 = from_table(9, [[(i + j) % 9 for j in range(9)] for i in range(9)])
    c = saturate(z9, KernelFunctor.pgroup(3), cap=10)
    assert sets(c) == {frozenset({x}) for x in range(9)}
    c = saturate(z9, KernelFunctor.trivial(), cap=10)
    assert c.maximal == (0b111111111,)


def check_family(t, c):
    members = set(c.members)
    # singletons, product closure, domination by the antichain
    assert all(1 << x in members for x in range(t.size))
    assert all(power_product(t, x, y) in members for x in members for y in members)
    assert all(any(m & a == m for a in c.maximal) for m in members)
    # saturating again from the result adds nothing
    again = saturate(t, c.functor, start=c.members)
    assert set(again.members) == members
    # kernel unions of the maximal subgroups of the family are pointlike
    pt = c.power.table
    for e in members:
        if pt[e][e] != e:
            continue
        group = [x for x in members if pt[x][e] == x and pt[e][x] == x
                 and any(pt[x][y] == e for y in members)]
        g = FiniteGroup.from_elements(group, lambda a, b: pt[a][b])
        union = 0
        for pos in kernel_positions(g, c.functor):
            union |= g.labels[pos]
        assert is_pointlike(c, union)


def test_family_invariants_on_corpus(semigroups):
    for t in semigroups.values():
        for k in VARIETIES.values():
            check_family(t, saturate(t, k))


@pytest.mark.parametrize("name", corpus.SEMIGROUPS)
def test_matches_literal_definition(name, semigroups):
    t = semigroups[name]
    for k in VARIETIES.values():
        assert set(saturate(t, k).maximal) == maximal(literal_saturation(t.table, k))


@settings(max_examples=50, deadline=None)
@given(small_transformation_semigroups())
def test_random_matches_literal_definition(t):
    for v in ("trivial", "ab", "p:2", "all"):
        k = VARIETIES[v]
        c = saturate(t, k)
        assert set(c.maximal) == maximal(literal_saturation(t.table, k))
        check_family(t, c)


@settings(max_examples=50, deadline=None)
@given(small_transformation_semigroups())
def test_random_strategies_agree(t):
    for v in ("trivial", "ab"):
        saturate(t, VARIETIES[v], "both")


def subgroups_trivial(t, k):
    return all(len(kernel_positions(maximal_subgroup(t, e), k)) == 1 for e in t.idempotents)


def test_membership_equivalence(semigroups):
    for t in semigroups.values():
        for k in VARIETIES.values():
            singletons = all(m & (m - 1) == 0 for m in saturate(t, k).maximal)
            assert singletons == subgroups_trivial(t, k)


def test_json_shape():
    doc = saturate(S3, KernelFunctor.abelian()).to_json(include_trace=True)
    assert doc["maximal"] == [[1, 2, 3], [0, 4, 5]]
    assert doc["universe_size"] == 6 and doc["variety"] == "ab"
    assert doc["trace"]
