from __future__ import annotations

import pytest
from hypothesis import given, settings, strategies as st

from conftest import VARIETIES
from pointlikes import corpus
from pointlikes.errors import ArityMismatch, CapExceeded, InputError, ParseError
from pointlikes.groups import (COMMUTATOR_WORD, FiniteGroup, KernelFunctor,
                               evaluate_group_word, is_in_variety, kernel,
                               kernel_minimality_oracle, kernel_positions, normal_subgroups,
                               parse_word)
from pointlikes.semigroup import maximal_subgroup


def group(name: str) -> FiniteGroup:
    return maximal_subgroup(corpus.semigroup(name), 0)


S3 = FiniteGroup.from_permutations([(1, 0, 2), (1, 2, 0)])


def labels(g: FiniteGroup, positions) -> set:
    return {g.labels[p] for p in positions}


def test_s3_construction():
    assert S3.order == 6
    assert not S3.is_abelian
    assert len(normal_subgroups(S3)) == 3


def test_from_table_rejects_non_group():
    with pytest.raises(InputError):
        FiniteGroup.from_table([[0, 0], [0, 0]])
    with pytest.raises(InputError):
        FiniteGroup.from_table([[0, 1], [1, 2]])


@pytest.mark.parametrize("n", [1, 2, 5, 6])
def test_cyclic_orders(n):
    g = FiniteGroup.cyclic(n)
    assert g.order == n and g.is_abelian
    assert max(g.element_order(x) for x in range(n)) == n


def test_derived_subgroup_of_s3_is_a3():
    ker = kernel(S3, KernelFunctor.abelian())
    assert ker.order == 3
    assert all(sum(1 for i, v in enumerate(p) if i != v) in (0, 3) for p in ker.labels)


def test_kernel_examples():
    z6 = FiniteGroup.cyclic(6)
    assert kernel(z6, KernelFunctor.pgroup(2)).label_set() == {0, 2, 4}
    assert kernel(z6, KernelFunctor.pgroup(3)).label_set() == {0, 3}
    assert kernel(S3, KernelFunctor.nilpotent()).order == 3
    assert kernel(S3, KernelFunctor.solvable()).order == 1
    assert kernel(S3, KernelFunctor.trivial()).order == 6
    assert kernel(S3, KernelFunctor.all()).order == 1
    assert kernel(S3, KernelFunctor.pgroup(2)).order == 3
    assert kernel(S3, KernelFunctor.pgroup(3)).order == 6
    assert kernel(S3, KernelFunctor.pigroup([2, 3])).order == 1


def test_verbal_examples():
    square = KernelFunctor.verbal(["x1 x1"])
    assert kernel(FiniteGroup.cyclic(4), square).label_set() == {0, 2}
    assert kernel(S3, KernelFunctor.verbal([COMMUTATOR_WORD])).order == 3
    assert kernel(S3, KernelFunctor.verbal(["x1"])).order == 6


def test_word_parsing_and_evaluation():
    w = parse_word("x1 x2 x1' x2'")
    assert w == COMMUTATOR_WORD and w.arity == 2
    z3 = FiniteGroup.cyclic(3)
    assert evaluate_group_word(z3, w, (1, 2)) == z3.identity
    with pytest.raises(ArityMismatch):
        evaluate_group_word(z3, w, (1,))
    with pytest.raises(ParseError):
        parse_word("x1 y2")


def test_bad_prime_is_rejected():
    with pytest.raises(InputError):
        KernelFunctor.pgroup(4)


def test_oracle_cap():
    with pytest.raises(CapExceeded):
        kernel_minimality_oracle(FiniteGroup.cyclic(30), KernelFunctor.abelian())


@pytest.mark.parametrize("name", corpus.GROUPS)
@pytest.mark.parametrize("variety", sorted(VARIETIES))
def test_kernel_matches_oracle(name, variety):
    g = group(name)
    k = VARIETIES[variety]
    assert kernel(g, k).label_set() == kernel_minimality_oracle(g, k).label_set()


@pytest.mark.parametrize("name", corpus.GROUPS)
def test_kernel_is_normal_and_chain_monotone(name):
    g = group(name)
    sizes = {v: len(kernel_positions(g, VARIETIES[v])) for v in VARIETIES}
    # larger variety, smaller kernel
    for small, big in [("trivial", "ab"), ("ab", "nil"), ("nil", "sol"), ("sol", "all"),
                       ("trivial", "p:2"), ("p:2", "pi:2,3")]:
        assert labels(g, kernel_positions(g, VARIETIES[big])) <= \
            labels(g, kernel_positions(g, VARIETIES[small]))
    assert sizes["all"] == 1 and sizes["trivial"] == g.order


perm3 = st.permutations([0, 1, 2, 3])


@settings(max_examples=40, deadline=None)
@given(st.lists(perm3, min_size=1, max_size=2))
def test_random_permutation_groups_match_oracle(perms):
    g = FiniteGroup.from_permutations([tuple(p) for p in perms])
    for k in VARIETIES.values():
        assert kernel(g, k).label_set() == kernel_minimality_oracle(g, k).label_set()
        assert is_in_variety(g.quotient(kernel_positions(g, k)), k)
