from __future__ import annotations

import json
import random

import pytest

from conftest import VARIETIES
from oracles import all_words, random_words
from pointlikes import corpus
from pointlikes.errors import AlphabetMismatch, EmptyWordAccepted, NotDisjoint, ParseError
from pointlikes.groups import kernel_positions
from pointlikes.languages import (Dfa, decide_separation, load_dfa, minimize, recognition_data,
                                  regex_to_dfa, transition_semigroup_of_dfa, word_element)
from pointlikes.semigroup import green, maximal_subgroup


def test_regex_state_counts():
    d = regex_to_dfa("(aa)+", "a")
    assert d.states == 3 and d.delta == ((1,), (2,), (1,)) and d.finals == {2}
    assert regex_to_dfa("a", "a").states == 3
    assert regex_to_dfa("(ab)+", "ab").states == 4


@pytest.mark.parametrize("expr, alphabet, accept", [
    ("(aa)+", "a", lambda w: len(w) % 2 == 0),
    ("a(aa)*", "a", lambda w: len(w) % 2 == 1),
    ("(ab)+", "ab", lambda w: len(w) % 2 == 0 and w == "ab" * (len(w) // 2)),
    ("a*b|ba*", "ab", lambda w: (w.count("b") == 1) and (w.endswith("b") or w.startswith("b"))),
    ("(a|b)*abb", "ab", lambda w: w.endswith("abb")),
    ("a+b+", "ab", lambda w: "ba" not in w and "a" in w and "b" in w and w[0] == "a"),
])
def test_regex_semantics(expr, alphabet, accept):
    d = regex_to_dfa(expr, alphabet)
    for w in all_words(alphabet, 7):
        assert d.accepts(w) == accept(w), w


def test_parse_errors():
    for bad, pos in [("(ab", 3), ("a|", 2), ("*a", 0), ("ac", 1), (")", 0), ("a()", 2)]:
        with pytest.raises(ParseError) as info:
            regex_to_dfa(bad, "ab")
        assert info.value.position == pos, bad


def test_empty_word_rejected():
    for expr in ("a*", "(ab)*", "a|b*"):
        with pytest.raises(EmptyWordAccepted):
            regex_to_dfa(expr, "ab")


def test_minimize_is_idempotent_and_minimal():
    for expr in ("(aa)+", "(ab)+", "(a|b)*abb", "a*b|ba*"):
        d = regex_to_dfa(expr, "ab")
        assert minimize(d) == d
    # a redundant three-state copy of (aa)+ collapses
    d = Dfa(("a",), 5, 0, frozenset({2, 4}), ((1,), (2,), (3,), (4,), (1,)))
    assert minimize(d).states == 3


def test_transition_semigroups():
    s, m = transition_semigroup_of_dfa(regex_to_dfa("(aa)+", "a"))
    assert s.size == 2
    a = m["a"]
    assert s.table[s.table[a][a]][a] == a and s.table[a][a] != a
    single = Dfa(("a", "b"), 1, 0, frozenset({0}), ((0, 0),))
    assert transition_semigroup_of_dfa(single)[0].size == 1
    s, _ = transition_semigroup_of_dfa(regex_to_dfa("(ab)+", "ab"))
    assert all(maximal_subgroup(s, e).order == 1 for e in s.idempotents)
    assert len(green(s).classes("H")) == s.size


@pytest.mark.parametrize("expr, alphabet", [("(aa)+", "a"), ("(ab)+", "ab"),
                                            ("(a|b)*abb", "ab"), ("a(ba)*|bb+", "ab")])
def test_round_trip_membership(expr, alphabet):
    d = regex_to_dfa(expr, alphabet)
    s, m = transition_semigroup_of_dfa(d)
    for w in random_words(alphabet, random.Random(7), 300, 8):
        x = word_element(s, m, w)
        assert (s.labels[x][d.initial] in d.finals) == d.accepts(w)


def test_dfa_json_round_trip(tmp_path):
    d = regex_to_dfa("(ab)+", "ab")
    path = tmp_path / "x.dfa"
    path.write_text(json.dumps(d.to_json()))
    assert load_dfa(path) == d
    assert corpus.dfa("ab_plus") == d


def sep(x, y, alphabet, v):
    return decide_separation(regex_to_dfa(x, alphabet), regex_to_dfa(y, alphabet), VARIETIES[v])


def test_separation_examples():
    v = sep("(aa)+", "a(aa)*", "a", "trivial")
    assert not v.separable
    data = recognition_data(regex_to_dfa("(aa)+", "a"), regex_to_dfa("a(aa)*", "a"))
    x, y = v.witness
    assert x in data.image1 and y in data.image2
    assert sep("(aa)+", "a(aa)*", "a", "ab").separable
    assert sep("(ab)+", "(ba)+", "ab", "trivial").separable


def test_separation_errors():
    with pytest.raises(NotDisjoint) as info:
        sep("a+", "(aa)+", "a", "trivial")
    assert info.value.word == "aa"
    with pytest.raises(AlphabetMismatch):
        decide_separation(regex_to_dfa("a", "a"), regex_to_dfa("b", "ab"), VARIETIES["ab"])
    eps = Dfa(("a",), 1, 0, frozenset({0}), ((0,),))
    with pytest.raises(EmptyWordAccepted):
        decide_separation(eps, regex_to_dfa("a", "a"), VARIETIES["ab"])


PAIRS = [("(aa)+", "a(aa)*", "a"), ("(ab)+", "(ba)+", "ab"), ("a(aa)*", "b+", "ab"),
         ("(a|b)*abb", "b+", "ab"), ("a+b", "b+a", "ab"), ("(aaa)+", "a|aa", "a")]


@pytest.mark.parametrize("x, y, alphabet", PAIRS)
def test_separation_symmetric(x, y, alphabet):
    for v in ("trivial", "ab", "p:2", "all"):
        fwd, back = sep(x, y, alphabet, v), sep(y, x, alphabet, v)
        assert fwd.separable == back.separable
        if not fwd.separable:
            assert back.witness is not None


@pytest.mark.parametrize("x, y, alphabet", PAIRS)
def test_all_variety_always_separates(x, y, alphabet):
    assert sep(x, y, alphabet, "all").separable


def complement_regex_dfa(d: Dfa) -> Dfa:
    """Complement within A+: flip finals and enter through a fresh non-final copy
    of the initial state, so the empty word stays rejected."""
    fresh = d.states
    return Dfa(d.alphabet, d.states + 1, fresh, frozenset(range(d.states)) - d.finals,
               d.delta + (d.delta[d.initial],))


@pytest.mark.parametrize("expr, alphabet", [("(aa)+", "a"), ("(ab)+", "ab"), ("(aaa)+", "a"),
                                            ("(a|b)*abb", "ab"), ("(ab|ba)+", "ab")])
def test_language_versus_complement(expr, alphabet):
    d = regex_to_dfa(expr, alphabet)
    comp = complement_regex_dfa(d)
    s, _ = transition_semigroup_of_dfa(recognition_data(d, comp).product)
    for v in ("trivial", "ab", "p:2", "p:3", "all"):
        k = VARIETIES[v]
        in_hbar = all(len(kernel_positions(maximal_subgroup(s, e), k)) == 1
                      for e in s.idempotents)
        assert decide_separation(d, comp, k, cap=16).separable == in_hbar
