from __future__ import annotations

import sys
from pathlib import Path

import pytest
from hypothesis import assume, strategies as st

from pointlikes import corpus
from pointlikes.groups import KernelFunctor
from pointlikes.semigroup import from_transformations

sys.path.insert(0, str(Path(__file__).parent))

VARIETIES = {
    "trivial": KernelFunctor.trivial(),
    "ab": KernelFunctor.abelian(),
    "p:2": KernelFunctor.pgroup(2),
    "p:3": KernelFunctor.pgroup(3),
    "pi:2,3": KernelFunctor.pigroup([2, 3]),
    "nil": KernelFunctor.nilpotent(),
    "sol": KernelFunctor.solvable(),
    "all": KernelFunctor.all(),
}


@pytest.fixture(scope="session")
def semigroups():
    return {name: corpus.semigroup(name) for name in corpus.SEMIGROUPS}


@st.composite
def small_transformation_semigroups(draw, max_size=6):
    """Transformation semigroups of degree <= 3 with at most ``max_size`` elements."""
    degree = draw(st.integers(1, 3))
    gen = st.tuples(*[st.integers(0, degree - 1)] * degree)
    gens = draw(st.lists(gen, min_size=1, max_size=3))
    s = from_transformations(degree, gens)
    assume(s.size <= max_size)
    return s
