"""Acceptance gate: eight criteria, each with an exact check and a time budget.

Run under pytest (one PASS/FAIL line per criterion is written to the terminal)
or directly with ``python tests/test_acceptance.py``.
"""

from __future__ import annotations

import sys
import time
from pathlib import Path

import pytest

sys.path.insert(0, str(Path(__file__).parent))

from conftest import VARIETIES  # noqa: E402
from oracles import literal_saturation, maximal  # noqa: E402
from pointlikes import corpus  # noqa: E402
from pointlikes.flow import verify_all  # noqa: E402
from pointlikes.groups import (KernelFunctor, kernel, kernel_minimality_oracle,  # noqa: E402
                               kernel_positions)
from pointlikes.languages import decide_separation, regex_to_dfa  # noqa: E402
from pointlikes.saturation import mask_of, saturate  # noqa: E402
from pointlikes.semigroup import maximal_subgroup  # noqa: E402


def criterion_1():
    functors = [VARIETIES[v] for v in ("trivial", "all", "ab", "p:2", "p:3", "pi:2,3",
                                       "nil", "sol")]
    functors += [KernelFunctor.verbal(["x1"]), KernelFunctor.verbal(["x1 x2 x1' x2'"])]
    count = 0
    for name in corpus.GROUPS:
        g = maximal_subgroup(corpus.semigroup(name), 0)
        for k in functors:
            if kernel(g, k).label_set() != kernel_minimality_oracle(g, k).label_set():
                return False, f"{name} {k.name}"
            count += 1
    return True, f"{count} group x functor pairs"


def criterion_2():
    count = 0
    for name in corpus.SEMIGROUPS:
        t = corpus.semigroup(name)
        for v, k in VARIETIES.items():
            singletons = all(m & (m - 1) == 0 for m in saturate(t, k).maximal)
            trivial = all(len(kernel_positions(maximal_subgroup(t, e), k)) == 1
                          for e in t.idempotents)
            if singletons != trivial:
                return False, f"{name} {v}"
            count += 1
    return True, f"{count} semigroup x functor pairs"


def criterion_3():
    for name in corpus.SEMIGROUPS:
        t = corpus.semigroup(name)
        for v, word in (("trivial", "x1"), ("ab", "x1 x2 x1' x2'")):
            k = VARIETIES[v]
            a = saturate(t, k, "kernel").maximal
            b = saturate(t, k, "pseudo", words=[word]).maximal
            if a != b:
                return False, f"{name} {v}"
    return True, f"{len(corpus.SEMIGROUPS)} semigroups x 2 rules"


def criterion_4():
    z2, s3, rz2 = (corpus.semigroup(n) for n in ("z2", "s3", "rz2"))
    expected = [
        (z2, "trivial", {mask_of([0, 1])}),
        (s3, "ab", {mask_of([0, 4, 5]), mask_of([1, 2, 3])}),
        (s3, "trivial", {mask_of(range(6))}),
    ]
    expected += [(rz2, v, {0b01, 0b10}) for v in VARIETIES]
    for t, v, want in expected:
        k = VARIETIES[v]
        for strategy in ("kernel", "pseudo") if v in ("trivial", "ab") else ("kernel",):
            if set(saturate(t, k, strategy).maximal) != want:
                return False, f"package {v} {strategy}"
        if maximal(literal_saturation(t.table, k)) != want:
            return False, f"oracle {v}"
    return True, f"{len(expected)} named instances, package and literal oracle"


def criterion_5():
    count = 0
    for name in corpus.SEMIGROUPS:
        t = corpus.semigroup(name)
        if t.size > 6:
            continue
        for v in ("trivial", "ab", "p:2", "all"):
            k = VARIETIES[v]
            report = verify_all(t, k, saturate(t, k))
            if not report.passed:
                bad = [c.name for c in report.checks if not c.passed]
                return False, f"{name} {v}: {bad}"
            count += 1
    return True, f"{count} instances, six checks each"


def criterion_6():
    def sep(x, y, alphabet, v):
        return decide_separation(regex_to_dfa(x, alphabet), regex_to_dfa(y, alphabet),
                                 VARIETIES[v])
    v = sep("(aa)+", "a(aa)*", "a", "trivial")
    if v.separable or v.witness is None:
        return False, "(aa)+ vs a(aa)* under trivial"
    if not sep("(aa)+", "a(aa)*", "a", "ab").separable:
        return False, "(aa)+ vs a(aa)* under ab"
    if not sep("(ab)+", "(ba)+", "ab", "trivial").separable:
        return False, "(ab)+ vs (ba)+ under trivial"
    pairs = [("(aa)+", "a(aa)*", "a"), ("(ab)+", "(ba)+", "ab"), ("a+b", "b+a", "ab"),
             ("(aaa)+", "a|aa", "a"), ("(a|b)*abb", "b+", "ab")]
    for x, y, alphabet in pairs:
        if not sep(x, y, alphabet, "all").separable:
            return False, f"{x} vs {y} under all"
    return True, f"witness {v.witness}; {len(pairs)} pairs under all"


def criterion_7():
    chains = [("trivial", "ab"), ("ab", "nil"), ("nil", "sol"), ("sol", "all"),
              ("trivial", "p:2"), ("p:2", "sol")]
    for name in corpus.SEMIGROUPS:
        t = corpus.semigroup(name)
        sats = {v: saturate(t, VARIETIES[v]).maximal for v in ("trivial", "ab", "nil", "sol",
                                                              "all", "p:2")}
        for small, big in chains:
            for m in sats[big]:
                if not any(m & o == m for o in sats[small]):
                    return False, f"{name}: {big} member not under {small}"
    return True, f"{len(corpus.SEMIGROUPS)} semigroups x {len(chains)} inclusions"


def criterion_8():
    import test_flow
    import test_saturation
    import test_semigroup
    for name in corpus.SEMIGROUPS:
        t = corpus.semigroup(name)
        test_semigroup.check_green_against_definitions(t)
        test_semigroup.check_schutzenberger(t)
        for v in ("trivial", "ab", "all"):
            test_saturation.check_family(t, saturate(t, VARIETIES[v]))
            test_flow.check_chain_properties(name, VARIETIES[v], max_len=3, limit=800)
    return True, "Green, Schutzenberger, rho, B and power-set closure suites"


CRITERIA = [
    (1, "kernel correctness vs minimality oracle", criterion_1, 5),
    (2, "membership equivalence", criterion_2, 30),
    (3, "strategy agreement", criterion_3, 60),
    (4, "named instances", criterion_4, 60),
    (5, "flow-verifier end-to-end", criterion_5, 300),
    (6, "separation verdicts", criterion_6, 10),
    (7, "variety monotonicity", criterion_7, 60),
    (8, "structural property suites", criterion_8, 60),
]


def evaluate(fn, limit):
    start = time.perf_counter()
    try:
        ok, detail = fn()
    except AssertionError as exc:
        ok, detail = False, f"assertion: {exc}"
    elapsed = time.perf_counter() - start
    if ok and elapsed > limit:
        ok, detail = False, f"over time budget ({detail})"
    return ok, detail, elapsed


def line(number, title, ok, detail, elapsed, limit):
    mark = "PASS" if ok else "FAIL"
    return f"[acceptance {number}] {mark} {title}: {detail} ({elapsed:.2f}s / {limit}s)"


@pytest.fixture(scope="module")
def report(request):
    tr = request.config.pluginmanager.get_plugin("terminalreporter")

    def emit(text):
        if tr is not None:
            tr.write_line(text)
        else:
            print(text)
    return emit


@pytest.mark.parametrize("number, title, fn, limit", CRITERIA,
                         ids=[f"criterion_{c[0]}" for c in CRITERIA])
def test_criterion(number, title, fn, limit, report):
    ok, detail, elapsed = evaluate(fn, limit)
    report("")
    report(line(number, title, ok, detail, elapsed, limit))
    assert ok, detail


if __name__ == "__main__":
    failed = 0
    for number, title, fn, limit in CRITERIA:
        ok, detail, elapsed = evaluate(fn, limit)
        failed += not ok
        print(line(number, title, ok, detail, elapsed, limit))
    sys.exit(1 if failed else 0)
