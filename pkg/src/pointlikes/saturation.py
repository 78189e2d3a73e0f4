"""Pointlike sets by saturation of the singletons in the power semigroup.

Subsets of ``T`` are nonempty bit masks (bit ``t`` set iff ``t`` is in the
set).  The saturation loop keeps a family ``C`` of masks that is closed under
products and under one of two closure rules:

``kernel``
    for every idempotent ``E`` of ``C``, add the union of the members of
    the kernel of the maximal subgroup of ``C`` at ``E``;
``pseudo``
    for every group word ``u`` and every tuple of maximal members, evaluate
    ``u`` in the maximal subgroup at an idempotent of the minimal ideal of
    the subsemigroup generated by the tuple, and add the union of the cyclic
    group generated by the value.

``C`` is never downward closed; a set is pointlike iff it lies under some
member.
"""

from __future__ import annotations

import itertools
import time
from collections import Counter
from dataclasses import dataclass, field
from typing import Iterable, Sequence

import numpy as np

from .errors import CapExceeded, InputError, StrategiesDisagree, UniverseMismatch
from .groups import (COMMUTATOR_WORD, IDENTITY_WORD, FiniteGroup, GroupWord,
                     KernelFunctor, evaluate_group_word, kernel_positions, parse_word)
from .semigroup import FiniteSemigroup, GreenData, green

DEFAULT_CAP = 8
EAGER_LIMIT = 9
DEFAULT_TUPLE_CAP = 200_000

STRATEGIES = ("kernel", "pseudo", "both")


def mask_of(elements: Iterable[int]) -> int:
    mask = 0
    for x in elements:
        mask |= 1 << x
    return mask


def elements_of(mask: int) -> tuple[int, ...]:
    out = []
    x = 0
    while mask:
        if mask & 1:
            out.append(x)
        mask >>= 1
        x += 1
    return tuple(out)


def is_subset(x: int, y: int) -> bool:
    return x & y == x


def maximal_masks(masks: Iterable[int]) -> tuple[int, ...]:
    """The inclusion-maximal masks, sorted by value."""
    ordered = sorted(set(masks), key=lambda m: (-bin(m).count("1"), m))
    kept: list[int] = []
    for m in ordered:
        if not any(m & k == m for k in kept):
            kept.append(m)
    return tuple(sorted(kept))


class _LazyRow:
    __slots__ = ("owner", "x")

    def __init__(self, owner: "_LazyTable", x: int):
        self.owner, self.x = owner, x

    def __getitem__(self, y: int) -> int:
        return self.owner.product(self.x, y)


class _LazyTable:
    """Memoized products for universes too large to tabulate in full."""

    def __init__(self, t: FiniteSemigroup):
        self.t = t
        self.memo: dict[tuple[int, int], int] = {}
        # cols[a][b] is the singleton mask {a*b}
        self.cols = [[1 << t.table[a][b] for b in range(t.size)] for a in range(t.size)]

    def product(self, x: int, y: int) -> int:
        key = (x, y)
        out = self.memo.get(key)
        if out is None:
            ys = elements_of(y)
            out = 0
            for a in elements_of(x):
                row = self.cols[a]
                for b in ys:
                    out |= row[b]
            self.memo[key] = out
        return out

    def __getitem__(self, x: int) -> _LazyRow:
        return _LazyRow(self, x)


class PowerSemigroup:
    """Nonempty subsets of ``T`` under ``XY = {xy}``.

    Universes of at most ``EAGER_LIMIT`` elements get a precomputed table;
    larger ones fall back to memoized products.
    """

    def __init__(self, t: FiniteSemigroup, cap: int = DEFAULT_CAP):
        if t.size > cap:
            raise CapExceeded(f"|T| = {t.size} exceeds the power-set cap {cap}")
        self.t = t
        self.n = t.size
        self.full = (1 << self.n) - 1
        if self.n > EAGER_LIMIT:
            self.table = _LazyTable(t)
            return
        arr = np.asarray(t.table, dtype=np.int64).reshape(self.n, self.n)
        bits = np.int64(1) << arr                               # bits[x, y] = {x*y}
        masks = np.arange(1 << self.n, dtype=np.int64)
        member = (masks[:, None] >> np.arange(self.n)) & 1      # member[Y, y]
        # left[x, Y] = x * Y
        left = np.zeros((self.n, 1 << self.n), dtype=np.int64)
        for y in range(self.n):
            left |= np.where(member[:, y][None, :] == 1, bits[:, y][:, None], 0)
        table = np.zeros((1 << self.n, 1 << self.n), dtype=np.int64)
        for x in range(self.n):
            table |= np.where(member[:, x][:, None] == 1, left[x][None, :], 0)
        self.table = table.tolist()

    def check(self, x: int) -> None:
        if not 0 < x <= self.full:
            raise UniverseMismatch(f"mask {x:#x} is not a nonempty subset of a {self.n}-element set")

    def product(self, x: int, y: int) -> int:
        self.check(x)
        self.check(y)
        return self.table[x][y]

    def omega(self, x: int) -> int:
        p, t = x, self.table
        while t[p][p] != p:
            p = t[p][x]
        return p

    def is_group_element(self, x: int) -> bool:
        return self.table[x][self.omega(x)] == x

    def cyclic_union(self, x: int) -> int:
        """Union of all powers of ``x`` (``x`` a group element)."""
        acc, p = x, x
        while True:
            p = self.table[p][x]
            if p == x:
                return acc
            acc |= p

    def group_inverse(self, x: int, e: int) -> int:
        y = e
        while self.table[y][x] != e:
            y = self.table[y][x]
        return y

    def generated(self, gens: Sequence[int]) -> list[int]:
        gens = list(dict.fromkeys(gens))
        seen = set(gens)
        frontier = list(gens)
        t = self.table
        while frontier:
            nxt = []
            for x in frontier:
                for g in gens:
                    y = t[x][g]
                    if y not in seen:
                        seen.add(y)
                        nxt.append(y)
            frontier = nxt
        return sorted(seen)


def power_product(t: FiniteSemigroup, x: int, y: int) -> int:
    """``XY`` for masks over ``T``."""
    n = t.size
    full = (1 << n) - 1
    for m in (x, y):
        if not 0 < m <= full:
            raise UniverseMismatch(f"mask {m:#x} is not a nonempty subset of a {n}-element set")
    out = 0
    for a in elements_of(x):
        for b in elements_of(y):
            out |= 1 << t.table[a][b]
    return out


@dataclass(frozen=True)
class TraceEntry:
    round: int
    rule: str
    source: tuple[int, ...]
    added: int


@dataclass
class SaturationReport:
    member_count: int
    maximal: tuple[int, ...]
    rule_counts: dict[str, int]
    wall_time: float
    strategy: str

    def as_dict(self) -> dict:
        return {"member_count": self.member_count,
                "maximal": [list(elements_of(m)) for m in self.maximal],
                "rule_counts": dict(sorted(self.rule_counts.items())),
                "wall_time": self.wall_time,
                "strategy": self.strategy}


@dataclass
class SaturationFamily:
    t: FiniteSemigroup
    functor: KernelFunctor | None
    strategy: str
    words: tuple[GroupWord, ...]
    members: tuple[int, ...]
    maximal: tuple[int, ...]
    trace: list[TraceEntry]
    report: SaturationReport
    power: PowerSemigroup = field(repr=False)
    _cache: dict = field(default_factory=dict, repr=False)

    def __contains__(self, mask: int) -> bool:
        return mask in self._member_set

    @property
    def _member_set(self) -> frozenset[int]:
        if "set" not in self._cache:
            self._cache["set"] = frozenset(self.members)
        return self._cache["set"]

    @property
    def semigroup(self) -> FiniteSemigroup:
        """``C`` itself as a table semigroup (element ``i`` is ``members[i]``)."""
        if "semigroup" not in self._cache:
            index = {m: i for i, m in enumerate(self.members)}
            t = self.power.table
            rows = tuple(tuple(index[t[a][b]] for b in self.members) for a in self.members)
            self._cache["semigroup"] = FiniteSemigroup(rows, None, None, tuple(self.members))
        return self._cache["semigroup"]

    @property
    def table(self) -> tuple[tuple[int, ...], ...]:
        return self.semigroup.table

    @property
    def green(self) -> GreenData:
        return green(self.semigroup)

    def to_json(self, include_trace: bool = False) -> dict:
        doc = {
            "universe_size": self.t.size,
            "variety": self.functor.name if self.functor else None,
            "words": [str(w) for w in self.words],
            "strategy": self.strategy,
            "member_count": len(self.members),
            "maximal": [list(elements_of(m)) for m in self.maximal],
        }
        if include_trace:
            doc["trace"] = [{"round": e.round, "rule": e.rule,
                             "source": [list(elements_of(m)) for m in e.source],
                             "added": list(elements_of(e.added))} for e in self.trace]
        return doc


# closure machinery ------------------------------------------------------

def _product_close(power: PowerSemigroup, members: set[int], new: Iterable[int]) -> int:
    """Close ``members`` under products, given that only ``new`` is unprocessed."""
    t = power.table
    queue = list(new)
    added = 0
    while queue:
        a = queue.pop()
        for b in list(members):
            for c in (t[a][b], t[b][a]):
                if c not in members:
                    members.add(c)
                    queue.append(c)
                    added += 1
    return added


def _groups_of(power: PowerSemigroup, members: Iterable[int]) -> dict[int, list[int]]:
    """Maximal subgroups of the family, keyed by their idempotent."""
    groups: dict[int, list[int]] = {}
    t = power.table
    for x in sorted(members):
        e = power.omega(x)
        if t[x][e] == x:
            groups.setdefault(e, []).append(x)
    return groups


def kernel_rule_step(power: PowerSemigroup, members: set[int], k: KernelFunctor,
                     round_no: int = 0, trace: list | None = None,
                     cache: dict | None = None) -> list[int]:
    """Add the union of ``K_H(G)`` for each maximal subgroup ``G`` of the family.

    Returns the newly added masks in increasing order.
    """
    cache = {} if cache is None else cache
    added = []
    for e, elems in sorted(_groups_of(power, members).items()):
        key = frozenset(elems)
        if key not in cache:
            grp = FiniteGroup.from_elements(elems, lambda a, b: power.table[a][b])
            union = 0
            for pos in kernel_positions(grp, k):
                union |= grp.labels[pos]
            cache[key] = union
        union = cache[key]
        if union not in members:
            members.add(union)
            added.append(union)
            if trace is not None:
                trace.append(TraceEntry(round_no, "kernel", (e,), union))
    return sorted(added)


def pseudoidentity_rule_step(power: PowerSemigroup, members: set[int],
                             words: Sequence[GroupWord], round_no: int = 0,
                             trace: list | None = None,
                             tuple_cap: int = DEFAULT_TUPLE_CAP) -> list[int]:
    """Evaluate each word on all tuples of maximal members and add the cyclic unions."""
    t = power.table
    maximal = maximal_masks(members)
    budget = sum(w.arity * len(maximal) ** w.arity for w in words)
    if budget > tuple_cap:
        raise CapExceeded(f"pseudoidentity rule needs {budget} tuple slots (cap {tuple_cap})")
    results: dict[tuple, int] = {}
    for w in words:
        for args in itertools.product(maximal, repeat=w.arity):
            sub = power.generated(args)
            # z ends up J-below every element of the generated subsemigroup
            z = sub[0]
            for y in sub:
                z = t[t[z][y]][z]
            e = power.omega(z)
            local = [t[t[e][x]][e] for x in args]
            value = e
            for letter, sign in w.letters:
                x = local[letter]
                if sign == -1:
                    x = power.group_inverse(x, e)
                value = t[value][x]
            results[(str(w),) + args] = power.cyclic_union(value)
    added = []
    for key in sorted(results):
        union = results[key]
        if union not in members:
            members.add(union)
            added.append(union)
            if trace is not None:
                trace.append(TraceEntry(round_no, "pseudo", key[1:], union))
    return sorted(added)


def default_words(k: KernelFunctor | None) -> tuple[GroupWord, ...]:
    """A finite word basis for the variety, where one is known."""
    if k is None:
        return ()
    if k.tag == "trivial":
        return (IDENTITY_WORD,)
    if k.tag == "ab":
        return (COMMUTATOR_WORD,)
    if k.tag == "verbal":
        return k.words
    return ()


def _run(power: PowerSemigroup, rule: str, k: KernelFunctor | None,
         words: Sequence[GroupWord], start: Iterable[int] | None,
         tuple_cap: int) -> tuple[set[int], list[TraceEntry], Counter]:
    members: set[int] = set()
    seeds = [1 << x for x in range(power.n)] if start is None else list(start)
    for s in seeds:
        power.check(s)
    # singletons are always present
    seeds = sorted(set(seeds) | {1 << x for x in range(power.n)})
    members.update(seeds)
    trace: list[TraceEntry] = []
    counts: Counter = Counter()
    counts["product"] += _product_close(power, members, seeds)
    cache: dict = {}
    round_no = 0
    while True:
        round_no += 1
        if rule == "kernel":
            added = kernel_rule_step(power, members, k, round_no, trace, cache)
        else:
            added = pseudoidentity_rule_step(power, members, words, round_no, trace, tuple_cap)
        counts[rule] += len(added)
        if not added:
            break
        counts["product"] += _product_close(power, members, added)
    counts["rounds"] = round_no
    return members, trace, counts


def saturate(t: FiniteSemigroup, k: KernelFunctor | None = None, strategy: str = "kernel",
             words: Sequence[GroupWord | str] | None = None, cap: int = DEFAULT_CAP,
             start: Iterable[int] | None = None,
             tuple_cap: int = DEFAULT_TUPLE_CAP) -> SaturationFamily:
    """Saturate the singletons of ``T`` (plus any ``start`` masks).

    ``strategy="both"`` runs the kernel and pseudoidentity rules independently
    and raises :class:`StrategiesDisagree` unless their maximal members agree.
    """
    if strategy not in STRATEGIES:
        raise InputError(f"unknown strategy {strategy!r}")
    if words is None:
        words = default_words(k)
    words = tuple(parse_word(w) if isinstance(w, str) else w for w in words)
    if strategy in ("kernel", "both") and k is None:
        raise InputError("kernel strategy needs a variety")
    if strategy in ("pseudo", "both") and not words:
        raise InputError(f"no finite word basis known for {k}; use the kernel strategy")
    power = PowerSemigroup(t, cap)
    start = None if start is None else list(start)
    t0 = time.perf_counter()
    if strategy == "both":
        m_kernel, trace, counts = _run(power, "kernel", k, words, start, tuple_cap)
        m_pseudo, trace_p, counts_p = _run(power, "pseudo", k, words, start, tuple_cap)
        max_k, max_p = maximal_masks(m_kernel), maximal_masks(m_pseudo)
        if max_k != max_p:
            diff = sorted(set(max_k) ^ set(max_p))
            raise StrategiesDisagree("kernel and pseudoidentity saturations differ",
                                     [list(elements_of(m)) for m in diff])
        trace = trace + trace_p
        counts = counts + Counter({f"pseudo_{key}": v for key, v in counts_p.items()})
        members = m_kernel
    else:
        members, trace, counts = _run(power, strategy, k, words, start, tuple_cap)
    elapsed = time.perf_counter() - t0
    ordered = tuple(sorted(members))
    maximal = maximal_masks(ordered)
    report = SaturationReport(len(ordered), maximal, dict(counts), elapsed, strategy)
    return SaturationFamily(t, k, strategy, words, ordered, maximal, trace, report, power)


def is_pointlike(c: SaturationFamily, x: int | Iterable[int]) -> bool:
    if not isinstance(x, int):
        x = mask_of(x)
    c.power.check(x)
    return any(x & m == x for m in c.maximal)


def pointlike_pairs(c: SaturationFamily) -> list[tuple[int, int]]:
    pairs = set()
    for m in c.maximal:
        pairs.update(itertools.combinations(elements_of(m), 2))
    return sorted(pairs)
