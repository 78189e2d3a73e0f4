"""Finite groups and computable kernels for varieties of finite groups.

For a variety ``H`` of finite groups the ``H``-kernel of ``G`` is the smallest
normal subgroup ``N`` with ``G/N`` in ``H``.  :func:`kernel` computes it
constructively for each supported variety; :func:`kernel_minimality_oracle`
recomputes it by brute force over the normal subgroup lattice.

Groups are stored positionally: element ``i`` of a :class:`FiniteGroup` is
position ``i`` in its table and ``labels[i]`` names it in whatever host
structure it came from (a semigroup, a permutation list, ...).
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field
from typing import Callable, Hashable, Iterable, Sequence

from .errors import ArityMismatch, CapExceeded, InputError, ParseError


@dataclass(frozen=True)
class FiniteGroup:
    table: tuple[tuple[int, ...], ...]
    identity: int
    inverse: tuple[int, ...]
    labels: tuple = ()
    _index: dict = field(default=None, init=False, repr=False, compare=False)

    def __post_init__(self):
        if not self.labels:
            object.__setattr__(self, "labels", tuple(range(len(self.table))))
        object.__setattr__(self, "_index", {lab: i for i, lab in enumerate(self.labels)})

    # construction -------------------------------------------------------

    @classmethod
    def from_table(cls, table: Sequence[Sequence[int]], labels: Sequence = (),
                   check_associative: bool = True) -> "FiniteGroup":
        n = len(table)
        rows = tuple(tuple(int(v) for v in row) for row in table)
        if n == 0 or any(len(r) != n for r in rows):
            raise InputError("group table must be a non-empty square")
        if any(not 0 <= v < n for r in rows for v in r):
            raise InputError("group table entry out of range")
        ident = next((e for e in range(n)
                      if all(rows[e][x] == x == rows[x][e] for x in range(n))), None)
        if ident is None:
            raise InputError("table has no identity element")
        inverse = []
        for x in range(n):
            inv = next((y for y in range(n) if rows[x][y] == ident == rows[y][x]), None)
            if inv is None:
                raise InputError(f"element {x} has no inverse")
            inverse.append(inv)
        if check_associative:
            for a, b, c in itertools.product(range(n), repeat=3):
                if rows[rows[a][b]][c] != rows[a][rows[b][c]]:
                    raise InputError(f"group table not associative at {(a, b, c)}")
        return cls(rows, ident, tuple(inverse), tuple(labels))

    @classmethod
    def from_elements(cls, labels: Sequence[Hashable],
                      mul: Callable[[Hashable, Hashable], Hashable]) -> "FiniteGroup":
        """Group on ``labels`` under a host multiplication (assumed associative)."""
        labels = tuple(labels)
        index = {lab: i for i, lab in enumerate(labels)}
        try:
            table = [[index[mul(a, b)] for b in labels] for a in labels]
        except KeyError as exc:
            raise InputError(f"elements not closed under multiplication: {exc}") from None
        return cls.from_table(table, labels, check_associative=False)

    @classmethod
    def from_permutations(cls, perms: Iterable[Sequence[int]]) -> "FiniteGroup":
        """Permutation group generated by ``perms`` (maps on ``0..d-1``)."""
        gens = [tuple(p) for p in perms]
        if not gens:
            raise InputError("need at least one permutation")
        degree = len(gens[0])
        ident = tuple(range(degree))
        seen = {ident}
        frontier = [ident]
        while frontier:
            nxt = []
            for p in frontier:
                for g in gens:
                    q = tuple(g[p[i]] for i in range(degree))
                    if q not in seen:
                        seen.add(q)
                        nxt.append(q)
            frontier = nxt
        elems = sorted(seen)
        # composition left to right: x(pq) = (xp)q
        return cls.from_elements(elems, lambda p, q: tuple(q[p[i]] for i in range(degree)))

    @classmethod
    def cyclic(cls, n: int) -> "FiniteGroup":
        return cls.from_table([[(i + j) % n for j in range(n)] for i in range(n)],
                              check_associative=False)

    # basic arithmetic ---------------------------------------------------

    @property
    def order(self) -> int:
        return len(self.table)

    def __len__(self) -> int:
        return len(self.table)

    def index(self, label) -> int:
        return self._index[label]

    def mul(self, a: int, b: int) -> int:
        return self.table[a][b]

    def power(self, a: int, k: int) -> int:
        if k < 0:
            a, k = self.inverse[a], -k
        result = self.identity
        for _ in range(k):
            result = self.table[result][a]
        return result

    def element_order(self, a: int) -> int:
        k, x = 1, a
        while x != self.identity:
            x = self.table[x][a]
            k += 1
        return k

    def commutator(self, a: int, b: int) -> int:
        t, inv = self.table, self.inverse
        return t[t[t[a][b]][inv[a]]][inv[b]]

    def conjugate(self, x: int, g: int) -> int:
        """g x g^-1"""
        t = self.table
        return t[t[g][x]][self.inverse[g]]

    # subgroups ----------------------------------------------------------

    def generate(self, gens: Iterable[int]) -> frozenset[int]:
        gens = [g for g in set(gens) if g != self.identity]
        seen = {self.identity}
        frontier = [self.identity]
        while frontier:
            nxt = []
            for x in frontier:
                for g in gens:
                    y = self.table[x][g]
                    if y not in seen:
                        seen.add(y)
                        nxt.append(y)
            frontier = nxt
        return frozenset(seen)

    def is_subgroup(self, positions: Iterable[int]) -> bool:
        pos = set(positions)
        return (self.identity in pos
                and all(self.table[a][b] in pos for a in pos for b in pos))

    def is_normal(self, positions: Iterable[int]) -> bool:
        pos = frozenset(positions)
        return self.is_subgroup(pos) and all(
            self.conjugate(x, g) in pos for x in pos for g in range(self.order))

    def normal_closure(self, positions: Iterable[int]) -> frozenset[int]:
        gens = {self.conjugate(x, g) for x in positions for g in range(self.order)}
        return self.generate(gens)

    def subgroup(self, positions: Iterable[int]) -> "FiniteGroup":
        """The subgroup on ``positions``, relabelled with this group's labels."""
        pos = sorted(set(positions))
        if not self.is_subgroup(pos):
            raise InputError("positions do not form a subgroup")
        local = {p: i for i, p in enumerate(pos)}
        table = tuple(tuple(local[self.table[a][b]] for b in pos) for a in pos)
        return FiniteGroup(table, local[self.identity],
                           tuple(local[self.inverse[a]] for a in pos),
                           tuple(self.labels[a] for a in pos))

    def quotient(self, normal: Iterable[int]) -> "FiniteGroup":
        """G/N with cosets labelled by their sorted position tuples."""
        n_set = frozenset(normal)
        cosets: dict[int, tuple[int, ...]] = {}
        reps = []
        for g in range(self.order):
            if g in cosets:
                continue
            coset = tuple(sorted(self.table[g][x] for x in n_set))
            for y in coset:
                cosets[y] = coset
            reps.append(g)
        labels = [cosets[r] for r in reps]
        index = {lab: i for i, lab in enumerate(labels)}
        table = [[index[cosets[self.table[a][b]]] for b in reps] for a in reps]
        return FiniteGroup.from_table(table, labels, check_associative=False)

    @property
    def is_trivial(self) -> bool:
        return self.order == 1

    @property
    def is_abelian(self) -> bool:
        t = self.table
        return all(t[a][b] == t[b][a] for a in range(self.order) for b in range(a))

    def label_set(self, positions: Iterable[int] | None = None) -> frozenset:
        if positions is None:
            return frozenset(self.labels)
        return frozenset(self.labels[p] for p in positions)


# group words ------------------------------------------------------------

@dataclass(frozen=True)
class GroupWord:
    """Product of letters ``x_i^{+-1}``; letters are 0-based, printed 1-based."""

    letters: tuple[tuple[int, int], ...]
    arity: int = 0

    def __post_init__(self):
        if not self.letters:
            raise InputError("empty group word")
        need = max(i for i, _ in self.letters) + 1
        if self.arity == 0:
            object.__setattr__(self, "arity", need)
        elif need > self.arity:
            raise InputError("letter index exceeds word arity")
        if any(sign not in (1, -1) for _, sign in self.letters):
            raise InputError("exponent signs must be +1 or -1")

    def __str__(self) -> str:
        return " ".join(f"x{i + 1}{'' if s == 1 else chr(39)}" for i, s in self.letters)


def parse_word(text: str) -> GroupWord:
    """Parse ``x1 x2 x1' x2'`` style words (apostrophe marks an inverse)."""
    letters = []
    pos = 0
    for token in text.split():
        sign = 1
        body = token
        if body.endswith("'"):
            sign, body = -1, body[:-1]
        if len(body) < 2 or body[0] != "x" or not body[1:].isdigit() or int(body[1:]) < 1:
            raise ParseError(f"bad letter {token!r}", text.find(token, pos))
        pos = text.find(token, pos) + len(token)
        letters.append((int(body[1:]) - 1, sign))
    if not letters:
        raise ParseError("empty word", 0)
    return GroupWord(tuple(letters))


def read_words(path) -> tuple[GroupWord, ...]:
    with open(path, encoding="utf-8") as fh:
        lines = [ln.split("#", 1)[0].strip() for ln in fh]
    words = tuple(parse_word(ln) for ln in lines if ln)
    if not words:
        raise InputError(f"{path}: no words")
    return words


IDENTITY_WORD = parse_word("x1")
COMMUTATOR_WORD = parse_word("x1 x2 x1' x2'")


def evaluate_group_word(g: FiniteGroup, w: GroupWord, args: Sequence[int]) -> int:
    if len(args) != w.arity:
        raise ArityMismatch(f"word of arity {w.arity} given {len(args)} arguments")
    result = g.identity
    for letter, sign in w.letters:
        x = args[letter] if sign == 1 else g.inverse[args[letter]]
        result = g.table[result][x]
    return result


# varieties --------------------------------------------------------------

def _prime_factors(n: int) -> set[int]:
    out, p = set(), 2
    while p * p <= n:
        while n % p == 0:
            out.add(p)
            n //= p
        p += 1
    if n > 1:
        out.add(n)
    return out


def _is_prime(p: int) -> bool:
    return p >= 2 and _prime_factors(p) == {p}


TAGS = ("trivial", "all", "ab", "p", "pi", "nil", "sol", "verbal")


@dataclass(frozen=True)
class KernelFunctor:
    """A variety of finite groups, realized by its kernel map ``G -> K_H(G)``."""

    tag: str
    primes: tuple[int, ...] = ()
    words: tuple[GroupWord, ...] = ()

    def __post_init__(self):
        if self.tag not in TAGS:
            raise InputError(f"unknown variety tag {self.tag!r}")
        if self.tag == "p" and (len(self.primes) != 1 or not _is_prime(self.primes[0])):
            raise InputError(f"p-group variety needs one prime, got {self.primes}")
        if self.tag == "pi":
            bad = [p for p in self.primes if not _is_prime(p)]
            if bad:
                raise InputError(f"not prime: {bad}")
            object.__setattr__(self, "primes", tuple(sorted(set(self.primes))))
        if self.tag == "verbal" and not self.words:
            raise InputError("verbal variety needs at least one word")

    @classmethod
    def trivial(cls):
        return cls("trivial")

    @classmethod
    def all(cls):
        return cls("all")

    @classmethod
    def abelian(cls):
        return cls("ab")

    @classmethod
    def pgroup(cls, p: int):
        return cls("p", (p,))

    @classmethod
    def pigroup(cls, primes: Iterable[int]):
        return cls("pi", tuple(primes))

    @classmethod
    def nilpotent(cls):
        return cls("nil")

    @classmethod
    def solvable(cls):
        return cls("sol")

    @classmethod
    def verbal(cls, words: Iterable[GroupWord | str]):
        return cls("verbal", words=tuple(parse_word(w) if isinstance(w, str) else w
                                         for w in words))

    @property
    def name(self) -> str:
        if self.tag == "p":
            return f"p:{self.primes[0]}"
        if self.tag == "pi":
            return "pi:" + ",".join(map(str, self.primes))
        if self.tag == "verbal":
            return "verbal:" + ";".join(map(str, self.words))
        return self.tag

    def __str__(self) -> str:
        return self.name


def _generated_by_commutators(g: FiniteGroup, left: Iterable[int], right: Iterable[int]) -> frozenset[int]:
    right = list(right)
    return g.generate({g.commutator(a, b) for a in left for b in right})


def _verbal_subgroup(g: FiniteGroup, words: Sequence[GroupWord]) -> frozenset[int]:
    values = set()
    for w in words:
        for args in itertools.product(range(g.order), repeat=w.arity):
            values.add(evaluate_group_word(g, w, args))
    return g.generate(values)


def kernel_positions(g: FiniteGroup, k: KernelFunctor) -> frozenset[int]:
    """Positions of ``K_H(G)`` inside ``g`` (no self-verification)."""
    everything = frozenset(range(g.order))
    if k.tag == "trivial":
        return everything
    if k.tag == "all":
        return frozenset({g.identity})
    if k.tag == "ab":
        return _generated_by_commutators(g, everything, everything)
    if k.tag in ("p", "pi"):
        return g.generate(x for x in everything
                          if all(math.gcd(g.element_order(x), p) == 1 for p in k.primes))
    if k.tag == "nil":
        current = everything
        while True:
            nxt = _generated_by_commutators(g, everything, current)
            if nxt == current:
                return current
            current = nxt
    if k.tag == "sol":
        current = everything
        while True:
            nxt = _generated_by_commutators(g, current, current)
            if nxt == current:
                return current
            current = nxt
    if k.tag == "verbal":
        return _verbal_subgroup(g, k.words)
    raise AssertionError(k.tag)


def quotient_in_variety(q: FiniteGroup, k: KernelFunctor) -> bool | None:
    """Direct membership test for a group; ``None`` where no direct test exists."""
    n = q.order
    if k.tag == "trivial":
        return n == 1
    if k.tag == "all":
        return True
    if k.tag == "ab":
        return q.is_abelian
    if k.tag in ("p", "pi"):
        return _prime_factors(n) <= set(k.primes)
    if k.tag == "nil":
        # nilpotent iff every Sylow subgroup is normal (unique)
        for p in _prime_factors(n):
            p_part = p ** _multiplicity(n, p)
            p_elements = sum(1 for x in range(n) if _prime_factors(q.element_order(x)) <= {p})
            if p_elements != p_part:
                return False
        return True
    if k.tag == "verbal":
        return all(evaluate_group_word(q, w, args) == q.identity
                   for w in k.words
                   for args in itertools.product(range(n), repeat=w.arity))
    return None


def _multiplicity(n: int, p: int) -> int:
    m = 0
    while n % p == 0:
        n //= p
        m += 1
    return m


def kernel(g: FiniteGroup, k: KernelFunctor) -> FiniteGroup:
    """``K_H(G)`` as a subgroup of ``g`` carrying ``g``'s labels.

    The result is checked to be normal, and ``G/N`` is checked to lie in the
    variety whenever a direct membership test is available.
    """
    positions = kernel_positions(g, k)
    if not g.is_normal(positions):
        raise AssertionError(f"{k.name} kernel is not normal")
    if k.tag == "verbal" and g.normal_closure(positions) != positions:
        raise AssertionError("verbal subgroup not conjugation closed")
    verdict = quotient_in_variety(g.quotient(positions), k)
    if verdict is False:
        raise AssertionError(f"quotient by {k.name} kernel is outside the variety")
    return g.subgroup(positions)


def is_in_variety(g: FiniteGroup, k: KernelFunctor) -> bool:
    return len(kernel_positions(g, k)) == 1


# brute-force oracle -----------------------------------------------------

def all_subgroups(g: FiniteGroup) -> list[frozenset[int]]:
    trivial = frozenset({g.identity})
    found = {trivial}
    queue = [trivial]
    while queue:
        h = queue.pop()
        for x in range(g.order):
            if x not in h:
                bigger = g.generate(set(h) | {x})
                if bigger not in found:
                    found.add(bigger)
                    queue.append(bigger)
    return sorted(found, key=lambda s: (len(s), sorted(s)))


def normal_subgroups(g: FiniteGroup) -> list[frozenset[int]]:
    return [h for h in all_subgroups(g) if g.is_normal(h)]


def _solvable_by_enumeration(g: FiniteGroup) -> bool:
    if g.order == 1:
        return True
    for n in normal_subgroups(g):
        if len(n) < g.order and g.quotient(n).is_abelian:
            if _solvable_by_enumeration(g.subgroup(n)):
                return True
    return False


def kernel_minimality_oracle(g: FiniteGroup, k: KernelFunctor, cap: int = 24) -> FiniteGroup:
    """Smallest normal subgroup with quotient in the variety, by enumeration."""
    if g.order > cap:
        raise CapExceeded(f"oracle limited to groups of order <= {cap}")

    def member(q: FiniteGroup) -> bool:
        verdict = quotient_in_variety(q, k)
        if verdict is None:
            return _solvable_by_enumeration(q)
        return verdict

    good = [n for n in normal_subgroups(g) if member(g.quotient(n))]
    smallest = [n for n in good if all(n <= m for m in good)]
    if len(smallest) != 1:
        raise AssertionError("no unique minimal normal subgroup with quotient in variety")
    return g.subgroup(smallest[0])
