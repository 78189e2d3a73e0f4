"""Regular languages over ``A+``: regexes, DFAs, and the separation decision."""

from __future__ import annotations

import json
from collections import deque
from dataclasses import dataclass
from typing import Iterable, Sequence

from .errors import (AlphabetMismatch, CapExceeded, EmptyWordAccepted, InputError,
                     NotDisjoint, ParseError)
from .groups import KernelFunctor
from .saturation import DEFAULT_CAP, SaturationFamily, elements_of, saturate
from .semigroup import FiniteSemigroup, from_transformations

MAX_DERIVATIVE_STATES = 5000


# regex syntax -------------------------------------------------------------
# Nodes are hashable tuples; unions are frozensets so that derivatives stay
# finite up to associativity, commutativity and idempotence.

EMPTY = ("empty",)
EPS = ("eps",)


def lit(c: str) -> tuple:
    return ("lit", c)


def alt(*parts: tuple) -> tuple:
    flat: set[tuple] = set()
    for p in parts:
        if p[0] == "alt":
            flat |= p[1]
        elif p != EMPTY:
            flat.add(p)
    if not flat:
        return EMPTY
    if len(flat) == 1:
        return next(iter(flat))
    return ("alt", frozenset(flat))


def cat(a: tuple, b: tuple) -> tuple:
    if a == EMPTY or b == EMPTY:
        return EMPTY
    if a == EPS:
        return b
    if b == EPS:
        return a
    if a[0] == "cat":
        return cat(a[1], cat(a[2], b))
    return ("cat", a, b)


def star(a: tuple) -> tuple:
    if a in (EMPTY, EPS):
        return EPS
    if a[0] == "star":
        return a
    return ("star", a)


def plus(a: tuple) -> tuple:
    return cat(a, star(a))


def nullable(r: tuple) -> bool:
    tag = r[0]
    if tag in ("eps", "star"):
        return True
    if tag in ("empty", "lit"):
        return False
    if tag == "cat":
        return nullable(r[1]) and nullable(r[2])
    return any(nullable(p) for p in r[1])


def derivative(r: tuple, c: str) -> tuple:
    tag = r[0]
    if tag in ("empty", "eps"):
        return EMPTY
    if tag == "lit":
        return EPS if r[1] == c else EMPTY
    if tag == "alt":
        return alt(*(derivative(p, c) for p in r[1]))
    if tag == "star":
        return cat(derivative(r[1], c), r)
    head = cat(derivative(r[1], c), r[2])
    return alt(head, derivative(r[2], c)) if nullable(r[1]) else head


class _Parser:
    SPECIAL = set("|*+()")

    def __init__(self, text: str, alphabet: Sequence[str]):
        self.text = text
        self.pos = 0
        self.alphabet = set(alphabet)

    def peek(self) -> str | None:
        while self.pos < len(self.text) and self.text[self.pos].isspace():
            self.pos += 1
        return self.text[self.pos] if self.pos < len(self.text) else None

    def parse(self) -> tuple:
        r = self.union()
        if self.peek() is not None:
            raise ParseError(f"unexpected {self.text[self.pos]!r}", self.pos)
        return r

    def union(self) -> tuple:
        parts = [self.concat()]
        while self.peek() == "|":
            self.pos += 1
            parts.append(self.concat())
        return alt(*parts)

    def concat(self) -> tuple:
        items = []
        while (c := self.peek()) is not None and c not in "|)":
            items.append(self.postfix())
        if not items:
            raise ParseError("empty expression", self.pos)
        out = items[-1]
        for item in reversed(items[:-1]):
            out = cat(item, out)
        return out

    def postfix(self) -> tuple:
        r = self.atom()
        while (c := self.peek()) in ("*", "+"):
            self.pos += 1
            r = star(r) if c == "*" else plus(r)
        return r

    def atom(self) -> tuple:
        c = self.peek()
        start = self.pos
        if c == "(":
            self.pos += 1
            r = self.union()
            if self.peek() != ")":
                raise ParseError("missing ')'", self.pos)
            self.pos += 1
            return r
        if c is None or c in self.SPECIAL:
            raise ParseError(f"expected a letter or '(' but found {c!r}", start)
        if c not in self.alphabet:
            raise ParseError(f"letter {c!r} not in the alphabet", start)
        self.pos += 1
        return lit(c)


def parse_regex(text: str, alphabet: Sequence[str]) -> tuple:
    return _Parser(text, alphabet).parse()


# DFAs -------------------------------------------------------------------------

@dataclass(frozen=True)
class Dfa:
    alphabet: tuple[str, ...]
    states: int
    initial: int
    finals: frozenset[int]
    # delta[state][letter index]
    delta: tuple[tuple[int, ...], ...]

    def __post_init__(self):
        if not self.alphabet or len(set(self.alphabet)) != len(self.alphabet):
            raise InputError("alphabet must be a nonempty list of distinct letters")
        if self.states < 1 or len(self.delta) != self.states:
            raise InputError("delta must have one row per state")
        if not 0 <= self.initial < self.states:
            raise InputError(f"initial state {self.initial} out of range")
        if any(not 0 <= f < self.states for f in self.finals):
            raise InputError("final state out of range")
        for row in self.delta:
            if len(row) != len(self.alphabet) or any(not 0 <= q < self.states for q in row):
                raise InputError("delta must be total with targets in range")

    def letter_index(self, c: str) -> int:
        try:
            return self.alphabet.index(c)
        except ValueError:
            raise AlphabetMismatch(f"letter {c!r} not in the alphabet") from None

    def run(self, word: Iterable[str], state: int | None = None) -> int:
        q = self.initial if state is None else state
        for c in word:
            q = self.delta[q][self.letter_index(c)]
        return q

    def accepts(self, word: Iterable[str]) -> bool:
        return self.run(word) in self.finals

    def minimized(self) -> "Dfa":
        return minimize(self)

    def to_json(self) -> dict:
        return {"alphabet": list(self.alphabet), "states": self.states,
                "initial": self.initial, "finals": sorted(self.finals),
                "delta": [list(r) for r in self.delta]}

    @classmethod
    def from_json(cls, doc: dict) -> "Dfa":
        try:
            return cls(tuple(doc["alphabet"]), int(doc["states"]), int(doc["initial"]),
                       frozenset(int(f) for f in doc["finals"]),
                       tuple(tuple(int(q) for q in row) for row in doc["delta"]))
        except (KeyError, TypeError, ValueError) as exc:
            raise InputError(f"malformed DFA document: {exc}") from None


def load_dfa(path) -> Dfa:
    with open(path, encoding="utf-8") as fh:
        try:
            doc = json.load(fh)
        except json.JSONDecodeError as exc:
            raise ParseError(str(exc), exc.pos) from None
    return Dfa.from_json(doc)


def _canonical(alphabet: tuple[str, ...], initial: int, finals: set[int],
               delta: Sequence[Sequence[int]]) -> Dfa:
    """Reachable part, renumbered in breadth-first order from the initial state."""
    order = {initial: 0}
    queue = deque([initial])
    while queue:
        q = queue.popleft()
        for r in delta[q]:
            if r not in order:
                order[r] = len(order)
                queue.append(r)
    rows = [None] * len(order)
    for q, i in order.items():
        rows[i] = tuple(order[r] for r in delta[q])
    return Dfa(alphabet, len(order), 0, frozenset(order[q] for q in finals if q in order),
               tuple(rows))


def minimize(d: Dfa) -> Dfa:
    """Moore partition refinement on the reachable part."""
    d = _canonical(d.alphabet, d.initial, set(d.finals), d.delta)
    block = [1 if q in d.finals else 0 for q in range(d.states)]
    while True:
        sig = [(block[q],) + tuple(block[r] for r in d.delta[q]) for q in range(d.states)]
        ids: dict[tuple, int] = {}
        new = [ids.setdefault(s, len(ids)) for s in sig]
        if len(ids) == len(set(block)):
            break
        block = new
    rep: dict[int, int] = {}
    for q in range(d.states):
        rep.setdefault(block[q], q)
    delta = {b: tuple(block[r] for r in d.delta[q]) for b, q in rep.items()}
    finals = {block[q] for q in d.finals}
    return _canonical(d.alphabet, block[d.initial], finals, delta)


def regex_to_dfa(expr: str, alphabet: Sequence[str],
                 max_states: int = MAX_DERIVATIVE_STATES) -> Dfa:
    """Minimal complete DFA of an ε-free regex, via derivatives."""
    alphabet = tuple(alphabet)
    r0 = parse_regex(expr, alphabet)
    if nullable(r0):
        raise EmptyWordAccepted(f"{expr!r} accepts the empty word")
    index = {r0: 0}
    terms = [r0]
    rows: list[tuple[int, ...]] = []
    pos = 0
    while pos < len(terms):
        row = []
        for c in alphabet:
            r = derivative(terms[pos], c)
            if r not in index:
                if len(terms) >= max_states:
                    raise CapExceeded(f"more than {max_states} derivative states")
                index[r] = len(terms)
                terms.append(r)
            row.append(index[r])
        rows.append(tuple(row))
        pos += 1
    finals = frozenset(i for i, r in enumerate(terms) if nullable(r))
    return minimize(Dfa(alphabet, len(terms), 0, finals, tuple(rows)))


def check_epsilon_free(d: Dfa) -> None:
    if d.initial in d.finals:
        raise EmptyWordAccepted("the automaton accepts the empty word")


# transition semigroups -----------------------------------------------------------

def transition_semigroup_of_dfa(d: Dfa) -> tuple[FiniteSemigroup, dict[str, int]]:
    """Transformations of the states generated by the letters, with each letter's element."""
    gens = [tuple(d.delta[q][a] for q in range(d.states)) for a in range(len(d.alphabet))]
    s = from_transformations(d.states, gens)
    where = {lab: i for i, lab in enumerate(s.labels)}
    return s, {c: where[g] for c, g in zip(d.alphabet, gens)}


def word_element(s: FiniteSemigroup, letter_map: dict[str, int], word: Sequence[str]) -> int:
    if not word:
        raise EmptyWordAccepted("words are nonempty in the semigroup setting")
    x = letter_map[word[0]]
    for c in word[1:]:
        x = s.table[x][letter_map[c]]
    return x


@dataclass(frozen=True)
class RecognitionData:
    product: Dfa
    # product state i corresponds to the pair pairs[i]
    pairs: tuple[tuple[int, int], ...]
    semigroup: FiniteSemigroup
    letter_map: dict[str, int]
    image1: frozenset[int]
    image2: frozenset[int]


def _align(d1: Dfa, d2: Dfa) -> Dfa:
    if set(d1.alphabet) != set(d2.alphabet):
        raise AlphabetMismatch(f"alphabets differ: {list(d1.alphabet)} vs {list(d2.alphabet)}")
    if d1.alphabet == d2.alphabet:
        return d2
    perm = [d2.alphabet.index(c) for c in d1.alphabet]
    return Dfa(d1.alphabet, d2.states, d2.initial, d2.finals,
               tuple(tuple(row[i] for i in perm) for row in d2.delta))


def product_dfa(d1: Dfa, d2: Dfa) -> tuple[Dfa, tuple[tuple[int, int], ...], dict[int, tuple[int, str]]]:
    """Reachable product, its state pairs, and breadth-first parents for witness words."""
    d2 = _align(d1, d2)
    start = (d1.initial, d2.initial)
    index = {start: 0}
    pairs = [start]
    parent: dict[int, tuple[int, str]] = {}
    rows = []
    pos = 0
    while pos < len(pairs):
        p, q = pairs[pos]
        row = []
        for a, c in enumerate(d1.alphabet):
            nxt = (d1.delta[p][a], d2.delta[q][a])
            if nxt not in index:
                index[nxt] = len(pairs)
                pairs.append(nxt)
                parent[index[nxt]] = (pos, c)
            row.append(index[nxt])
        rows.append(tuple(row))
        pos += 1
    finals = frozenset(i for i, (p, q) in enumerate(pairs) if p in d1.finals and q in d2.finals)
    return Dfa(d1.alphabet, len(pairs), 0, finals, tuple(rows)), tuple(pairs), parent


def _path_to(parent: dict[int, tuple[int, str]], state: int) -> str:
    word = []
    while state in parent:
        state, c = parent[state]
        word.append(c)
    return "".join(reversed(word))


def recognition_data(d1: Dfa, d2: Dfa) -> RecognitionData:
    check_epsilon_free(d1)
    check_epsilon_free(d2)
    prod, pairs, parent = product_dfa(d1, d2)
    if prod.finals:
        witness = min((_path_to(parent, f) for f in prod.finals), key=lambda w: (len(w), w))
        raise NotDisjoint(witness)
    d2 = _align(d1, d2)
    s, letter_map = transition_semigroup_of_dfa(prod)
    image1 = frozenset(x for x in range(s.size) if pairs[s.labels[x][0]][0] in d1.finals)
    image2 = frozenset(x for x in range(s.size) if pairs[s.labels[x][0]][1] in d2.finals)
    return RecognitionData(prod, pairs, s, letter_map, image1, image2)


@dataclass(frozen=True)
class SeparationVerdict:
    separable: bool
    variety: str
    # a pointlike pair (x in image1, y in image2) when not separable
    witness: tuple[int, int] | None
    semigroup_size: int
    image1: tuple[int, ...]
    image2: tuple[int, ...]
    maximal: tuple[tuple[int, ...], ...]

    def as_dict(self) -> dict:
        return {"verdict": "SEPARABLE" if self.separable else "NOT_SEPARABLE",
                "variety": self.variety,
                "witness": list(self.witness) if self.witness else None,
                "semigroup_size": self.semigroup_size,
                "image1": list(self.image1), "image2": list(self.image2),
                "maximal_pointlikes": [list(m) for m in self.maximal]}


def decide_separation(d1: Dfa, d2: Dfa, k: KernelFunctor, cap: int = DEFAULT_CAP,
                      strategy: str = "kernel") -> SeparationVerdict:
    """Separable by an H-bar language iff no pointlike pair straddles the two images."""
    data = recognition_data(d1, d2)
    c: SaturationFamily = saturate(data.semigroup, k, strategy, cap=cap)
    witness = None
    for m in c.maximal:
        elems = elements_of(m)
        left = [x for x in elems if x in data.image1]
        right = [y for y in elems if y in data.image2]
        if left and right:
            cand = (left[0], right[0])
            witness = cand if witness is None else min(witness, cand)
    return SeparationVerdict(witness is None, k.name, witness, data.semigroup.size,
                             tuple(sorted(data.image1)), tuple(sorted(data.image2)),
                             tuple(elements_of(m) for m in c.maximal))
