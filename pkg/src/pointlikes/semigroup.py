"""Finite semigroups given by multiplication tables, and their structure.

Elements are dense indices ``0..n-1``.  When a computation needs the monoid
``S^I`` the adjoined identity is the fresh index ``n``; see
:meth:`FiniteSemigroup.with_identity`.
"""

from __future__ import annotations

import functools
import itertools
from dataclasses import dataclass, field
from typing import Iterable, Mapping, Sequence

import networkx as nx
import numpy as np

from .errors import (EmptyGeneratorSet, IndexOutOfRange, InputError,
                     NonAssociative, NotIdempotent, NotSurjective)
from .groups import FiniteGroup, KernelFunctor, kernel_positions


@dataclass(frozen=True, eq=False)
class FiniteSemigroup:
    table: tuple[tuple[int, ...], ...]
    generators: tuple[int, ...] | None = None
    identity: int | None = None
    labels: tuple = ()
    _cache: dict = field(default_factory=dict, init=False, repr=False)

    @property
    def size(self) -> int:
        return len(self.table)

    def __len__(self) -> int:
        return len(self.table)

    @property
    def has_adjoined_identity(self) -> bool:
        return self.identity is not None

    def mul(self, x: int, y: int) -> int:
        return self.table[x][y]

    def product(self, elements: Iterable[int]) -> int:
        return functools.reduce(self.mul, elements)

    def is_idempotent(self, x: int) -> bool:
        return self.table[x][x] == x

    @property
    def idempotents(self) -> tuple[int, ...]:
        return tuple(x for x in range(self.size) if self.table[x][x] == x)

    @property
    def array(self) -> np.ndarray:
        if "array" not in self._cache:
            arr = np.array(self.table, dtype=np.int64).reshape(self.size, self.size)
            arr.setflags(write=False)
            self._cache["array"] = arr
        return self._cache["array"]

    def with_identity(self) -> "FiniteSemigroup":
        """``S^I``: a copy with a fresh identity at index ``n``."""
        if "with_identity" not in self._cache:
            n = self.size
            rows = [row + (i,) for i, row in enumerate(self.table)]
            rows.append(tuple(range(n + 1)))
            gens = None if self.generators is None else self.generators + (n,)
            labels = self.labels + ("I",) if self.labels else ()
            self._cache["with_identity"] = FiniteSemigroup(tuple(rows), gens, n, labels)
        return self._cache["with_identity"]

    def subsemigroup(self, gens: Iterable[int]) -> tuple[int, ...]:
        gens = sorted(set(gens))
        seen = set(gens)
        frontier = list(gens)
        while frontier:
            nxt = []
            for x in frontier:
                for g in gens:
                    y = self.table[x][g]
                    if y not in seen:
                        seen.add(y)
                        nxt.append(y)
            frontier = nxt
        return tuple(sorted(seen))

    def label(self, x: int) -> str:
        return str(self.labels[x]) if self.labels else str(x)


# construction -------------------------------------------------------------

def _check_associative(arr: np.ndarray) -> None:
    n = arr.shape[0]
    for i in range(n):
        left = arr[arr[i]]            # left[j, k] = (i*j)*k
        right = arr[i][arr]           # right[j, k] = i*(j*k)
        bad = np.argwhere(left != right)
        if bad.size:
            j, k = (int(v) for v in bad[0])
            raise NonAssociative(i, j, k)


def from_table(n: int, table: Sequence[Sequence[int]],
               generators: Sequence[int] | None = None,
               labels: Sequence = ()) -> FiniteSemigroup:
    if n < 1:
        raise InputError("a semigroup needs at least one element")
    if len(table) != n or any(len(row) != n for row in table):
        raise InputError(f"table must be {n}x{n}")
    rows = tuple(tuple(int(v) for v in row) for row in table)
    for i, row in enumerate(rows):
        for j, v in enumerate(row):
            if not 0 <= v < n:
                raise IndexOutOfRange(f"entry ({i},{j}) = {v} not in [0,{n})")
    _check_associative(np.array(rows, dtype=np.int64))
    gens = None
    if generators is not None:
        gens = tuple(int(g) for g in generators)
        if any(not 0 <= g < n for g in gens):
            raise IndexOutOfRange("generator index out of range")
        if not gens:
            raise EmptyGeneratorSet("empty generator list")
    s = FiniteSemigroup(rows, gens, None, tuple(labels))
    if gens is not None and len(s.subsemigroup(gens)) != n:
        raise InputError("generators do not generate the whole table")
    return s


def _table_from_cayley(right: np.ndarray, parent: Sequence[int], via: Sequence[int],
                       gen_index: Sequence[int]) -> np.ndarray:
    """Full table from the right Cayley graph and a spanning tree of it.

    ``right[x, k]`` is ``x * gen_k``; element ``j`` equals ``parent[j] * gen_{via[j]}``
    (``parent[j] == -1`` for generators, which are ``gen_index[via[j]]``).
    """
    n = right.shape[0]
    table = np.empty((n, n), dtype=np.int64)
    for j in range(n):
        if parent[j] < 0:
            table[:, j] = right[:, via[j]]
        else:
            table[:, j] = right[table[:, parent[j]], via[j]]
    return table


def from_transformations(degree: int, gens: Sequence[Sequence[int]]) -> FiniteSemigroup:
    """Semigroup generated by maps on ``{0..degree-1}``, composed left to right."""
    maps = []
    for g in gens:
        g = tuple(int(v) for v in g)
        if len(g) != degree or any(not 0 <= v < degree for v in g):
            raise InputError(f"{g} is not a total map on {degree} points")
        if g not in maps:
            maps.append(g)
    if not maps:
        raise EmptyGeneratorSet("no generators")
    index: dict[tuple[int, ...], int] = {}
    elems: list[tuple[int, ...]] = []
    parent: list[int] = []
    via: list[int] = []
    for k, g in enumerate(maps):
        index[g] = len(elems)
        elems.append(g)
        parent.append(-1)
        via.append(k)
    right_rows = []
    pos = 0
    while pos < len(elems):
        x = elems[pos]
        row = []
        for k, g in enumerate(maps):
            y = tuple(g[v] for v in x)
            if y not in index:
                index[y] = len(elems)
                elems.append(y)
                parent.append(pos)
                via.append(k)
            row.append(index[y])
        right_rows.append(row)
        pos += 1
    right = np.array(right_rows, dtype=np.int64).reshape(len(elems), len(maps))
    table = _table_from_cayley(right, parent, via, list(range(len(maps))))
    rows = tuple(tuple(int(v) for v in row) for row in table)
    s = FiniteSemigroup(rows, tuple(range(len(maps))), None, tuple(elems))
    s._cache["array"] = table
    table.setflags(write=False)
    return s


def direct_product(a: FiniteSemigroup, b: FiniteSemigroup) -> FiniteSemigroup:
    """``a x b`` with element ``(x, y)`` at index ``x * |b| + y``."""
    nb = b.size
    pairs = list(itertools.product(range(a.size), range(nb)))
    table = [[a.table[x1][x2] * nb + b.table[y1][y2] for (x2, y2) in pairs]
             for (x1, y1) in pairs]
    labels = tuple(f"({a.label(x)},{b.label(y)})" for x, y in pairs)
    return FiniteSemigroup(tuple(tuple(r) for r in table), None, None, labels)


def restrict(s: FiniteSemigroup, elements: Sequence[int]) -> FiniteSemigroup:
    """The subsemigroup on ``elements`` (must be closed), relabelled densely."""
    elements = list(elements)
    local = {x: i for i, x in enumerate(elements)}
    try:
        rows = tuple(tuple(local[s.table[x][y]] for y in elements) for x in elements)
    except KeyError:
        raise InputError("elements are not closed under multiplication") from None
    return FiniteSemigroup(rows, None, None, tuple(s.label(x) for x in elements))


# Green's relations ------------------------------------------------------

RELATIONS = ("L", "R", "J", "H")


@dataclass(frozen=True)
class GreenData:
    l_class: tuple[int, ...]
    r_class: tuple[int, ...]
    j_class: tuple[int, ...]
    h_class: tuple[int, ...]
    # below[c] has bit c' set iff class c' <= class c
    l_below: tuple[int, ...]
    r_below: tuple[int, ...]
    j_below: tuple[int, ...]
    idempotents: tuple[int, ...]
    group_h_classes: tuple[int, ...]

    def class_of(self, rel: str, x: int) -> int:
        return {"L": self.l_class, "R": self.r_class,
                "J": self.j_class, "H": self.h_class}[rel][x]

    def leq(self, rel: str, x: int, y: int) -> bool:
        if rel == "H":
            return self.leq("L", x, y) and self.leq("R", x, y)
        cls = {"L": self.l_class, "R": self.r_class, "J": self.j_class}[rel]
        below = {"L": self.l_below, "R": self.r_below, "J": self.j_below}[rel]
        return bool(below[cls[y]] >> cls[x] & 1)

    def equiv(self, rel: str, x: int, y: int) -> bool:
        return self.class_of(rel, x) == self.class_of(rel, y)

    def lt(self, rel: str, x: int, y: int) -> bool:
        return self.leq(rel, x, y) and not self.equiv(rel, x, y)

    def members(self, rel: str, cid: int) -> tuple[int, ...]:
        cls = {"L": self.l_class, "R": self.r_class,
               "J": self.j_class, "H": self.h_class}[rel]
        return tuple(x for x, c in enumerate(cls) if c == cid)

    def classes(self, rel: str) -> list[tuple[int, ...]]:
        cls = {"L": self.l_class, "R": self.r_class,
               "J": self.j_class, "H": self.h_class}[rel]
        out: dict[int, list[int]] = {}
        for x, c in enumerate(cls):
            out.setdefault(c, []).append(x)
        return [tuple(out[c]) for c in sorted(out)]


def _classes_and_order(n: int, edges: Iterable[tuple[int, int]]) -> tuple[tuple[int, ...], tuple[int, ...]]:
    """SCC ids (numbered by least member) and reachability masks of the condensation."""
    graph = nx.DiGraph()
    graph.add_nodes_from(range(n))
    graph.add_edges_from(edges)
    dag = nx.condensation(graph)
    members = dag.graph["mapping"]
    # renumber components by their least element for deterministic ids
    order = sorted(dag.nodes, key=lambda c: min(dag.nodes[c]["members"]))
    rename = {c: i for i, c in enumerate(order)}
    cls = tuple(rename[members[x]] for x in range(n))
    reach = [0] * len(order)
    for c in reversed(list(nx.topological_sort(dag))):
        mask = 1 << rename[c]
        for d in dag.successors(c):
            mask |= reach[rename[d]]
        reach[rename[c]] = mask
    return cls, tuple(reach)


def green(s: FiniteSemigroup, use_generators: bool | None = None) -> GreenData:
    """Green's relations by strongly connected components of the Cayley graphs.

    An edge ``y -> y*a`` says ``y*a <=_R y``, so ``x <=_R y`` iff ``x`` is
    reachable from ``y`` (paths of length zero account for ``S^I``).
    """
    if use_generators is None:
        use_generators = s.generators is not None
    key = ("green", use_generators)
    if key in s._cache:
        return s._cache[key]
    n = s.size
    labels = s.generators if use_generators and s.generators is not None else range(n)
    labels = list(labels)
    t = s.table
    right = [(y, t[y][a]) for y in range(n) for a in labels]
    left = [(y, t[a][y]) for y in range(n) for a in labels]
    r_class, r_below = _classes_and_order(n, right)
    l_class, l_below = _classes_and_order(n, left)
    j_class, j_below = _classes_and_order(n, right + left)
    h_ids: dict[tuple[int, int], int] = {}
    h_class = tuple(h_ids.setdefault((l_class[x], r_class[x]), len(h_ids)) for x in range(n))
    idem = s.idempotents
    data = GreenData(l_class, r_class, j_class, h_class, l_below, r_below, j_below,
                     idem, tuple(sorted({h_class[e] for e in idem})))
    s._cache[key] = data
    return data


# powers, ideals, subgroups ------------------------------------------------

def omega(s: FiniteSemigroup, x: int) -> int:
    """The idempotent power of ``x``."""
    p = x
    while s.table[p][p] != p:
        p = s.table[p][x]
    return p


def group_inverse(s: FiniteSemigroup, x: int) -> int:
    """Inverse of ``x`` in its maximal subgroup (``x^(omega-1)``); ``x`` must be a group element."""
    e = omega(s, x)
    if s.table[x][e] != x:
        raise InputError(f"element {x} does not lie in a subgroup")
    y = x
    while s.table[y][x] != e:
        y = s.table[y][x]
    return y


def minimal_ideal(s: FiniteSemigroup) -> tuple[int, ...]:
    g = green(s)
    for c in range(len(g.j_below)):
        if all(g.j_below[d] >> c & 1 for d in range(len(g.j_below))):
            return g.members("J", c)
    raise AssertionError("no minimum J-class")


def minimal_ideal_element(s: FiniteSemigroup, elements: Sequence[int]) -> int:
    """An element of the minimal ideal of the subsemigroup ``elements`` (must be closed).

    After ``z := z*y*z`` for every ``y`` we have ``z <=_J y`` for all ``y``.
    """
    z = elements[0]
    t = s.table
    for y in elements:
        z = t[t[z][y]][z]
    return z


def maximal_subgroup(s: FiniteSemigroup, e: int) -> FiniteGroup:
    """The H-class of the idempotent ``e`` as a group labelled by element indices."""
    if not s.is_idempotent(e):
        raise NotIdempotent(f"element {e} is not idempotent")
    members = [x for x in range(s.size) if s.table[x][e] == x and omega(s, x) == e]
    return FiniteGroup.from_elements(members, s.mul)


def right_stabilizer(s: FiniteSemigroup, l_class: int,
                     gd: GreenData | None = None) -> tuple[int, ...]:
    """``{t in S^I : L t ⊆ L}`` as indices of ``S^I`` (the identity is ``s.size``)."""
    gd = gd or green(s)
    members = gd.members("L", l_class)
    si = s.with_identity()
    stab = [t for t in range(s.size)
            if all(gd.l_class[si.table[x][t]] == l_class for x in members)]
    return tuple(stab) + (s.size,)


@dataclass(frozen=True)
class SchutzView:
    h_class: tuple[int, ...]
    # permutations[k][i] is the position of h_class[i] * stabilizer_label[k]
    permutations: tuple[tuple[int, ...], ...]
    stabilizer_labels: tuple[int, ...]
    stabilizer_map: Mapping[int, int]
    group: FiniteGroup

    @property
    def group_table(self) -> tuple[tuple[int, ...], ...]:
        return self.group.table

    @property
    def order(self) -> int:
        return self.group.order


def schutzenberger_right(s: FiniteSemigroup, h: int | Sequence[int],
                         gd: GreenData | None = None) -> SchutzView:
    """Right Schützenberger group of an H-class (given by id or by its elements)."""
    gd = gd or green(s)
    if isinstance(h, int):
        members = gd.members("H", h)
    else:
        members = tuple(sorted(h))
    pos = {x: i for i, x in enumerate(members)}
    stab = right_stabilizer(s, gd.l_class[members[0]], gd)
    si = s.with_identity()
    perms: dict[tuple[int, ...], int] = {}
    perm_list, labels, smap = [], [], {}
    for t in stab:
        p = tuple(pos[si.table[x][t]] for x in members)
        if p not in perms:
            perms[p] = len(perm_list)
            perm_list.append(p)
            labels.append(t)
        smap[t] = perms[p]
    k = len(perm_list)
    table = [[perms[tuple(perm_list[j][perm_list[i][a]] for a in range(len(members)))]
              for j in range(k)] for i in range(k)]
    grp = FiniteGroup.from_table(table, tuple(range(k)), check_associative=False)
    return SchutzView(members, tuple(perm_list), tuple(labels), smap, grp)


def lift_group_onto(s: FiniteSemigroup, p: Sequence[int], phi: Mapping[int, int],
                    target: FiniteGroup, pick: str = "lowest") -> tuple[int, ...]:
    """A subgroup of the closed subset ``p`` of ``s`` whose image under ``phi`` is ``target``.

    Takes the maximal subgroup ``eKe`` at an idempotent ``e`` of the minimal
    ideal ``K`` of ``p``; ``pick`` chooses the lowest or highest such ``e``.
    """
    p = sorted(set(p))
    t = s.table
    z = minimal_ideal_element(s, p)
    ideal = {t[t[a][z]][b] for a in p for b in p} | {t[a][z] for a in p} \
        | {t[z][b] for b in p} | {z}
    idems = sorted(x for x in ideal if t[x][x] == x)
    e = idems[0] if pick == "lowest" else idems[-1]
    subgroup = tuple(sorted({t[t[e][x]][e] for x in p}))
    image = {phi[x] for x in subgroup}
    if image != set(range(target.order)):
        raise NotSurjective(f"image has {len(image)} of {target.order} elements")
    return subgroup


def is_H_element(s: FiniteSemigroup, x: int, k: KernelFunctor,
                 gd: GreenData | None = None) -> bool:
    gd = gd or green(s)
    view = schutzenberger_right(s, gd.h_class[x], gd)
    return len(kernel_positions(view.group, k)) == 1


def h_element_flags(s: FiniteSemigroup, k: KernelFunctor,
                    gd: GreenData | None = None) -> tuple[bool, ...]:
    """Per-element H-element flags, computed once per L-class and checked constant on it."""
    gd = gd or green(s)
    flags: list[bool | None] = [None] * s.size
    for h in range(max(gd.h_class) + 1):
        members = gd.members("H", h)
        view = schutzenberger_right(s, h, gd)
        val = len(kernel_positions(view.group, k)) == 1
        for x in members:
            flags[x] = val
    for members in gd.classes("L"):
        if len({flags[x] for x in members}) != 1:
            raise AssertionError(f"H-element flag not constant on L-class {members}")
    return tuple(bool(f) for f in flags)


# file formats -------------------------------------------------------------

def _content_lines(text: str) -> list[tuple[int, str]]:
    out = []
    for no, raw in enumerate(text.splitlines(), 1):
        line = raw.strip()
        if line and not line.startswith("#"):
            out.append((no, line))
    return out


def parse_sgp(text: str) -> FiniteSemigroup:
    """``n <count>``, then ``n`` table rows, then optionally ``generators ...``."""
    lines = _content_lines(text)
    if not lines or not lines[0][1].startswith("n "):
        raise InputError("semigroup file must start with 'n <count>'")
    try:
        n = int(lines[0][1].split()[1])
    except (IndexError, ValueError):
        raise InputError(f"line {lines[0][0]}: bad size line") from None
    if len(lines) < n + 1:
        raise InputError(f"expected {n} table rows")
    rows = []
    for no, line in lines[1:n + 1]:
        try:
            rows.append([int(v) for v in line.split()])
        except ValueError:
            raise InputError(f"line {no}: non-integer entry") from None
    gens = None
    for no, line in lines[n + 1:]:
        head, *rest = line.split()
        if head != "generators":
            raise InputError(f"line {no}: unexpected {line!r}")
        try:
            gens = [int(v) for v in rest]
        except ValueError:
            raise InputError(f"line {no}: bad generator list") from None
    return from_table(n, rows, gens)


def format_sgp(s: FiniteSemigroup, comment: str | None = None) -> str:
    out = []
    if comment:
        out.extend(f"# {ln}" for ln in comment.splitlines())
    out.append(f"n {s.size}")
    out.extend(" ".join(map(str, row)) for row in s.table)
    if s.generators is not None:
        out.append("generators " + " ".join(map(str, s.generators)))
    return "\n".join(out) + "\n"


def parse_tgen(text: str) -> FiniteSemigroup:
    """``degree <d>`` followed by one generator per line."""
    lines = _content_lines(text)
    if not lines or not lines[0][1].startswith("degree "):
        raise InputError("transformation file must start with 'degree <d>'")
    try:
        degree = int(lines[0][1].split()[1])
    except (IndexError, ValueError):
        raise InputError("bad degree line") from None
    gens = []
    for no, line in lines[1:]:
        try:
            gens.append([int(v) for v in line.split()])
        except ValueError:
            raise InputError(f"line {no}: non-integer image") from None
    return from_transformations(degree, gens)


def load_semigroup(path) -> FiniteSemigroup:
    with open(path, encoding="utf-8") as fh:
        text = fh.read()
    if str(path).endswith(".tgen"):
        return parse_tgen(text)
    return parse_sgp(text)
