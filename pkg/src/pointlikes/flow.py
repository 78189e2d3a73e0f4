"""The blowup automaton and flow over a computed saturation, and their checks.

``S`` below is the downward closure of a saturation family, materialized as a
table semigroup whose elements are indices into ``SatSemigroup.masks``.  The
adjoined identity of ``S^I`` is index ``len(masks)``.

Chains are tuples written as ``(q_n, ..., q_1)``: position 0 holds the *last*
letter, and a chain is an L-chain when ``chain[j] <=_L chain[j + 1]``.
"""

from __future__ import annotations

import itertools
import random
import time
from dataclasses import dataclass, field
from typing import Iterable, Sequence

from .errors import AxiomViolation, CapExceeded, NotAChain, StateExplosion
from .groups import FiniteGroup, KernelFunctor, kernel_positions
from .saturation import SaturationFamily, elements_of, mask_of
from .semigroup import (FiniteSemigroup, GreenData, green, h_element_flags,
                        lift_group_onto, right_stabilizer, schutzenberger_right)

DEFAULT_MAX_SIZE = 6
DEFAULT_MAX_STATES = 20_000

Chain = tuple[int, ...]


@dataclass(eq=False)
class SatSemigroup:
    t: FiniteSemigroup
    functor: KernelFunctor
    masks: tuple[int, ...]
    index: dict[int, int]
    semigroup: FiniteSemigroup
    green: GreenData
    h_element: tuple[bool, ...]
    singleton: tuple[int, ...]

    @property
    def size(self) -> int:
        return len(self.masks)

    @property
    def identity(self) -> int:
        return len(self.masks)

    def mul(self, x: int, y: int) -> int:
        """Product in ``S^I``."""
        return self.semigroup.with_identity().table[x][y]

    def mask(self, x: int) -> int | None:
        return None if x == self.identity else self.masks[x]

    def describe(self, x: int) -> str:
        if x == self.identity:
            return "I"
        return "{" + ",".join(map(str, elements_of(self.masks[x]))) + "}"


def materialize_downclosure(c: SaturationFamily, k: KernelFunctor | None = None,
                            max_size: int = DEFAULT_MAX_SIZE) -> SatSemigroup:
    """All nonempty subsets lying under a member of ``c``, with their structure."""
    if c.t.size > max_size:
        raise CapExceeded(f"|T| = {c.t.size} exceeds the verifier cap {max_size}")
    k = k or c.functor
    below: set[int] = set()
    for m in c.maximal:
        sub = m
        while sub:
            below.add(sub)
            sub = (sub - 1) & m
    masks = tuple(sorted(below))
    index = {m: i for i, m in enumerate(masks)}
    t = c.power.table
    try:
        rows = tuple(tuple(index[t[a][b]] for b in masks) for a in masks)
    except KeyError:
        raise AxiomViolation("subsemigroup", "downward closure not closed under products") from None
    s = FiniteSemigroup(rows, None, None, masks)
    gd = green(s)
    flags = h_element_flags(s, k, gd)
    singleton = tuple(index[1 << x] for x in range(c.t.size))
    return SatSemigroup(c.t, k, masks, index, s, gd, flags, singleton)


# blowup ---------------------------------------------------------------------

@dataclass(eq=False)
class BlowupOp:
    sat: SatSemigroup
    map: tuple[int, ...]
    multipliers: dict[int, int]
    base_map: tuple[int, ...]
    base_multipliers: dict[int, int]
    lifted: dict[int, tuple[int, ...]] = field(default_factory=dict)

    def __call__(self, x: int) -> int:
        return self.map[x]

    def multiplier(self, x: int) -> int:
        return self.multipliers[self.sat.green.l_class[x]]


def _pre_blowup_multipliers(sat: SatSemigroup, k: KernelFunctor,
                            pick: str) -> tuple[dict[int, int], dict[int, tuple[int, ...]]]:
    s, gd = sat.semigroup, sat.green
    si = s.with_identity()
    mult: dict[int, int] = {}
    lifted: dict[int, tuple[int, ...]] = {}
    for lc, members in enumerate(gd.classes("L")):
        assert gd.l_class[members[0]] == lc
        if sat.h_element[members[0]]:
            mult[lc] = sat.identity
            continue
        view = schutzenberger_right(s, gd.h_class[members[0]], gd)
        stab = right_stabilizer(s, lc, gd)
        g_l = lift_group_onto(si, stab, view.stabilizer_map, view.group, pick)
        if sat.identity in g_l:
            raise AxiomViolation("lift", f"lifted group for L-class {lc} contains I")
        grp = FiniteGroup.from_elements(g_l, si.mul)
        union = 0
        for pos in kernel_positions(grp, k):
            union |= sat.masks[grp.labels[pos]]
        if union not in sat.index:
            raise AxiomViolation("saturated", f"kernel union {sorted(elements_of(union))} not in S")
        mult[lc] = sat.index[union]
        lifted[lc] = g_l
    return mult, lifted


def blowup_axiom_failures(sat: SatSemigroup, bmap: Sequence[int], mult: dict[int, int],
                          require_idempotent: bool = True) -> list[tuple[str, str]]:
    """Witnesses of failed blowup axioms (i) to (iv); empty when all hold."""
    gd = sat.green
    fails = []
    for x in range(sat.size):
        y = bmap[x]
        if y != sat.mul(x, mult[gd.l_class[x]]):
            fails.append(("i", sat.describe(x)))
        if sat.h_element[x]:
            if y != x:
                fails.append(("ii", f"H-element {sat.describe(x)} moved"))
        elif not gd.lt("H", y, x):
            fails.append(("ii", f"{sat.describe(y)} not strictly H-below {sat.describe(x)}"))
        if sat.masks[x] & sat.masks[y] != sat.masks[x]:
            fails.append(("iii", sat.describe(x)))
        if require_idempotent and bmap[y] != y:
            fails.append(("iv", sat.describe(x)))
    return fails


def build_blowup(sat: SatSemigroup, k: KernelFunctor | None = None,
                 pick: str = "lowest") -> BlowupOp:
    """Pre-blowup from lifted kernel unions, then its idempotent power."""
    k = k or sat.functor
    gd = sat.green
    base_mult, lifted = _pre_blowup_multipliers(sat, k, pick)
    base = tuple(sat.mul(x, base_mult[gd.l_class[x]]) for x in range(sat.size))
    fails = blowup_axiom_failures(sat, base, base_mult, require_idempotent=False)
    if fails:
        raise AxiomViolation(fails[0][0], fails[0][1])

    cur, cur_mult = base, dict(base_mult)
    for _ in range(sat.size + 1):
        if all(cur[cur[x]] == cur[x] for x in range(sat.size)):
            break
        nxt = tuple(base[cur[x]] for x in range(sat.size))
        nxt_mult = {}
        for lc, members in enumerate(gd.classes("L")):
            targets = {gd.l_class[cur[x]] for x in members}
            if len(targets) != 1:
                raise AxiomViolation("L", f"blowup splits L-class {lc}")
            nxt_mult[lc] = sat.mul(cur_mult[lc], base_mult[targets.pop()])
        cur, cur_mult = nxt, nxt_mult
    else:
        raise AssertionError("no idempotent power found")
    fails = blowup_axiom_failures(sat, cur, cur_mult)
    if fails:
        raise AxiomViolation(fails[0][0], fails[0][1])
    return BlowupOp(sat, cur, cur_mult, base, base_mult, lifted)


# chains -----------------------------------------------------------------------

def is_l_chain(sat: SatSemigroup, chain: Sequence[int]) -> bool:
    gd = sat.green
    return all(gd.leq("L", chain[j], chain[j + 1]) for j in range(len(chain) - 1))


def is_strict(sat: SatSemigroup, chain: Sequence[int]) -> bool:
    gd = sat.green
    return all(gd.lt("L", chain[j], chain[j + 1]) for j in range(len(chain) - 1))


def rho(sat: SatSemigroup, chain: Sequence[int]) -> Chain:
    """Keep only the last letter of each run of L-equivalent letters."""
    if not is_l_chain(sat, chain):
        raise NotAChain(f"not an L-chain: {[sat.describe(x) for x in chain]}")
    lc = sat.green.l_class
    return tuple(x for j, x in enumerate(chain) if j == 0 or lc[chain[j - 1]] != lc[x])


def delta(sat: SatSemigroup, chain: Sequence[int], s: int) -> Chain:
    """Right-multiply every coordinate by ``s`` (an element of ``S^I``)."""
    table = sat.semigroup.with_identity().table
    return tuple(table[q][s] for q in chain)


def _big_b(op: BlowupOp, chain: Chain) -> Chain:
    out: list[int] = []
    table = op.sat.semigroup.with_identity().table
    lc = op.sat.green.l_class
    while chain:
        s = chain[-1]
        out.append(op.map[s])
        m = op.multipliers[lc[s]]
        chain = tuple(table[q][m] for q in chain[:-1])
    return tuple(reversed(out))


def big_b(op: BlowupOp, chain: Sequence[int], check: bool = True) -> Chain:
    """``(q . s)B = (q Delta_{m_{L_s}})B . sb`` on L-chains."""
    chain = tuple(chain)
    if check and not is_l_chain(op.sat, chain):
        raise NotAChain(f"not an L-chain: {[op.sat.describe(x) for x in chain]}")
    return _big_b(op, chain)


def tau_bar(op: BlowupOp, chain: Sequence[int], t: int) -> Chain:
    ts = op.sat.singleton[t]
    return _big_b(op, delta(op.sat, chain, ts) + (ts,))


def tau_step(op: BlowupOp, state: Sequence[int], t: int) -> Chain:
    return rho(op.sat, tau_bar(op, state, t))


# automaton --------------------------------------------------------------------

@dataclass(eq=False)
class FlowAutomaton:
    states: tuple[Chain, ...]
    # transitions[t][i] is the state reached from states[i] on letter t
    transitions: tuple[tuple[int, ...], ...]
    initial: int
    # mask of the last letter; None stands for {I} on the empty chain
    flow: tuple[int | None, ...]

    @property
    def size(self) -> int:
        return len(self.states)


def build_automaton_and_flow(t: FiniteSemigroup, sat: SatSemigroup, op: BlowupOp,
                             max_states: int = DEFAULT_MAX_STATES) -> FlowAutomaton:
    """Reachable part of the chain automaton from the empty chain."""
    states: list[Chain] = [()]
    index = {(): 0}
    rows: list[list[int]] = [[] for _ in range(t.size)]
    pos = 0
    while pos < len(states):
        q = states[pos]
        for letter in range(t.size):
            r = tau_step(op, q, letter)
            if r not in index:
                if len(states) >= max_states:
                    raise StateExplosion(f"more than {max_states} reachable states")
                index[r] = len(states)
                states.append(r)
            rows[letter].append(index[r])
        pos += 1
    flow = tuple(None if not q else sat.masks[q[0]] for q in states)
    return FlowAutomaton(tuple(states), tuple(tuple(r) for r in rows), 0, flow)


def transformation_closure(gens: Sequence[Sequence[int]]) -> list[tuple[int, ...]]:
    """All composites of the generating maps (applied left to right)."""
    gens = [tuple(g) for g in gens]
    seen = dict.fromkeys(gens)
    frontier = list(seen)
    while frontier:
        nxt = []
        for x in frontier:
            for g in gens:
                y = tuple(g[v] for v in x)
                if y not in seen:
                    seen[y] = None
                    nxt.append(y)
        frontier = nxt
    return list(seen)


def _compose(x: tuple[int, ...], y: tuple[int, ...]) -> tuple[int, ...]:
    return tuple(y[v] for v in x)


def transformation_subgroups(elems: Iterable[tuple[int, ...]]) -> dict[tuple, list[tuple]]:
    """Maximal subgroups of a transformation semigroup, keyed by idempotent."""
    groups: dict[tuple, list[tuple]] = {}
    for x in elems:
        p = x
        while _compose(p, p) != p:
            p = _compose(p, x)
        if _compose(x, p) == x:
            groups.setdefault(p, []).append(x)
    return groups


# verification -------------------------------------------------------------------

@dataclass
class CheckResult:
    name: str
    passed: bool
    detail: str = ""
    witness: object = None
    seconds: float = 0.0

    def as_dict(self) -> dict:
        return {"check": self.name, "passed": self.passed, "detail": self.detail,
                "witness": self.witness, "seconds": round(self.seconds, 4)}


@dataclass
class VerificationReport:
    variety: str
    universe_size: int
    sat_size: int
    state_count: int
    transition_semigroup_size: int
    checks: list[CheckResult]

    @property
    def passed(self) -> bool:
        return all(c.passed for c in self.checks)

    def as_dict(self) -> dict:
        return {"variety": self.variety, "universe_size": self.universe_size,
                "sat_size": self.sat_size, "state_count": self.state_count,
                "transition_semigroup_size": self.transition_semigroup_size,
                "passed": self.passed,
                "checks": [c.as_dict() for c in self.checks]}


def l_chain_count(sat: SatSemigroup, length: int) -> int:
    gd = sat.green
    counts = [1] * sat.size
    total = sat.size if length >= 1 else 0
    for _ in range(length - 1):
        counts = [sum(counts[x] for x in range(sat.size) if gd.leq("L", y, x))
                  for y in range(sat.size)]
        total += sum(counts)
    return total


def l_chains(sat: SatSemigroup, max_len: int, limit: int = 4000,
             seed: int = 0) -> list[Chain]:
    """L-chains of length 1..max_len: all of them if at most ``limit``, else a sample."""
    gd = sat.green
    below = [[y for y in range(sat.size) if gd.leq("L", y, x)] for x in range(sat.size)]
    if l_chain_count(sat, max_len) <= limit:
        out: list[Chain] = []
        frontier = [(x,) for x in range(sat.size)]
        for _ in range(max_len):
            out.extend(frontier)
            frontier = [(y,) + c for c in frontier for y in below[c[0]]]
        return out
    rng = random.Random(seed)
    seen: set[Chain] = set()
    for _ in range(limit):
        length = rng.randint(1, max_len)
        chain = (rng.randrange(sat.size),)
        while len(chain) < length:
            chain = (rng.choice(below[chain[0]]),) + chain
        seen.add(chain)
    return sorted(seen)


def _timed(name: str, fn) -> CheckResult:
    t0 = time.perf_counter()
    try:
        result = fn()
    except AxiomViolation as exc:
        result = CheckResult(name, False, str(exc), [exc.axiom, str(exc.witness)])
    result.seconds = time.perf_counter() - t0
    return result


def _describe_chain(sat: SatSemigroup, chain: Sequence[int]) -> list[str]:
    return [sat.describe(x) for x in chain]


def check_flow(op: BlowupOp, aut: FlowAutomaton) -> CheckResult:
    sat = op.sat
    table = sat.t.table
    for i, q in enumerate(aut.states):
        for letter in range(sat.t.size):
            target = aut.flow[aut.transitions[letter][i]]
            if aut.flow[i] is None:
                moved = 1 << letter
            else:
                moved = mask_of(table[x][letter] for x in elements_of(aut.flow[i]))
            if target is None or moved & target != moved:
                return CheckResult("FLOW", False, "flow inclusion fails",
                                   {"state": _describe_chain(sat, q), "letter": letter})
    return CheckResult("FLOW", True, f"{aut.size} states x {sat.t.size} letters")


def check_hbar(op: BlowupOp, aut: FlowAutomaton, k: KernelFunctor) -> tuple[CheckResult, int]:
    elems = transformation_closure(aut.transitions)
    groups = transformation_subgroups(elems)
    largest = 1
    for e, members in groups.items():
        grp = FiniteGroup.from_elements(members, _compose)
        largest = max(largest, grp.order)
        if len(kernel_positions(grp, k)) != 1:
            return CheckResult("HBAR", False, f"subgroup of order {grp.order} outside {k.name}",
                               {"idempotent": list(e)}), len(elems)
    return CheckResult("HBAR", True, f"{len(elems)} transformations, {len(groups)} maximal "
                       f"subgroups, largest order {largest}"), len(elems)


def check_complete(c: SaturationFamily, aut: FlowAutomaton) -> CheckResult:
    values = [v for v in aut.flow if v is not None]
    for v in values:
        if not any(v & m == v for m in c.maximal):
            return CheckResult("COMPLETE", False, "flow value outside the saturation",
                               list(elements_of(v)))
    for m in c.maximal:
        if not any(m & v == m for v in values):
            return CheckResult("COMPLETE", False, "maximal pointlike not under any flow value",
                               list(elements_of(m)))
    return CheckResult("COMPLETE", True, f"{len(c.maximal)} maximal members realized as flow values")


def check_blowup(op: BlowupOp, chains: Sequence[Chain]) -> CheckResult:
    sat = op.sat
    fails = blowup_axiom_failures(sat, op.base_map, op.base_multipliers, require_idempotent=False)
    fails += blowup_axiom_failures(sat, op.map, op.multipliers)
    if fails:
        return CheckResult("BLOWUP", False, "axiom failure", fails[:5])
    gd = sat.green
    for x in range(sat.size):
        for y in range(sat.size):
            if gd.equiv("L", x, y) and not gd.equiv("L", op.map[x], op.map[y]):
                return CheckResult("BLOWUP", False, "L-equivalent members blow up apart",
                                   [sat.describe(x), sat.describe(y)])
        if gd.equiv("R", op.map[x], x) and op.map[x] != x:
            return CheckResult("BLOWUP", False, "qb R q but qb != q", sat.describe(x))
    if set(op.map) != {x for x in range(sat.size) if sat.h_element[x]}:
        return CheckResult("BLOWUP", False, "image of b is not the set of H-elements")
    other = build_blowup(sat, sat.functor, pick="highest")
    if other.map != op.map:
        return CheckResult("BLOWUP", False, "blowup depends on the lifted subgroup")
    for q in chains:
        if big_b(op, q, check=False) != big_b(other, q, check=False):
            return CheckResult("BLOWUP", False, "B depends on the multiplier",
                               _describe_chain(sat, q))
    return CheckResult("BLOWUP", True, f"axioms (i)-(iv) on {sat.size} members; "
                       f"multiplier independence on {len(chains)} chains")


def check_rho_respect(op: BlowupOp, chains: Sequence[Chain]) -> CheckResult:
    sat = op.sat
    multipliers = sorted(set(range(sat.size + 1)))
    for q in chains:
        qr = rho(sat, q)
        for s in multipliers:
            if rho(sat, delta(sat, qr, s)) != rho(sat, delta(sat, q, s)):
                return CheckResult("RHO-RESPECT", False, "Delta_s does not respect rho",
                                   {"chain": _describe_chain(sat, q), "s": sat.describe(s)})
        if rho(sat, big_b(op, qr)) != rho(sat, big_b(op, q)):
            return CheckResult("RHO-RESPECT", False, "B does not respect rho",
                               _describe_chain(sat, q))
        for letter in range(sat.t.size):
            if rho(sat, tau_bar(op, qr, letter)) != rho(sat, tau_bar(op, q, letter)):
                return CheckResult("RHO-RESPECT", False, "tau_bar does not respect rho",
                                   {"chain": _describe_chain(sat, q), "letter": letter})
    return CheckResult("RHO-RESPECT", True, f"{len(chains)} chains")


def check_zeiger(op: BlowupOp, chains: Sequence[Chain]) -> CheckResult:
    sat = op.sat
    gd = sat.green
    si = sat.semigroup.with_identity().table
    tested = 0
    for q in chains:
        if len(q) < 2:
            continue
        images = [big_b(op, q, check=False)] + [delta(sat, q, s) for s in range(sat.size + 1)]
        for img in images:
            if not (gd.equiv("R", q[0], img[0]) and gd.equiv("R", q[1], img[1])):
                continue
            tested += 1
            if not any(si[q[1]][t] == img[1] and si[q[0]][t] == img[0]
                       for t in range(sat.size + 1)):
                return CheckResult("ZEIGER", False, "pre-Zeiger multiplier missing",
                                   _describe_chain(sat, q))
            if q[1] == img[1] and q[0] != img[0]:
                return CheckResult("ZEIGER", False, "last coordinate moved within its R-class",
                                   _describe_chain(sat, q))
    return CheckResult("ZEIGER", True, f"{len(chains)} chains, {tested} R-preserving images")


def verify_all(t: FiniteSemigroup, k: KernelFunctor, c: SaturationFamily,
               max_size: int = DEFAULT_MAX_SIZE, max_states: int = DEFAULT_MAX_STATES,
               chain_len: int = 3, chain_limit: int = 1500, seed: int = 0) -> VerificationReport:
    """Build ``S``, ``b``, the automaton and flow, then run all six checks."""
    sat = materialize_downclosure(c, k, max_size)
    checks: list[CheckResult] = []
    try:
        op = build_blowup(sat, k)
    except AxiomViolation as exc:
        checks.append(CheckResult("BLOWUP", False, str(exc), [exc.axiom, str(exc.witness)]))
        return VerificationReport(k.name, t.size, sat.size, 0, 0, checks)
    aut = build_automaton_and_flow(t, sat, op, max_states)
    chains = l_chains(sat, chain_len, chain_limit, seed)
    # reachable states are L-chains too and exercise the interesting region
    chains = sorted(set(chains) | {q for q in aut.states if q})

    checks.append(_timed("FLOW", lambda: check_flow(op, aut)))
    hbar_box = {}

    def hbar():
        result, size = check_hbar(op, aut, k)
        hbar_box["size"] = size
        return result
    checks.append(_timed("HBAR", hbar))
    checks.append(_timed("COMPLETE", lambda: check_complete(c, aut)))
    checks.append(_timed("BLOWUP", lambda: check_blowup(op, chains)))
    checks.append(_timed("RHO-RESPECT", lambda: check_rho_respect(op, chains)))
    checks.append(_timed("ZEIGER", lambda: check_zeiger(op, chains)))
    return VerificationReport(k.name, t.size, sat.size, aut.size,
                              hbar_box.get("size", 0), checks)
