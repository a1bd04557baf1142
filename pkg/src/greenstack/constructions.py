"""Semigroup- and automaton-level constructions used by the bound arguments.

Covers the three-element generating set of the full transformation monoid, the
J-class blow-up on three extra states, completion of a transformation
semigroup into a minimal automaton with a cyclic letter, the opposite
semigroup of injective generators, and the growing-alphabet token machine
whose canonical subset walk realizes the binomial lower bound.
"""

from __future__ import annotations

from dataclasses import dataclass
from itertools import combinations

from .machines import TokenMachine, Trace
from .semigroup import SemigroupTable, generate
from .transform import PartialTransformation, invert, is_injective

PT = PartialTransformation


# ---------------------------------------------------------------------------
# deterministic finite automata
# ---------------------------------------------------------------------------

def _fresh_name(base: str, taken) -> str:
    if base not in taken:
        return base
    k = 1
    while f"{base}{k}" in taken:
        k += 1
    return f"{base}{k}"


@dataclass
class Dfa:
    """Total-or-partial DFA; each letter doubles as a transformation of states."""

    state_count: int
    letters: list[str]
    maps: list[PartialTransformation]
    initial: int
    final: frozenset

    def __post_init__(self):
        for pt in self.maps:
            if pt.n != self.state_count:
                raise ValueError("letter map has wrong domain size")

    def step(self, state: int, letter_index: int):
        t = self.maps[letter_index].mapping[state]
        return None if t < 0 else t

    def transition_semigroup(self, cap: int | None = None) -> SemigroupTable:
        kwargs = {"cap": cap} if cap is not None else {}
        return generate(self.maps, gen_names=list(self.letters), **kwargs)


def reachable_states(dfa: Dfa) -> set[int]:
    seen = {dfa.initial}
    todo = [dfa.initial]
    while todo:
        q = todo.pop()
        for a in range(len(dfa.letters)):
            t = dfa.step(q, a)
            if t is not None and t not in seen:
                seen.add(t)
                todo.append(t)
    return seen


def minimize_partition(dfa: Dfa) -> list[set[int]]:
    """Moore partition refinement over the reachable part (undefined = sink)."""
    reachable = sorted(reachable_states(dfa))
    block_of = {q: (1 if q in dfa.final else 0) for q in reachable}
    while True:
        signatures = {}
        for q in reachable:
            sig = (block_of[q],)
            for a in range(len(dfa.letters)):
                t = dfa.step(q, a)
                sig += (block_of[t] if t in block_of else -1,)
            signatures.setdefault(sig, []).append(q)
        new_block_of = {}
        for b, (sig, members) in enumerate(sorted(signatures.items())):
            for q in members:
                new_block_of[q] = b
        if new_block_of == block_of:
            break
        block_of = new_block_of
    blocks: dict[int, set[int]] = {}
    for q, b in block_of.items():
        blocks.setdefault(b, set()).add(q)
    return list(blocks.values())


def is_minimal(dfa: Dfa) -> bool:
    """Every state reachable and no two states equivalent (Hopcroft fixed point)."""
    if len(reachable_states(dfa)) != dfa.state_count:
        return False
    return all(len(b) == 1 for b in minimize_partition(dfa))


# ---------------------------------------------------------------------------
# semigroup constructions
# ---------------------------------------------------------------------------

def full_transformation_generators(n: int) -> list[PartialTransformation]:
    """An n-cycle, the transposition (0 1), and the rank-(n-1) collapse n-1 -> 0;
    together they generate all n^n transformations."""
    if n < 2:
        raise ValueError("need at least two states")
    cycle = PT(n, [(i + 1) % n for i in range(n)])
    transposition = PT(n, [1, 0] + list(range(2, n)))
    collapse = PT(n, list(range(n - 1)) + [0])
    return [cycle, transposition, collapse]


def jclass_blowup(table: SemigroupTable, q0: int = 0):
    """Generators on n+3 states whose semigroup has at least |table| J-classes.

    The extra states q1, q2, q3 and the new letter c are wired so that for
    distinct elements u, v of the base semigroup the products cuc and cvc are
    J-incomparable.  Returns (generators, names) with c appended last.
    """
    n = table.domain_size
    if not 0 <= q0 < n:
        raise ValueError(f"q0 must be a base state, got {q0}")
    if any(not g.is_total() for g in table.gens):
        raise ValueError("blow-up requires total generators")
    q1, q2, q3 = n, n + 1, n + 2
    gens = []
    for g in table.gens:
        gens.append(PT(n + 3, list(g.mapping) + [q0, q2, q0]))
    gens.append(PT(n + 3, list(range(n)) + [q2, q3, q0]))
    names = list(table.gen_names) + [_fresh_name("c", table.gen_names)]
    return gens, names


def completion_automaton(table: SemigroupTable) -> Dfa:
    """Minimal automaton on n+1 states whose transition semigroup completely
    isolates the given total transformation semigroup.

    A new initial state q0 (index 0) is fixed by every original letter; the new
    letter c walks q0, q1, ..., qn cyclically back to q1; qn is final.
    """
    n = table.domain_size
    if any(not g.is_total() for g in table.gens):
        raise ValueError("completion requires total generators")
    maps = []
    for g in table.gens:
        maps.append(PT(n + 1, [0] + [t + 1 for t in g.mapping]))
    c = PT(n + 1, list(range(1, n + 1)) + [1])
    letters = list(table.gen_names) + [_fresh_name("c", table.gen_names)]
    return Dfa(n + 1, letters, maps + [c], initial=0, final=frozenset({n}))


def opposite(gens: list[PartialTransformation]) -> list[PartialTransformation]:
    """Inverses of injective generators; fg = h holds iff inv(g) inv(f) = inv(h)."""
    for g in gens:
        if not is_injective(g):
            raise ValueError("opposite semigroup requires injective generators")
    return [invert(g) for g in gens]


# ---------------------------------------------------------------------------
# growing-alphabet token machine
# ---------------------------------------------------------------------------

@dataclass
class GrowingMachine:
    """One instruction per consecutive pair of n/2-subsets in colex order."""

    n: int
    machine: TokenMachine
    subsets: list[tuple[int, ...]]

    def canonical_trace(self) -> Trace:
        word = [f"i{k}" for k in range(1, len(self.subsets))]
        start = sum(1 << c for c in self.subsets[0])
        return Trace.from_run(self.machine, start, word)


def growing_alphabet_machine(n: int) -> GrowingMachine:
    """Cells 0..n-1; instruction i_k is the order-preserving bijection from the
    (k-1)-th to the k-th n/2-subset in colex order, undefined elsewhere."""
    if n < 2 or n % 2:
        raise ValueError("need an even number of cells, at least 2")
    half = n // 2
    subsets = sorted(combinations(range(n), half),
                     key=lambda s: sum(1 << c for c in s))
    instructions = {}
    for k in range(1, len(subsets)):
        src, dst = subsets[k - 1], subsets[k]
        instructions[f"i{k}"] = PT.from_pairs(n, zip(src, dst))
    labels = tuple(f"c{i}" for i in range(n))
    return GrowingMachine(n, TokenMachine(labels, instructions), subsets)
