"""The fixed-alphabet subset enumerator: machine U, language L, control unit, V.

U is an n-cell tape T unioned with three ceil(log2 n)-bit counters: P tracks
the head position, Q and Z are volatile scratch counters for the bit test
L_eq1.  The language L drives the enumeration of all n/2-subsets in successor
order; its minimal DFA, with the sink removed and states split until every
letter acts injectively, becomes the control-unit token machine whose single
token dies on any word that is not a prefix of L.  V is the union of U and the
control unit; running L on V's initial configuration yields a computation of
length at least C(n, n/2).
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

from .counter import (
    Counter,
    Tape,
    config_for,
    counter_value,
    is_synchronized,
    is_valid,
    ival,
    make_counter,
    make_tape,
    program_dec,
    program_inc,
    program_reset,
)
from .machines import TokenMachine, Trace, add_instructions, drop_instructions, union, union_all
from .programs import (
    BudgetExceeded,
    ProgramAutomaton,
    ProgramExpr,
    alt,
    atom,
    compile_program,
    deterministic_run,
    opt,
    plus,
    seq,
    star,
)
from .transform import UNDEF, PartialTransformation

DEFAULT_SPLIT_BUDGET = 100_000


# ---------------------------------------------------------------------------
# successor sequence
# ---------------------------------------------------------------------------

def successor(x: str) -> str | None:
    """Rewrite p 0 1^i 0^j  ->  p 1 0^{j+1} 1^{i-1}; None when impossible."""
    last_one = x.rfind("1")
    if last_one == -1:
        return None
    j = len(x) - 1 - last_one
    k = last_one
    while k >= 0 and x[k] == "1":
        k -= 1
    if k < 0:
        return None
    i = last_one - k
    return x[:k] + "1" + "0" * (j + 1) + "1" * (i - 1)


def successor_sequence(n: int, m: int) -> list[str]:
    """All C(n, m) weight-m strings from 0^{n-m} 1^m up to 1^m 0^{n-m}."""
    if not 0 <= m <= n:
        raise ValueError(f"need 0 <= m <= n, got m={m}, n={n}")
    current = "0" * (n - m) + "1" * m
    out = [current]
    while True:
        nxt = successor(current)
        if nxt is None:
            return out
        out.append(nxt)
        current = nxt


# ---------------------------------------------------------------------------
# the machine U and its languages
# ---------------------------------------------------------------------------

@dataclass
class EnumeratorMachine:
    """U (and later V) plus every language and automaton of the construction."""

    n: int
    counter_bits: int
    tape: Tape
    P: Counter
    Q: Counter
    Z: Counter
    U: TokenMachine
    exprs: dict = field(default_factory=dict)
    automata: dict = field(default_factory=dict)
    control_unit: TokenMachine | None = None
    split_count: int = 0
    V: TokenMachine | None = None
    initial_config: int | None = None

    @property
    def instruction_count(self) -> int:
        return len(self.U.instructions)


def build_U(n: int) -> EnumeratorMachine:
    """Tape T(n) unioned with counters P, Q, Z plus the four value assertions.

    The tape's sync instruction is excluded from the instruction set (the
    construction never uses it); with ival(0) and ival(n-1) on P, ival(n-1) on
    Q and ival(n/2) on Z the machine exposes 33 named instructions.
    """
    if n < 2 or n % 2:
        raise ValueError("n must be even and at least 2")
    bits = max(1, math.ceil(math.log2(n)))
    tape = make_tape(n, "T")
    P, Q, Z = (make_counter(bits, name) for name in "PQZ")
    u = union_all([drop_instructions(tape.machine, ["T.sync"]),
                   P.machine, Q.machine, Z.machine])
    u = add_instructions(u, {
        P.val_name(0): ival(P, 0, u),
        P.val_name(n - 1): ival(P, n - 1, u),
        Q.val_name(n - 1): ival(Q, n - 1, u),
        Z.val_name(n // 2): ival(Z, n // 2, u),
    })
    em = EnumeratorMachine(n, bits, tape, P, Q, Z, u)
    em.exprs["eq1"] = program_eq1(em)
    em.exprs["rotl"] = seq(program_dec(P), atom("T.rotl"))
    em.exprs["rotr"] = seq(program_inc(P), atom("T.rotr"))
    em.exprs["L"] = program_L(em)
    return em


def program_eq1(em: EnumeratorMachine) -> ProgramExpr:
    """rotr_T ((eps | eq0_T L_inc^Z) rotr_T L_inc^Q)* val(n-1)^Q val(n/2)^Z
    L_reset^Q L_reset^Z: cardinality-preserving iff the bit under T's head is 1."""
    n = em.n
    rotr_t, eq0_t = atom("T.rotr"), atom("T.eq0")
    return seq(
        rotr_t,
        star(seq(opt(seq(eq0_t, program_inc(em.Z))), rotr_t, program_inc(em.Q))),
        atom(em.Q.val_name(n - 1)),
        atom(em.Z.val_name(n // 2)),
        program_reset(em.Q),
        program_reset(em.Z),
    )


def program_L(em: EnumeratorMachine) -> ProgramExpr:
    """The full enumeration language over U's instruction names."""
    n = em.n
    eq1 = em.exprs["eq1"]
    rotl = em.exprs["rotl"]
    rotr = em.exprs["rotr"]
    eq0_t, mvl_t, mvr_t = atom("T.eq0"), atom("T.mvl"), atom("T.mvr")
    val0_p = atom(em.P.val_name(0))
    l1 = seq(alt(val0_p, seq(rotl, eq0_t, rotr)),
             rotr, star(seq(eq1, rotr)), eq0_t, rotl)
    l2 = seq(plus(seq(rotl, eq1)), val0_p, plus(seq(eq1, rotr)), eq0_t, rotl)
    k1 = seq(eq0_t, rotl, star(seq(mvr_t, rotl)), val0_p)
    k2 = seq(eq1, rotl, star(seq(mvr_t, rotl)), val0_p,
             rotr, star(seq(eq0_t, rotr)), eq1, rotr)
    k3 = seq(eq1, rotl, star(seq(mvr_t, rotl)), rotl, eq1, rotr,
             rotr, star(seq(eq0_t, rotr)), eq1, rotr)
    k4 = seq(eq0_t, rotl, star(seq(mvr_t, rotl)), rotl, eq1, rotr)
    l3 = seq(plus(seq(rotl, eq1)), rotl, eq0_t, rotr, rotr,
             alt(k1, seq(k2, star(k3), k4)))
    em.exprs.update({"L1": l1, "L2": l2, "L3": l3,
                     "K1": k1, "K2": k2, "K3": k3, "K4": k4})
    return seq(
        program_reset(em.P), program_reset(em.Q), program_reset(em.Z),
        star(seq(eq1, rotr)), eq0_t, rotl,
        star(seq(mvl_t, alt(l1, l2, l3))),
        atom(em.P.val_name(n - 1)),
    )


# ---------------------------------------------------------------------------
# control unit
# ---------------------------------------------------------------------------

def build_control_unit(dfa: ProgramAutomaton, budget: int = DEFAULT_SPLIT_BUDGET):
    """Token machine from the minimal DFA of L: split states until every letter
    acts injectively.

    States are processed in BFS order from the initial state; at a conflict the
    in-edge from the larger-index source moves to a fresh copy carrying a
    snapshot of the state's out-edges.  A word keeps the single token alive iff
    it is a prefix of a word in L.  Returns (machine, split_count).
    """
    transitions = [dict(row) for row in dfa.transitions]
    initial = dfa.initial
    if initial is None:
        raise ValueError("control unit needs a nonempty language")
    letters = list(dfa.alphabet)
    splits = 0

    while True:
        changed = False
        bfs = [initial]
        seen = {initial}
        pos = 0
        while pos < len(bfs):
            q = bfs[pos]
            pos += 1
            for letter in letters:
                t = transitions[q].get(letter)
                if t is not None and t not in seen:
                    seen.add(t)
                    bfs.append(t)

        in_edges: dict[tuple[int, str], list[int]] = {}
        for q in range(len(transitions)):
            for letter, t in transitions[q].items():
                in_edges.setdefault((t, letter), []).append(q)

        for q in bfs:
            for letter in letters:
                sources = in_edges.get((q, letter))
                if not sources or len(sources) < 2:
                    continue
                sources.sort()
                while len(sources) > 1:
                    source = sources.pop()
                    copy = len(transitions)
                    transitions.append(dict(transitions[q]))  # snapshot out-edges
                    transitions[source][letter] = copy
                    for out_letter, out_t in transitions[copy].items():
                        in_edges.setdefault((out_t, out_letter), []).append(copy)
                    splits += 1
                    if splits > budget:
                        raise BudgetExceeded(budget, context="control-unit splitting")
                    changed = True
        if not changed:
            break

    labels = tuple(f"CU.q{i}" for i in range(len(transitions)))
    instructions = {}
    for letter in letters:
        mapping = [transitions[q].get(letter, UNDEF) for q in range(len(transitions))]
        instructions[letter] = PartialTransformation(len(transitions), mapping)
    return TokenMachine(labels, instructions), splits


def control_unit_keeps_prefixes(machine: TokenMachine, dfa: ProgramAutomaton,
                                word) -> bool:
    """Token survival on `word` must match prefix-of-L membership in the DFA."""
    config = machine.config_of(["CU.q" + str(0)])
    state = dfa.initial
    for letter in word:
        config = machine.apply(config, letter)
        state = dfa.transitions[state].get(letter) if state is not None else None
        if (config.bit_count() == 1) != (state is not None):
            return False
    return True


# ---------------------------------------------------------------------------
# machine V and the enumeration run
# ---------------------------------------------------------------------------

def build_V(n: int, split_budget: int = DEFAULT_SPLIT_BUDGET) -> EnumeratorMachine:
    """Union of U with the control unit; initial configuration encodes
    0^{n/2} 1^{n/2} with all three counters synchronized at zero plus the
    control token."""
    em = build_U(n)
    alphabet = list(em.U.instructions)
    dfa = compile_program(em.exprs["L"], alphabet)
    em.automata["L"] = dfa
    cu, em.split_count = build_control_unit(dfa, split_budget)
    em.control_unit = cu
    em.V = union(em.U, cu)

    config = 0
    for i in range(n // 2):
        config |= 1 << em.V.label_index[f"T.c{i}"]
    for counter in (em.P, em.Q, em.Z):
        config |= config_for(counter, 0, machine=em.V)
    config |= 1 << em.V.label_index["CU.q0"]
    em.initial_config = config
    return em


def run_enumeration(n: int, budget: int | None = None,
                    em: EnumeratorMachine | None = None) -> Trace:
    """deterministic_run of L on V's initial configuration.

    Not finding a word falsifies the construction, so it raises instead of
    returning None; budget overruns propagate as BudgetExceeded.
    """
    if em is None:
        em = build_V(n)
    trace = deterministic_run(em.V, em.initial_config, em.automata["L"], budget)
    if trace is None:
        raise RuntimeError(
            f"enumeration failed: no cardinality-preserving word of L on the "
            f"initial configuration at n={n}; the construction is broken")
    if not trace.is_computation:
        raise RuntimeError("enumeration returned a non-computation trace")
    return trace


def decode_encoding(em: EnumeratorMachine, config: int) -> str:
    """Bit string b_{n-1} ... b_0 with b_{(i+v) mod n} = 1 iff cell t_i is set,
    where v is the value of counter P."""
    machine = em.V if em.V is not None else em.U
    for counter in (em.P, em.Q, em.Z):
        if not is_valid(counter, config, machine):
            raise ValueError(f"counter {counter.name} invalid at decode time")
    v = counter_value(em.P, config, machine)
    n = em.n
    bits = ["0"] * n
    for i in range(n):
        if config >> machine.label_index[f"T.c{i}"] & 1:
            bits[(i + v) % n] = "1"
    return "".join(reversed(bits))


def encodings_of_trace(em: EnumeratorMachine, trace: Trace) -> list[str]:
    """Encodings at the head-parked checkpoints: the start, the configuration
    immediately before each T.mvl, and the end; consecutive repeats collapse."""
    checkpoints = [trace.configs[0]]
    for i, name in enumerate(trace.word):
        if name == "T.mvl":
            checkpoints.append(trace.configs[i])
    checkpoints.append(trace.configs[-1])
    out: list[str] = []
    for config in checkpoints:
        code = decode_encoding(em, config)
        if not out or out[-1] != code:
            out.append(code)
    return out
