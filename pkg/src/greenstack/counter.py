"""n-bit tapes and binary counters with their instruction sets and languages.

A tape is a ring buffer of cells with the head fixed at position 0; rotations
move the content instead of the head.  A binary counter synchronizes three
tapes: S carries the head marker (cells d_i), T the value bits (c_i) and ovT
their complements, and exposes exactly eight composite instructions; the raw
tape instructions are removed.  Instruction names are globally namespaced
(`P.inc`, `Q.rotr`, ...) so several counters can live in one machine.
"""

from __future__ import annotations

from dataclasses import dataclass, field

from .machines import TokenMachine, add_instructions, compose_instruction, drop_instructions, union_all
from .programs import ProgramExpr, alt, atom, opt, plus, seq, star
from .transform import UNDEF, PartialTransformation


@dataclass(frozen=True)
class Tape:
    """A ring-buffer tape bound into a TokenMachine with its six instructions."""

    name: str
    n: int
    machine: TokenMachine = field(compare=False)
    cell_labels: tuple = ()

    def instr(self, op: str) -> str:
        return f"{self.name}.{op}"


def make_tape(n: int, name: str, cell_letter: str = "c") -> Tape:
    """The six tape instructions on cells `{name}.{cell_letter}{i}`.

    rotl/rotr rotate the buffer (mutually inverse permutations); eq0 asserts
    the head cell is empty, sync that it is occupied; mvl moves the head token
    one cell left, mvr one cell right (both undefined on an occupied target;
    degenerate empty maps on a single-cell tape, where c1 does not exist).
    """
    if n < 1:
        raise ValueError("tape needs at least one cell")
    labels = tuple(f"{name}.{cell_letter}{i}" for i in range(n))

    def build(pairs):
        return PartialTransformation.from_pairs(n, pairs)

    rotl = build([(i, (i + 1) % n) for i in range(n)])
    rotr = build([(i, (i - 1) % n) for i in range(n)])
    eq0 = build([(i, i) for i in range(1, n)])
    sync = build([(0, 0)])
    if n == 1:
        mvl = build([])
        mvr = build([])
    else:
        mvl = build([(0, 1)] + [(i, i) for i in range(2, n)])
        mvr = build([(0, n - 1)] + [(i, i) for i in range(1, n - 1)])

    machine = TokenMachine(labels, {
        f"{name}.rotl": rotl,
        f"{name}.rotr": rotr,
        f"{name}.eq0": eq0,
        f"{name}.sync": sync,
        f"{name}.mvl": mvl,
        f"{name}.mvr": mvr,
    })
    return Tape(name, n, machine, labels)


def tape_value(tape: Tape, config: int, machine: TokenMachine | None = None) -> int:
    """Sum of 2^i over occupied cells c_i."""
    machine = machine or tape.machine
    value = 0
    for i, lab in enumerate(tape.cell_labels):
        if config >> machine.label_index[lab] & 1:
            value += 1 << i
    return value


@dataclass(frozen=True)
class Counter:
    """Three synchronized tapes with the eight counter instructions."""

    name: str
    n: int
    machine: TokenMachine = field(compare=False)
    d_labels: tuple = ()
    c_labels: tuple = ()
    ovc_labels: tuple = ()

    def instr(self, op: str) -> str:
        return f"{self.name}.{op}"

    def val_name(self, k: int) -> str:
        return f"{self.name}.val{k}"

    INSTRUCTION_OPS = ("rotl", "rotr", "eq0", "eq1", "sync", "off", "inc", "dec")


def make_counter(n: int, name: str) -> Counter:
    """Union of tapes S, T, ovT plus the eight composite instructions."""
    if n < 1:
        raise ValueError("counter needs at least one bit")
    s_tape = make_tape(n, f"{name}.S", cell_letter="d")
    t_tape = make_tape(n, f"{name}.T")
    ov_tape = make_tape(n, f"{name}.ovT")
    u = union_all([s_tape.machine, t_tape.machine, ov_tape.machine])

    def comp(*words):
        return compose_instruction(u, words)

    c0 = u.label_index[t_tape.cell_labels[0]]
    ovc0 = u.label_index[ov_tape.cell_labels[0]]
    inc_map = [i for i in range(u.cell_count)]
    inc_map[c0] = UNDEF
    inc_map[ovc0] = c0
    dec_map = [i for i in range(u.cell_count)]
    dec_map[ovc0] = UNDEF
    dec_map[c0] = ovc0

    composite = {
        f"{name}.rotl": comp(t_tape.instr("rotl"), ov_tape.instr("rotl"), s_tape.instr("rotl")),
        f"{name}.rotr": comp(t_tape.instr("rotr"), ov_tape.instr("rotr"), s_tape.instr("rotr")),
        f"{name}.eq0": comp(t_tape.instr("eq0")),
        f"{name}.eq1": comp(ov_tape.instr("eq0")),
        f"{name}.sync": comp(s_tape.instr("sync")),
        f"{name}.off": comp(s_tape.instr("eq0")),
        f"{name}.inc": PartialTransformation(u.cell_count, inc_map),
        f"{name}.dec": PartialTransformation(u.cell_count, dec_map),
    }
    machine = add_instructions(drop_instructions(u, list(u.instructions)), composite)
    return Counter(name, n, machine, s_tape.cell_labels, t_tape.cell_labels,
                   ov_tape.cell_labels)


def _indices(counter: Counter, machine: TokenMachine):
    ix = machine.label_index
    return ([ix[l] for l in counter.d_labels],
            [ix[l] for l in counter.c_labels],
            [ix[l] for l in counter.ovc_labels])


def is_valid(counter: Counter, config: int, machine: TokenMachine | None = None) -> bool:
    """Exactly one head marker and exactly one of c_i / ovc_i per bit."""
    machine = machine or counter.machine
    d_ix, c_ix, ov_ix = _indices(counter, machine)
    if sum(config >> i & 1 for i in d_ix) != 1:
        return False
    return all((config >> c & 1) != (config >> o & 1) for c, o in zip(c_ix, ov_ix))


def counter_value(counter: Counter, config: int, machine: TokenMachine | None = None) -> int:
    machine = machine or counter.machine
    if not is_valid(counter, config, machine):
        raise ValueError(f"invalid configuration for counter {counter.name}")
    d_ix, c_ix, _ = _indices(counter, machine)
    return sum(1 << bit for bit, i in enumerate(c_ix) if config >> i & 1)


def is_synchronized(counter: Counter, config: int, machine: TokenMachine | None = None) -> bool:
    machine = machine or counter.machine
    if not is_valid(counter, config, machine):
        raise ValueError(f"invalid configuration for counter {counter.name}")
    return bool(config >> machine.label_index[counter.d_labels[0]] & 1)


def config_for(counter: Counter, value: int, head: int = 0,
               machine: TokenMachine | None = None) -> int:
    """The valid configuration with the given value and head marker position."""
    machine = machine or counter.machine
    if not 0 <= value < (1 << counter.n):
        raise ValueError(f"value {value} out of range for {counter.n} bits")
    d_ix, c_ix, ov_ix = _indices(counter, machine)
    config = 1 << d_ix[head]
    for bit in range(counter.n):
        config |= 1 << (c_ix[bit] if value >> bit & 1 else ov_ix[bit])
    return config


def valid_configs(counter: Counter, machine: TokenMachine | None = None):
    """All n * 2^n valid configurations of the counter's own cells."""
    for head in range(counter.n):
        for value in range(1 << counter.n):
            yield config_for(counter, value, head, machine)


def ival(counter: Counter, k: int, machine: TokenMachine | None = None) -> PartialTransformation:
    """Partial identity asserting the counter value equals k.

    Keeps c_i and kills ovc_i where bit i of k is set, symmetrically otherwise;
    acts as the identity on the head tape and on all cells outside the counter
    (the conservative extension consistent with machine unions).
    """
    machine = machine or counter.machine
    if not 0 <= k < (1 << counter.n):
        raise ValueError(f"value {k} out of range for {counter.n} bits")
    _, c_ix, ov_ix = _indices(counter, machine)
    mapping = list(range(machine.cell_count))
    for bit in range(counter.n):
        if k >> bit & 1:
            mapping[ov_ix[bit]] = UNDEF
        else:
            mapping[c_ix[bit]] = UNDEF
    return PartialTransformation(machine.cell_count, mapping)


def program_reset(counter: Counter) -> ProgramExpr:
    """sync ((eq0 | dec) rotr off)* (eq0 | dec) rotr sync"""
    sync, eq0, dec = (atom(counter.instr(op)) for op in ("sync", "eq0", "dec"))
    rotr, off = atom(counter.instr("rotr")), atom(counter.instr("off"))
    return seq(sync, star(seq(alt(eq0, dec), rotr, off)), alt(eq0, dec), rotr, sync)


def program_inc(counter: Counter) -> ProgramExpr:
    """sync (dec rotr off)* inc (off rotr)* sync"""
    sync, dec, rotr = (atom(counter.instr(op)) for op in ("sync", "dec", "rotr"))
    off, inc = atom(counter.instr("off")), atom(counter.instr("inc"))
    return seq(sync, star(seq(dec, rotr, off)), inc, star(seq(off, rotr)), sync)


def program_dec(counter: Counter) -> ProgramExpr:
    """sync (inc rotr off)* dec (off rotr)* sync"""
    sync, inc, rotr = (atom(counter.instr(op)) for op in ("sync", "inc", "rotr"))
    off, dec = atom(counter.instr("off")), atom(counter.instr("dec"))
    return seq(sync, star(seq(inc, rotr, off)), dec, star(seq(off, rotr)), sync)
