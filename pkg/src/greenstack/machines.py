"""Token machines: cells, configurations, computations and their calculus.

Cells carry namespaced string labels mapped once to dense indices; a
configuration is an int bitset over those indices, which keeps the cardinality
checks that dominate execution cheap.  Machines are immutable after
construction and safe to share.
"""

from __future__ import annotations

import json
import random
from dataclasses import dataclass

from .transform import UNDEF, PartialTransformation, compose


class TokenMachine:
    """A cell set plus named partial-transformation instructions.

    The instruction dict's insertion order is the machine's global instruction
    order; searches and checks iterate it deterministically.
    """

    def __init__(self, labels, instructions: dict[str, PartialTransformation]):
        self.labels = tuple(labels)
        if len(set(self.labels)) != len(self.labels):
            raise ValueError("duplicate cell labels")
        self.cell_count = len(self.labels)
        self.label_index = {lab: i for i, lab in enumerate(self.labels)}
        for name, pt in instructions.items():
            if pt.n != self.cell_count:
                raise ValueError(f"instruction {name!r} acts on {pt.n} cells, "
                                 f"machine has {self.cell_count}")
        self.instructions = dict(instructions)

    def instruction_table(self, name: str):
        return self.instructions[name].mapping

    def config_of(self, labels) -> int:
        config = 0
        for lab in labels:
            config |= 1 << self.label_index[lab]
        return config

    def labels_of(self, config: int) -> list[str]:
        return sorted(self.labels[i] for i in bits_of(config))

    def full_config(self) -> int:
        return (1 << self.cell_count) - 1

    def apply(self, config: int, name: str) -> int:
        """Pointwise image of the configuration; never grows."""
        try:
            table = self.instructions[name].mapping
        except KeyError:
            raise KeyError(f"unknown instruction {name!r}") from None
        out = 0
        bits = config
        while bits:
            low = bits & -bits
            t = table[low.bit_length() - 1]
            if t != UNDEF:
                out |= 1 << t
            bits ^= low
        return out

    def run(self, config: int, word) -> "Trace":
        return Trace.from_run(self, config, list(word))


def bits_of(config: int):
    while config:
        low = config & -config
        yield low.bit_length() - 1
        config ^= low


@dataclass
class Trace:
    """A start configuration, a word, and every intermediate configuration.

    configs[0] is the start; configs[i] = configs[i-1] . word[i-1].  The trace
    is a computation iff every configuration keeps the start's cardinality.
    """

    machine: TokenMachine
    start: int
    word: tuple[str, ...]
    configs: list[int]
    is_computation: bool

    @classmethod
    def from_run(cls, machine: TokenMachine, start: int, word) -> "Trace":
        configs = [start]
        target = start.bit_count()
        is_computation = True
        current = start
        for name in word:
            current = machine.apply(current, name)
            configs.append(current)
            if current.bit_count() != target:
                is_computation = False
        return cls(machine, start, tuple(word), configs, is_computation)

    def __len__(self):
        return len(self.word)

    @property
    def final(self) -> int:
        return self.configs[-1]

    def to_json(self) -> str:
        return json.dumps({
            "word": list(self.word),
            "configs": [self.machine.labels_of(c) for c in self.configs],
            "is_computation": self.is_computation,
        }, indent=2)


def apply(machine: TokenMachine, config: int, instr_name: str) -> int:
    return machine.apply(config, instr_name)


def run(machine: TokenMachine, config: int, word) -> Trace:
    return machine.run(config, word)


def check_progressing(machine: TokenMachine, trace: Trace) -> bool:
    """Configs pairwise distinct and every non-taken instruction drops strictly."""
    if not trace.is_computation:
        raise ValueError("trace is not a computation")
    if len(set(trace.configs)) != len(trace.configs):
        return False
    size = trace.start.bit_count()
    for i, taken in enumerate(trace.word):
        before = trace.configs[i]
        for name in machine.instructions:
            if name == taken:
                continue
            if machine.apply(before, name).bit_count() >= size:
                return False
    return True


def check_maximal(machine: TokenMachine, trace: Trace) -> bool:
    """Every instruction strictly shrinks the final configuration."""
    if not trace.is_computation:
        raise ValueError("trace is not a computation")
    final = trace.final
    size = final.bit_count()
    return all(machine.apply(final, name).bit_count() < size
               for name in machine.instructions)


def union(m1: TokenMachine, m2: TokenMachine) -> TokenMachine:
    """Disjoint union; shared instruction names act componentwise, names unique
    to one machine act as the identity on the other machine's cells."""
    overlap = set(m1.labels) & set(m2.labels)
    if overlap:
        raise ValueError(f"cell label collision: {sorted(overlap)}")
    labels = m1.labels + m2.labels
    n1, n2 = m1.cell_count, m2.cell_count
    n = n1 + n2

    def lift1(pt):
        return list(pt.mapping)

    def lift2(pt):
        return [UNDEF if t == UNDEF else t + n1 for t in pt.mapping]

    instructions: dict[str, PartialTransformation] = {}
    for name, pt in m1.instructions.items():
        if name in m2.instructions:
            mapping = lift1(pt) + lift2(m2.instructions[name])
        else:
            mapping = lift1(pt) + list(range(n1, n))
        instructions[name] = PartialTransformation(n, mapping)
    for name, pt in m2.instructions.items():
        if name in m1.instructions:
            continue
        instructions[name] = PartialTransformation(n, list(range(n1)) + lift2(pt))
    return TokenMachine(labels, instructions)


def union_all(machines) -> TokenMachine:
    out = None
    for m in machines:
        out = m if out is None else union(out, m)
    if out is None:
        raise ValueError("empty machine list")
    return out


def drop_instructions(machine: TokenMachine, names) -> TokenMachine:
    keep = {k: v for k, v in machine.instructions.items() if k not in set(names)}
    return TokenMachine(machine.labels, keep)


def add_instructions(machine: TokenMachine, extra: dict[str, PartialTransformation]) -> TokenMachine:
    merged = dict(machine.instructions)
    for name, pt in extra.items():
        if name in merged:
            raise ValueError(f"instruction {name!r} already exists")
        merged[name] = pt
    return TokenMachine(machine.labels, merged)


def compose_instruction(machine: TokenMachine, word) -> PartialTransformation:
    """One partial transformation equal to applying the word's instructions in order."""
    out = PartialTransformation.identity(machine.cell_count)
    for name in word:
        if name not in machine.instructions:
            raise KeyError(f"unknown instruction {name!r}")
        out = compose(out, machine.instructions[name])
    return out


def check_submachine(machine: TokenMachine, cells: int, samples: int = 2000,
                     seed: int = 0, exhaustive: bool | None = None) -> bool:
    """Computations stay computations when restricted to the `cells` subset.

    For every cardinality-preserving step, the image of the restricted
    configuration must equal the restriction of the image: no token may cross
    the subset boundary.  (Preserving steps are injective and defined on the
    whole configuration, so comparing cardinalities alone would hold for any
    subset and check nothing.)  Exhaustive over all configurations when the
    machine has at most 16 cells, sampled otherwise.
    """
    if exhaustive is None:
        exhaustive = machine.cell_count <= 16
    names = list(machine.instructions)

    def ok(config):
        restricted = config & cells
        for name in names:
            image = machine.apply(config, name)
            if image.bit_count() != config.bit_count():
                continue
            if machine.apply(restricted, name) != image & cells:
                return False
        return True

    if exhaustive:
        return all(ok(config) for config in range(1 << machine.cell_count))
    rng = random.Random(seed)
    top = machine.full_config()
    return all(ok(rng.randrange(top + 1)) for _ in range(samples))


def rchain_words(trace: Trace) -> list[tuple[str, ...]]:
    """Prefix words of a maximal progressing computation; they form a strict
    R-chain in the partial transformation semigroup generated by the
    instructions, so the R-height is at least the computation's length."""
    machine = trace.machine
    if not (check_progressing(machine, trace) and check_maximal(machine, trace)):
        raise ValueError("trace must be a maximal progressing computation")
    return [trace.word[:i] for i in range(1, len(trace.word) + 1)]


def maximal_progressing_computation(machine: TokenMachine, start: int) -> Trace | None:
    """The unique maximal progressing computation from `start`, if any.

    Along a progressing computation every step is forced (all alternatives must
    drop cardinality), so the search is a single chain: follow the unique
    preserving instruction while configurations stay fresh; the chain is a
    maximal progressing computation iff it ends with no preserving instruction.
    """
    size = start.bit_count()
    word = []
    seen = {start}
    current = start
    while True:
        preserving = [(name, machine.apply(current, name))
                      for name in machine.instructions
                      if machine.apply(current, name).bit_count() == size]
        if not preserving:
            return Trace.from_run(machine, start, word)
        if len(preserving) > 1:
            return None
        name, nxt = preserving[0]
        if nxt in seen:
            return None
        seen.add(nxt)
        word.append(name)
        current = nxt
