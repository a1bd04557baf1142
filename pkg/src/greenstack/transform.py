"""Partial transformations of a finite state set {0, ..., n-1}.

A partial transformation is stored as a tuple of length n whose entry i is
either a state index or UNDEF.  Values are immutable and hashable, so they can
be deduplicated in sets and dicts and shared freely between workers.
"""

from __future__ import annotations

from typing import Iterable

UNDEF = -1


class PartialTransformation:
    """A partial self-map of {0, ..., n-1}; composition applies left-to-right."""

    __slots__ = ("n", "mapping")

    def __init__(self, n: int, mapping: Iterable[int]):
        mapping = tuple(mapping)
        if len(mapping) != n:
            raise ValueError(f"mapping has {len(mapping)} entries, expected {n}")
        for q, t in enumerate(mapping):
            if t != UNDEF and not 0 <= t < n:
                raise ValueError(f"entry {q} maps to {t}, outside [0, {n})")
        object.__setattr__(self, "n", n)
        object.__setattr__(self, "mapping", mapping)

    def __setattr__(self, name, value):
        raise AttributeError("PartialTransformation is immutable")

    @classmethod
    def identity(cls, n: int) -> "PartialTransformation":
        return cls(n, range(n))

    @classmethod
    def constant(cls, n: int, q: int) -> "PartialTransformation":
        return cls(n, [q] * n)

    @classmethod
    def from_pairs(cls, n: int, pairs: Iterable[tuple[int, int]]) -> "PartialTransformation":
        """Build from (source, target) pairs; unmentioned states are undefined."""
        m = [UNDEF] * n
        for q, t in pairs:
            m[q] = t
        return cls(n, m)

    @classmethod
    def from_text(cls, text: str) -> "PartialTransformation":
        """Parse the space-separated text form, `-` meaning undefined, e.g. `2 - 0`."""
        entries = []
        for tok in text.split():
            entries.append(UNDEF if tok == "-" else int(tok))
        return cls(len(entries), entries)

    def to_text(self) -> str:
        return " ".join("-" if t == UNDEF else str(t) for t in self.mapping)

    def __call__(self, q: int) -> int | None:
        t = self.mapping[q]
        return None if t == UNDEF else t

    def __eq__(self, other):
        if not isinstance(other, PartialTransformation):
            return NotImplemented
        return self.n == other.n and self.mapping == other.mapping

    def __hash__(self):
        return hash(self.mapping)

    def __repr__(self):
        return f"PartialTransformation({self.n}, {self.to_text()!r})"

    def __mul__(self, other):
        if isinstance(other, PartialTransformation):
            return compose(self, other)
        return NotImplemented

    def domain(self) -> set[int]:
        return {q for q, t in enumerate(self.mapping) if t != UNDEF}

    def image_set(self) -> set[int]:
        return {t for t in self.mapping if t != UNDEF}

    def is_total(self) -> bool:
        return UNDEF not in self.mapping

    def rank(self) -> int:
        return len(self.image_set())


def compose(f: PartialTransformation, g: PartialTransformation) -> PartialTransformation:
    """fg: apply f first, then g; undefined wherever either step is."""
    if f.n != g.n:
        raise ValueError(f"domain sizes differ: {f.n} vs {g.n}")
    gm = g.mapping
    return PartialTransformation(
        f.n, [UNDEF if t == UNDEF else gm[t] for t in f.mapping]
    )


def image(f: PartialTransformation, states: Iterable[int]) -> set[int]:
    """The set {q . f : q in states, q . f defined}; never larger than states."""
    m = f.mapping
    return {m[q] for q in states if m[q] != UNDEF}


def is_injective(f: PartialTransformation) -> bool:
    seen = set()
    for t in f.mapping:
        if t == UNDEF:
            continue
        if t in seen:
            return False
        seen.add(t)
    return True


def invert(f: PartialTransformation) -> PartialTransformation:
    """Inverse of an injective map: defined on image(f), sends q.f back to q."""
    if not is_injective(f):
        raise ValueError("cannot invert a non-injective transformation")
    m = [UNDEF] * f.n
    for q, t in enumerate(f.mapping):
        if t != UNDEF:
            m[t] = q
    return PartialTransformation(f.n, m)


def totalize(gens: list[PartialTransformation]) -> list[PartialTransformation]:
    """Extend partial generators to total ones on n+1 states with a new sink.

    Every undefined value is redirected to the new state n, which is fixed by
    all generators; the generated semigroup is isomorphic to the original one.
    """
    if not gens:
        raise ValueError("empty generator list")
    n = gens[0].n
    out = []
    for g in gens:
        if g.n != n:
            raise ValueError("generators have mixed domain sizes")
        out.append(
            PartialTransformation(n + 1, [n if t == UNDEF else t for t in g.mapping] + [n])
        )
    return out
