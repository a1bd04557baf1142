"""Closure of a generator set under composition, with both Cayley graphs.

Generation is a breadth-first right-multiplication closure; the BFS order
(shortlex by generator index) makes element indices and witness words
deterministic.  Left edges are filled in a second pass once the element set is
known, since right closure alone already determines it.
"""

from __future__ import annotations

import struct

from .transform import UNDEF, PartialTransformation, compose

DEFAULT_CAP = 5_000_000

_CACHE_MAGIC = b"GSTB"
_CACHE_VERSION = 1


class CapExceeded(Exception):
    """Raised when closure would exceed the element cap; carries the partial count."""

    def __init__(self, cap: int, found: int):
        super().__init__(f"element cap {cap} exceeded ({found} elements found so far)")
        self.cap = cap
        self.found = found


class SemigroupTable:
    """Deduplicated elements of a generated semigroup plus its Cayley edges.

    right_edges[i][a] is the index of elements[i] * gens[a] and left_edges[i][a]
    the index of gens[a] * elements[i]; witness[i] is the shortlex-first
    generator word evaluating to elements[i].  Tables are immutable once built.
    """

    def __init__(self, gens, gen_names, elements, witness, right_edges, left_edges, index):
        self.gens = gens
        self.gen_names = gen_names
        self.elements = elements
        self.witness = witness
        self.right_edges = right_edges
        self.left_edges = left_edges
        self.index = index
        self.domain_size = gens[0].n
        self.gen_count = len(gens)

    def __len__(self):
        return len(self.elements)

    def lookup(self, pt: PartialTransformation) -> int | None:
        return self.index.get(pt.mapping)

    def element_of_word(self, word) -> PartialTransformation:
        """Evaluate a generator-index word left to right."""
        out = PartialTransformation.identity(self.domain_size)
        for a in word:
            out = compose(out, self.gens[a])
        return out

    def witness_text(self, i: int) -> str:
        return " ".join(self.gen_names[a] for a in self.witness[i])

    def s1_view(self) -> "S1View":
        return adjoin_identity_virtually(self)


def generate(gens: list[PartialTransformation], cap: int = DEFAULT_CAP,
             gen_names: list[str] | None = None) -> SemigroupTable:
    """BFS closure of gens under right multiplication, then a left-edge pass."""
    if not gens:
        raise ValueError("empty generator list")
    n = gens[0].n
    for g in gens:
        if g.n != n:
            raise ValueError("generators have mixed domain sizes")
    if gen_names is None:
        gen_names = [f"g{a}" for a in range(len(gens))]
    if len(gen_names) != len(gens):
        raise ValueError("gen_names length does not match gens")

    elements: list[PartialTransformation] = []
    witness: list[tuple[int, ...]] = []
    index: dict[tuple, int] = {}
    for a, g in enumerate(gens):
        if g.mapping not in index:
            index[g.mapping] = len(elements)
            elements.append(g)
            witness.append((a,))
    if len(elements) > cap:
        raise CapExceeded(cap, len(elements))

    k = len(gens)
    right_edges: list[list[int]] = []
    i = 0
    while i < len(elements):
        s = elements[i]
        row = []
        for a in range(k):
            t = compose(s, gens[a])
            j = index.get(t.mapping)
            if j is None:
                j = len(elements)
                if j >= cap:
                    raise CapExceeded(cap, j)
                index[t.mapping] = j
                elements.append(t)
                witness.append(witness[i] + (a,))
            row.append(j)
        right_edges.append(row)
        i += 1

    left_edges = []
    for s in elements:
        left_edges.append([index[compose(gens[a], s).mapping] for a in range(k)])

    return SemigroupTable(list(gens), list(gen_names), elements, witness,
                          right_edges, left_edges, index)


class S1View:
    """Reachability queries over a table with S^1 semantics (empty word allowed).

    The neutral element is never materialized: s <=_K s holds for every element
    because the empty word is a legal multiplier.
    """

    def __init__(self, table: SemigroupTable):
        self.table = table

    def _succ(self, i: int, kind: str):
        if kind == "R":
            return self.table.right_edges[i]
        if kind == "L":
            return self.table.left_edges[i]
        if kind == "J":
            return self.table.right_edges[i] + self.table.left_edges[i]
        raise ValueError(f"unknown relation kind {kind!r}")

    def ideal(self, t: int, kind: str) -> set[int]:
        """All s with s <= t: reachable set from t in the chosen Cayley graph."""
        seen = {t}
        todo = [t]
        while todo:
            u = todo.pop()
            for v in self._succ(u, kind):
                if v not in seen:
                    seen.add(v)
                    todo.append(v)
        return seen

    def leq(self, s: int, t: int, kind: str) -> bool:
        return s == t or s in self.ideal(t, kind)


def adjoin_identity_virtually(table: SemigroupTable) -> S1View:
    return S1View(table)


def save_table(table: SemigroupTable, path: str) -> None:
    """Binary cache, little-endian.

    Layout: magic 'GSTB', u32 version, u32 n, u32 gen_count, u64 element count;
    generator mappings (gen_count * n * i32, UNDEF = -1); newline-joined
    generator names (u32 byte length + bytes); element mappings (m * n * i32);
    witnesses (per element: u32 length + that many u32 generator indices);
    right edges then left edges (m * gen_count * u32 each).
    """
    m = len(table.elements)
    n = table.domain_size
    k = table.gen_count
    with open(path, "wb") as fh:
        fh.write(_CACHE_MAGIC)
        fh.write(struct.pack("<IIIQ", _CACHE_VERSION, n, k, m))
        for g in table.gens:
            fh.write(struct.pack(f"<{n}i", *g.mapping))
        names = "\n".join(table.gen_names).encode()
        fh.write(struct.pack("<I", len(names)))
        fh.write(names)
        for e in table.elements:
            fh.write(struct.pack(f"<{n}i", *e.mapping))
        for w in table.witness:
            fh.write(struct.pack("<I", len(w)))
            if w:
                fh.write(struct.pack(f"<{len(w)}I", *w))
        for row in table.right_edges:
            fh.write(struct.pack(f"<{k}I", *row))
        for row in table.left_edges:
            fh.write(struct.pack(f"<{k}I", *row))


def load_table(path: str) -> SemigroupTable:
    with open(path, "rb") as fh:
        if fh.read(4) != _CACHE_MAGIC:
            raise ValueError(f"{path}: not a greenstack table cache")
        version, n, k, m = struct.unpack("<IIIQ", fh.read(20))
        if version != _CACHE_VERSION:
            raise ValueError(f"{path}: unsupported cache version {version}")
        gens = [PartialTransformation(n, struct.unpack(f"<{n}i", fh.read(4 * n)))
                for _ in range(k)]
        (name_len,) = struct.unpack("<I", fh.read(4))
        gen_names = fh.read(name_len).decode().split("\n") if name_len else []
        elements = [PartialTransformation(n, struct.unpack(f"<{n}i", fh.read(4 * n)))
                    for _ in range(m)]
        witness = []
        for _ in range(m):
            (wl,) = struct.unpack("<I", fh.read(4))
            witness.append(tuple(struct.unpack(f"<{wl}I", fh.read(4 * wl))) if wl else ())
        right_edges = [list(struct.unpack(f"<{k}I", fh.read(4 * k))) for _ in range(m)]
        left_edges = [list(struct.unpack(f"<{k}I", fh.read(4 * k))) for _ in range(m)]
    index = {e.mapping: i for i, e in enumerate(elements)}
    return SemigroupTable(gens, gen_names, elements, witness, right_edges, left_edges, index)
