"""Green's preorders, classes and heights from Cayley graphs.

The fast path finds classes as strongly connected components of the right /
left / two-sided Cayley graph (iterative Tarjan, safe for large tables) and
heights as the longest path in the condensation DAG.  The oracle path rescans
raw compositions of element mappings instead, so the two never share graph
data: `oracle_classes` and `oracle_leq` implement the ideal-inclusion
definitions directly and are used to cross-check the SCC results.
"""

from __future__ import annotations

import json

import numpy as np

from .semigroup import SemigroupTable
from .transform import UNDEF, compose

KINDS = ("R", "L", "J")


class GreenStructure:
    """Classes of one Green relation plus the condensation DAG and its height.

    Class indices follow Tarjan emission order, so every condensation edge goes
    from a later-emitted class to an earlier one; class_height[c] is the number
    of classes on the longest path starting at c (counted in nodes).
    """

    def __init__(self, kind, class_of, classes, cond_succ, class_height):
        self.kind = kind
        self.class_of = class_of
        self.classes = classes
        self.cond_succ = cond_succ
        self.class_height = class_height
        self.height = max(class_height) if class_height else 0

    @property
    def class_count(self):
        return len(self.classes)


def _successor_rows(table: SemigroupTable, kind: str):
    if kind == "R":
        return (table.right_edges,)
    if kind == "L":
        return (table.left_edges,)
    if kind == "J":
        return (table.right_edges, table.left_edges)
    raise ValueError(f"unknown relation kind {kind!r}")


def green_classes(table: SemigroupTable, kind: str) -> GreenStructure:
    """SCC condensation of the Cayley graph for the chosen relation.

    s <= t holds iff s is reachable from t (the empty word is allowed, so the
    relation is reflexive even when no identity element exists).
    """
    rows = _successor_rows(table, kind)
    m = len(table.elements)

    index = [-1] * m
    low = [0] * m
    on_stack = bytearray(m)
    scc_stack: list[int] = []
    class_of = [-1] * m
    classes: list[list[int]] = []
    counter = 0

    for root in range(m):
        if index[root] != -1:
            continue
        # iterative Tarjan: (node, merged successor list, next position)
        work = [(root, None, 0)]
        while work:
            v, succ, pos = work.pop()
            if pos == 0:
                index[v] = low[v] = counter
                counter += 1
                scc_stack.append(v)
                on_stack[v] = 1
                succ = []
                for row in rows:
                    succ.extend(row[v])
            recurse = None
            while pos < len(succ):
                w = succ[pos]
                pos += 1
                if index[w] == -1:
                    recurse = w
                    break
                if on_stack[w]:
                    if index[w] < low[v]:
                        low[v] = index[w]
            if recurse is not None:
                work.append((v, succ, pos))
                work.append((recurse, None, 0))
                continue
            if low[v] == index[v]:
                comp = []
                while True:
                    w = scc_stack.pop()
                    on_stack[w] = 0
                    class_of[w] = len(classes)
                    comp.append(w)
                    if w == v:
                        break
                classes.append(comp)
            if work:
                parent = work[-1][0]
                if low[v] < low[parent]:
                    low[parent] = low[v]

    cond_succ: list[set[int]] = [set() for _ in classes]
    for v in range(m):
        cv = class_of[v]
        for row in rows:
            for w in row[v]:
                cw = class_of[w]
                if cw != cv:
                    cond_succ[cv].add(cw)

    # Tarjan emits sinks first, so successors of c are always numbered below c.
    class_height = [0] * len(classes)
    for c in range(len(classes)):
        best = 0
        for d in cond_succ[c]:
            if class_height[d] > best:
                best = class_height[d]
        class_height[c] = best + 1

    return GreenStructure(kind, class_of, classes, cond_succ, class_height)


def height(gs: GreenStructure) -> int:
    """Maximal number of classes on a directed condensation path."""
    return gs.height


def longest_class_chain(gs: GreenStructure) -> list[int]:
    """One longest condensation path, top class first; ties by class index."""
    if not gs.classes:
        return []
    start = min(range(gs.class_count), key=lambda c: (-gs.class_height[c], c))
    chain = [start]
    current = start
    while gs.class_height[current] > 1:
        current = min(
            (d for d in gs.cond_succ[current]
             if gs.class_height[d] == gs.class_height[current] - 1),
            key=lambda d: d,
        )
        chain.append(current)
    return chain


def longest_element_chain(table: SemigroupTable, gs: GreenStructure) -> list[int]:
    """Element representatives (smallest index per class) of a longest chain."""
    return [min(gs.classes[c]) for c in longest_class_chain(gs)]


# ---------------------------------------------------------------------------
# definitional oracle
# ---------------------------------------------------------------------------

def _mapping_matrix(table: SemigroupTable) -> np.ndarray:
    return np.array([e.mapping for e in table.elements], dtype=np.int16)


def _right_products(M: np.ndarray, t: int) -> np.ndarray:
    """Rows t*u for every u: (q)(tu) = u(t(q))."""
    tm = M[t]
    defined = tm != UNDEF
    out = np.full_like(M, UNDEF)
    out[:, defined] = M[:, tm[defined]]
    return out

def _left_products(M: np.ndarray, t: int) -> np.ndarray:
    """Rows u*t for every u: (q)(ut) = t(u(q))."""
    tm_ext = np.concatenate([M[t], [UNDEF]])  # slot -1 handles UNDEF entries
    return tm_ext[M]


def _row_keys(products: np.ndarray) -> list[bytes]:
    flat = np.ascontiguousarray(products, dtype=np.int16).tobytes()
    width = 2 * products.shape[1]
    return [flat[i:i + width] for i in range(0, len(flat), width)]


def _oracle_leq_matrix(table: SemigroupTable, kind: str) -> np.ndarray:
    """Boolean matrix leq[s, t] of the definitional preorder, by raw scans."""
    M = _mapping_matrix(table)
    m = len(table.elements)
    if kind in ("R", "L"):
        products = _right_products if kind == "R" else _left_products
        keys = _row_keys(M)
        leq = np.zeros((m, m), dtype=bool)
        for t in range(m):
            ideal = set(_row_keys(products(M, t)))
            col = np.fromiter((k in ideal for k in keys), dtype=bool, count=m)
            leq[:, t] = col
            leq[t, t] = True  # empty word
        return leq
    if kind == "J":
        # s <=_J t  iff  s = u t v  iff  some a = u t satisfies s <=_R a <=_L t
        leq_r = _oracle_leq_matrix(table, "R")
        leq_l = _oracle_leq_matrix(table, "L")
        prod = leq_r.astype(np.float32) @ leq_l.astype(np.float32)
        return prod > 0.5
    raise ValueError(f"unknown relation kind {kind!r}")


def oracle_classes(table: SemigroupTable, kind: str) -> list[int]:
    """Class labels from the ideal-inclusion definition (no Cayley edges used).

    Two elements are equivalent iff their leq rows coincide; quadratic in the
    table size, intended for cross-checks on tables of a few thousand elements.
    """
    leq = _oracle_leq_matrix(table, kind)
    _, inverse = np.unique(leq, axis=0, return_inverse=True)
    return [int(c) for c in inverse.ravel()]


def oracle_leq(table: SemigroupTable, s: int, t: int, kind: str) -> bool:
    """Definitional s <= t check by scanning all multipliers u (and v for J)."""
    if s == t:
        return True
    M = _mapping_matrix(table)
    target = M[s].tobytes()
    if kind == "R":
        return target in set(_row_keys(_right_products(M, t)))
    if kind == "L":
        return target in set(_row_keys(_left_products(M, t)))
    if kind == "J":
        seen = set()
        # all a = u*t with u in S^1: stack row t itself for the empty u
        left = np.vstack([M[t:t + 1], _left_products(M, t)])
        for a_row in np.unique(left, axis=0):
            key = a_row.tobytes()
            if key in seen:
                continue
            seen.add(key)
            if key == target:
                return True
            am = np.asarray(a_row)
            defined = am != UNDEF
            out = np.full_like(M, UNDEF)
            out[:, defined] = M[:, am[defined]]
            if target in set(_row_keys(out)):
                return True
        return False
    raise ValueError(f"unknown relation kind {kind!r}")


def partitions_equal(class_of_a, class_of_b) -> bool:
    """Same partition regardless of labels."""
    blocks_a = {}
    blocks_b = {}
    for i, c in enumerate(class_of_a):
        blocks_a.setdefault(c, []).append(i)
    for i, c in enumerate(class_of_b):
        blocks_b.setdefault(c, []).append(i)
    return sorted(map(tuple, blocks_a.values())) == sorted(map(tuple, blocks_b.values()))


# ---------------------------------------------------------------------------
# chain and subsemigroup checks
# ---------------------------------------------------------------------------

def check_distinct_images_along_chain(table: SemigroupTable, chain: list[int]) -> bool:
    """Images Q.u_i along a strict R-chain must be pairwise distinct."""
    gs = green_classes(table, "R")
    view = table.s1_view()
    for a, b in zip(chain, chain[1:]):
        strictly_below = gs.class_of[a] != gs.class_of[b] and view.leq(b, a, "R")
        if not strictly_below:
            raise ValueError(f"chain is not strictly descending at {a} > {b}")
    images = [frozenset(table.elements[i].image_set()) for i in chain]
    return len(set(images)) == len(images)


def _reaches_members(edge_rows, members: set[int], m: int) -> set[int]:
    """Elements with a path of >= 1 edge steps into `members`."""
    rev: list[list[int]] = [[] for _ in range(m)]
    for v in range(m):
        for row in edge_rows:
            for w in row[v]:
                rev[w].append(v)
    hits = set()
    todo = []
    for t in members:
        for p in rev[t]:
            if p not in hits:
                hits.add(p)
                todo.append(p)
    while todo:
        v = todo.pop()
        for p in rev[v]:
            if p not in hits:
                hits.add(p)
                todo.append(p)
    return hits


def _is_completely_isolated(table: SemigroupTable, members: set[int]) -> bool:
    """s1*s2 in T implies s1, s2 in T, for all s1, s2 in the table.

    Scanning all products directly is quadratic; equivalently, no element
    outside T may have a right-multiplication path into T (that element would
    be a left factor), and symmetrically with left multiplications.
    """
    m = len(table.elements)
    left_factors = _reaches_members((table.right_edges,), members, m)
    if not left_factors <= members:
        return False
    right_factors = _reaches_members((table.left_edges,), members, m)
    if not right_factors <= members:
        return False
    # closure of T itself (pairwise products stay inside)
    elems = table.elements
    index = table.index
    for i in members:
        for j in members:
            if index[compose(elems[i], elems[j]).mapping] not in members:
                return False
    return True


def _class_reach(gs: GreenStructure, start_class: int, cache: dict) -> set[int]:
    reach = cache.get(start_class)
    if reach is None:
        reach = {start_class}
        todo = [start_class]
        while todo:
            c = todo.pop()
            for d in gs.cond_succ[c]:
                if d not in reach:
                    reach.add(d)
                    todo.append(d)
        cache[start_class] = reach
    return reach


def relations_agree_on_isolated_subsemigroup(big: SemigroupTable,
                                             sub_elements: list[int],
                                             sub_gens=None) -> bool:
    """All six relations restricted to a completely isolated subsemigroup
    coincide with the relations computed inside the subsemigroup alone.

    sub_gens defaults to the sub-element transformations themselves (a valid
    generating set for any subsemigroup given as a closed element list).
    """
    from .semigroup import generate

    members = set(sub_elements)
    if not _is_completely_isolated(big, members):
        raise ValueError("subset is not a completely isolated subsemigroup")

    if sub_gens is None:
        sub_gens = [big.elements[i] for i in sub_elements]
    sub = generate(sub_gens)
    if set(e.mapping for e in sub.elements) != {big.elements[i].mapping for i in sub_elements}:
        raise ValueError("sub_gens do not generate exactly the given subset")

    sub_of_big = {i: sub.index[big.elements[i].mapping] for i in sub_elements}
    ordered = sorted(sub_elements)
    for kind in KINDS:
        big_gs = green_classes(big, kind)
        sub_gs = green_classes(sub, kind)
        big_cache: dict = {}
        sub_cache: dict = {}
        for y in ordered:
            big_reach = _class_reach(big_gs, big_gs.class_of[y], big_cache)
            sub_reach = _class_reach(sub_gs, sub_gs.class_of[sub_of_big[y]], sub_cache)
            for x in ordered:
                leq_big = big_gs.class_of[x] in big_reach
                leq_sub = sub_gs.class_of[sub_of_big[x]] in sub_reach
                if leq_big != leq_sub:
                    return False
    return True


# ---------------------------------------------------------------------------
# exports
# ---------------------------------------------------------------------------

def to_dot(table: SemigroupTable, gs: GreenStructure, max_label: int = 40) -> str:
    """Condensation DAG in DOT; node labels carry one witness word per class."""
    lines = [f'digraph "{gs.kind}_condensation" {{']
    for c, members in enumerate(gs.classes):
        rep = min(members)
        word = table.witness_text(rep)
        if len(word) > max_label:
            word = word[: max_label - 1] + "…"
        lines.append(f'  c{c} [label="{c}: {word} ({len(members)})"];')
    for c, succ in enumerate(gs.cond_succ):
        for d in sorted(succ):
            lines.append(f"  c{c} -> c{d};")
    lines.append("}")
    return "\n".join(lines)


def eggbox(table: SemigroupTable) -> dict:
    """For each J-class, the R-class and L-class indices it contains (JSON-able)."""
    gs_j = green_classes(table, "J")
    gs_r = green_classes(table, "R")
    gs_l = green_classes(table, "L")
    boxes = []
    for c, members in enumerate(gs_j.classes):
        boxes.append({
            "j_class": c,
            "size": len(members),
            "r_classes": sorted({gs_r.class_of[i] for i in members}),
            "l_classes": sorted({gs_l.class_of[i] for i in members}),
        })
    return {"j_class_count": gs_j.class_count, "boxes": boxes}


def eggbox_json(table: SemigroupTable) -> str:
    return json.dumps(eggbox(table), indent=2)
