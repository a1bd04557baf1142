"""Regular expressions over instruction names, their automata, and execution.

Expressions compile to epsilon-NFAs (Thompson construction), determinize by
subset construction and minimize with Hopcroft's algorithm; the sink state is
then removed so transitions into it become undefined.  `deterministic_run`
drives a token machine along a compiled program, searching depth-first for an
accepted word that preserves the configuration cardinality at every step.
"""

from __future__ import annotations

import os
from dataclasses import dataclass

DEFAULT_NODE_BUDGET = 10_000_000
BUDGET_ENV_VAR = "GREENSTACK_BUDGET"


class BudgetExceeded(Exception):
    """Search or construction exceeded its node budget."""

    def __init__(self, budget: int, context: str = "search"):
        super().__init__(f"{context} exceeded budget of {budget} nodes")
        self.budget = budget
        self.context = context


def search_budget(default: int = DEFAULT_NODE_BUDGET) -> int:
    value = os.environ.get(BUDGET_ENV_VAR)
    return int(value) if value else default


# ---------------------------------------------------------------------------
# expression AST
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class ProgramExpr:
    def __or__(self, other):
        return alt(self, other)

    def __add__(self, other):
        return seq(self, other)


@dataclass(frozen=True)
class Atom(ProgramExpr):
    name: str


@dataclass(frozen=True)
class Eps(ProgramExpr):
    pass


@dataclass(frozen=True)
class Seq(ProgramExpr):
    parts: tuple


@dataclass(frozen=True)
class Alt(ProgramExpr):
    parts: tuple


@dataclass(frozen=True)
class Star(ProgramExpr):
    inner: ProgramExpr


@dataclass(frozen=True)
class Plus(ProgramExpr):
    inner: ProgramExpr


@dataclass(frozen=True)
class Opt(ProgramExpr):
    inner: ProgramExpr


def atom(name: str) -> Atom:
    return Atom(name)


def seq(*parts) -> ProgramExpr:
    flat = []
    for p in parts:
        if isinstance(p, Seq):
            flat.extend(p.parts)
        elif not isinstance(p, Eps):
            flat.append(p)
    if not flat:
        return Eps()
    if len(flat) == 1:
        return flat[0]
    return Seq(tuple(flat))


def alt(*parts) -> ProgramExpr:
    flat = []
    for p in parts:
        if isinstance(p, Alt):
            flat.extend(p.parts)
        else:
            flat.append(p)
    if len(flat) == 1:
        return flat[0]
    return Alt(tuple(flat))


def star(inner: ProgramExpr) -> Star:
    return Star(inner)


def plus(inner: ProgramExpr) -> Plus:
    return Plus(inner)


def opt(inner: ProgramExpr) -> Opt:
    return Opt(inner)


def atoms_of(expr: ProgramExpr) -> set[str]:
    if isinstance(expr, Atom):
        return {expr.name}
    if isinstance(expr, (Seq, Alt)):
        out = set()
        for p in expr.parts:
            out |= atoms_of(p)
        return out
    if isinstance(expr, (Star, Plus, Opt)):
        return atoms_of(expr.inner)
    return set()


def expr_to_text(expr: ProgramExpr) -> str:
    """Render in the CLI regex syntax (whitespace concatenation, | * + ?)."""
    def go(e, parent_prec):
        if isinstance(e, Atom):
            return e.name
        if isinstance(e, Eps):
            return "()"
        if isinstance(e, Alt):
            body = " | ".join(go(p, 0) for p in e.parts)
            return f"({body})" if parent_prec > 0 else body
        if isinstance(e, Seq):
            body = " ".join(go(p, 1) for p in e.parts)
            return f"({body})" if parent_prec > 1 else body
        for cls, op in ((Star, "*"), (Plus, "+"), (Opt, "?")):
            if isinstance(e, cls):
                return go(e.inner, 2) + op
        raise TypeError(f"unknown expression node {e!r}")
    return go(expr, 0)


def shortest_word(expr: ProgramExpr) -> list[str] | None:
    """A shortest accepted word (ties broken lexicographically); None if empty."""
    if isinstance(expr, Atom):
        return [expr.name]
    if isinstance(expr, Eps):
        return []
    if isinstance(expr, Seq):
        out = []
        for p in expr.parts:
            w = shortest_word(p)
            if w is None:
                return None
            out.extend(w)
        return out
    if isinstance(expr, Alt):
        options = [w for w in (shortest_word(p) for p in expr.parts) if w is not None]
        return min(options, key=lambda w: (len(w), w)) if options else None
    if isinstance(expr, (Star, Opt)):
        return []
    if isinstance(expr, Plus):
        return shortest_word(expr.inner)
    raise TypeError(f"unknown expression node {expr!r}")


# ---------------------------------------------------------------------------
# textual syntax
# ---------------------------------------------------------------------------

class RegexSyntaxError(ValueError):
    pass


def _tokenize(text: str) -> list[str]:
    tokens = []
    i = 0
    while i < len(text):
        ch = text[i]
        if ch.isspace():
            i += 1
        elif ch in "()|*+?":
            tokens.append(ch)
            i += 1
        elif ch.isalnum() or ch in "._":
            j = i
            while j < len(text) and (text[j].isalnum() or text[j] in "._"):
                j += 1
            tokens.append(text[i:j])
            i = j
        else:
            raise RegexSyntaxError(f"unexpected character {ch!r} at position {i}")
    return tokens


def parse_expr(text: str) -> ProgramExpr:
    """Parse the CLI regex syntax; concatenation is whitespace-separated."""
    tokens = _tokenize(text)
    pos = 0

    def peek():
        return tokens[pos] if pos < len(tokens) else None

    def parse_alt():
        nonlocal pos
        parts = [parse_seq()]
        while peek() == "|":
            pos += 1
            parts.append(parse_seq())
        return alt(*parts)

    def parse_seq():
        nonlocal pos
        parts = []
        while peek() is not None and peek() not in ")|":
            parts.append(parse_postfix())
        return seq(*parts) if parts else Eps()

    def parse_postfix():
        nonlocal pos
        e = parse_atom()
        while peek() in ("*", "+", "?"):
            op = tokens[pos]
            pos += 1
            e = {"*": star, "+": plus, "?": opt}[op](e)
        return e

    def parse_atom():
        nonlocal pos
        tok = peek()
        if tok == "(":
            pos += 1
            e = parse_alt()
            if peek() != ")":
                raise RegexSyntaxError("unbalanced parenthesis")
            pos += 1
            return e
        if tok is None or tok in ")|*+?":
            raise RegexSyntaxError(f"unexpected token {tok!r}")
        pos += 1
        return Atom(tok)

    e = parse_alt()
    if pos != len(tokens):
        raise RegexSyntaxError(f"trailing input at token {pos}")
    return e


# ---------------------------------------------------------------------------
# automata
# ---------------------------------------------------------------------------

class ProgramAutomaton:
    """NFA or DFA over instruction names; DFA transitions are partial."""

    def __init__(self, state_count, alphabet, transitions, eps, initial, accepting,
                 deterministic):
        self.state_count = state_count
        self.alphabet = tuple(alphabet)
        self.transitions = transitions  # list[dict[letter, set[int] | int]]
        self.eps = eps                  # list[set[int]] or None for DFAs
        self.initial = initial
        self.accepting = frozenset(accepting)
        self.deterministic = deterministic

    def accepts(self, word) -> bool:
        if self.deterministic:
            q = self.initial
            if q is None:
                return False
            for letter in word:
                q = self.transitions[q].get(letter)
                if q is None:
                    return False
            return q in self.accepting
        current = self._eps_closure({self.initial})
        for letter in word:
            nxt = set()
            for q in current:
                nxt |= self.transitions[q].get(letter, set())
            current = self._eps_closure(nxt)
            if not current:
                return False
        return bool(current & self.accepting)

    def _eps_closure(self, states):
        out = set(states)
        todo = list(states)
        while todo:
            q = todo.pop()
            for r in self.eps[q]:
                if r not in out:
                    out.add(r)
                    todo.append(r)
        return out


def compile_nfa(expr: ProgramExpr) -> ProgramAutomaton:
    """Thompson construction: one initial and one accepting state per subterm."""
    transitions: list[dict] = []
    eps: list[set] = []

    def new_state():
        transitions.append({})
        eps.append(set())
        return len(transitions) - 1

    def build(e):
        start, end = new_state(), new_state()
        if isinstance(e, Atom):
            transitions[start].setdefault(e.name, set()).add(end)
        elif isinstance(e, Eps):
            eps[start].add(end)
        elif isinstance(e, Seq):
            prev = start
            for p in e.parts:
                s, t = build(p)
                eps[prev].add(s)
                prev = t
            eps[prev].add(end)
        elif isinstance(e, Alt):
            for p in e.parts:
                s, t = build(p)
                eps[start].add(s)
                eps[t].add(end)
        elif isinstance(e, (Star, Plus, Opt)):
            s, t = build(e.inner)
            eps[start].add(s)
            eps[t].add(end)
            if isinstance(e, (Star, Plus)):
                eps[t].add(s)
            if isinstance(e, (Star, Opt)):
                eps[start].add(end)
        else:
            raise TypeError(f"unknown expression node {e!r}")
        return start, end

    start, end = build(expr)
    letters = sorted(atoms_of(expr))
    return ProgramAutomaton(len(transitions), letters, transitions, eps,
                            start, {end}, deterministic=False)


def determinize(nfa: ProgramAutomaton, alphabet=None) -> ProgramAutomaton:
    """Subset construction; the empty subset (sink) is kept implicit."""
    letters = tuple(alphabet) if alphabet is not None else nfa.alphabet
    start = frozenset(nfa._eps_closure({nfa.initial}))
    states = {start: 0}
    order = [start]
    transitions: list[dict] = [{}]
    i = 0
    while i < len(order):
        current = order[i]
        for letter in letters:
            nxt = set()
            for q in current:
                nxt |= nfa.transitions[q].get(letter, set())
            nxt = frozenset(nfa._eps_closure(nxt))
            if not nxt:
                continue
            j = states.get(nxt)
            if j is None:
                j = len(order)
                states[nxt] = j
                order.append(nxt)
                transitions.append({})
            transitions[i][letter] = j
        i += 1
    accepting = {i for i, s in enumerate(order) if s & nfa.accepting}
    return ProgramAutomaton(len(order), letters, transitions, None, 0, accepting,
                            deterministic=True)


def minimize(dfa: ProgramAutomaton) -> ProgramAutomaton:
    """Hopcroft minimization of a partial DFA; the result has no sink state.

    Undefined transitions are treated as moves into an implicit dead state, so
    states are merged exactly when their languages agree; an empty language
    yields the empty automaton (initial = None).
    """
    n = dfa.state_count
    letters = dfa.alphabet
    sink = n  # implicit dead state
    size = n + 1

    preimage = {letter: [[] for _ in range(size)] for letter in letters}
    for q in range(n):
        for letter in letters:
            t = dfa.transitions[q].get(letter, sink)
            preimage[letter][t].append(q)
        # the sink absorbs every letter
    for letter in letters:
        preimage[letter][sink].append(sink)

    accepting = set(dfa.accepting)
    non_accepting = set(range(size)) - accepting
    partition = [s for s in (accepting, non_accepting) if s]
    worklist = [s.copy() for s in partition]

    while worklist:
        splitter = worklist.pop()
        for letter in letters:
            concerned = set()
            for t in splitter:
                concerned.update(preimage[letter][t])
            new_partition = []
            for block in partition:
                inside = block & concerned
                outside = block - concerned
                if inside and outside:
                    new_partition.append(inside)
                    new_partition.append(outside)
                    smaller = inside if len(inside) <= len(outside) else outside
                    worklist.append(smaller.copy())
                else:
                    new_partition.append(block)
            partition = new_partition

    block_of = {}
    for b, block in enumerate(partition):
        for q in block:
            block_of[q] = b
    sink_block = block_of[sink]

    # keep only blocks reachable from the initial block, excluding the sink
    old_initial = block_of[dfa.initial]
    if old_initial == sink_block:
        return ProgramAutomaton(0, letters, [], None, None, set(), deterministic=True)
    # dead states are Nerode-equivalent to the sink, so only sink_block holds it
    rep = {b: next(iter(block)) for b, block in enumerate(partition)}
    renumber = {old_initial: 0}
    order = [old_initial]
    transitions: list[dict] = [{}]
    i = 0
    while i < len(order):
        b = order[i]
        q = rep[b]
        for letter in letters:
            t = dfa.transitions[q].get(letter, sink)
            tb = block_of[t]
            if tb == sink_block:
                continue
            j = renumber.get(tb)
            if j is None:
                j = len(order)
                renumber[tb] = j
                order.append(tb)
                transitions.append({})
            transitions[i][letter] = j
        i += 1
    accepting_blocks = {renumber[block_of[q]] for q in dfa.accepting
                        if block_of[q] in renumber}
    return ProgramAutomaton(len(order), letters, transitions, None, 0,
                            accepting_blocks, deterministic=True)


def determinize_minimize(nfa: ProgramAutomaton, alphabet=None) -> ProgramAutomaton:
    return minimize(determinize(nfa, alphabet))


def compile_program(expr: ProgramExpr, alphabet=None) -> ProgramAutomaton:
    """Expression to minimal partial DFA, optionally over a larger alphabet."""
    return determinize_minimize(compile_nfa(expr), alphabet)


# ---------------------------------------------------------------------------
# execution
# ---------------------------------------------------------------------------

def _bind(machine, automaton) -> None:
    unknown = [a for a in automaton.alphabet if a not in machine.instructions]
    if unknown:
        raise KeyError(f"program uses instructions not in the machine: {unknown}")


def deterministic_run(machine, start: int, program: ProgramAutomaton,
                      budget: int | None = None):
    """Search for an accepted word preserving |start| at every step.

    Depth-first over (automaton state, configuration) pairs, letters explored
    in the machine's global instruction order, visited pairs memoized so star
    operators terminate.  Returns a Trace or None (not found).  If the program
    language is deterministic on `start`, the result is the unique preserving
    word; otherwise it is the DFS-first one, which is still reproducible.
    """
    from .machines import Trace

    if not program.deterministic:
        raise ValueError("deterministic_run requires a determinized program")
    _bind(machine, program)
    if budget is None:
        budget = search_budget()
    if program.initial is None:
        return None

    # per-state moves pre-sorted by the machine's global instruction order,
    # reversed so the stack explores the smallest instruction index first
    order_index = {name: i for i, name in enumerate(machine.instructions)}
    state_moves = []
    for row in program.transitions:
        moves = sorted(row.items(), key=lambda item: order_index[item[0]], reverse=True)
        state_moves.append([(name, t, machine.instruction_table(name))
                            for name, t in moves])
    target = start.bit_count()

    root = (program.initial, start)
    parents: dict = {root: None}
    stack = [root]
    visited = 0
    goal = None
    while stack:
        state, config = node = stack.pop()
        visited += 1
        if visited > budget:
            raise BudgetExceeded(budget)
        if state in program.accepting:
            goal = node
            break
        for name, nxt_state, table in state_moves[state]:
            nxt_config = 0
            bits = config
            while bits:
                low = bits & -bits
                t = table[low.bit_length() - 1]
                if t >= 0:
                    nxt_config |= 1 << t
                bits ^= low
            if nxt_config.bit_count() != target:
                continue
            child = (nxt_state, nxt_config)
            if child in parents:
                continue
            parents[child] = (node, name)
            stack.append(child)

    if goal is None:
        return None
    word = []
    node = goal
    while parents[node] is not None:
        node, name = parents[node]
        word.append(name)
    word.reverse()
    return Trace.from_run(machine, start, word)


def accepted_words_bounded(program: ProgramAutomaton, max_len: int):
    """All accepted words of length <= max_len (worst case exponential)."""
    if program.initial is None:
        return
    stack = [(program.initial, [])]
    while stack:
        state, word = stack.pop()
        if state in program.accepting:
            yield list(word)
        if len(word) == max_len:
            continue
        for letter in sorted(program.transitions[state], reverse=True):
            stack.append((program.transitions[state][letter], word + [letter]))


def check_deterministic_bounded(machine, config: int, program: ProgramAutomaton,
                                max_len: int) -> bool:
    """At most one accepted word of length <= max_len preserves cardinality."""
    _bind(machine, program)
    target = config.bit_count()
    preserving = 0
    for word in accepted_words_bounded(program, max_len):
        current = config
        ok = True
        for name in word:
            current = machine.apply(current, name)
            if current.bit_count() != target:
                ok = False
                break
        if ok:
            preserving += 1
            if preserving > 1:
                return False
    return True
