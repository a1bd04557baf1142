"""Token machines: traces, progressing/maximal checks, unions, sub-machines."""

import json
import random

import pytest

from greenstack.machines import (
    TokenMachine,
    Trace,
    check_maximal,
    check_progressing,
    check_submachine,
    compose_instruction,
    maximal_progressing_computation,
    rchain_words,
    union,
)
from greenstack.transform import UNDEF, PartialTransformation

PT = PartialTransformation


def rotation_machine(n=3, extra=None):
    instructions = {"rot": PT(n, [(i + 1) % n for i in range(n)])}
    if extra:
        instructions.update(extra)
    return TokenMachine(tuple(f"r.c{i}" for i in range(n)), instructions)


def test_apply_rotation_full_config():
    m = rotation_machine()
    full = m.full_config()
    assert m.apply(full, "rot") == full


def test_apply_partial_identity_drops_one():
    # undefined on cell 0, identity elsewhere
    m = rotation_machine(extra={"eq0": PT(3, [UNDEF, 1, 2])})
    config = m.config_of(["r.c0", "r.c1"])
    out = m.apply(config, "eq0")
    assert out == m.config_of(["r.c1"])


def test_apply_empty_config():
    m = rotation_machine()
    assert m.apply(0, "rot") == 0


def test_apply_unknown_instruction():
    m = rotation_machine()
    with pytest.raises(KeyError):
        m.apply(0, "nope")


def test_run_empty_word_is_computation():
    m = rotation_machine()
    trace = m.run(m.config_of(["r.c0"]), [])
    assert len(trace) == 0
    assert trace.is_computation
    assert trace.configs == [trace.start]


def test_run_flags_cardinality_loss():
    m = rotation_machine(extra={"kill": PT(3, [UNDEF, UNDEF, UNDEF])})
    trace = m.run(m.config_of(["r.c0"]), ["kill", "rot"])
    assert not trace.is_computation


def test_progressing_rejects_revisited_config():
    m = rotation_machine(3)
    trace = m.run(m.config_of(["r.c0"]), ["rot"] * 3)
    assert trace.is_computation
    assert not check_progressing(m, trace)


def test_progressing_requires_computation():
    m = rotation_machine(extra={"kill": PT(3, [UNDEF] * 3)})
    trace = m.run(m.config_of(["r.c0"]), ["kill"])
    with pytest.raises(ValueError):
        check_progressing(m, trace)


def test_progressing_vacuous_single_config():
    m = rotation_machine(extra={"shrink": PT(3, [0, 0, 0])})
    trace = m.run(m.config_of(["r.c0", "r.c1"]), [])
    assert check_progressing(m, trace)


def test_maximal_with_identity_instruction_never_holds():
    m = rotation_machine(extra={"id": PT.identity(3)})
    trace = m.run(m.config_of(["r.c0"]), [])
    assert not check_maximal(m, trace)


def test_union_componentwise_and_identity_extension():
    m1 = TokenMachine(("a.x", "a.y"), {
        "shared": PT(2, [1, 0]),
        "only1": PT(2, [0, UNDEF]),
    })
    m2 = TokenMachine(("b.x",), {
        "shared": PT(1, [0]),
        "only2": PT(1, [UNDEF]),
    })
    u = union(m1, m2)
    assert u.labels == ("a.x", "a.y", "b.x")
    assert u.instructions["shared"].mapping == (1, 0, 2)
    assert u.instructions["only1"].mapping == (0, UNDEF, 2)  # identity on m2 cells
    assert u.instructions["only2"].mapping == (0, 1, UNDEF)  # identity on m1 cells


def test_union_rejects_label_collision():
    m = rotation_machine()
    with pytest.raises(ValueError):
        union(m, m)


def test_union_with_empty_machine_is_isomorphic():
    m = rotation_machine()
    empty = TokenMachine((), {})
    u = union(m, empty)
    assert u.labels == m.labels
    assert {k: v.mapping for k, v in u.instructions.items()} == \
        {k: v.mapping for k, v in m.instructions.items()}


def test_original_machines_are_submachines_of_union():
    m1 = rotation_machine(3)
    m2 = TokenMachine(("s.x", "s.y"), {"swap": PT(2, [1, 0])})
    u = union(m1, m2)
    cells1 = u.config_of(m1.labels)
    cells2 = u.config_of(m2.labels)
    assert check_submachine(u, cells1)
    assert check_submachine(u, cells2)
    assert check_submachine(u, 0)  # empty subset trivially closed


def test_non_closed_subset_fails_submachine():
    # mv pushes a token from cell 0 to cell 1: restricting to {cell 0} loses it
    m = TokenMachine(("c.0", "c.1"), {"mv": PT(2, [1, UNDEF])})
    assert not check_submachine(m, m.config_of(["c.0"]))


def test_compose_instruction_matches_sequential_apply():
    rng = random.Random(59)
    m = rotation_machine(4, extra={
        "p": PT(4, [1, UNDEF, 3, 2]),
        "q": PT(4, [UNDEF, 0, 0, 3]),
    })
    for _ in range(100):
        word = [rng.choice(list(m.instructions)) for _ in range(rng.randrange(0, 5))]
        composed = compose_instruction(m, word)
        config = rng.randrange(1 << 4)
        expected = config
        for name in word:
            expected = m.apply(expected, name)
        got = 0
        for i in range(4):
            if config >> i & 1 and composed.mapping[i] != UNDEF:
                got |= 1 << composed.mapping[i]
        assert got == expected


def test_compose_instruction_empty_word_is_identity():
    m = rotation_machine()
    assert compose_instruction(m, []) == PT.identity(3)


def test_disjoint_rotations_compose_to_simultaneous_rotation():
    m1 = rotation_machine(2)
    m2 = TokenMachine(("z.0", "z.1"), {"zrot": PT(2, [1, 0])})
    u = union(m1, m2)
    both = compose_instruction(u, ["rot", "zrot"])
    assert both.mapping == (1, 0, 3, 2)


def test_trace_json_export():
    m = rotation_machine()
    trace = m.run(m.config_of(["r.c0"]), ["rot", "rot"])
    data = json.loads(trace.to_json())
    assert data["word"] == ["rot", "rot"]
    assert data["configs"] == [["r.c0"], ["r.c1"], ["r.c2"]]


def test_rchain_words_requires_maximal_progressing():
    m = rotation_machine(3)
    trace = m.run(m.config_of(["r.c0"]), ["rot"])
    with pytest.raises(ValueError):
        rchain_words(trace)  # rot can always continue, never maximal


def test_maximal_progressing_computation_forced_chain():
    # two instructions moving a single token along a line; unique maximal chain
    m = TokenMachine(("l.0", "l.1", "l.2"), {
        "s01": PT(3, [1, UNDEF, UNDEF]),
        "s12": PT(3, [UNDEF, 2, UNDEF]),
    })
    trace = maximal_progressing_computation(m, m.config_of(["l.0"]))
    assert trace is not None
    assert trace.word == ("s01", "s12")
    assert check_progressing(m, trace)
    assert check_maximal(m, trace)


def test_maximal_progressing_computation_none_when_ambiguous():
    m = TokenMachine(("l.0", "l.1", "l.2"), {
        "a": PT(3, [1, UNDEF, UNDEF]),
        "b": PT(3, [2, UNDEF, UNDEF]),
    })
    assert maximal_progressing_computation(m, m.config_of(["l.0"])) is None


def test_cardinality_never_increases_along_traces():
    rng = random.Random(61)
    for _ in range(50):
        n = rng.randrange(1, 6)
        instructions = {
            f"i{k}": PT(n, [rng.randrange(-1, n) for _ in range(n)])
            for k in range(rng.randrange(1, 4))
        }
        m = TokenMachine(tuple(f"x.c{i}" for i in range(n)), instructions)
        config = rng.randrange(1 << n)
        trace = m.run(config, [rng.choice(list(instructions)) for _ in range(6)])
        sizes = [c.bit_count() for c in trace.configs]
        assert all(a >= b for a, b in zip(sizes, sizes[1:]))
