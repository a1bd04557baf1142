"""Green classes via SCCs, heights, and agreement with the definitional oracle."""

import json
import random

import pytest

from greenstack.green import (
    check_distinct_images_along_chain,
    eggbox,
    green_classes,
    height,
    longest_class_chain,
    longest_element_chain,
    oracle_classes,
    oracle_leq,
    partitions_equal,
    relations_agree_on_isolated_subsemigroup,
    to_dot,
)
from greenstack.semigroup import generate
from greenstack.transform import PartialTransformation, compose

PT = PartialTransformation

T3_GENS = [PT(3, [1, 2, 0]), PT(3, [1, 0, 2]), PT(3, [0, 1, 0])]


def full_t3():
    return generate(T3_GENS)


def random_partial_gens(rng, max_states=5, max_gens=3):
    n = rng.randrange(2, max_states + 1)
    k = rng.randrange(1, max_gens + 1)
    return [PT(n, [rng.randrange(-1, n) for _ in range(n)]) for _ in range(k)]


def test_full_t3_has_3_j_classes():
    # in the full transformation monoid a class is determined by image size
    gs = green_classes(full_t3(), "J")
    assert gs.class_count == 3
    assert gs.height == 3


def test_singleton_semigroup_single_class():
    table = generate([PT.constant(3, 0)])
    for kind in ("R", "L", "J"):
        gs = green_classes(table, kind)
        assert gs.class_count == 1
        assert height(gs) == 1


def test_oracle_matches_scc_on_t3():
    table = full_t3()
    for kind in ("R", "L", "J"):
        gs = green_classes(table, kind)
        assert partitions_equal(gs.class_of, oracle_classes(table, kind))


def test_oracle_matches_scc_on_random_tables():
    rng = random.Random(29)
    for _ in range(40):
        table = generate(random_partial_gens(rng, max_states=4))
        if len(table) > 300:
            continue
        for kind in ("R", "L", "J"):
            gs = green_classes(table, kind)
            assert partitions_equal(gs.class_of, oracle_classes(table, kind))


def test_oracle_leq_basics():
    table = full_t3()
    const = table.lookup(PT.constant(3, 0))
    ident = table.lookup(PT.identity(3))
    assert const is not None and ident is not None
    for kind in ("R", "L", "J"):
        assert oracle_leq(table, const, const, kind)
    assert oracle_leq(table, const, ident, "J")
    assert not oracle_leq(table, ident, const, "J")


def test_oracle_leq_agrees_with_view_on_small_tables():
    rng = random.Random(31)
    for _ in range(10):
        table = generate(random_partial_gens(rng, max_states=3))
        if len(table) > 60:
            continue
        view = table.s1_view()
        for kind in ("R", "L", "J"):
            for s in range(len(table)):
                for t in range(len(table)):
                    assert oracle_leq(table, s, t, kind) == view.leq(s, t, kind)


def test_strict_r_implies_strict_j_pairwise():
    rng = random.Random(37)
    for _ in range(15):
        table = generate(random_partial_gens(rng, max_states=4))
        if len(table) > 120:
            continue
        gs_r = green_classes(table, "R")
        gs_j = green_classes(table, "J")
        view = table.s1_view()
        for s in range(len(table)):
            for t in range(len(table)):
                strict_r = view.leq(s, t, "R") and gs_r.class_of[s] != gs_r.class_of[t]
                if strict_r:
                    assert view.leq(s, t, "J")
                    assert gs_j.class_of[s] != gs_j.class_of[t]


def test_rheight_upper_bound_random():
    rng = random.Random(41)
    for _ in range(60):
        gens = random_partial_gens(rng)
        n = gens[0].n
        table = generate(gens)
        assert green_classes(table, "R").height <= 2 ** n


def test_longest_chain_strictly_descends_with_distinct_images():
    rng = random.Random(43)
    for _ in range(40):
        table = generate(random_partial_gens(rng))
        gs = green_classes(table, "R")
        chain = longest_element_chain(table, gs)
        assert len(chain) == gs.height
        assert check_distinct_images_along_chain(table, chain)


def test_chain_of_length_one_accepted():
    table = generate([PT.constant(2, 0)])
    assert check_distinct_images_along_chain(table, [0])


def test_non_descending_chain_rejected():
    table = full_t3()
    ident = table.lookup(PT.identity(3))
    with pytest.raises(ValueError):
        check_distinct_images_along_chain(table, [ident, ident])


def test_every_j_class_contains_r_and_l_class():
    table = full_t3()
    box = eggbox(table)
    for entry in box["boxes"]:
        assert len(entry["r_classes"]) >= 1
        assert len(entry["l_classes"]) >= 1
    assert box["j_class_count"] == 3


def test_isolated_subsemigroup_trivial_case():
    table = full_t3()
    assert relations_agree_on_isolated_subsemigroup(
        table, list(range(len(table))), sub_gens=T3_GENS
    )


def test_non_isolated_subset_reported():
    table = full_t3()
    const = table.lookup(PT.constant(3, 0))
    with pytest.raises(ValueError):
        relations_agree_on_isolated_subsemigroup(table, [const])


def test_dot_export_mentions_every_class():
    table = full_t3()
    gs = green_classes(table, "J")
    dot = to_dot(table, gs)
    assert dot.startswith("digraph")
    for c in range(gs.class_count):
        assert f"c{c} " in dot


def test_eggbox_is_json_serializable():
    json.dumps(eggbox(full_t3()))


def test_opposite_heights_swap():
    from greenstack.transform import invert, is_injective

    rng = random.Random(47)
    done = 0
    while done < 30:
        n = rng.randrange(2, 6)
        gens = []
        for _ in range(rng.randrange(1, 4)):
            targets = list(range(n))
            rng.shuffle(targets)
            mapping = [-1] * n
            for q in rng.sample(range(n), rng.randrange(n + 1)):
                mapping[q] = targets.pop()
            gens.append(PT(n, mapping))
        if not all(is_injective(g) for g in gens):
            continue
        done += 1
        table = generate(gens)
        opp = generate([invert(g) for g in gens])
        assert green_classes(table, "L").height == green_classes(opp, "R").height
        assert green_classes(table, "R").height == green_classes(opp, "L").height
