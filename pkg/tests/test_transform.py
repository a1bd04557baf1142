"""Partial transformation algebra: composition, images, inversion, totalization."""

import random

import pytest

from greenstack.transform import (
    UNDEF,
    PartialTransformation,
    compose,
    image,
    invert,
    is_injective,
    totalize,
)

PT = PartialTransformation


def random_partial(rng, n):
    return PT(n, [rng.randrange(-1, n) for _ in range(n)])


def random_injective(rng, n):
    targets = list(range(n))
    rng.shuffle(targets)
    k = rng.randrange(n + 1)
    mapping = [UNDEF] * n
    for q in rng.sample(range(n), k):
        mapping[q] = targets.pop()
    return PT(n, mapping)


def test_compose_constant_right_factor_absorbs():
    f = PT(3, [1, 2, 0])
    g = PT.constant(3, 0)
    assert compose(f, g) == g


def test_compose_identity_left():
    g = PT(3, [2, UNDEF, 1])
    assert compose(PT.identity(3), g) == g


def test_compose_partial_propagates_undef():
    f = PT(3, [1, UNDEF, 2])
    g = PT(3, [UNDEF, 0, UNDEF])
    assert compose(f, g) == PT(3, [0, UNDEF, UNDEF])


def test_compose_rejects_mismatched_sizes():
    with pytest.raises(ValueError):
        compose(PT.identity(2), PT.identity(3))


def test_compose_associative_random():
    rng = random.Random(7)
    for _ in range(200):
        n = rng.randrange(1, 6)
        f, g, h = (random_partial(rng, n) for _ in range(3))
        assert compose(compose(f, g), h) == compose(f, compose(g, h))


def test_image_permutation_preserves_full_set():
    rot = PT(3, [1, 2, 0])
    assert image(rot, {0, 1, 2}) == {0, 1, 2}


def test_image_constant_collapses():
    assert image(PT.constant(2, 0), {0, 1}) == {0}


def test_image_pointwise():
    f = PT(3, [1, UNDEF, 1])
    assert image(f, {0, 1, 2}) == {1}


def test_image_never_grows():
    rng = random.Random(11)
    for _ in range(200):
        n = rng.randrange(1, 7)
        f = random_partial(rng, n)
        subset = {q for q in range(n) if rng.random() < 0.5}
        assert len(image(f, subset)) <= len(subset)


def test_is_injective():
    assert is_injective(PT(4, [1, 2, 3, 0]))
    assert not is_injective(PT.constant(2, 1))
    # a tape head move: c0 -> c1, c1 undefined, rest identity
    mvl = PT(4, [1, UNDEF, 2, 3])
    assert is_injective(mvl)


def test_invert_reads_off_definition():
    f = PT(3, [2, 0, UNDEF])
    assert invert(f) == PT(3, [1, UNDEF, 0])
    assert invert(PT.identity(4)) == PT.identity(4)


def test_invert_rejects_non_injective():
    with pytest.raises(ValueError):
        invert(PT.constant(3, 0))


def test_invert_is_involution_on_domain():
    rng = random.Random(13)
    for _ in range(100):
        n = rng.randrange(1, 7)
        f = random_injective(rng, n)
        back = invert(invert(f))
        for q in range(n):
            if f.mapping[q] != UNDEF:
                assert back.mapping[q] == f.mapping[q]


def test_invert_antihomomorphism():
    rng = random.Random(17)
    for _ in range(100):
        n = rng.randrange(1, 7)
        f, g = random_injective(rng, n), random_injective(rng, n)
        assert invert(compose(f, g)) == compose(invert(g), invert(f))


def test_totalize_definition():
    g = PT(2, [1, UNDEF])
    (t,) = totalize([g])
    assert t == PT(3, [1, 2, 2])


def test_totalize_keeps_total_generators():
    g = PT(2, [1, 0])
    (t,) = totalize([g])
    assert t == PT(3, [1, 0, 2])


def test_totalize_empty_rejected():
    with pytest.raises(ValueError):
        totalize([])


def test_totalize_preserves_semigroup_size():
    from greenstack.semigroup import generate

    rng = random.Random(23)
    for _ in range(50):
        n = rng.randrange(1, 5)
        gens = [random_partial(rng, n) for _ in range(rng.randrange(1, 4))]
        assert len(generate(gens)) == len(generate(totalize(gens)))


def test_text_round_trip():
    f = PT(3, [2, UNDEF, 0])
    assert f.to_text() == "2 - 0"
    assert PT.from_text("2 - 0") == f
