import itertools
import random
from fractions import Fraction

import pytest

from ellentuck.combinatorics import prec_lt, unrank_vertex, xmax_contains
from ellentuck.dual import (
    ResourceError,
    _Cover,
    apply,
    dual_norm_level,
    generate_functionals,
    make_box,
)
from ellentuck.norm import norm_level, norm_value
from ellentuck.space import T_A, T_K, Params, Vector, sup_norm


def test_depth_zero_is_point_evaluations():
    fs = generate_functionals(Params(2, 2, Fraction(1, 2)), 0, 3)
    assert len(fs) == 6
    assert {f.depth for f in fs} == {0}


def test_depth_one_contains_averaged_pair():
    fs = generate_functionals(Params(1, 2, Fraction(1, 2)), 1, [(1,), (2,)])
    target = Vector.from_mapping(1, {(1,): Fraction(1, 2), (2,): Fraction(1, 2)})
    assert any(f.vector == target and f.depth == 1 for f in fs)


def test_functionals_are_sign_closed():
    fs = {f.vector for f in generate_functionals(Params(2, 2, Fraction(1, 2)), 2, 4)}
    for f in fs:
        assert -f in fs


@pytest.mark.parametrize("variant", [T_K, T_A])
def test_functionals_bounded_by_norm(variant):
    p = Params(2, 2, Fraction(1, 2), variant)
    fs = generate_functionals(p, 2, 5)
    rng = random.Random(4)
    for _ in range(40):
        coords = {unrank_vertex(r, 2): rng.choice([1, -1, Fraction(1, 2), 2])
                  for r in rng.sample(range(1, 6), rng.randint(1, 4))}
        x = Vector.from_mapping(2, coords)
        top = norm_value(x, p)
        assert all(abs(f(x)) <= top for f in fs)


def test_dual_level_zero_is_sup():
    x = Vector.from_mapping(2, {(0, 0): -3, (0, 1): 2})
    assert dual_norm_level(x, Params(2, 2, Fraction(1, 2)), 0) == sup_norm(x) == 3


@pytest.mark.parametrize("variant", [T_K, T_A])
@pytest.mark.parametrize("theta", [Fraction(1, 2), Fraction(3, 4)])
def test_dual_levels_match_primal(variant, theta):
    p = Params(2, 2, theta, variant)
    verts = [unrank_vertex(r, 2) for r in range(1, 6)]
    for coeffs in itertools.product([0, 1, Fraction(1, 2)], repeat=5):
        x = Vector.from_mapping(2, dict(zip(verts, coeffs)))
        if x.is_zero():
            continue
        prev = Fraction(0)
        for n in range(4):
            dual = dual_norm_level(x, p, n, 5)
            assert dual == norm_level(x, p, n)
            assert dual >= prev
            prev = dual


def test_dual_levels_dimension_three():
    p = Params(3, 2, Fraction(2, 3), T_A)
    rng = random.Random(9)
    for _ in range(30):
        coords = {unrank_vertex(r, 3): rng.choice([1, 2, Fraction(1, 3)])
                  for r in rng.sample(range(1, 7), rng.randint(1, 4))}
        x = Vector.from_mapping(3, coords)
        for n in range(3):
            assert dual_norm_level(x, p, n, 6) == norm_level(x, p, n)


def test_box_guard_and_support_check():
    with pytest.raises(ResourceError):
        make_box(2, 20)
    x = Vector.basis((3, 3))
    with pytest.raises(ValueError):
        dual_norm_level(x, Params(2, 2, Fraction(1, 2)), 1, 3)


def test_best_cover_minimum_matches_xmax_description():
    # the largest possible minimum of a covering approximation is the largest
    # v <= min F whose X^max contains F
    p = Params(2, 2, Fraction(1, 2))
    box = make_box(2, 8)
    cover = _Cover(p, box)
    for n in range(1, 4):
        for support in itertools.combinations(box, n):
            expected = None
            for v in box:
                if not prec_lt(support[0], v) and all(xmax_contains(v, w) for w in support):
                    expected = v
            assert cover.best_min(support) == expected


def test_apply():
    f = Vector.from_mapping(2, {(0, 0): Fraction(1, 2), (0, 1): -1})
    x = Vector.from_mapping(2, {(0, 1): 3, (1, 1): 5})
    assert apply(f, x) == -3


@pytest.mark.parametrize("k", [2, 3])
def test_dual_levels_with_three_blocks(k):
    # d = 3 lets separated families use separators that own no block
    p = Params(k, 3, Fraction(3, 4), T_A)
    rng = random.Random(3)
    for _ in range(40):
        coords = {unrank_vertex(r, k): rng.choice([1, 2, Fraction(1, 2)])
                  for r in rng.sample(range(1, 7), rng.randint(1, 5))}
        x = Vector.from_mapping(k, coords)
        for n in range(3):
            assert dual_norm_level(x, p, n, 6) == norm_level(x, p, n)
