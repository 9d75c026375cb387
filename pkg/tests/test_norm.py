import dataclasses
import itertools
import math
import random
from fractions import Fraction

import pytest
from hypothesis import given, strategies as st

from ellentuck.combinatorics import DimensionError, unrank_vertex
from ellentuck.norm import (
    AdmissibleFamily,
    Leaf,
    Node,
    NormEngine,
    certificate_violation,
    norm,
    norm_level,
    norm_value,
    search_separators,
    verify_certificate,
)
from ellentuck.space import T_A, T_K, Params, Vector, l1_norm, lp_norm, sup_norm
from oracles import NaiveNorm, t1_norm

COEFFS = [Fraction(1), Fraction(-1), Fraction(1, 2), Fraction(-1, 2), Fraction(2), Fraction(-1, 3)]


def vectors(k, box=8, max_support=5):
    entry = st.tuples(st.integers(1, box), st.sampled_from(COEFFS))
    return st.lists(entry, min_size=1, max_size=max_support, unique_by=lambda e: e[0]).map(
        lambda items: Vector.from_mapping(k, {unrank_vertex(r, k): a for r, a in items}))


params_strategy = st.builds(
    Params,
    k=st.sampled_from([1, 2, 3]),
    d=st.sampled_from([1, 2, 3]),
    theta=st.sampled_from([Fraction(1, 3), Fraction(1, 2), Fraction(2, 3), Fraction(3, 4)]),
    variant=st.sampled_from([T_K, T_A]),
)


# -- small exact values ------------------------------------------------------------


def test_sup_norm():
    assert sup_norm(Vector(2)) == 0
    assert sup_norm(Vector.from_mapping(2, {(0, 0): 3, (1, 1): -4})) == 4


def test_single_point():
    for variant in (T_K, T_A):
        p = Params(2, 3, Fraction(1, 2), variant)
        assert norm_value(Vector.basis((0, 0)), p) == 1
        assert norm_value(Vector.basis((3, 5), coefficient=Fraction(-5, 2)), p) == Fraction(5, 2)


def test_two_singleton_blocks():
    x = Vector.from_mapping(2, {(0, 0): 1, (0, 1): 1})
    value, cert = norm(x, Params(2, 2, Fraction(2, 3)))
    assert value == Fraction(4, 3)
    assert [b.members for b in cert.family.blocks] == [((0, 0),), ((0, 1),)]


def test_dimension_one_frozen_value():
    # four equal coordinates, d = 2, theta = 3/4: split 2+2, each half 3/2
    x = Vector.from_mapping(1, {(n,): 1 for n in range(1, 5)})
    p = Params(1, 2, Fraction(3, 4))
    assert t1_norm([1, 1, 1, 1], 2, Fraction(3, 4)) == Fraction(9, 4)
    assert norm_value(x, p) == Fraction(9, 4)
    assert float(norm_value(x, p)) <= lp_norm(x, p.p) + 1e-12


def test_zero_vector():
    value, cert = norm(Vector(2), Params(2, 2, Fraction(1, 2)))
    assert value == 0 and cert == Leaf(None, Fraction(0))
    assert verify_certificate(Vector(2), Params(2, 2, Fraction(1, 2)), cert)


def test_dimension_mismatch():
    with pytest.raises(DimensionError):
        norm(Vector.basis((0, 1)), Params(3, 2, Fraction(1, 2)))


def test_exponent():
    p = Params(2, 2, Fraction(3, 4)).p
    assert p == pytest.approx(math.log(2) / math.log(1.5))
    assert p == pytest.approx(1.7095112913514547, abs=1e-12)
    assert Params(2, 2, Fraction(1, 2)).p is None


def test_lp_norm():
    x = Vector.from_mapping(1, {(1,): 1, (2,): 1})
    assert lp_norm(x, 2) == pytest.approx(math.sqrt(2), abs=1e-12)
    assert lp_norm(Vector.basis((4,), coefficient=-3), 1.7) == pytest.approx(3)
    with pytest.raises(ValueError):
        lp_norm(x, 0.5)
    assert l1_norm(x) == 2


def test_params_validation():
    with pytest.raises(ValueError):
        Params(2, 2, Fraction(1))
    with pytest.raises(ValueError):
        Params(0, 2, Fraction(1, 2))
    with pytest.raises(TypeError):
        Params(2, 2, 0.5)
    with pytest.raises(ValueError):
        Params(2, 2, Fraction(1, 2), "T_x")


# -- oracles --------------------------------------------------------------------------


@pytest.mark.parametrize("d,theta", [(2, Fraction(3, 4)), (3, Fraction(1, 2)), (2, Fraction(1, 3))])
def test_dimension_one_matches_partition_oracle(d, theta):
    rng = random.Random(7)
    p = Params(1, d, theta)
    for _ in range(150):
        n = rng.randint(1, 7)
        pts = sorted(rng.sample(range(0, 12), n))
        coeffs = [rng.choice(COEFFS) for _ in pts]
        x = Vector.from_mapping(1, {(i,): a for i, a in zip(pts, coeffs)})
        assert norm_value(x, p) == t1_norm(coeffs, d, theta)


@pytest.mark.parametrize("variant", [T_K, T_A])
def test_matches_naive_maximizer_wider_box(variant):
    naive = NaiveNorm(2, 2, Fraction(2, 3), bound=3, separated=variant == T_A)
    p = Params(2, 2, Fraction(2, 3), variant)
    rng = random.Random(11)
    for _ in range(120):
        n = rng.randint(1, 5)
        coords = {unrank_vertex(r, 2): rng.choice(COEFFS) for r in rng.sample(range(1, 11), n)}
        assert norm_value(Vector.from_mapping(2, coords), p) == naive(coords)


def test_naive_maximizer_dimension_three():
    naive = NaiveNorm(3, 2, Fraction(1, 2), bound=2)
    p = Params(3, 2, Fraction(1, 2))
    rng = random.Random(5)
    for _ in range(60):
        coords = {unrank_vertex(r, 3): rng.choice(COEFFS)
                  for r in rng.sample(range(1, 11), rng.randint(1, 4))}
        assert norm_value(Vector.from_mapping(3, coords), p) == naive(coords)


@pytest.mark.parametrize("k,count", [(2, 6), (3, 10)])
def test_separated_families_with_spare_separators_match_naive(k, count):
    # with d = 3 a two-block family may lean on a third separator
    naive = NaiveNorm(k, 3, Fraction(2, 3), bound=2, separated=True)
    p = Params(k, 3, Fraction(2, 3), T_A)
    rng = random.Random(k + 40)
    for _ in range(80):
        coords = {unrank_vertex(r, k): rng.choice(COEFFS)
                  for r in rng.sample(range(1, count + 1), rng.randint(1, 6))}
        assert norm_value(Vector.from_mapping(k, coords), p) == naive(coords)


def test_empty_blocks_keep_triangle_inequality():
    p = Params(3, 3, Fraction(3, 4), T_A)
    x = Vector.from_mapping(3, {(0, 0, 1): Fraction(1, 2), (1, 1, 1): Fraction(-1, 3), (0, 2, 2): 1})
    y = Vector.from_mapping(3, {(0, 0, 0): -1, (1, 1, 1): -1, (0, 0, 2): -1, (0, 2, 2): 1,
                                (1, 1, 2): Fraction(-1, 2)})
    value, cert = norm(x, p)
    assert value == Fraction(39, 32)
    assert norm_value(y, p) == Fraction(21, 8)
    assert norm_value(x + y, p) == Fraction(123, 32) == value + norm_value(y, p)
    inner = cert.children[0]
    assert len(inner.family.separators) > len(inner.family.blocks)
    assert verify_certificate(x, p, cert)
    # dropping the spare separator breaks the family
    fewer = AdmissibleFamily(inner.family.blocks, inner.family.separators[1:])
    broken = dataclasses.replace(cert, children=(dataclasses.replace(inner, family=fewer),)
                                 + cert.children[1:])
    assert not verify_certificate(x, p, broken)


def test_search_separators_budget():
    assert search_separators(2, [(0, 1), (1, 3)]) == ((0, 0), (0, 1))
    assert search_separators(2, [(0, 2)], budget=0) is None
    # (1,1) cannot directly follow (0,0) but can after (0,1)
    assert search_separators(2, [(0, 1), (2, 3)]) is None
    assert search_separators(2, [(0, 1), (1, 3)], budget=3) == ((0, 0), (0, 1))
    assert search_separators(2, [(0, 1), (2, 3)], budget=3) is None
    assert search_separators(2, [(0, 2), (2, 3)], budget=3) == ((0, 0), (0, 1), (1, 1))


# -- the level sequence -----------------------------------------------------------------


@given(vectors(2, box=8, max_support=5), st.sampled_from([T_K, T_A]))
def test_levels_monotone_and_stabilise(x, variant):
    p = Params(2, 2, Fraction(1, 2), variant)
    levels = [norm_level(x, p, j) for j in range(len(x) + 2)]
    assert levels[0] == sup_norm(x)
    assert all(a <= b for a, b in zip(levels, levels[1:]))
    assert levels[len(x)] == levels[-1] == norm_value(x, p)


def test_level_rejects_negative():
    with pytest.raises(ValueError):
        norm_level(Vector.basis((0, 0)), Params(2, 2, Fraction(1, 2)), -1)


# -- invariants ----------------------------------------------------------------------------


@given(vectors(2), params_strategy.map(lambda p: p.replace(k=2)))
def test_sandwich(x, p):
    v = norm_value(x, p)
    assert sup_norm(x) <= v <= l1_norm(x)


@given(vectors(2), st.sampled_from(COEFFS), st.sampled_from([T_K, T_A]))
def test_homogeneity(x, c, variant):
    p = Params(2, 2, Fraction(2, 3), variant)
    assert norm_value(x.scale(c), p) == abs(c) * norm_value(x, p)


@given(vectors(2), vectors(2), st.sampled_from([T_K, T_A]))
def test_triangle(x, y, variant):
    p = Params(2, 3, Fraction(1, 2), variant)
    assert norm_value(x + y, p) <= norm_value(x, p) + norm_value(y, p)


@given(vectors(2), st.data())
def test_unconditional(x, data):
    p = Params(2, 2, Fraction(3, 4), data.draw(st.sampled_from([T_K, T_A])))
    v = data.draw(st.sampled_from(x.support()))
    base = norm_value(x, p)
    assert norm_value(x.drop([v]), p) <= base
    flipped = Vector.from_mapping(2, {w: (-a if w == v else a) for w, a in x.coords})
    assert norm_value(flipped, p) == base


@given(vectors(2))
def test_variant_dominance(x):
    p = Params(2, 3, Fraction(1, 2))
    assert norm_value(x, p.replace(variant=T_A)) <= norm_value(x, p)


@given(vectors(2), st.sampled_from([T_K, T_A]))
def test_monotone_in_parameters(x, variant):
    base = Params(2, 2, Fraction(1, 2), variant)
    assert norm_value(x, base) <= norm_value(x, base.replace(theta=Fraction(2, 3)))
    assert norm_value(x, base) <= norm_value(x, base.replace(d=3))


def test_strict_dominance_exhibit():
    x = Vector.from_mapping(2, {(0, 1): 1, (1, 1): 1})
    p = Params(2, 2, Fraction(3, 4))
    assert norm_value(x, p) == Fraction(3, 2)
    assert norm_value(x, p.replace(variant=T_A)) == 1


@pytest.mark.parametrize("d,theta", [(2, Fraction(3, 4)), (3, Fraction(2, 3))])
def test_bellenot_sandwich(d, theta):
    p = Params(1, d, theta)
    rng = random.Random(3)
    for _ in range(60):
        coords = {(i,): rng.choice(COEFFS) for i in rng.sample(range(12), rng.randint(1, 8))}
        x = Vector.from_mapping(1, coords)
        lp = lp_norm(x, p.p)
        assert lp / (2 * d) <= float(norm_value(x, p)) + 1e-9
        assert float(norm_value(x, p)) <= lp + 1e-9


# -- certificates ---------------------------------------------------------------------------


@given(vectors(2, max_support=6), params_strategy.map(lambda p: p.replace(k=2)))
def test_certificates_verify(x, p):
    value, cert = norm(x, p)
    assert cert.value == value
    assert certificate_violation(x, p, cert) is None


def _nodes(cert):
    if isinstance(cert, Node):
        yield cert
        for c in cert.children:
            yield from _nodes(c)


def _deep_cert():
    x = Vector.from_mapping(2, {unrank_vertex(r, 2): 1 for r in range(1, 9)})
    p = Params(2, 2, Fraction(3, 4), T_A)
    return x, p, norm(x, p)[1]


def test_certificate_mutations_rejected():
    x, p, cert = _deep_cert()
    assert isinstance(cert, Node) and verify_certificate(x, p, cert)
    fam = cert.family
    bumped = dataclasses.replace(cert, value=cert.value + Fraction(1, 7))
    assert not verify_certificate(x, p, bumped)
    swapped = dataclasses.replace(cert, family=AdmissibleFamily(fam.blocks[::-1], fam.separators),
                                  children=cert.children[::-1])
    assert not verify_certificate(x, p, swapped)
    assert not verify_certificate(x, p, dataclasses.replace(
        cert, family=AdmissibleFamily(fam.blocks, None)))
    assert not verify_certificate(x, p.replace(variant=T_K), cert)
    blk = fam.blocks[0]
    bad_witness = type(blk)(blk.members, blk.witness[:-1] + ((blk.witness[-1][0], (9, 9)),))
    assert not verify_certificate(x, p, dataclasses.replace(
        cert, family=AdmissibleFamily((bad_witness,) + fam.blocks[1:], fam.separators)))
    child = cert.children[0]
    leaf = child if isinstance(child, Leaf) else next(
        c for c in _walk_leaves(child))
    assert not verify_certificate(x, p, _replace_leaf(cert, leaf, Leaf(leaf.vertex, leaf.value * 2)))
    assert not verify_certificate(x, p, _replace_leaf(cert, leaf, Leaf((50, 50), leaf.value)))


def _walk_leaves(cert):
    if isinstance(cert, Leaf):
        yield cert
    else:
        for c in cert.children:
            yield from _walk_leaves(c)


def _replace_leaf(cert, old, new):
    if cert is old:
        return new
    if isinstance(cert, Leaf):
        return cert
    return dataclasses.replace(cert, children=tuple(_replace_leaf(c, old, new)
                                                     for c in cert.children))


def test_wrong_vector_rejected():
    x, p, cert = _deep_cert()
    assert not verify_certificate(x.scale(2), p, cert)


def test_too_many_blocks_rejected():
    x = Vector.from_mapping(2, {(0, 0): 1, (0, 1): 1, (0, 2): 1})
    p = Params(2, 3, Fraction(1, 2))
    value, cert = norm(x, p)
    assert len(cert.family.blocks) == 3
    assert not verify_certificate(x, p.replace(d=2), cert)


# -- engine behaviour --------------------------------------------------------------------------


def test_tie_break_prefers_leaf_and_fewer_blocks():
    # theta * (1 + 1) == 1: the leaf wins the tie
    x = Vector.from_mapping(2, {(0, 0): 1, (0, 1): 1})
    value, cert = norm(x, Params(2, 2, Fraction(1, 2)))
    assert value == 1 and isinstance(cert, Leaf) and cert.vertex == (0, 0)


def test_results_are_deterministic_across_engines():
    rng = random.Random(1)
    p = Params(2, 2, Fraction(2, 3), T_A)
    for _ in range(30):
        coords = {unrank_vertex(r, 2): rng.choice(COEFFS) for r in rng.sample(range(1, 12), 5)}
        x = Vector.from_mapping(2, coords)
        assert NormEngine(p).norm(x) == NormEngine(p).norm(x) == norm(x, p)


def test_threaded_engine_matches_serial():
    from concurrent.futures import ThreadPoolExecutor

    p = Params(2, 3, Fraction(1, 2), T_A)
    rng = random.Random(2)
    xs = [Vector.from_mapping(2, {unrank_vertex(r, 2): rng.choice(COEFFS)
                                  for r in rng.sample(range(1, 15), 5)}) for _ in range(40)]
    shared = NormEngine(p)
    with ThreadPoolExecutor(4) as pool:
        threaded = list(pool.map(shared.norm, xs))
    serial = [NormEngine(p).norm(x) for x in xs]
    assert threaded == serial


def test_sign_invariance_shares_memo():
    p = Params(2, 2, Fraction(1, 2))
    eng = NormEngine(p)
    x = Vector.from_mapping(2, {(0, 0): 1, (1, 1): -2})
    eng.norm(x)
    size = eng.cache_size()
    eng.norm(-x)
    assert eng.cache_size() == size


def test_all_first_vertices_small_exhaustive():
    # every 0/1 pattern on the first 6 vertices agrees with the naive maximizer
    naive = NaiveNorm(2, 3, Fraction(1, 2), bound=2)
    p = Params(2, 3, Fraction(1, 2))
    verts = [unrank_vertex(r, 2) for r in range(1, 7)]
    for pattern in itertools.product([0, 1], repeat=6):
        coords = {v: 1 for v, b in zip(verts, pattern) if b}
        assert norm_value(Vector.from_mapping(2, coords), p) == naive(coords)
