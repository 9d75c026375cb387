"""Norming functionals: the sets K_n and the dual description |x|_n* = max f(x).

This is a verification oracle, not a production norm path.  Generation is
exponential, so it is confined to an explicit box of vertices.

K_n is closed under sign changes of individual coordinates (supports of the
summands are disjoint), so generation works on non-negative "shapes" and
signs are only expanded when the caller asks for the functionals themselves.
"""
from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from itertools import product
from typing import Iterable, Optional

from .combinatorics import (
    check_vertex,
    enumerate_approximations,
    prec_lt,
    rank_vertex,
    sort_prec,
    unrank_vertex,
)
from .space import T_A, Params, Vector

MAX_BOX = 8
MAX_SHAPES = 200_000


class ResourceError(RuntimeError):
    pass


@dataclass(frozen=True)
class Functional:
    """A member of K_n: coefficients on vertices plus the depth it first appears at."""

    vector: Vector
    depth: int

    def __call__(self, x: Vector) -> Fraction:
        return apply(self.vector, x)

    def support(self) -> list:
        return self.vector.support()


def apply(f: Vector, x: Vector) -> Fraction:
    xs = x.as_dict()
    return sum((a * xs.get(v, 0) for v, a in f.coords), Fraction(0))


def make_box(k: int, box) -> tuple:
    """Normalise a box: an int means the first ``box`` vertices, else explicit vertices."""
    if isinstance(box, int):
        verts = [unrank_vertex(r, k) for r in range(1, box + 1)]
    else:
        verts = [check_vertex(v, k) for v in box]
    verts = tuple(sort_prec(set(verts)))
    if len(verts) > MAX_BOX:
        raise ResourceError(f"box has {len(verts)} vertices; at most {MAX_BOX} are supported")
    return verts


class _Cover:
    """Almost-admissibility tests inside one box, backed by exhaustive enumeration."""

    def __init__(self, params: Params, box: tuple):
        self.params = params
        top = box[-1]
        bound = top[-1]
        approx = enumerate_approximations(params.k, bound, rank_vertex(top))
        self.approximations = [a for a in approx if not prec_lt(top, a.max)]
        self.separators = [a.members for a in self.approximations if len(a) <= params.d]
        self._best_min: dict = {}

    def best_min(self, support: tuple) -> Optional[tuple]:
        """≺-largest min E over approximations E ⊇ support with max E = max support."""
        hit = self._best_min.get(support, False)
        if hit is not False:
            return hit
        need = set(support)
        best = None
        for a in self.approximations:
            if a.max == support[-1] and need.issubset(a.members):
                if best is None or prec_lt(best, a.min):
                    best = a.min
        self._best_min[support] = best
        return best

    def admissible(self, supports: list) -> bool:
        mins = []
        for i, s in enumerate(supports):
            b = self.best_min(s)
            if b is None:
                return False
            if i and not prec_lt(supports[i - 1][-1], b):
                return False
            mins.append(b)
        if self.params.variant != T_A:
            return True
        maxes = [s[-1] for s in supports]
        return any(_embeds(sep, mins, maxes) for sep in self.separators)


def _embeds(sep: tuple, mins: list, maxes: list) -> bool:
    """Indices n_1 < ... < n_m with sep[n_i] ≼ mins[i] and maxes[i] ≺ sep[n_i + 1]."""
    m, size = len(mins), len(sep)

    @lru_cache(maxsize=None)
    def fit(i: int, start: int) -> bool:
        if i == m:
            return True
        for n in range(start, size):
            if prec_lt(mins[i], sep[n]):
                break
            if n + 1 < size and not prec_lt(maxes[i], sep[n + 1]):
                continue
            if fit(i + 1, n + 1):
                return True
        return False

    return fit(0, 0)


@lru_cache(maxsize=32)
def _shapes(params: Params, n: int, box: tuple) -> dict:
    """Non-negative members of K_n inside the box, keyed by coefficients, with depth."""
    if n == 0:
        return {((v, Fraction(1)),): 0 for v in box}
    prev = _shapes(params, n - 1, box)
    cover = _Cover(params, box)
    theta = params.theta
    out = dict(prev)
    items = sorted(prev, key=lambda s: (rank_vertex(s[0][0]), s))

    def grow(chain: list, last_rank: int):
        if chain:
            supports = [tuple(v for v, _ in s) for s in chain]
            if cover.admissible(supports):
                coords = tuple((v, theta * a) for s in chain for v, a in s)
                if coords not in out:
                    out[coords] = n
                    if len(out) > MAX_SHAPES:
                        raise ResourceError("functional set exceeds the resource guard")
            else:
                return
        if len(chain) == params.d:
            return
        for s in items:
            if rank_vertex(s[0][0]) > last_rank:
                grow(chain + [s], rank_vertex(s[-1][0]))

    grow([], 0)
    return out


def generate_functionals(params: Params, n: int, box) -> set:
    """All signed functionals of depth ≤ n supported in the box."""
    if n < 0:
        raise ValueError("depth must be >= 0")
    box = make_box(params.k, box)
    result = set()
    for coords, depth in _shapes(params, n, box).items():
        for signs in product((1, -1), repeat=len(coords)):
            vec = Vector(params.k, tuple((v, s * a) for (v, a), s in zip(coords, signs)))
            result.add(Functional(vec, depth))
    return result


def dual_norm_level(x: Vector, params: Params, n: int, box=None) -> Fraction:
    """max f(x) over K_n; the box defaults to every vertex up to max supp x."""
    if x.is_zero():
        return Fraction(0)
    if box is None:
        box = rank_vertex(x.support()[-1])
    box = make_box(params.k, box)
    if not set(x.support()).issubset(box):
        raise ValueError("support of x is not inside the generation box")
    ax = x.abs().as_dict()
    best = Fraction(0)
    for coords in _shapes(params, n, box):
        val = sum((a * ax.get(v, 0) for v, a in coords), Fraction(0))
        if val > best:
            best = val
    return best


def functionals_json_order(fs: Iterable[Functional]) -> list:
    return sorted(fs, key=lambda f: (f.depth, [(rank_vertex(v), a) for v, a in f.vector.coords]))
