"""Maps between dimensions and the trace / diagonal subspaces of a space.

A trace subspace is spanned by the basis vectors whose index extends a fixed
stem ``s``; its index set is tau[s] = {v : s is an initial segment of v}.
"""
from __future__ import annotations

from typing import Optional

from .combinatorics import (
    Approximation,
    DimensionError,
    check_seq,
    iter_vertices,
    make_approximation,
    sort_prec,
    xmax_segment,
)
from .space import Vector


def phi_vertex(v: tuple) -> tuple:
    return (0,) + tuple(v)


def psi_vertex(v: tuple) -> tuple:
    v = tuple(v)
    return v + (v[-1],)


def phi_map(x: Vector) -> Vector:
    """Prepend 0 to every index: dimension k -> k + 1."""
    return x.relabel(x.k + 1, phi_vertex)


def psi_map(x: Vector) -> Vector:
    """Repeat the last entry of every index: dimension k -> k + 1."""
    return x.relabel(x.k + 1, psi_vertex)


def tr0(vertices) -> list:
    """Drop the leading 0 from the indices that start with 0; the rest are discarded."""
    return sort_prec(tuple(v[1:]) for v in vertices if len(v) > 1 and v[0] == 0)


def tr0_vector(x: Vector) -> Vector:
    """Inverse of ``phi_map`` on vectors supported on indices starting with 0."""
    if x.k < 2:
        raise DimensionError("tr0 needs dimension >= 2")
    if any(v[0] != 0 for v in x.support()):
        raise ValueError("vector has indices outside the image of phi; split it first")
    return x.relabel(x.k - 1, lambda v: v[1:])


def _check_stem(stem, k: int) -> tuple:
    stem = check_seq(stem, k)
    if len(stem) >= k:
        raise DimensionError(f"stem {stem} must be shorter than k={k}")
    return stem


def in_trace(stem: tuple, v: tuple) -> bool:
    return tuple(v[: len(stem)]) == tuple(stem)


def trace_basis(stem, k: int, count: int) -> list:
    """The first ``count`` vertices of tau[stem] in ≺-order."""
    stem = _check_stem(stem, k)
    out = []
    if count <= 0:
        return out
    for v in iter_vertices(k):
        if in_trace(stem, v):
            out.append(v)
            if len(out) == count:
                break
    return out


def diagonal_basis(stem, k: int, count: int) -> list:
    """v_i = stem followed by (c + i - 1) repeated, where c is the last stem entry.

    An empty stem uses c = 0, giving the constant vertices (i - 1, ..., i - 1).
    """
    stem = _check_stem(stem, k)
    c = stem[-1] if stem else 0
    pad = k - len(stem)
    return [stem + (c + i,) * pad for i in range(count)]


def summand_stem(stem, k: int, i: int) -> tuple:
    """The i-th (1-based) piece s⌢(a + i - 1) of the decomposition of tau[stem]."""
    stem = _check_stem(stem, k)
    if i < 1:
        raise ValueError("summand index is 1-based")
    a = stem[-1] if stem else 0
    return stem + (a + i - 1,)


def summand_index(stem, v: tuple) -> int:
    """Which piece of tau[stem] contains ``v`` (1-based)."""
    stem = tuple(stem)
    if not in_trace(stem, v):
        raise ValueError(f"{v} does not extend {stem}")
    a = stem[-1] if stem else 0
    return v[len(stem)] - a + 1


def _trace_support(x: Vector, stem) -> tuple:
    stem = _check_stem(stem, x.k)
    outside = [v for v in x.support() if not in_trace(stem, v)]
    if outside:
        raise ValueError(f"vector has support outside tau[{stem}]: {outside[:3]}")
    return stem


def tail_projection(x: Vector, stem, m: int) -> Vector:
    """Restriction of ``x`` (supported in tau[stem]) to the first ``m`` pieces."""
    stem = _trace_support(x, stem)
    return Vector(x.k, tuple((v, a) for v, a in x.coords if summand_index(stem, v) <= m))


def component_projection(x: Vector, stem, j: int) -> Vector:
    """Restriction of ``x`` (supported in tau[stem]) to the j-th piece."""
    stem = _trace_support(x, stem)
    return Vector(x.k, tuple((v, a) for v, a in x.coords if summand_index(stem, v) == j))


def collapse_trace(x: Vector, stem) -> Vector:
    """Carry a vector on tau[stem] down to dimension k - |stem|.

    s⌢w goes to w - c entrywise, with c the last stem entry (0 for the empty
    stem).  The shift makes the map onto.
    """
    stem = _trace_support(x, stem)
    c = stem[-1] if stem else 0
    n = len(stem)
    return x.relabel(x.k - n, lambda v: tuple(e - c for e in v[n:]))


def lift_trace(y: Vector, stem, k: int) -> Vector:
    """Inverse of ``collapse_trace``."""
    stem = _check_stem(stem, k)
    if y.k != k - len(stem):
        raise DimensionError("lifted vector has the wrong dimension")
    c = stem[-1] if stem else 0
    return y.relabel(k, lambda w: stem + tuple(e + c for e in w))


def tail_vertex(stem, k: int, m: int) -> tuple:
    """v = stem⌢(m, ..., m); its X^max meets tau[stem] in the pieces from m on."""
    stem = _check_stem(stem, k)
    if stem and m <= stem[-1]:
        raise ValueError("m must exceed the last stem entry")
    return stem + (m,) * (k - len(stem))


def lift_approximation(approx: Approximation) -> Approximation:
    """An approximation one dimension up containing Phi of ``approx``, same ends."""
    top = phi_vertex(approx.max)
    return xmax_segment(phi_vertex(approx.min), top)


def trace_approximation(vertices) -> Optional[Approximation]:
    """tr0 of a set, certified as an approximation when it is one."""
    members = tr0(vertices)
    if not members:
        return None
    return make_approximation(members)


__all__ = [
    "collapse_trace",
    "component_projection",
    "diagonal_basis",
    "in_trace",
    "lift_approximation",
    "lift_trace",
    "phi_map",
    "phi_vertex",
    "psi_map",
    "psi_vertex",
    "summand_index",
    "summand_stem",
    "tail_projection",
    "tail_vertex",
    "tr0",
    "tr0_vector",
    "trace_approximation",
    "trace_basis",
]
