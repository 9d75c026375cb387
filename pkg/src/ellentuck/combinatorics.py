"""Order theory and finite approximations of the k-dimensional Ellentuck space.

Sequences are plain tuples of non-negative integers.  A *seq* is a
non-decreasing tuple of length at most ``k``; a *vertex* has length exactly
``k``.  The well-order compares last entries first and breaks ties
lexicographically, with a proper initial segment below its extensions.
Ranks are 1-based: ``unrank_vertex(1, k)`` is ``(0,) * k``.
"""
from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache
from itertools import count
from math import comb
from typing import Iterable, Iterator, Optional

Seq = tuple
Vertex = tuple

LESS, EQUAL, GREATER = -1, 0, 1


class DimensionError(ValueError):
    """Raised when vertices of different dimensions are mixed."""


# --------------------------------------------------------------------------
# validation


def is_seq(s, k: int) -> bool:
    if not isinstance(s, tuple) or len(s) > k:
        return False
    prev = 0
    for a in s:
        if not isinstance(a, int) or isinstance(a, bool) or a < prev:
            return False
        prev = a
    return True


def check_seq(s, k: int) -> Seq:
    s = tuple(s)
    if not is_seq(s, k):
        raise ValueError(f"{s!r} is not a non-decreasing sequence of length <= {k}")
    return s


def check_vertex(v, k: int) -> Vertex:
    v = tuple(v)
    if len(v) != k:
        raise DimensionError(f"{v!r} is not a vertex of dimension {k}")
    if not is_seq(v, k):
        raise ValueError(f"{v!r} is not non-decreasing")
    return v


# --------------------------------------------------------------------------
# the well-order


def prec_key(s: Seq):
    """Sort key realising the well-order on sequences.

    Python tuple comparison is lexicographic with a proper prefix below its
    extensions, which is exactly the tie-break rule.
    """
    if not s:
        return (-1, ())
    return (s[-1], s)


def compare_prec(s: Seq, t: Seq) -> int:
    ks, kt = prec_key(s), prec_key(t)
    if ks < kt:
        return LESS
    if ks > kt:
        return GREATER
    return EQUAL


def prec_lt(s: Seq, t: Seq) -> bool:
    return prec_key(s) < prec_key(t)


def prec_le(s: Seq, t: Seq) -> bool:
    return prec_key(s) <= prec_key(t)


def sort_prec(items: Iterable[Seq]) -> list:
    return sorted(items, key=prec_key)


def is_initial_segment(s: Seq, t: Seq) -> bool:
    """Proper initial segment: ``s`` is strictly shorter than ``t``."""
    return len(s) < len(t) and t[: len(s)] == s


# --------------------------------------------------------------------------
# ranking
#
# A "layer" is the set of sequences with a fixed last entry c.  Within a
# layer the order is a preorder walk of the prefix tree, so subtree sizes
# are binomial coefficients.


def _subtree_size(length: int, last: int, c: int, lengths: frozenset) -> int:
    """Sequences in layer ``c`` having a fixed prefix of ``length`` ending in ``last``."""
    total = 1 if (last == c and length in lengths) else 0
    top = max(lengths)
    for r in range(1, top - length + 1):
        if length + r in lengths:
            total += comb(c - last + r - 1, r - 1)
    return total


def _layers_below(c: int, lengths: frozenset) -> int:
    return sum(comb(c + L - 1, L) for L in lengths)


def _layer_size(c: int, lengths: frozenset) -> int:
    return sum(comb(c + L - 1, L - 1) for L in lengths)


def _count_before(s: Seq, lengths: frozenset) -> int:
    """Number of non-empty sequences with allowed length strictly below ``s``."""
    c = s[-1]
    total = _layers_below(c, lengths)
    prev = 0
    for i, si in enumerate(s):
        for a in range(prev, si):
            total += _subtree_size(i + 1, a, c, lengths)
        if i + 1 < len(s) and si == c and (i + 1) in lengths:
            total += 1
        prev = si
    return total


def _unrank_nonempty(idx: int, lengths: frozenset) -> Seq:
    # idx is 0-based among non-empty sequences
    for c in count():
        size = _layer_size(c, lengths)
        if idx < size:
            break
        idx -= size
    prefix: list = []
    while True:
        if prefix and prefix[-1] == c and len(prefix) in lengths:
            if idx == 0:
                return tuple(prefix)
            idx -= 1
        lo = prefix[-1] if prefix else 0
        for a in range(lo, c + 1):
            size = _subtree_size(len(prefix) + 1, a, c, lengths)
            if idx < size:
                prefix.append(a)
                break
            idx -= size
        else:  # pragma: no cover - counts are exact
            raise AssertionError("unranking overran its layer")


@lru_cache(maxsize=None)
def _vertex_lengths(k: int) -> frozenset:
    return frozenset([k])


@lru_cache(maxsize=None)
def _seq_lengths(k: int) -> frozenset:
    return frozenset(range(1, k + 1))


@lru_cache(maxsize=1 << 16)
def _rank_vertex(v: Vertex) -> int:
    return _count_before(v, _vertex_lengths(len(v))) + 1


def rank_vertex(v: Vertex, k: Optional[int] = None) -> int:
    """1-based position of ``v`` in the well-ordered set of vertices."""
    v = check_vertex(v, len(v) if k is None else k)
    if not v:
        raise ValueError("vertices have dimension >= 1")
    return _rank_vertex(v)


@lru_cache(maxsize=1 << 16)
def unrank_vertex(n: int, k: int) -> Vertex:
    if n < 1 or k < 1:
        raise ValueError("ranks and dimensions start at 1")
    return _unrank_nonempty(n - 1, _vertex_lengths(k))


def rank_seq(s: Seq, k: int) -> int:
    s = check_seq(s, k)
    if not s:
        return 1
    return _count_before(s, _seq_lengths(k)) + 2


def unrank_seq(m: int, k: int) -> Seq:
    if m < 1 or k < 1:
        raise ValueError("ranks and dimensions start at 1")
    if m == 1:
        return ()
    return _unrank_nonempty(m - 2, _seq_lengths(k))


def iter_seqs(k: int) -> Iterator[Seq]:
    """All sequences of length <= k in increasing order, starting with ()."""
    yield ()
    lengths = _seq_lengths(k)
    for c in count():
        yield from _layer(c, k, lengths)


def iter_vertices(k: int) -> Iterator[Vertex]:
    lengths = _vertex_lengths(k)
    for c in count():
        yield from _layer(c, k, lengths)


def _layer(c: int, k: int, lengths: frozenset) -> Iterator[Seq]:
    def walk(prefix):
        if prefix and prefix[-1] == c and len(prefix) in lengths:
            yield prefix
        if len(prefix) == k:
            return
        lo = prefix[-1] if prefix else 0
        for a in range(lo, c + 1):
            yield from walk(prefix + (a,))

    yield from walk(())


@lru_cache(maxsize=64)
def _vertex_table(k: int, n: int) -> tuple:
    return tuple(unrank_vertex(i, k) for i in range(1, n + 1))


def vertices_upto(hi: Vertex) -> tuple:
    """All vertices ``v`` with ``v <= hi``, in increasing order."""
    return _vertex_table(len(hi), rank_vertex(hi))


def interval_vertices(lo: Optional[Vertex], hi: Vertex) -> list:
    """Vertices ``v`` with ``lo < v <= hi`` (``v <= hi`` when ``lo`` is None)."""
    k = len(hi)
    rh = rank_vertex(hi)
    if lo is None:
        rl = 0
    else:
        if len(lo) != k:
            raise DimensionError("interval endpoints differ in dimension")
        rl = rank_vertex(lo)
        if rl >= rh:
            return []
    return [unrank_vertex(i, k) for i in range(rl + 1, rh + 1)]


def seqs_upto(t: Seq, k: int) -> list:
    """Initial segment of ``iter_seqs(k)`` ending at ``t`` (inclusive)."""
    return [unrank_seq(m, k) for m in range(1, rank_seq(t, k) + 1)]


# --------------------------------------------------------------------------
# maximal members X_v^max


def xmax_tree(v: Vertex, s: Seq) -> Seq:
    """Image of ``s`` under the tree whose top level is X_v^max."""
    top = v[-1]
    return tuple(v[j] if m == 0 else top + m for j, m in enumerate(s))


@lru_cache(maxsize=1 << 18)
def _xmax_contains(v: Vertex, w: Vertex) -> bool:
    top = v[-1]
    if w[0] > top:
        return True
    k = len(v)
    for i in range(1, k + 1):
        if w[i - 1] != v[i - 1]:
            return False
        if i == k or w[i] > top:
            return True
    return False  # pragma: no cover


def xmax_contains(v: Vertex, w: Vertex) -> bool:
    if len(v) != len(w):
        raise DimensionError("xmax_contains needs vertices of equal dimension")
    return _xmax_contains(tuple(v), tuple(w))


def iter_xmax(v: Vertex) -> Iterator[Vertex]:
    """Members of X_v^max in increasing order (infinite)."""
    for u in iter_vertices(len(v)):
        yield xmax_tree(v, u)


# --------------------------------------------------------------------------
# finite approximations


@dataclass(frozen=True)
class Approximation:
    """A finite approximation together with the tree prefix producing it.

    ``witness`` lists ``(s, image)`` pairs for every sequence ``s`` up to and
    including the last vertex used, in increasing order.
    """

    members: tuple
    witness: tuple

    @property
    def k(self) -> int:
        return len(self.members[0])

    def __len__(self) -> int:
        return len(self.members)

    def __iter__(self):
        return iter(self.members)

    def __contains__(self, v) -> bool:
        return v in self._member_set

    @property
    def _member_set(self) -> frozenset:
        return frozenset(self.members)

    @property
    def min(self) -> Vertex:
        return self.members[0]

    @property
    def max(self) -> Vertex:
        return self.members[-1]


def check_finset(vertices: Iterable[Vertex], k: Optional[int] = None) -> tuple:
    vs = [tuple(v) for v in vertices]
    if not vs:
        raise ValueError("finite sets of vertices must be non-empty")
    k = len(vs[0]) if k is None else k
    for v in vs:
        check_vertex(v, k)
    out = tuple(sort_prec(set(vs)))
    if len(out) != len(vs):
        raise ValueError("finite sets of vertices may not repeat a vertex")
    return out


def is_approximation(vertices: Iterable[Vertex]) -> Optional[tuple]:
    """Return a tree-prefix witness if the set is some r_n(X), else None.

    Every sequence below the n-th vertex is an initial segment of one of the
    first n vertices, so the tree values on that segment are forced by the
    set; the search therefore never branches and reduces to checking the
    forced assignment.
    """
    members = check_finset(vertices)
    k = len(members[0])
    n = len(members)
    image = {(): ()}
    for i in range(n):
        u = unrank_vertex(i + 1, k)
        w = members[i]
        for ell in range(1, k + 1):
            p, val = u[:ell], w[:ell]
            old = image.get(p)
            if old is None:
                image[p] = val
            elif old != val:
                return None
    segment = seqs_upto(unrank_vertex(n, k), k)
    witness = []
    prev = None
    for s in segment:
        val = image[s]
        if prev is not None and not prec_lt(prev, val):
            return None
        prev = val
        witness.append((s, val))
    return tuple(witness)


@lru_cache(maxsize=1 << 16)
def _shared_prefix(n: int, k: int) -> tuple:
    """(length, index) of the longest prefix u_n shares with an earlier vertex."""
    u = unrank_vertex(n, k)
    best = (0, 0)
    for j in range(1, n):
        w = unrank_vertex(j, k)
        ell = 0
        while ell < k - 1 and u[ell] == w[ell]:
            ell += 1
        if ell > best[0]:
            best = (ell, j - 1)
    return best


def can_extend(members: tuple, s: Vertex) -> bool:
    """Whether ``members + (s,)`` is an approximation, given that ``members`` is one.

    Only the tree nodes between the last two generic vertices are new; they
    form a chain of prefixes of ``s``, so one consistency check and one
    comparison suffice.
    """
    n = len(members) + 1
    if n == 1:
        return True
    k = len(s)
    ell, j = _shared_prefix(n, k)
    if s[:ell] != members[j][:ell]:
        return False
    return prec_lt(members[-1], s[: ell + 1])


def make_approximation(vertices: Iterable[Vertex]) -> Optional[Approximation]:
    members = check_finset(vertices)
    witness = is_approximation(members)
    if witness is None:
        return None
    return Approximation(members, witness)


def witness_violation(approx: Approximation) -> Optional[str]:
    """Check a stored witness on its own terms; return the first problem found."""
    members = approx.members
    k = len(members[0])
    wit = approx.witness
    if not wit:
        return "empty witness"
    expected = seqs_upto(unrank_vertex(len(members), k), k)
    if [s for s, _ in wit] != expected:
        return "witness domain is not the initial segment ending at the last vertex"
    image = dict(wit)
    if image[()] != ():
        return "root must map to ()"
    prev = None
    tops = []
    for s, val in wit:
        if not is_seq(val, k) or len(val) != len(s):
            return f"image of {s} has the wrong length or is not non-decreasing"
        if s and image[s[:-1]] != val[:-1]:
            return f"image of {s} does not extend the image of its parent"
        if prev is not None and not prec_lt(prev, val):
            return f"order not preserved at {s}"
        prev = val
        if len(s) == k:
            tops.append(val)
    if tuple(tops) != tuple(members):
        return "witness top level differs from the member set"
    return None


def xmax_segment(v: Vertex, cutoff: Vertex) -> Approximation:
    """Initial segment {w in X_v^max : w <= cutoff} with its witness."""
    v = check_vertex(v, len(v))
    cutoff = check_vertex(cutoff, len(v))
    if prec_lt(cutoff, v):
        raise ValueError(f"cutoff {cutoff} lies below the anchor {v}")
    k = len(v)
    members = []
    witness = []
    for s in iter_seqs(k):
        val = xmax_tree(v, s)
        if len(s) == k:
            if prec_lt(cutoff, val):
                break
            members.append(val)
        witness.append((s, val))
    # drop the trailing prefixes that belong to the first excluded vertex
    last = unrank_vertex(len(members), k)
    witness = witness[: rank_seq(last, k)]
    return Approximation(tuple(members), tuple(witness))


def enumerate_approximations(k: int, max_entry: int, max_size: int) -> list:
    """Every approximation with entries <= max_entry and size <= max_size.

    Built by exhaustive depth-first search over tree prefixes; independent of
    the forced-assignment argument used by :func:`is_approximation`.
    """
    if k < 1 or max_entry < 0 or max_size < 0:
        raise ValueError("bounds must be non-negative and k >= 1")
    if max_size == 0:
        return []
    domain = seqs_upto(unrank_vertex(max_size, k), k)
    found: dict = {}

    def extend(pos, image, witness, tops):
        if pos == len(domain):
            return
        s = domain[pos]
        parent = image[s[:-1]]
        lo = parent[-1] if parent else 0
        prev = witness[-1][1]
        for a in range(lo, max_entry + 1):
            val = parent + (a,)
            if not prec_lt(prev, val):
                continue
            image[s] = val
            witness.append((s, val))
            if len(s) == k:
                tops.append(val)
                key = tuple(tops)
                if key not in found:
                    found[key] = Approximation(key, tuple(witness))
                extend(pos + 1, image, witness, tops)
                tops.pop()
            else:
                extend(pos + 1, image, witness, tops)
            witness.pop()
            del image[s]

    extend(1, {(): ()}, [((), ())], [])
    return sorted(found.values(), key=lambda a: (len(a), [rank_vertex(v) for v in a.members]))


def trace_set(s: Seq, vertices: Iterable[Vertex]) -> list:
    """Members of ``vertices`` having ``s`` as an initial segment (or equal)."""
    return [v for v in vertices if v[: len(s)] == s]
