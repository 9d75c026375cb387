"""Exact norms of T_k(d, theta) and T(A_d^k, theta) with norming certificates.

A maximising admissible family can always be taken with every block of the
form ``xmax_segment(anchor, end)``: an approximation with minimum ``v`` lies
inside X_v^max, so enlarging it to the full segment of X_v^max between the
same endpoints keeps it successive and, by 1-unconditionality, never lowers
``||E x||``.  Blocks are therefore described by an anchor vertex and the
support points it captures, and the search runs over chains of such blocks.

Blocks that capture the whole support contribute ``theta * ||x|| < ||x||``
and are skipped, so the recursion always descends to strictly smaller
supports.

For separated families, blocks that miss the support still count towards
``d`` and still need separators.  They are never written out: a family is
described by its capturing blocks plus a separator approximation of size at
most ``d`` in which every capturing block owns one separator, and each
remaining separator s stands for the block {s}.
"""
from __future__ import annotations

import bisect
import threading
from dataclasses import dataclass
from fractions import Fraction
from typing import Optional, Sequence, Union

from .combinatorics import (
    Approximation,
    DimensionError,
    can_extend,
    is_approximation,
    prec_lt,
    rank_vertex,
    unrank_vertex,
    vertices_upto,
    witness_violation,
    xmax_contains,
    xmax_segment,
)
from .space import T_A, T_K, Params, Vector, sup_norm


@dataclass(frozen=True)
class AdmissibleFamily:
    blocks: tuple
    separators: Optional[tuple] = None


@dataclass(frozen=True)
class Leaf:
    """``value = |x_v|``; ``vertex`` is None only for the zero vector."""

    vertex: Optional[tuple]
    value: Fraction


@dataclass(frozen=True)
class Node:
    family: AdmissibleFamily
    children: tuple
    value: Fraction


Certificate = Union[Leaf, Node]


@dataclass(frozen=True)
class _Block:
    members: tuple        # indices into the support, increasing
    anchor_ranks: tuple   # ranks of the anchors capturing exactly ``members``

    @property
    def first(self) -> int:
        return self.members[0]

    @property
    def end(self) -> int:
        return self.members[-1]

    @property
    def top(self) -> int:
        return self.anchor_ranks[-1]

    def anchor_above(self, rank: int) -> Optional[int]:
        i = bisect.bisect_right(self.anchor_ranks, rank)
        return self.anchor_ranks[i] if i < len(self.anchor_ranks) else None


@dataclass(frozen=True)
class _Chain:
    total: Fraction
    blocks: tuple = ()
    anchors: tuple = ()
    separators: Optional[tuple] = None

    def key(self):
        return (-self.total, len(self.blocks), self.anchors, tuple(b.members for b in self.blocks))


_EMPTY = _Chain(Fraction(0))


class NormEngine:
    """Memoised norm computations for one parameter set.

    The memo tables are plain dicts written with ``setdefault`` so concurrent
    threads can share an engine; a value computed twice is identical, and
    the first insert wins.
    """

    def __init__(self, params: Params):
        self.params = params
        self._norms: dict = {}
        self._levels: dict = {}
        self._blocks: dict = {}
        self._feasible: dict = {}

    # -- public -----------------------------------------------------------

    def norm(self, x: Vector):
        self._check_dim(x)
        return self._norm(x.abs_key())

    def level(self, x: Vector, j: int) -> Fraction:
        self._check_dim(x)
        if j < 0:
            raise ValueError("level index must be >= 0")
        return self._level(x.abs_key(), j)

    def cache_size(self) -> int:
        return len(self._norms)

    # -- internals --------------------------------------------------------

    def _check_dim(self, x: Vector):
        if x.k != self.params.k:
            raise DimensionError(f"vector has dimension {x.k}, space has k={self.params.k}")

    def _norm(self, pts: tuple):
        hit = self._norms.get(pts)
        if hit is not None:
            return hit
        if not pts:
            return self._norms.setdefault(pts, (Fraction(0), Leaf(None, Fraction(0))))
        theta = self.params.theta
        leaf = _sup_leaf(pts)

        def value(members):
            return self._norm(tuple(pts[i] for i in members))[0]

        chain = self._best_chain(pts, value, floor=leaf.value / theta)
        if chain is None:
            result = (leaf.value, leaf)
        else:
            result = (theta * chain.total, self._node(pts, chain))
        return self._norms.setdefault(pts, result)

    def _level(self, pts: tuple, j: int) -> Fraction:
        key = (pts, j)
        hit = self._levels.get(key)
        if hit is not None:
            return hit
        base = _sup_leaf(pts).value if pts else Fraction(0)
        if j == 0 or not pts:
            return self._levels.setdefault(key, base)
        prev = self._level(pts, j - 1)
        theta = self.params.theta

        def value(members):
            return self._level(tuple(pts[i] for i in members), j - 1)

        chain = self._best_chain(pts, value, floor=prev / theta)
        result = prev if chain is None else theta * chain.total
        return self._levels.setdefault(key, result)

    def _node(self, pts: tuple, chain: _Chain) -> Node:
        k = self.params.k
        blocks = []
        children = []
        for blk, anchor_rank in zip(chain.blocks, chain.anchors):
            end = pts[blk.end][0]
            blocks.append(xmax_segment(unrank_vertex(anchor_rank, k), end))
            children.append(self._norm(tuple(pts[i] for i in blk.members))[1])
        family = AdmissibleFamily(tuple(blocks), chain.separators)
        return Node(family, tuple(children), self.params.theta * chain.total)

    def _candidate_blocks(self, pts: tuple) -> list:
        hit = self._blocks.get(pts)
        if hit is not None:
            return hit
        support = [v for v, _ in pts]
        ranks = [rank_vertex(v) for v in support]
        n = len(support)
        groups: dict = {}
        for r, v in enumerate(vertices_upto(support[-1]), start=1):
            captured = [i for i in range(n) if ranks[i] >= r and xmax_contains(v, support[i])]
            for t in range(len(captured)):
                members = tuple(captured[: t + 1])
                if len(members) < n:
                    groups.setdefault(members, []).append(r)
        blocks = [_Block(m, tuple(rs)) for m, rs in groups.items()]
        blocks.sort(key=lambda b: (b.first, b.end, b.members))
        return self._blocks.setdefault(pts, blocks)

    def _best_chain(self, pts: tuple, value, floor: Fraction) -> Optional[_Chain]:
        """Best chain of blocks whose summed value strictly exceeds ``floor``."""
        blocks = self._candidate_blocks(pts)
        if not blocks:
            return None
        ranks = [rank_vertex(v) for v, _ in pts]
        vals = {b.members: value(b.members) for b in blocks}
        d = self.params.d
        dp_memo: dict = {}

        def dp(prev: int, r: int) -> _Chain:
            # best chain of at most r blocks with anchors above support index prev
            key = (prev, r)
            if key in dp_memo:
                return dp_memo[key]
            best = _EMPTY
            if r > 0:
                floor_rank = ranks[prev] if prev >= 0 else 0
                for b in blocks:
                    if b.first <= prev:
                        continue
                    anchor = b.anchor_above(floor_rank)
                    if anchor is None:
                        continue
                    rest = dp(b.end, r - 1)
                    cand = _Chain(vals[b.members] + rest.total, (b,) + rest.blocks,
                                  (anchor,) + rest.anchors)
                    if cand.key() < best.key():
                        best = cand
            dp_memo[key] = best
            return best

        if self.params.variant == T_K:
            best = dp(-1, d)
            return best if best.total > floor else None
        return self._best_separated_chain(pts, blocks, vals, ranks, dp, floor)

    def _best_separated_chain(self, pts, blocks, vals, ranks, dp, floor) -> Optional[_Chain]:
        """Branch and bound over chains; each chain needs a separating approximation.

        Block ``i`` may have its separator anywhere in (end of block i-1,
        largest anchor of block i]; a larger interval is never worse, so only
        the largest anchor matters for feasibility.  Extra separators for
        empty blocks may sit below it in the same interval.
        """
        d = self.params.d
        order = sorted(blocks, key=lambda b: (-vals[b.members], b.first, b.end, b.members))
        best = [None, floor, 0]  # chain, total, block count

        def visit(prefix, prev, left, acc, intervals):
            if prefix and (acc > best[1] or (acc == best[1] and best[0] is not None
                                              and len(prefix) < best[2])):
                best[0] = (tuple(prefix), intervals)
                best[1] = acc
                best[2] = len(prefix)
            if left == 0:
                return
            floor_rank = ranks[prev] if prev >= 0 else 0
            for b in order:
                if b.first <= prev or b.top <= floor_rank:
                    continue
                bound = acc + vals[b.members] + dp(b.end, left - 1).total
                if bound < best[1] or (bound == best[1] and len(prefix) + 1 >= max(best[2], 1)
                                       and best[0] is not None):
                    continue
                if bound == best[1] and best[0] is None:
                    continue
                ivs = intervals + ((floor_rank, b.top),)
                if self._separators(ivs) is None:
                    continue
                visit(prefix + [b], b.end, left - 1, acc + vals[b.members], ivs)

        visit([], -1, d, Fraction(0), ())
        if best[0] is None:
            return None
        chain_blocks, intervals = best[0]
        seps = self._separators(intervals)
        seps_ranks = [rank_vertex(s) for s in seps]
        # the separator owned by block i is the last one at or below its top anchor
        owned = [seps_ranks[bisect.bisect_right(seps_ranks, hi) - 1] for _, hi in intervals]
        anchors = tuple(b.anchor_above(r - 1) for b, r in zip(chain_blocks, owned))
        return _Chain(best[1], chain_blocks, anchors, seps)

    def _separators(self, intervals: tuple) -> Optional[tuple]:
        if intervals in self._feasible:
            return self._feasible[intervals]
        found = search_separators(self.params.k, intervals, self.params.d)
        return self._feasible.setdefault(intervals, found)


def search_separators(k: int, intervals: Sequence, budget: Optional[int] = None) -> Optional[tuple]:
    """An approximation hitting every rank interval (lo_i, hi_i], or None.

    With the default budget there is exactly one separator per interval.  A
    larger budget allows up to ``budget`` separators in total, each interval
    receiving a non-empty increasing group.
    """
    intervals = tuple(intervals)
    n = len(intervals)
    budget = n if budget is None else budget
    if budget < n:
        return None

    def search(i, chosen, last, in_group):
        # in_group: interval i already holds at least one separator
        if in_group:
            if i + 1 == n:
                return chosen
            found = search(i + 1, chosen, last, False)
            if found is not None:
                return found
        spare = budget - len(chosen) - (n - i - (1 if in_group else 0))
        if spare <= 0 and in_group:
            return None
        lo, hi = intervals[i]
        for r in range(max(lo, last) + 1, hi + 1):
            s = unrank_vertex(r, k)
            if chosen and not can_extend(chosen, s):
                continue
            found = search(i, chosen + (s,), r, True)
            if found is not None:
                return found
        return None

    if n == 0:
        return ()
    return search(0, (), 0, False)


def _sup_leaf(pts: tuple) -> Leaf:
    best_v, best_a = pts[0]
    for v, a in pts[1:]:
        if a > best_a:
            best_v, best_a = v, a
    return Leaf(best_v, best_a)


_ENGINES: dict = {}
_ENGINES_LOCK = threading.Lock()


def engine_for(params: Params) -> NormEngine:
    eng = _ENGINES.get(params)
    if eng is None:
        with _ENGINES_LOCK:
            eng = _ENGINES.setdefault(params, NormEngine(params))
    return eng


def norm(x: Vector, params: Params):
    """Return ``(value, certificate)`` for the norm of ``x``."""
    return engine_for(params).norm(x)


def norm_value(x: Vector, params: Params) -> Fraction:
    return engine_for(params).norm(x)[0]


def norm_level(x: Vector, params: Params, j: int) -> Fraction:
    """The j-th iterate |x|_j of the implicit norm recursion."""
    return engine_for(params).level(x, j)


# --------------------------------------------------------------------------
# certificate checking


def certificate_violation(x: Vector, params: Params, cert) -> Optional[str]:
    """First reason ``cert`` fails to prove a lower bound for ``||x||``, or None.

    Everything is re-derived from scratch: block membership goes through
    ``is_approximation``, never through the search that produced the tree.
    """
    if x.k != params.k:
        return "dimension mismatch"
    return _violation(x.abs_key(), params, cert, "root")


def verify_certificate(x: Vector, params: Params, cert) -> bool:
    return certificate_violation(x, params, cert) is None


def _violation(pts: tuple, params: Params, cert, where: str) -> Optional[str]:
    coeffs = dict(pts)
    if isinstance(cert, Leaf):
        if cert.vertex is None:
            if cert.value != 0:
                return f"{where}: empty leaf must have value 0"
            return None
        v = tuple(cert.vertex)
        if v not in coeffs:
            return f"{where}: leaf vertex {v} is outside the support"
        if coeffs[v] != cert.value:
            return f"{where}: leaf value {cert.value} != |x_v| = {coeffs[v]}"
        return None
    if not isinstance(cert, Node):
        return f"{where}: unknown certificate node"
    fam = cert.family
    m = len(fam.blocks)
    if not 1 <= m <= params.d:
        return f"{where}: family has {m} blocks, allowed 1..{params.d}"
    if len(cert.children) != m:
        return f"{where}: {len(cert.children)} children for {m} blocks"
    for i, blk in enumerate(fam.blocks):
        if not isinstance(blk, Approximation) or not blk.members:
            return f"{where}: block {i} is not an approximation"
        if any(len(v) != params.k for v in blk.members):
            return f"{where}: block {i} has wrong dimension"
        if is_approximation(blk.members) is None:
            return f"{where}: block {i} is not a finite approximation"
        problem = witness_violation(blk)
        if problem:
            return f"{where}: block {i} witness invalid ({problem})"
    for i in range(m - 1):
        if not prec_lt(fam.blocks[i].max, fam.blocks[i + 1].min):
            return f"{where}: blocks {i} and {i + 1} are not successive"
    if params.variant == T_A:
        seps = fam.separators
        if seps is None or not m <= len(seps) <= params.d:
            return f"{where}: T_A family needs between {m} and {params.d} separators"
        seps = tuple(tuple(s) for s in seps)
        if is_approximation(seps) is None or list(seps) != sorted(seps, key=rank_vertex):
            return f"{where}: separators do not form a finite approximation"
        pos = -1
        for i, blk in enumerate(fam.blocks):
            # block i owns the last separator at or below its minimum
            nxt = pos + 1
            while nxt < len(seps) and not prec_lt(blk.min, seps[nxt]):
                nxt += 1
            if nxt == pos + 1:
                return f"{where}: no separator for block {i}"
            pos = nxt - 1
            if nxt < len(seps) and not prec_lt(blk.max, seps[nxt]):
                return f"{where}: block {i} reaches the next separator"
    elif fam.separators is not None:
        return f"{where}: T_k families carry no separators"
    total = Fraction(0)
    for i, (blk, child) in enumerate(zip(fam.blocks, cert.children)):
        inside = set(blk.members)
        sub = tuple((v, a) for v, a in pts if v in inside)
        problem = _violation(sub, params, child, f"{where}.{i}")
        if problem:
            return problem
        if isinstance(child, Leaf) and child.vertex is None:
            return f"{where}.{i}: empty child"
        total += child.value
    if cert.value != params.theta * total:
        return f"{where}: value {cert.value} != theta * sum of children = {params.theta * total}"
    return None


def certificate_depth(cert) -> int:
    if isinstance(cert, Leaf):
        return 0
    return 1 + max(certificate_depth(c) for c in cert.children)


__all__ = [
    "AdmissibleFamily",
    "Leaf",
    "Node",
    "NormEngine",
    "certificate_violation",
    "engine_for",
    "norm",
    "norm_level",
    "norm_value",
    "sup_norm",
    "verify_certificate",
]
