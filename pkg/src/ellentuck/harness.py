"""Finite reproductions of the quantitative inequalities, with reports.

Every check returns ``CheckReport`` rows.  Exact quantities are compared as
rationals; only sides involving an l_p norm with irrational p use a float
tolerance.
"""
from __future__ import annotations

import json
import math
import random
from concurrent.futures import ThreadPoolExecutor
from dataclasses import asdict, dataclass, field
from fractions import Fraction
from typing import Optional, Sequence

from .combinatorics import (
    Approximation,
    check_seq,
    check_vertex,
    iter_xmax,
    make_approximation,
    prec_le,
    prec_lt,
    rank_vertex,
    seqs_upto,
    unrank_vertex,
    xmax_contains,
    xmax_segment,
)
from .embeddings import diagonal_basis, in_trace
from .norm import AdmissibleFamily, norm_value, search_separators
from .space import T_A, T_K, Params, Vector, as_fraction, lp_of, sup_norm

TOL = 1e-9
DEFAULT_COEFFICIENTS = tuple(Fraction(a) for a in ("1", "-1", "1/2", "-1/2", "2", "-1/3"))


@dataclass
class CheckReport:
    check: str
    instance: str
    left: str
    mid: str
    right: str
    passed: bool
    tolerance: Optional[float] = None
    note: str = ""

    def as_json(self) -> dict:
        return asdict(self)


def _fmt(value) -> str:
    if isinstance(value, Fraction):
        return str(value)
    if isinstance(value, float):
        return f"{value:.12g}"
    return str(value)


def _report(check, instance, left, mid, right, passed, tolerance=None, note="") -> CheckReport:
    return CheckReport(check, instance, _fmt(left), _fmt(mid), _fmt(right), bool(passed),
                       tolerance, note)


def describe(x: Vector) -> str:
    return " + ".join(f"{a}*e{list(v)}" for v, a in x.coords) or "0"


# -- corpora ----------------------------------------------------------------


def random_vector(rng: random.Random, k: int, max_support: int, box: int = 8,
                  coefficients: Sequence = DEFAULT_COEFFICIENTS) -> Vector:
    n = rng.randint(1, min(max_support, box))
    ranks = rng.sample(range(1, box + 1), n)
    return Vector.from_mapping(k, {unrank_vertex(r, k): rng.choice(coefficients) for r in ranks})


def random_corpus(seed: int, k: int, count: int, max_support: int, box: int = 8,
                  coefficients: Sequence = DEFAULT_COEFFICIENTS) -> list:
    rng = random.Random(seed)
    return [random_vector(rng, k, max_support, box, coefficients) for _ in range(count)]


# -- Bellenot sandwich for T_1 ---------------------------------------------


def check_bellenot(params: Params, corpus: Sequence[Vector]) -> list:
    """(1/2d) ||x||_p <= ||x|| <= ||x||_p in T_1(d, theta)."""
    if params.k != 1:
        raise ValueError("the sandwich is stated for k = 1")
    p = params.p
    if p is None:
        raise ValueError(f"needs d*theta > 1, got d*theta = {params.d * params.theta}")
    out = []
    for x in corpus:
        lp = lp_of([a for _, a in x.coords], p)
        val = norm_value(x, params)
        lo = lp / (2 * params.d)
        ok = lo <= float(val) + TOL and float(val) <= lp + TOL
        out.append(_report("bellenot", describe(x), lo, val, lp, ok, TOL))
    return out


# -- l_infinity^N bounds ------------------------------------------------------


def linfty_constant(params: Params) -> Fraction:
    return params.theta * (params.d - 1) / (1 - params.theta)


def linfty_violation(stems, v, vectors: Sequence[Vector]) -> Optional[str]:
    if len(stems) != len(vectors) or not stems:
        return "need one vector per stem"
    k = vectors[0].k
    stems = [check_seq(s, k) for s in stems]
    v = check_vertex(v, k)
    if len({len(s) for s in stems}) != 1 or len(stems[0]) >= k:
        return "stems must share one length below k"
    for a, b in zip(stems, stems[1:]):
        if not prec_lt(a, b):
            return f"stems not increasing: {a}, {b}"
    if not prec_lt(stems[-1], v):
        return "last stem must precede v"
    for s, x in zip(stems, vectors):
        if x.is_zero():
            return "zero vector in the decomposition"
        for w in x.support():
            if not in_trace(s, w):
                return f"{w} is not in the trace of {s}"
            if not prec_lt(v, w):
                return f"support point {w} does not lie above v"
    return None


def check_linfty(params: Params, stems, v, vectors: Sequence[Vector]) -> CheckReport:
    """max ||x_i|| <= ||sum x_i|| <= theta (d-1)/(1-theta) max ||x_i||."""
    stems = [tuple(s) for s in stems]
    name = f"linfty[{params.variant}]"
    instance = f"N={len(stems)} stems={stems} v={tuple(v)}"
    problem = linfty_violation(stems, v, vectors)
    if problem:
        return _report(name, instance, "-", "-", "-", False, note=f"hypothesis violated: {problem}")
    total = Vector.sum_of(params.k, vectors)
    biggest = max(norm_value(x, params) for x in vectors)
    val = norm_value(total, params)
    const = linfty_constant(params)
    upper = const * biggest
    ok = biggest <= val <= upper
    note = ""
    if val < upper:
        note = f"better constant observed: ratio {val / biggest} < {const}"
    return _report(name, instance, biggest, val, upper, ok, note=note)


def linfty_instance(k: int, n: int, spacing: int = 2, extra: int = 0) -> tuple:
    """Stems (2), (4), ..., one coordinate each just above v = (m, ..., m).

    ``extra`` adds further coordinates per piece with decreasing weights.
    """
    stems = [(spacing * (i + 1),) for i in range(n)]
    top = stems[-1][0]
    v = (top,) * k
    vectors = []
    for s in stems:
        coords = {}
        for j in range(extra + 1):
            coords[s + (top + 1 + j,) * (k - 1)] = Fraction(1, j + 1)
        vectors.append(Vector.from_mapping(k, coords))
    return stems, v, vectors


# -- block l_p bounds ---------------------------------------------------------


@dataclass(frozen=True)
class BlockWitness:
    """Anchors v_i and vectors x_i with v_1 <= x_1 < v_2 <= x_2 < ... ."""

    vertices: tuple
    vectors: tuple
    params: Params

    def violation(self) -> Optional[str]:
        if len(self.vertices) != len(self.vectors) or not self.vertices:
            return "need one anchor per vector"
        for i, (v, x) in enumerate(zip(self.vertices, self.vectors)):
            supp = x.support()
            if not supp:
                return f"x_{i + 1} is zero"
            if prec_lt(supp[0], v):
                return f"x_{i + 1} starts below v_{i + 1}"
            if any(not xmax_contains(v, w) for w in supp):
                return f"supp x_{i + 1} is not inside X^max of v_{i + 1}"
            if i + 1 < len(self.vertices):
                nxt = self.vertices[i + 1]
                if not prec_lt(supp[-1], nxt):
                    return f"x_{i + 1} reaches v_{i + 2}"
                if not xmax_contains(v, nxt):
                    return f"v_{i + 2} is not in X^max of v_{i + 1}"
        return None

    def is_normalized(self) -> bool:
        return all(norm_value(x, self.params) == 1 for x in self.vectors)

    def even(self) -> "BlockWitness":
        return BlockWitness(self.vertices[1::2], self.vectors[1::2], self.params)

    def combination(self, coefficients) -> Vector:
        return Vector.sum_of(self.params.k, self.vectors, coefficients)


def normalized(x: Vector, params: Params) -> Vector:
    return x.scale(1 / norm_value(x, params))


def basis_witness(params: Params, vertices) -> BlockWitness:
    vertices = tuple(check_vertex(v, params.k) for v in vertices)
    vectors = tuple(Vector.basis(v, params.k) for v in vertices)
    return BlockWitness(vertices, vectors, params)


def diagonal_witness(params: Params, n: int, stem=()) -> BlockWitness:
    return basis_witness(params, diagonal_basis(stem, params.k, n))


def top_tree_witness(params: Params, n: int, stem=None) -> BlockWitness:
    """Witness inside tau[s] for a stem of length k - 1 (defaults to zeros)."""
    if stem is None:
        stem = (0,) * (params.k - 1)
    if len(stem) != params.k - 1:
        raise ValueError("top trees have stems of length k - 1")
    return basis_witness(params, diagonal_basis(stem, params.k, n))


def chain_witness(params: Params, n: int, width: int = 2, start=None,
                  weights: Sequence = (1, Fraction(1, 2), Fraction(1, 3))) -> BlockWitness:
    """x_i spread over the first ``width`` points of X^max(v_i); v_{i+1} is the next point."""
    v = tuple(start) if start is not None else (0,) * params.k
    vertices, vectors = [], []
    for _ in range(n):
        it = iter_xmax(v)
        pts = [next(it) for _ in range(width)]
        x = Vector.from_mapping(params.k, {w: weights[j % len(weights)] for j, w in enumerate(pts)})
        vertices.append(v)
        vectors.append(normalized(x, params))
        v = next(it)
    return BlockWitness(tuple(vertices), tuple(vectors), params)


def check_block_lp(witness: BlockWitness, coefficients, label: str = "") -> CheckReport:
    """(1/2d)||a||_p <= ||sum a_i t_i||_{T_1} <= ||sum a_i x_i|| <= (2/theta)||a||_p."""
    params = witness.params
    name = f"block_lp[{params.variant}]"
    coefficients = [as_fraction(a) for a in coefficients]
    instance = f"{label} N={len(witness.vectors)} a={[str(a) for a in coefficients]}".strip()
    problem = witness.violation()
    if problem:
        return _report(name, instance, "-", "-", "-", False, note=f"invalid witness: {problem}")
    if not witness.is_normalized():
        return _report(name, instance, "-", "-", "-", False, note="witness is not normalized")
    p = params.p
    if p is None:
        return _report(name, instance, "-", "-", "-", False, note="needs d*theta > 1")
    lp = lp_of(coefficients, p)
    t1 = Params(1, params.d, params.theta)
    mid = norm_value(Vector.from_mapping(1, {(i + 1,): a for i, a in enumerate(coefficients)}), t1)
    val = norm_value(witness.combination(coefficients), params)
    lower = lp / (2 * params.d)
    upper = 2 * lp / float(params.theta)
    ok = lower <= float(mid) + TOL and mid <= val and float(val) <= upper + TOL
    note = f"T_1 middle term {mid}"
    return _report(name, instance, lower, val, upper, ok, TOL, note)


def build_prescribed_tree(qs: Sequence[int], k: int) -> Approximation:
    """{w_1, ..., w_m} with max(w_i) = q_i and entries drawn from the q's.

    The tree is grown along the well-order of sequences: a sequence one longer
    than its predecessor repeats the predecessor's last value, and the sequence
    after the j-th vertex appends q_{j+1} to the image of its parent.
    """
    qs = [int(q) for q in qs]
    if not qs or any(a >= b for a, b in zip(qs, qs[1:])):
        raise ValueError("q's must be strictly increasing and non-empty")
    if qs[0] < 0:
        raise ValueError("q's must be non-negative")
    m = len(qs)
    image = {(): ()}
    members = []
    prev = ()
    for s in seqs_upto(unrank_vertex(m, k), k)[1:]:
        if len(s) == len(prev) + 1:
            image[s] = image[prev] + ((image[prev][-1] if prev else qs[0]),)
        else:
            image[s] = image[s[:-1]] + (qs[len(members)],)
        if len(s) == k:
            members.append(image[s])
        prev = s
    approx = make_approximation(members)
    if approx is None:  # cannot happen if the construction is right
        raise AssertionError("prescribed tree did not produce an approximation")
    return approx


def separated_family(witness: BlockWitness, index_sets: Sequence[Sequence[int]]) -> tuple:
    """A separated family catching x_{2j} for every j in each index set.

    ``index_sets`` are successive sets of 1-based indices into the even
    subsequence.  Block i runs through X^max(v_{2n_i}) up to the last support
    point of the x_{2j} it has to catch.  Separators are first taken from
    ``build_prescribed_tree`` with q_i = max v_{2n_i - 1}; when a support point
    of x_{2(n_i - 1)} shares that maximum and sits above w_i, they fail to
    interleave and a direct search is used instead.

    Returns ``(family, route)`` with route "prescribed" or "search".
    """
    sets = [sorted(s) for s in index_sets]
    if not sets or any(not s for s in sets):
        raise ValueError("index sets must be non-empty")
    for a, b in zip(sets, sets[1:]):
        if a[-1] >= b[0]:
            raise ValueError("index sets must be successive")
    if len(sets) > witness.params.d:
        raise ValueError("more index sets than d")
    vs, xs = witness.vertices, witness.vectors
    if 2 * sets[-1][-1] > len(vs):
        raise ValueError("index sets run past the witness")
    blocks = tuple(xmax_segment(vs[2 * e[0] - 1], xs[2 * e[-1] - 1].support()[-1]) for e in sets)
    qs = [max(vs[2 * e[0] - 2]) for e in sets]
    family = AdmissibleFamily(blocks, build_prescribed_tree(qs, witness.params.k).members)
    if family_violation(family) is None:
        return family, "prescribed"
    intervals = []
    for i, blk in enumerate(blocks):
        lo = rank_vertex(blocks[i - 1].max) if i else 0
        intervals.append((lo, rank_vertex(blk.min)))
    seps = search_separators(witness.params.k, intervals)
    if seps is None:
        raise ValueError("no separating approximation exists for these blocks")
    return AdmissibleFamily(blocks, seps), "search"


def family_violation(family: AdmissibleFamily) -> Optional[str]:
    blocks, seps = family.blocks, family.separators
    for a, b in zip(blocks, blocks[1:]):
        if not prec_lt(a.max, b.min):
            return "blocks are not successive"
    if seps is None:
        return None
    if make_approximation(seps) is None:
        return "separators are not an approximation"
    for i, (blk, s) in enumerate(zip(blocks, seps)):
        if not prec_le(s, blk.min):
            return f"separator {i + 1} lies above its block"
        if i and not prec_lt(blocks[i - 1].max, s):
            return f"separator {i + 1} does not clear block {i}"
    return None


# -- variant dominance --------------------------------------------------------


def check_variant_dominance(corpus: Sequence[Vector], params: Params) -> list:
    """||x||_{T_A} <= ||x||_{T_k}; strict cases are marked in the note."""
    out = []
    for x in corpus:
        a = norm_value(x, params.replace(variant=T_A))
        b = norm_value(x, params.replace(variant=T_K))
        out.append(_report("dominance", describe(x), a, "<=", b, a <= b,
                           note="strict" if a < b else ""))
    return out


def strict_dominance_example() -> tuple:
    """k=2, d=2, theta=3/4, x = e_(0,1) + e_(1,1): no separator fits between them."""
    params = Params(2, 2, Fraction(3, 4))
    x = Vector.from_mapping(2, {(0, 1): 1, (1, 1): 1})
    return params, x


# -- growth table ---------------------------------------------------------------


@dataclass
class GrowthRow:
    n: int
    linfty_norm: Fraction
    max_piece: Fraction
    sum_of_norms: Fraction
    t1_norm: Fraction
    lp_rate: float


def growth_table(params: Params, sizes: Sequence[int]) -> list:
    """N-term l_infinity witness in dimension k against the same N terms in T_1.

    The first stays bounded while sum ||x_i|| grows linearly and the T_1 norm
    of N basis vectors grows like N^(1/p).
    """
    rows = []
    t1 = Params(1, params.d, params.theta)
    p = params.p
    for n in sizes:
        stems, v, vectors = linfty_instance(params.k, n)
        total = Vector.sum_of(params.k, vectors)
        norms = [norm_value(x, params) for x in vectors]
        ones = Vector.from_mapping(1, {(i + 1,): 1 for i in range(n)})
        rows.append(GrowthRow(n, norm_value(total, params), max(norms), sum(norms, Fraction(0)),
                              norm_value(ones, t1), n ** (1 / p) if p else float("nan")))
    return rows


def growth_text(rows: Sequence[GrowthRow]) -> str:
    lines = [f"{'N':>3} {'||sum x_i||':>12} {'max||x_i||':>11} {'sum||x_i||':>11} "
             f"{'||sum t_i||_1':>14} {'N^(1/p)':>9}"]
    for r in rows:
        lines.append(f"{r.n:>3} {str(r.linfty_norm):>12} {str(r.max_piece):>11} "
                     f"{str(r.sum_of_norms):>11} {str(r.t1_norm):>14} {r.lp_rate:>9.4f}")
    return "\n".join(lines)


# -- suite ----------------------------------------------------------------------


@dataclass
class SuiteConfig:
    seed: int = 0
    checks: tuple = ("bellenot", "linfty", "block_lp", "dominance", "prescribed")
    corpus_size: int = 20
    max_support: int = 6
    d: int = 2
    theta: Fraction = Fraction(3, 4)
    linfty_sizes: tuple = (2, 3, 4)
    block_sizes: tuple = (2, 3, 4, 5)
    workers: int = 1

    @classmethod
    def from_dict(cls, data: dict) -> "SuiteConfig":
        known = set(cls.__dataclass_fields__)
        unknown = set(data) - known
        if unknown:
            raise ValueError(f"unknown config keys: {sorted(unknown)}")
        data = dict(data)
        if "theta" in data:
            data["theta"] = Fraction(data["theta"])
        for key in ("checks", "linfty_sizes", "block_sizes"):
            if key in data:
                data[key] = tuple(data[key])
        return cls(**data)


@dataclass
class SuiteReport:
    reports: list = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return all(r.passed for r in self.reports)

    def to_json(self) -> str:
        return json.dumps({"ok": self.ok, "reports": [r.as_json() for r in self.reports]}, indent=2)

    def to_text(self) -> str:
        rows = [("check", "instance", "left", "mid", "right", "ok", "note")]
        for r in self.reports:
            rows.append((r.check, r.instance, r.left, r.mid, r.right,
                         "PASS" if r.passed else "FAIL", r.note))
        widths = [min(max(len(row[i]) for row in rows), 60) for i in range(len(rows[0]))]
        lines = ["  ".join(cell[:60].ljust(w) for cell, w in zip(row, widths)).rstrip()
                 for row in rows]
        failed = sum(not r.passed for r in self.reports)
        lines.append(f"{len(self.reports)} checks, {failed} failed")
        return "\n".join(lines)


def _coefficient_patterns(n: int) -> list:
    return [[1] * n, [Fraction((-1) ** i, i + 1) for i in range(n)]]


def _suite_jobs(cfg: SuiteConfig) -> list:
    jobs = []
    theta, d = cfg.theta, cfg.d
    if "bellenot" in cfg.checks:
        corpus = random_corpus(cfg.seed, 1, cfg.corpus_size, cfg.max_support)
        jobs.append(lambda c=corpus: check_bellenot(Params(1, d, theta), c))
    if "linfty" in cfg.checks:
        for variant in (T_K, T_A):
            params = Params(2, 3, Fraction(1, 2), variant)
            for n in cfg.linfty_sizes:
                for extra in (0, 1):
                    stems, v, vectors = linfty_instance(2, n, extra=extra)
                    jobs.append(lambda p=params, s=stems, v=v, x=vectors: [check_linfty(p, s, v, x)])
    if "block_lp" in cfg.checks:
        for variant in (T_K, T_A):
            params = Params(2, d, theta, variant)
            for n in cfg.block_sizes:
                size = 2 * n if variant == T_A else n
                witnesses = [("diagonal", diagonal_witness(params, size)),
                             ("top-tree", top_tree_witness(params, size)),
                             ("chain", chain_witness(params, size))]
                for label, wit in witnesses:
                    if variant == T_A:
                        wit, label = wit.even(), label + " even"
                    for coeffs in _coefficient_patterns(n):
                        jobs.append(lambda w=wit, c=coeffs, lb=label: [check_block_lp(w, c, lb)])
    if "dominance" in cfg.checks:
        corpus = random_corpus(cfg.seed + 1, 2, cfg.corpus_size, cfg.max_support)
        params = Params(2, 3, Fraction(1, 2))
        jobs.append(lambda c=corpus, p=params: check_variant_dominance(c, p))
    if "prescribed" in cfg.checks:
        rng = random.Random(cfg.seed + 2)
        for k in (2, 3):
            for m in (1, 2, 3, 4):
                qs = sorted(rng.sample(range(1, 12), m))
                jobs.append(lambda q=qs, k=k: [_check_prescribed(q, k)])
    return jobs


def _check_prescribed(qs, k) -> CheckReport:
    approx = build_prescribed_tree(qs, k)
    maxes = [max(w) for w in approx.members]
    entries_ok = all(e in qs for w in approx.members for e in w)
    ok = maxes == list(qs) and entries_ok
    return _report("prescribed_tree", f"k={k} q={list(qs)}", list(qs), "==", maxes, ok)


def run_suite(config: Optional[SuiteConfig] = None) -> SuiteReport:
    cfg = config or SuiteConfig()
    jobs = _suite_jobs(cfg)
    if cfg.workers > 1:
        with ThreadPoolExecutor(cfg.workers) as pool:
            batches = list(pool.map(lambda job: job(), jobs))
    else:
        batches = [job() for job in jobs]
    reports = [r for batch in batches for r in batch]
    reports.sort(key=lambda r: (r.check, r.instance))
    return SuiteReport(reports)


def lp_exponent(d: int, theta) -> float:
    dt = d * as_fraction(theta)
    if dt <= 1:
        raise ValueError("p is defined only for d*theta > 1")
    return math.log(d) / math.log(dt)


__all__ = [
    "BlockWitness",
    "CheckReport",
    "SuiteConfig",
    "SuiteReport",
    "build_prescribed_tree",
    "chain_witness",
    "check_bellenot",
    "check_block_lp",
    "check_linfty",
    "check_variant_dominance",
    "diagonal_witness",
    "growth_table",
    "linfty_instance",
    "run_suite",
    "separated_family",
    "sup_norm",
    "top_tree_witness",
]
