"""Parameters of a space and finitely supported rational vectors on its basis."""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable, Mapping, Optional

from .combinatorics import DimensionError, check_vertex, prec_key

T_K = "T_k"
T_A = "T_A"
VARIANTS = (T_K, T_A)


def as_fraction(value) -> Fraction:
    if isinstance(value, Fraction):
        return value
    if isinstance(value, float):
        raise TypeError("floats are not accepted where exact rationals are required")
    return Fraction(value)


@dataclass(frozen=True)
class Params:
    """Dimension ``k``, branching bound ``d``, weight ``theta`` and norm variant."""

    k: int
    d: int
    theta: Fraction
    variant: str = T_K

    def __post_init__(self):
        object.__setattr__(self, "theta", as_fraction(self.theta))
        if self.k < 1:
            raise ValueError("k must be >= 1")
        if self.d < 1:
            raise ValueError("d must be >= 1")
        if not 0 < self.theta < 1:
            raise ValueError("theta must lie strictly between 0 and 1")
        if self.variant not in VARIANTS:
            raise ValueError(f"variant must be one of {VARIANTS}")

    @property
    def p(self) -> Optional[float]:
        """Exponent with d*theta = d**(1/p); None unless d*theta > 1."""
        dt = self.d * self.theta
        if dt <= 1:
            return None
        return math.log(self.d) / math.log(dt)

    def replace(self, **changes) -> "Params":
        fields = dict(k=self.k, d=self.d, theta=self.theta, variant=self.variant)
        fields.update(changes)
        return Params(**fields)


@dataclass(frozen=True)
class Vector:
    """Finitely supported rational vector; ``coords`` holds only nonzero entries.

    Entries are kept sorted by the well-order so equal vectors compare and
    hash equal.
    """

    k: int
    coords: tuple = field(default=())

    @classmethod
    def from_mapping(cls, k: int, mapping: Mapping) -> "Vector":
        items = {}
        for v, a in mapping.items():
            v = check_vertex(v, k)
            a = as_fraction(a)
            if a:
                items[v] = items.get(v, 0) + a
        return cls(k, tuple(sorted(((v, a) for v, a in items.items() if a),
                                   key=lambda va: prec_key(va[0]))))

    @classmethod
    def basis(cls, v, k: Optional[int] = None, coefficient=1) -> "Vector":
        v = tuple(v)
        return cls.from_mapping(len(v) if k is None else k, {v: coefficient})

    @classmethod
    def sum_of(cls, k: int, vectors: Iterable["Vector"], coefficients=None) -> "Vector":
        acc: dict = {}
        vectors = list(vectors)
        if coefficients is None:
            coefficients = [1] * len(vectors)
        for c, x in zip(coefficients, vectors):
            if x.k != k:
                raise DimensionError("summands must share the ambient dimension")
            c = as_fraction(c)
            for v, a in x.coords:
                acc[v] = acc.get(v, 0) + c * a
        return cls.from_mapping(k, acc)

    def __len__(self) -> int:
        return len(self.coords)

    def __getitem__(self, v) -> Fraction:
        return self.as_dict().get(tuple(v), Fraction(0))

    def as_dict(self) -> dict:
        return dict(self.coords)

    def support(self) -> list:
        return [v for v, _ in self.coords]

    def is_zero(self) -> bool:
        return not self.coords

    def restrict(self, vertices) -> "Vector":
        keep = set(map(tuple, vertices))
        return Vector(self.k, tuple((v, a) for v, a in self.coords if v in keep))

    def drop(self, vertices) -> "Vector":
        gone = set(map(tuple, vertices))
        return Vector(self.k, tuple((v, a) for v, a in self.coords if v not in gone))

    def abs(self) -> "Vector":
        return Vector(self.k, tuple((v, abs(a)) for v, a in self.coords))

    def scale(self, c) -> "Vector":
        c = as_fraction(c)
        if not c:
            return Vector(self.k)
        return Vector(self.k, tuple((v, c * a) for v, a in self.coords))

    def __add__(self, other: "Vector") -> "Vector":
        return Vector.sum_of(self.k, [self, other])

    def __sub__(self, other: "Vector") -> "Vector":
        return Vector.sum_of(self.k, [self, other], [1, -1])

    def __neg__(self) -> "Vector":
        return self.scale(-1)

    def relabel(self, k: int, fn) -> "Vector":
        """Move every coordinate from ``v`` to ``fn(v)`` in dimension ``k``."""
        mapping = {}
        for v, a in self.coords:
            w = check_vertex(fn(v), k)
            if w in mapping:
                raise ValueError("relabelling must be injective on the support")
            mapping[w] = a
        return Vector.from_mapping(k, mapping)

    def abs_key(self) -> tuple:
        """Canonical key up to signs (norms here are sign-invariant)."""
        return tuple((v, abs(a)) for v, a in self.coords)


def sup_norm(x: Vector) -> Fraction:
    return max((abs(a) for _, a in x.coords), default=Fraction(0))


def l1_norm(x: Vector) -> Fraction:
    return sum((abs(a) for _, a in x.coords), Fraction(0))


def lp_norm(x: Vector, p: float) -> float:
    if p < 1:
        raise ValueError("p must be >= 1")
    if p == 1:
        return float(l1_norm(x))
    return math.fsum(float(abs(a)) ** p for _, a in x.coords) ** (1.0 / p)


def lp_of(values: Iterable, p: float) -> float:
    """p-norm of a coefficient list."""
    if p < 1:
        raise ValueError("p must be >= 1")
    return math.fsum(float(abs(a)) ** p for a in values) ** (1.0 / p)
