"""Exact combinatorics and norms for Tsirelson-type spaces over the Ellentuck order."""
from .combinatorics import is_approximation, rank_vertex, unrank_vertex, xmax_contains, xmax_segment
from .norm import norm, norm_level, norm_value, verify_certificate
from .space import T_A, T_K, Params, Vector

__all__ = [
    "Params",
    "T_A",
    "T_K",
    "Vector",
    "is_approximation",
    "norm",
    "norm_level",
    "norm_value",
    "rank_vertex",
    "unrank_vertex",
    "verify_certificate",
    "xmax_contains",
    "xmax_segment",
]
