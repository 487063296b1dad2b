"""Finite-group Fourier algebras and audits of the projections ``P_(B,K)``."""

from .fourier import AFunction, VNOperator, a_norm, lam, pairing
from .groups import FiniteGroup, Subgroup, construct_group, enumerate_subgroups, parse_subgroup
from .lattice import SkeletonIndex, build_index_family

__all__ = [
    "AFunction",
    "FiniteGroup",
    "SkeletonIndex",
    "Subgroup",
    "VNOperator",
    "a_norm",
    "build_index_family",
    "construct_group",
    "enumerate_subgroups",
    "lam",
    "pairing",
    "parse_subgroup",
]
