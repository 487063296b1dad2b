"""Index sets for the projection family: pairs ``(B, K)`` over a context subgroup ``O``.

``B`` ranges over subgroups containing ``O`` and ``K`` over normal subgroups of
``O``.  The order is ``(B1, K1) <= (B2, K2)`` iff ``B1 <= B2`` and ``K1 >= K2``,
so the top element is ``(G, {e})``.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from typing import Iterator, Sequence

from .groups import (
    DEFAULT_ENUMERATION_BOUND,
    FiniteGroup,
    GroupError,
    Subgroup,
    enumerate_subgroups,
    is_normal_in,
    join_subgroup,
    normal_subgroups,
    normalizer,
    normalizes,
    product_subgroup,
)


class LatticeError(GroupError):
    pass


@dataclass(frozen=True)
class SkeletonIndex:
    O: Subgroup
    B: Subgroup
    K: Subgroup

    def __post_init__(self):
        if not self.O <= self.B:
            raise LatticeError("index requires O <= B")
        if not self.K <= self.O:
            raise LatticeError("index requires K <= O")
        if not is_normal_in(self.K, self.O):
            raise LatticeError("index requires K normal in O")

    @property
    def group(self) -> FiniteGroup:
        return self.O.parent

    def key(self):
        return (self.B.sort_key(), self.K.sort_key())

    def range_dimension(self) -> int:
        return len(self.B) // len(self.K)

    def b_normalizes_k(self) -> bool:
        return normalizes(self.B, self.K)

    def as_json(self) -> dict:
        return {"B": list(self.B.elements), "K": list(self.K.elements)}

    def __repr__(self):
        return f"({list(self.B.elements)}, {list(self.K.elements)})"


@dataclass(frozen=True)
class IndexFamily:
    G: FiniteGroup
    O: Subgroup
    indices: tuple[SkeletonIndex, ...]
    normalizer_filter: bool = False

    def __len__(self):
        return len(self.indices)

    def __iter__(self) -> Iterator[SkeletonIndex]:
        return iter(self.indices)

    def __contains__(self, idx: SkeletonIndex) -> bool:
        return idx in self.index_set

    @property
    def index_set(self) -> frozenset:
        return frozenset(self.indices)

    def top(self) -> SkeletonIndex:
        return SkeletonIndex(self.O, self.G.whole, self.G.trivial)

    def bottom(self) -> SkeletonIndex:
        return SkeletonIndex(self.O, self.O, self.O)


def build_index_family(
    G: FiniteGroup,
    O: Subgroup,
    normalizer_filter: bool = False,
    bound: int = DEFAULT_ENUMERATION_BOUND,
) -> IndexFamily:
    """All ``(B, K)`` with ``O <= B <= G`` and ``K`` normal in ``O``.

    With ``normalizer_filter`` only indices with ``B <= N_G(K)`` are kept.
    """
    if O.parent is not G:
        raise LatticeError("O is not a subgroup of G")
    subs = enumerate_subgroups(G, bound)
    bs = [b for b in subs if O <= b]
    ks = normal_subgroups(O, bound)
    out = []
    for b in bs:
        for k in ks:
            if normalizer_filter and not b <= normalizer(G, k):
                continue
            out.append(SkeletonIndex(O, b, k))
    out.sort(key=SkeletonIndex.key)
    return IndexFamily(G, O, tuple(out), normalizer_filter)


def _same_context(i: SkeletonIndex, j: SkeletonIndex):
    if i.O != j.O:
        raise LatticeError("indices have different context subgroups O")


def index_leq(i: SkeletonIndex, j: SkeletonIndex) -> bool:
    _same_context(i, j)
    return i.B <= j.B and j.K <= i.K


def index_meet(i: SkeletonIndex, j: SkeletonIndex) -> SkeletonIndex:
    """``(B1 & B2, K1 K2)``"""
    _same_context(i, j)
    return SkeletonIndex(i.O, i.B.intersect(j.B), product_subgroup(i.K, j.K))


def index_join(i: SkeletonIndex, j: SkeletonIndex) -> SkeletonIndex:
    """``(B1 v B2, K1 & K2)``"""
    _same_context(i, j)
    return SkeletonIndex(i.O, join_subgroup(i.B, j.B), i.K.intersect(j.K))


def chain_sup(chain: Sequence[SkeletonIndex]) -> SkeletonIndex:
    """Supremum of an increasing chain: generated union of the ``B``'s, intersection of the ``K``'s."""
    if not chain:
        raise LatticeError("chain must be non-empty")
    for a, b in zip(chain, chain[1:]):
        if not index_leq(a, b):
            raise LatticeError(f"chain is not increasing at {a} -> {b}")
    b, k = chain[0].B, chain[0].K
    for idx in chain[1:]:
        b = join_subgroup(b, idx.B)
        k = k.intersect(idx.K)
    return SkeletonIndex(chain[0].O, b, k)


def covers(family: IndexFamily) -> dict[SkeletonIndex, list[SkeletonIndex]]:
    """Upper covers of each index within the family."""
    idx = list(family.indices)
    up: dict[SkeletonIndex, list[SkeletonIndex]] = {}
    for i in idx:
        above = [j for j in idx if j != i and index_leq(i, j)]
        up[i] = [j for j in above if not any(m != j and index_leq(m, j) for m in above)]
    return up


def maximal_chains(family: IndexFamily, limit: int | None = None) -> list[list[SkeletonIndex]]:
    """Maximal chains of the finite poset, from minimal to maximal elements.

    Enumeration is depth-first in index order, so the result is deterministic.
    ``limit`` truncates the enumeration.
    """
    up = covers(family)
    idx = list(family.indices)
    minimal = [i for i in idx if not any(j != i and index_leq(j, i) for j in idx)]
    chains: list[list[SkeletonIndex]] = []

    def walk(path):
        if limit is not None and len(chains) >= limit:
            return
        nxt = up[path[-1]]
        if not nxt:
            chains.append(list(path))
            return
        for j in nxt:
            walk(path + [j])

    for m in minimal:
        walk([m])
    return chains


def is_directed(family: IndexFamily) -> tuple[bool, list[tuple[SkeletonIndex, SkeletonIndex]]]:
    """Check that every pair has an upper bound inside the family.

    Returns the verdict and the pairs whose lattice join leaves the family.
    """
    members = family.index_set
    bad_joins = []
    directed = True
    for i, j in itertools.combinations(family.indices, 2):
        joined = index_join(i, j)
        if joined not in members:
            bad_joins.append((i, j))
            if not any(index_leq(i, u) and index_leq(j, u) for u in family.indices):
                directed = False
    return directed, bad_joins
