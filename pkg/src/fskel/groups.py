"""Exact finite-group arithmetic.

Groups are stored as Cayley tables over dense element indices ``0..n-1``.
Everything here is integer arithmetic; no tolerances are involved.
"""

from __future__ import annotations

import itertools
import os
import re
from dataclasses import dataclass, field
from functools import cached_property
from typing import Callable, Hashable, Iterable, Sequence

import numpy as np

DEFAULT_MAX_ORDER = 64
DEFAULT_ENUMERATION_BOUND = 24
ASSOCIATIVITY_CHECK_BOUND = 64


class GroupError(ValueError):
    """Raised for malformed group specs and violated group-theoretic preconditions."""


class GroupSpecError(GroupError):
    pass


class OrderCapError(GroupError):
    pass


def max_order() -> int:
    raw = os.environ.get("FSKEL_MAX_ORDER")
    if raw is None:
        return DEFAULT_MAX_ORDER
    try:
        cap = int(raw)
    except ValueError as exc:
        raise GroupError(f"FSKEL_MAX_ORDER must be an integer, got {raw!r}") from exc
    if cap < 1:
        raise GroupError("FSKEL_MAX_ORDER must be positive")
    return cap


# ---------------------------------------------------------------------------
# groups


@dataclass(frozen=True, eq=False)
class FiniteGroup:
    """A finite group given by its multiplication table.

    ``table[a][b]`` is the index of ``a*b``.  Element labels are only for
    display and for parsing subgroup generators on the command line.
    """

    table: np.ndarray
    identity: int = 0
    labels: tuple[str, ...] = ()
    spec: str = ""
    _check_associativity: bool = field(default=True, repr=False)

    def __post_init__(self):
        table = np.asarray(self.table, dtype=np.int64)
        if table.ndim != 2 or table.shape[0] != table.shape[1] or table.shape[0] == 0:
            raise GroupError("multiplication table must be a non-empty square array")
        table = table.copy()
        table.setflags(write=False)
        object.__setattr__(self, "table", table)
        n = table.shape[0]
        if not self.labels:
            object.__setattr__(self, "labels", tuple(str(i) for i in range(n)))
        if len(self.labels) != n:
            raise GroupError("need one label per element")
        self._validate()

    def _validate(self):
        n = self.order
        t = self.table
        full = np.arange(n)
        if t.min() < 0 or t.max() >= n:
            raise GroupError("table entries out of range")
        for row in t:
            if not np.array_equal(np.sort(row), full):
                raise GroupError("table is not a Latin square (row)")
        for col in t.T:
            if not np.array_equal(np.sort(col), full):
                raise GroupError("table is not a Latin square (column)")
        e = self.identity
        if not (np.array_equal(t[e], full) and np.array_equal(t[:, e], full)):
            raise GroupError(f"element {e} is not a two-sided identity")
        if self._check_associativity and n <= ASSOCIATIVITY_CHECK_BOUND:
            # (ab)c == a(bc) for all triples, vectorised over c
            left = t[t]  # left[a, b, c] = (a*b)*c
            right = t[:, t]  # right[a, b, c] = a*(b*c)
            if not np.array_equal(left, right):
                a, b, c = np.argwhere(left != right)[0]
                raise GroupError(f"table is not associative at ({a}, {b}, {c})")

    @property
    def order(self) -> int:
        return self.table.shape[0]

    def __len__(self):
        return self.order

    def __repr__(self):
        return f"FiniteGroup({self.spec or '<table>'}, order={self.order})"

    def mul(self, a: int, b: int) -> int:
        return int(self.table[a, b])

    @cached_property
    def inverses(self) -> np.ndarray:
        inv = np.argmax(self.table == self.identity, axis=1)
        inv.setflags(write=False)
        return inv

    def inv(self, a: int) -> int:
        return int(self.inverses[a])

    def conj(self, x: int, k: int) -> int:
        """``x k x^-1``"""
        return int(self.table[self.table[x, k], self.inverses[x]])

    def elements(self) -> range:
        return range(self.order)

    @cached_property
    def is_abelian(self) -> bool:
        return bool(np.array_equal(self.table, self.table.T))

    def center(self) -> list[int]:
        t = self.table
        return [z for z in self.elements() if np.array_equal(t[z], t[:, z])]

    def element_order(self, a: int) -> int:
        k, x = 1, a
        while x != self.identity:
            x = self.mul(x, a)
            k += 1
        return k

    def index_of_label(self, label: str) -> int:
        norm = _normalize_label(label)
        for i, lab in enumerate(self.labels):
            if _normalize_label(lab) == norm:
                return i
        raise GroupSpecError(f"unknown element label {label!r} in {self.spec or 'group'}")

    @cached_property
    def whole(self) -> "Subgroup":
        return Subgroup(self, tuple(self.elements()))

    @cached_property
    def trivial(self) -> "Subgroup":
        return Subgroup(self, (self.identity,))


def _normalize_label(label: str) -> str:
    return re.sub(r"\s+", " ", label.strip())


@dataclass(frozen=True, eq=False)
class Subgroup:
    """A subgroup of ``parent``, stored as its sorted element indices."""

    parent: FiniteGroup
    elements: tuple[int, ...]

    def __post_init__(self):
        elems = tuple(sorted(set(int(x) for x in self.elements)))
        object.__setattr__(self, "elements", elems)
        g = self.parent
        if not elems or elems[0] < 0 or elems[-1] >= g.order:
            raise GroupError("subgroup elements out of range")
        mask = np.zeros(g.order, dtype=bool)
        mask[list(elems)] = True
        if not mask[g.identity]:
            raise GroupError("subgroup must contain the identity")
        e = np.asarray(elems)
        bad_inv = e[~mask[g.inverses[e]]]
        if bad_inv.size:
            raise GroupError(f"subgroup not closed under inverse at {bad_inv[0]}")
        closed = mask[g.table[np.ix_(e, e)]]
        if not closed.all():
            i, j = np.argwhere(~closed)[0]
            raise GroupError(f"subgroup not closed under product at ({e[i]}, {e[j]})")
        assert g.order % len(elems) == 0, "Lagrange violated"

    def __len__(self):
        return len(self.elements)

    def __contains__(self, x) -> bool:
        return x in self.element_set

    def __iter__(self):
        return iter(self.elements)

    def __eq__(self, other):
        if not isinstance(other, Subgroup):
            return NotImplemented
        return self.parent is other.parent and self.elements == other.elements

    def __hash__(self):
        return hash((id(self.parent), self.elements))

    def __le__(self, other: "Subgroup") -> bool:
        _same_parent(self, other)
        return self.element_set <= other.element_set

    def __lt__(self, other: "Subgroup") -> bool:
        return self <= other and len(self) < len(other)

    def __repr__(self):
        return f"Subgroup({list(self.elements)})"

    @property
    def order(self) -> int:
        return len(self.elements)

    @cached_property
    def element_set(self) -> frozenset[int]:
        return frozenset(self.elements)

    @cached_property
    def indicator(self) -> np.ndarray:
        ind = np.zeros(self.parent.order, dtype=bool)
        ind[list(self.elements)] = True
        ind.setflags(write=False)
        return ind

    def intersect(self, other: "Subgroup") -> "Subgroup":
        _same_parent(self, other)
        return Subgroup(self.parent, tuple(self.element_set & other.element_set))

    def labels(self) -> list[str]:
        return [self.parent.labels[i] for i in self.elements]

    def sort_key(self):
        return (len(self.elements), self.elements)


def _same_parent(a: Subgroup, b: Subgroup):
    if a.parent is not b.parent:
        raise GroupError("subgroups belong to different groups")


@dataclass(frozen=True, eq=False)
class GroupHom:
    source: FiniteGroup
    target: FiniteGroup
    map: tuple[int, ...]

    def __post_init__(self):
        m = tuple(int(x) for x in self.map)
        object.__setattr__(self, "map", m)
        s, t = self.source, self.target
        if len(m) != s.order:
            raise GroupError("homomorphism map has wrong length")
        if m[s.identity] != t.identity:
            raise GroupError("homomorphism does not preserve the identity")
        mp = np.asarray(m)
        if not np.array_equal(mp[s.table], t.table[mp[:, None], mp[None, :]]):
            raise GroupError("map is not a homomorphism")

    def __call__(self, x: int) -> int:
        return self.map[x]

    def kernel(self) -> list[int]:
        return [x for x, y in enumerate(self.map) if y == self.target.identity]

    def is_injective(self) -> bool:
        return len(set(self.map)) == len(self.map)

    def is_surjective(self) -> bool:
        return len(set(self.map)) == self.target.order


@dataclass(frozen=True)
class CosetPartition:
    subgroup: Subgroup
    side: str
    classes: tuple[tuple[int, ...], ...]
    representatives: tuple[int, ...]

    def class_of(self, x: int) -> int:
        for i, c in enumerate(self.classes):
            if x in c:
                return i
        raise GroupError(f"element {x} not covered by partition")


# ---------------------------------------------------------------------------
# construction


def group_from_elements(
    generators: Sequence[Hashable],
    mul: Callable[[Hashable, Hashable], Hashable],
    identity: Hashable,
    label: Callable[[Hashable], str],
    sort_key: Callable[[Hashable], object] | None = None,
    spec: str = "",
) -> FiniteGroup:
    """Close ``generators`` under ``mul`` and build the Cayley table.

    Elements are ordered by ``sort_key`` with the identity forced to index 0.
    """
    cap = max_order()
    seen = {identity}
    frontier = [identity]
    while frontier:
        nxt = []
        for x in frontier:
            for g in generators:
                y = mul(x, g)
                if y not in seen:
                    seen.add(y)
                    nxt.append(y)
                    if len(seen) > cap:
                        raise OrderCapError(f"group {spec!r} exceeds the order cap {cap}")
        frontier = nxt
    rest = sorted((x for x in seen if x != identity), key=sort_key)
    elems = [identity] + rest
    index = {x: i for i, x in enumerate(elems)}
    n = len(elems)
    table = np.empty((n, n), dtype=np.int64)
    for i, a in enumerate(elems):
        for j, b in enumerate(elems):
            table[i, j] = index[mul(a, b)]
    return FiniteGroup(table, 0, tuple(label(x) for x in elems), spec)


def cyclic(n: int) -> FiniteGroup:
    if n < 1:
        raise GroupSpecError("cyclic order must be positive")
    if n > max_order():
        raise OrderCapError(f"cyclic:{n} exceeds the order cap {max_order()}")
    idx = np.arange(n)
    return FiniteGroup((idx[:, None] + idx[None, :]) % n, 0, tuple(map(str, range(n))), f"cyclic:{n}")


def dihedral(order: int) -> FiniteGroup:
    """Dihedral group of the given order ``2n``; elements are ``r^a s^f``."""
    if order < 2 or order % 2:
        raise GroupSpecError("dihedral order must be an even number >= 2")
    if order > max_order():
        raise OrderCapError(f"dihedral:{order} exceeds the order cap {max_order()}")
    n = order // 2

    def mul(x, y):
        (a, f), (b, g) = x, y
        return ((a + (-b if f else b)) % n, f ^ g)

    def label(x):
        a, f = x
        if (a, f) == (0, 0):
            return "e"
        r = "" if a == 0 else ("r" if a == 1 else f"r^{a}")
        return (r + " s").strip() if f else r

    gens = [(1 % n, 0), (0, 1)]
    return group_from_elements(gens, mul, (0, 0), label, lambda x: (x[1], x[0]), f"dihedral:{order}")


# permutations are tuples of images of 0..m-1; (p*q)(i) = p(q(i))
def _perm_mul(p, q):
    return tuple(p[i] for i in q)


def _perm_label(p) -> str:
    seen, out = set(), []
    for start in range(len(p)):
        if start in seen or p[start] == start:
            continue
        cyc, i = [], start
        while i not in seen:
            seen.add(i)
            cyc.append(str(i + 1))
            i = p[i]
        out.append("(" + " ".join(cyc) + ")")
    return "".join(out) or "()"


_CYCLE_RE = re.compile(r"\(([^()]*)\)")


def parse_cycles(text: str, degree: int | None = None) -> tuple[int, ...]:
    """Parse 1-based cycle notation such as ``(1 2 3)(4 5)`` into an image tuple.

    Cycles compose right to left, matching the group multiplication.
    """
    text = text.strip()
    if not text or re.sub(r"\s+", "", _CYCLE_RE.sub("", text)):
        if text not in ("", "()"):
            raise GroupSpecError(f"bad cycle notation {text!r}")
    cycles = []
    for body in _CYCLE_RE.findall(text):
        parts = body.replace(",", " ").split()
        try:
            pts = [int(p) - 1 for p in parts]
        except ValueError as exc:
            raise GroupSpecError(f"bad cycle {body!r}") from exc
        if any(p < 0 for p in pts) or len(set(pts)) != len(pts):
            raise GroupSpecError(f"bad cycle {body!r}")
        cycles.append(pts)
    m = max([p + 1 for c in cycles for p in c], default=1)
    if degree is not None:
        if m > degree:
            raise GroupSpecError(f"cycle {text!r} moves points beyond degree {degree}")
        m = degree
    perm = tuple(range(m))
    for cyc in cycles:
        img = list(range(m))
        for i, p in enumerate(cyc):
            img[p] = cyc[(i + 1) % len(cyc)]
        perm = _perm_mul(perm, tuple(img))
    return perm


def permutation_group(generators: Sequence[tuple[int, ...]], spec: str = "") -> FiniteGroup:
    m = max([len(g) for g in generators], default=1)
    gens = [tuple(g) + tuple(range(len(g), m)) for g in generators]
    ident = tuple(range(m))
    return group_from_elements(gens or [ident], _perm_mul, ident, _perm_label, None, spec)


def symmetric(n: int) -> FiniteGroup:
    if n < 1:
        raise GroupSpecError("symmetric degree must be positive")
    cap = max_order()
    fact = 1
    for k in range(2, n + 1):
        fact *= k
        if fact > cap:
            raise OrderCapError(f"symmetric:{n} exceeds the order cap {cap}")
    gens = []
    if n >= 2:
        gens.append(tuple([1, 0] + list(range(2, n))))
        gens.append(tuple(list(range(1, n)) + [0]))
    ident = tuple(range(n))
    return group_from_elements(gens or [ident], _perm_mul, ident, _perm_label, None, f"symmetric:{n}")


_QUAT_NAMES = {1: "1", 2: "i", 3: "j", 4: "k"}
# basis products for units 1, i, j, k: (sign, unit)
_QUAT_MUL = {
    (1, 1): (1, 1), (1, 2): (1, 2), (1, 3): (1, 3), (1, 4): (1, 4),
    (2, 1): (1, 2), (2, 2): (-1, 1), (2, 3): (1, 4), (2, 4): (-1, 3),
    (3, 1): (1, 3), (3, 2): (-1, 4), (3, 3): (-1, 1), (3, 4): (1, 2),
    (4, 1): (1, 4), (4, 2): (1, 3), (4, 3): (-1, 2), (4, 4): (-1, 1),
}


def quaternion() -> FiniteGroup:
    if 8 > max_order():
        raise OrderCapError(f"quaternion exceeds the order cap {max_order()}")

    def mul(x, y):
        s, u = _QUAT_MUL[(x[1], y[1])]
        return (x[0] * y[0] * s, u)

    def label(x):
        return ("-" if x[0] < 0 else "") + _QUAT_NAMES[x[1]]

    return group_from_elements(
        [(1, 2), (1, 3)], mul, (1, 1), label, lambda x: (x[1], -x[0]), "quaternion"
    )


def direct_product(g1: FiniteGroup, g2: FiniteGroup, spec: str = "") -> FiniteGroup:
    n1, n2 = g1.order, g2.order
    if n1 * n2 > max_order():
        raise OrderCapError(f"product of orders {n1}*{n2} exceeds the order cap {max_order()}")
    a1, b1 = np.divmod(np.arange(n1 * n2), n2)
    table = g1.table[a1[:, None], a1[None, :]] * n2 + g2.table[b1[:, None], b1[None, :]]
    labels = tuple(f"({g1.labels[a]},{g2.labels[b]})" for a, b in zip(a1, b1))
    ident = g1.identity * n2 + g2.identity
    if ident != 0:
        raise GroupError("product identity must be the first element")
    return FiniteGroup(table, 0, labels, spec)


def construct_group(spec: str) -> FiniteGroup:
    """Build a group from a spec string.

    Grammar::

        cyclic:<n> | dihedral:<2n> | symmetric:<n> | quaternion
        | product:<spec>,<spec> | perm:<cycle-list;cycle-list;...>
    """
    spec = spec.strip()
    kind, _, arg = spec.partition(":")
    kind = kind.strip().lower()
    if kind == "quaternion" and not arg:
        return quaternion()
    if kind in ("cyclic", "dihedral", "symmetric"):
        try:
            n = int(arg)
        except ValueError as exc:
            raise GroupSpecError(f"expected an integer in {spec!r}") from exc
        return {"cyclic": cyclic, "dihedral": dihedral, "symmetric": symmetric}[kind](n)
    if kind == "product":
        # leftmost comma that splits the argument into two valid specs
        for m in re.finditer(",", arg):
            left, right = arg[: m.start()], arg[m.end():]
            try:
                g1 = construct_group(left)
                g2 = construct_group(right)
            except OrderCapError:
                raise
            except GroupSpecError:
                continue
            return direct_product(g1, g2, spec)
        raise GroupSpecError(f"cannot split product spec {spec!r}")
    if kind == "perm":
        gens = [parse_cycles(part) for part in arg.split(";") if part.strip()]
        return permutation_group(gens, spec)
    raise GroupSpecError(f"unknown group spec {spec!r}")


# ---------------------------------------------------------------------------
# subgroups


def subgroup_generated(group: FiniteGroup, seed: Iterable[int]) -> Subgroup:
    """Smallest subgroup containing ``seed``, by product saturation."""
    seed = [int(s) for s in seed]
    for s in seed:
        if not 0 <= s < group.order:
            raise GroupError(f"element index {s} out of range")
    elems = {group.identity, *seed}
    frontier = list(elems)
    gens = sorted(set(seed))
    while frontier:
        nxt = []
        for x in frontier:
            for g in gens:
                y = group.mul(x, g)
                if y not in elems:
                    elems.add(y)
                    nxt.append(y)
        frontier = nxt
    return Subgroup(group, tuple(elems))


def enumerate_subgroups(group: FiniteGroup, bound: int = DEFAULT_ENUMERATION_BOUND) -> list[Subgroup]:
    """All subgroups, sorted by size then element list.

    Cyclic subgroups first, then closure under pairwise joins until nothing new
    appears.  Every subgroup is the join of its cyclic subgroups, so the fixpoint
    is complete.
    """
    if group.order > bound:
        raise GroupError(
            f"subgroup enumeration refused: order {group.order} exceeds bound {bound}; "
            "supply subgroups explicitly"
        )
    cache = group.__dict__.setdefault("_subgroups_cache", {})
    if "all" in cache:
        return list(cache["all"])
    found = {subgroup_generated(group, [x]).elements for x in group.elements()}
    cyclics = list(found)
    frontier = list(found)
    while frontier:
        nxt = []
        for h in frontier:
            for c in cyclics:
                j = subgroup_generated(group, h + c).elements
                if j not in found:
                    found.add(j)
                    nxt.append(j)
        frontier = nxt
    subs = sorted((Subgroup(group, e) for e in found), key=Subgroup.sort_key)
    cache["all"] = tuple(subs)
    return subs


def is_normal_in(k: Subgroup, h: Subgroup) -> bool:
    """True iff ``h k h^-1 = k`` for every ``h`` in ``h``."""
    if not k <= h:
        raise GroupError("is_normal_in requires K to be contained in H")
    g = k.parent
    ks = k.element_set
    return all(g.conj(x, a) in ks for x in h.elements for a in k.elements)


def normalizer(group: FiniteGroup, k: Subgroup) -> Subgroup:
    """``{x : x K x^-1 = K}``; for finite groups inclusion already gives equality."""
    if k.parent is not group:
        raise GroupError("subgroup belongs to another group")
    ks = k.element_set
    elems = [x for x in group.elements() if all(group.conj(x, a) in ks for a in k.elements)]
    return Subgroup(group, tuple(elems))


def normalizes(x_set: Subgroup, k: Subgroup) -> bool:
    """True iff every element of ``x_set`` normalizes ``k``."""
    g = k.parent
    ks = k.element_set
    return all(g.conj(x, a) in ks for x in x_set.elements for a in k.elements)


def set_product(k1: Subgroup, k2: Subgroup) -> frozenset[int]:
    g = k1.parent
    return frozenset(g.mul(a, b) for a in k1.elements for b in k2.elements)


def product_subgroup(k1: Subgroup, k2: Subgroup) -> Subgroup:
    """The subgroup ``K1 K2``; requires one factor to normalize the other."""
    _same_parent(k1, k2)
    g = k1.parent
    prod = set_product(k1, k2)
    if not (normalizes(k2, k1) or normalizes(k1, k2)):
        for a, b in itertools.product(sorted(prod), repeat=2):
            if g.mul(a, b) not in prod:
                raise GroupError(
                    f"K1K2 is not a subgroup: {a}*{b} = {g.mul(a, b)} leaves the product set"
                )
        for a in prod:
            if g.inv(a) not in prod:
                raise GroupError(f"K1K2 is not a subgroup: inverse of {a} missing")
    result = Subgroup(g, tuple(prod))
    assert len(result) * len(k1.intersect(k2)) == len(k1) * len(k2)
    return result


def join_subgroup(b1: Subgroup, b2: Subgroup) -> Subgroup:
    _same_parent(b1, b2)
    return subgroup_generated(b1.parent, b1.elements + b2.elements)


def right_cosets(group: FiniteGroup, h: Subgroup) -> CosetPartition:
    """Partition into right cosets ``Hx``, ordered by minimal element."""
    return _cosets(group, h, "right")


def left_cosets(group: FiniteGroup, h: Subgroup) -> CosetPartition:
    return _cosets(group, h, "left")


def _cosets(group: FiniteGroup, h: Subgroup, side: str) -> CosetPartition:
    if h.parent is not group:
        raise GroupError("subgroup belongs to another group")
    seen: set[int] = set()
    classes, reps = [], []
    for x in group.elements():
        if x in seen:
            continue
        if side == "right":
            cls = tuple(sorted(group.mul(a, x) for a in h.elements))
        else:
            cls = tuple(sorted(group.mul(x, a) for a in h.elements))
        seen.update(cls)
        classes.append(cls)
        reps.append(cls[0])
    return CosetPartition(h, side, tuple(classes), tuple(reps))


def quotient_group(h: Subgroup, k: Subgroup) -> tuple[FiniteGroup, GroupHom]:
    """``H/K`` as a standalone group plus the quotient map ``H -> H/K``.

    The source of the returned homomorphism is ``H`` realised as its own
    group (see :func:`as_group`), with elements in the order of ``h.elements``.
    """
    cache = h.__dict__.setdefault("_quotients", {})
    if k.elements in cache:
        return cache[k.elements]
    if not is_normal_in(k, h):
        raise GroupError("K is not normal in H")
    g = h.parent
    h_group, _ = as_group(h)
    classes: list[tuple[int, ...]] = []
    seen: set[int] = set()
    for x in h.elements:
        if x in seen:
            continue
        cls = tuple(sorted(g.mul(x, a) for a in k.elements))
        seen.update(cls)
        classes.append(cls)
    which = {x: i for i, cls in enumerate(classes) for x in cls}
    m = len(classes)
    table = np.empty((m, m), dtype=np.int64)
    for i, ci in enumerate(classes):
        for j, cj in enumerate(classes):
            table[i, j] = which[g.mul(ci[0], cj[0])]
    labels = tuple("{" + ",".join(g.labels[x] for x in cls) + "}" for cls in classes)
    quo = FiniteGroup(table, which[g.identity], labels, f"({h_group.spec})/K")
    q = GroupHom(h_group, quo, tuple(which[x] for x in h.elements))
    cache[k.elements] = (quo, q)
    return quo, q


def as_group(h: Subgroup) -> tuple[FiniteGroup, GroupHom]:
    """Realise ``H`` as a group on indices ``0..|H|-1`` plus its inclusion into the parent.

    The result is cached on ``h`` so repeated calls return the same group object.
    """
    if "_as_group" in h.__dict__:
        return h.__dict__["_as_group"]
    g = h.parent
    pos = {x: i for i, x in enumerate(h.elements)}
    table = np.array([[pos[g.mul(a, b)] for b in h.elements] for a in h.elements], dtype=np.int64)
    labels = tuple(g.labels[x] for x in h.elements)
    sub = FiniteGroup(table, pos[g.identity], labels, f"subgroup of {g.spec or 'G'}")
    h.__dict__["_as_group"] = (sub, GroupHom(sub, g, h.elements))
    return h.__dict__["_as_group"]


@dataclass(frozen=True)
class InverseLimit:
    group: FiniteGroup
    tuples: tuple[tuple[int, ...], ...]  # coset index in each O/K_n
    iso: GroupHom  # f: O/K -> P
    quotient: FiniteGroup  # O/K
    factors: tuple[FiniteGroup, ...]


def inverse_limit_iso(o: Subgroup, chain: Sequence[Subgroup]) -> InverseLimit:
    """Inverse limit of ``O/K_1 <- O/K_2 <- ...`` and the map ``f: O/K -> P``.

    ``P`` consists of the compatible tuples ``(x_n K_n)``; ``f(xK) = (x K_n)_n``
    with ``K`` the intersection of the chain.  ``f`` is checked to be a
    bijective homomorphism element by element.
    """
    if not chain:
        raise GroupError("chain must be non-empty")
    for k in chain:
        if not is_normal_in(k, o):
            raise GroupError("every chain member must be normal in O")
    for a, b in zip(chain, chain[1:]):
        if not b <= a:
            raise GroupError("chain is not decreasing")
    quots = [quotient_group(o, k) for k in chain]
    # phi_n: O/K_{n+1} -> O/K_n, read off through representatives
    phis = []
    for (qn, mapn), (qn1, mapn1) in zip(quots, quots[1:]):
        phi = [None] * qn1.order
        for pos, _ in enumerate(o.elements):
            phi[mapn1(pos)] = mapn(pos)
        phis.append(phi)
    spaces = [range(q.order) for q, _ in quots]
    compatible = [
        t for t in itertools.product(*spaces)
        if all(phis[n][t[n + 1]] == t[n] for n in range(len(phis)))
    ]
    index = {t: i for i, t in enumerate(compatible)}
    m = len(compatible)
    table = np.empty((m, m), dtype=np.int64)
    for i, s in enumerate(compatible):
        for j, t in enumerate(compatible):
            prod = tuple(q.mul(a, b) for (q, _), a, b in zip(quots, s, t))
            if prod not in index:
                raise GroupError("inverse limit not closed under componentwise product")
            table[i, j] = index[prod]
    ident = tuple(q.identity for q, _ in quots)
    labels = tuple(str(t) for t in compatible)
    p_group = FiniteGroup(table, index[ident], labels, "inverse limit")

    k = chain[0]
    for kn in chain[1:]:
        k = k.intersect(kn)
    quo, qmap = quotient_group(o, k)
    fmap = [None] * quo.order
    for pos, _ in enumerate(o.elements):
        img = index[tuple(mapn(pos) for _, mapn in quots)]
        prev = fmap[qmap(pos)]
        if prev is not None and prev != img:
            raise GroupError("f is not well defined")
        fmap[qmap(pos)] = img
    f = GroupHom(quo, p_group, tuple(fmap))
    if not (f.is_injective() and f.is_surjective()):
        raise GroupError("f: O/K -> P is not bijective")
    return InverseLimit(p_group, tuple(compatible), f, quo, tuple(q for q, _ in quots))


def normal_subgroups(o: Subgroup, bound: int = DEFAULT_ENUMERATION_BOUND) -> list[Subgroup]:
    """Subgroups of the parent contained in and normal in ``o``."""
    return [k for k in enumerate_subgroups(o.parent, bound) if k <= o and is_normal_in(k, o)]


def parse_subgroup(group: FiniteGroup, text: str) -> Subgroup:
    """Subgroup generated by a ``;``-separated list of element labels.

    Permutation groups also accept cycle notation, e.g. ``(1 2);(1 2 3)``.
    ``G``/``whole`` and ``e``/``trivial`` name the two extreme subgroups.
    """
    text = text.strip()
    low = text.lower()
    if low in ("g", "whole"):
        return group.whole
    if low in ("", "e", "trivial"):
        return group.trivial
    seeds = []
    for tok in re.split(r"[;,](?![^()]*\))", text):
        tok = tok.strip()
        if not tok:
            continue
        try:
            seeds.append(group.index_of_label(tok))
        except GroupSpecError:
            if "(" not in tok:
                raise
            seeds.append(group.index_of_label(_perm_label(parse_cycles(tok))))
    return subgroup_generated(group, seeds)
