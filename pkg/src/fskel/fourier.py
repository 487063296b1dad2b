"""Fourier algebra A(G) and group von Neumann algebra VN(G) of a finite group.

Conventions used throughout:

* ``lambda(x)`` is the permutation matrix with ``lambda(x)[s, t] = 1`` iff ``s = x t``.
* An operator ``T = sum_x c_x lambda(x)`` is stored by its coefficients ``c``;
  its matrix is ``M[s, t] = c[s t^-1]``.
* The duality is ``<u, lambda(x)> = u(x)``, so ``<u, T> = sum_x c_x u(x)``.
* ``||u||_A = (1/|G|) * nuclear_norm([u(s t^-1)])``.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from pathlib import Path
from typing import Sequence

import numpy as np

from .groups import FiniteGroup, GroupError, Subgroup, construct_group

TOL_ALG = 1e-9
TOL_NORM = 1e-7
SUPPORT_THRESHOLD = 1e-8


# ---------------------------------------------------------------------------
# value types


@dataclass(frozen=True, eq=False)
class AFunction:
    """A complex function on ``G`` (every such function lies in A(G))."""

    group: FiniteGroup
    values: np.ndarray

    def __post_init__(self):
        v = np.asarray(self.values, dtype=complex).reshape(-1)
        if v.shape[0] != self.group.order:
            raise GroupError(f"expected {self.group.order} values, got {v.shape[0]}")
        if not np.all(np.isfinite(v)):
            raise ValueError("function values must be finite")
        object.__setattr__(self, "values", v)

    def __add__(self, other: "AFunction") -> "AFunction":
        _check_same(self.group, other.group)
        return AFunction(self.group, self.values + other.values)

    def __sub__(self, other: "AFunction") -> "AFunction":
        _check_same(self.group, other.group)
        return AFunction(self.group, self.values - other.values)

    def __mul__(self, other):
        if isinstance(other, AFunction):
            _check_same(self.group, other.group)
            return AFunction(self.group, self.values * other.values)
        return AFunction(self.group, self.values * other)

    __rmul__ = __mul__

    def max_abs_diff(self, other: "AFunction") -> float:
        _check_same(self.group, other.group)
        return float(np.max(np.abs(self.values - other.values), initial=0.0))

    def support(self, threshold: float = SUPPORT_THRESHOLD) -> frozenset[int]:
        return frozenset(np.flatnonzero(np.abs(self.values) > threshold).tolist())


@dataclass(frozen=True, eq=False)
class VNOperator:
    """``T = sum_x coeffs[x] lambda(x)``"""

    group: FiniteGroup
    coeffs: np.ndarray

    def __post_init__(self):
        c = np.asarray(self.coeffs, dtype=complex).reshape(-1)
        if c.shape[0] != self.group.order:
            raise GroupError(f"expected {self.group.order} coefficients, got {c.shape[0]}")
        object.__setattr__(self, "coeffs", c)

    def matrix(self) -> np.ndarray:
        return self.coeffs[quotient_index(self.group)]

    def __matmul__(self, other: "VNOperator") -> "VNOperator":
        _check_same(self.group, other.group)
        return VNOperator(self.group, convolve(self.group, self.coeffs, other.coeffs))

    def __add__(self, other: "VNOperator") -> "VNOperator":
        _check_same(self.group, other.group)
        return VNOperator(self.group, self.coeffs + other.coeffs)

    def __sub__(self, other: "VNOperator") -> "VNOperator":
        _check_same(self.group, other.group)
        return VNOperator(self.group, self.coeffs - other.coeffs)

    def __mul__(self, scalar) -> "VNOperator":
        return VNOperator(self.group, self.coeffs * scalar)

    __rmul__ = __mul__

    def adjoint(self) -> "VNOperator":
        """Coefficients ``conj(c[x^-1])``."""
        return VNOperator(self.group, np.conj(self.coeffs[self.group.inverses]))

    def max_abs_diff(self, other: "VNOperator") -> float:
        _check_same(self.group, other.group)
        return float(np.max(np.abs(self.coeffs - other.coeffs), initial=0.0))

    def support(self, threshold: float = SUPPORT_THRESHOLD) -> frozenset[int]:
        return frozenset(np.flatnonzero(np.abs(self.coeffs) > threshold).tolist())


@dataclass(frozen=True, eq=False)
class UnitaryRep:
    group: FiniteGroup
    dim: int
    matrices: np.ndarray  # shape (|G|, dim, dim)

    def __call__(self, x: int) -> np.ndarray:
        return self.matrices[x]

    def check(self, tol: float = TOL_ALG) -> float:
        """Largest deviation from the homomorphism, unitarity and identity laws."""
        g, m = self.group, self.matrices
        eye = np.eye(self.dim)
        err = np.max(np.abs(m[g.identity] - eye))
        prods = np.einsum("aij,bjk->abik", m, m)
        err = max(err, np.max(np.abs(prods - m[g.table])))
        gram = np.einsum("aji,ajk->aik", m.conj(), m)
        err = max(err, np.max(np.abs(gram - eye)))
        return float(err)


@dataclass(frozen=True, eq=False)
class FiniteMeasure:
    group: FiniteGroup
    weights: np.ndarray

    def __post_init__(self):
        w = np.asarray(self.weights, dtype=float).reshape(-1)
        if w.shape[0] != self.group.order:
            raise GroupError("measure has the wrong length")
        if np.any(w < 0) or abs(w.sum() - 1.0) > TOL_ALG:
            raise ValueError("measure weights must be non-negative and sum to 1")
        object.__setattr__(self, "weights", w)

    def integrate(self, f: AFunction) -> complex:
        return complex(np.dot(self.weights, f.values))

    def support(self) -> frozenset[int]:
        return frozenset(np.flatnonzero(self.weights > 0).tolist())

    def __eq__(self, other):
        if not isinstance(other, FiniteMeasure):
            return NotImplemented
        return self.group is other.group and np.array_equal(self.weights, other.weights)

    __hash__ = None


def _check_same(g1: FiniteGroup, g2: FiniteGroup):
    if g1 is g2:
        return
    if g1.spec != g2.spec or not np.array_equal(g1.table, g2.table):
        raise GroupError("operands live on different groups")


# ---------------------------------------------------------------------------
# index helpers


def quotient_index(group: FiniteGroup) -> np.ndarray:
    """``idx[s, t] = s t^-1``"""
    cached = group.__dict__.get("_quotient_index")
    if cached is None:
        cached = group.table[:, group.inverses]
        cached.setflags(write=False)
        group.__dict__["_quotient_index"] = cached
    return cached


def convolve(group: FiniteGroup, c1: np.ndarray, c2: np.ndarray) -> np.ndarray:
    """Coefficients of ``T1 T2``: ``(c1*c2)(z) = sum_x c1(x) c2(x^-1 z)``."""
    # T1 T2 delta_e = M1 c2, with M1[z, y] = c1(z y^-1)
    return c1[quotient_index(group)] @ c2


# ---------------------------------------------------------------------------
# representations and operators


def regular_representation(group: FiniteGroup) -> UnitaryRep:
    n = group.order
    mats = np.zeros((n, n, n))
    for x in range(n):
        mats[x, group.table[x], np.arange(n)] = 1.0
    return UnitaryRep(group, n, mats)


def right_translation(group: FiniteGroup, a: int) -> np.ndarray:
    """``(rho(a) f)(t) = f(t a)``, i.e. ``rho(a)[s, t] = 1`` iff ``t = s a``."""
    n = group.order
    m = np.zeros((n, n))
    m[np.arange(n), group.table[:, a]] = 1.0
    return m


def lam(group: FiniteGroup, x: int) -> VNOperator:
    c = np.zeros(group.order, dtype=complex)
    c[x] = 1.0
    return VNOperator(group, c)


def identity_operator(group: FiniteGroup) -> VNOperator:
    return lam(group, group.identity)


class VNMembershipError(GroupError):
    def __init__(self, witness: int, residual: float):
        super().__init__(
            f"matrix does not commute with right translation by element {witness} "
            f"(residual {residual:.3e})"
        )
        self.witness = witness
        self.residual = residual


def coeffs_of(group: FiniteGroup, m: np.ndarray, tol: float = TOL_ALG) -> VNOperator:
    """Extract the coefficient function of a matrix in VN(G)."""
    m = np.asarray(m, dtype=complex)
    n = group.order
    if m.shape != (n, n):
        raise GroupError(f"expected a {n}x{n} matrix")
    for a in group.elements():
        r = right_translation(group, a)
        res = float(np.max(np.abs(m @ r - r @ m)))
        if res > tol:
            raise VNMembershipError(a, res)
    op = VNOperator(group, m[:, group.identity].copy())
    assert np.max(np.abs(op.matrix() - m)) <= max(tol, 1e-12) * max(1.0, n)
    return op


def operator_norm(t: VNOperator) -> float:
    return float(np.linalg.norm(t.matrix(), 2))


def convolution_matrix(u: AFunction) -> np.ndarray:
    """``[u(s t^-1)]_{s,t}``, the matrix of left convolution by ``u``."""
    return u.values[quotient_index(u.group)]


def a_norm(u: AFunction) -> float:
    """Fourier-algebra norm via the nuclear norm of the convolution matrix."""
    sv = np.linalg.svd(convolution_matrix(u), compute_uv=False)
    return float(sv.sum() / u.group.order)


def a_norm_batch(group: FiniteGroup, values: np.ndarray) -> np.ndarray:
    """``a_norm`` for each row of ``values`` (shape ``(S, |G|)``)."""
    values = np.asarray(values, dtype=complex)
    mats = values[:, quotient_index(group)]
    return np.linalg.svd(mats, compute_uv=False).sum(axis=1) / group.order


def pairing(u: AFunction, t: VNOperator) -> complex:
    _check_same(u.group, t.group)
    return complex(np.dot(t.coeffs, u.values))


def translate_right(u: AFunction, a: int) -> AFunction:
    """``v(x) = u(x a^-1)``"""
    g = u.group
    return AFunction(g, u.values[g.table[:, g.inverses[a]]])


def indicator(group: FiniteGroup, elements) -> AFunction:
    v = np.zeros(group.order, dtype=complex)
    v[list(elements)] = 1.0
    return AFunction(group, v)


def delta(group: FiniteGroup, x: int) -> AFunction:
    return indicator(group, [x])


# ---------------------------------------------------------------------------
# measures


def uniform_measure(k: Subgroup) -> FiniteMeasure:
    w = np.zeros(k.parent.order)
    w[list(k.elements)] = 1.0 / len(k)
    return FiniteMeasure(k.parent, w)


def point_mass(group: FiniteGroup, x: int) -> FiniteMeasure:
    w = np.zeros(group.order)
    w[x] = 1.0
    return FiniteMeasure(group, w)


@dataclass(frozen=True)
class MeasureLimitReport:
    chain: tuple[tuple[int, ...], ...]
    limit_support: tuple[int, ...]
    stabilization_step: int  # 1-based
    integrals: tuple[tuple[complex, ...], ...]  # [test function][chain step]
    limit_integrals: tuple[complex, ...]
    max_violation: float  # after stabilization

    @property
    def passed(self) -> bool:
        return self.max_violation == 0.0


def measure_limit_check(chain: Sequence[Subgroup], test_functions: Sequence[AFunction]) -> MeasureLimitReport:
    """Integrals of test functions along a decreasing chain of subgroups.

    A finite decreasing chain stabilises; from the stabilisation step on the
    uniform measure equals that of the intersection, so the integrals must agree
    exactly with the limit integrals.
    """
    if not chain:
        raise GroupError("chain must be non-empty")
    for a, b in zip(chain, chain[1:]):
        if not b <= a:
            raise GroupError("chain is not decreasing")
    limit = chain[0]
    for k in chain[1:]:
        limit = limit.intersect(k)
    mu = uniform_measure(limit)
    step = next(n for n, k in enumerate(chain) if k == limit) + 1
    integrals = tuple(tuple(uniform_measure(k).integrate(f) for k in chain) for f in test_functions)
    limits = tuple(mu.integrate(f) for f in test_functions)
    worst = 0.0
    for row, lim in zip(integrals, limits):
        for value in row[step - 1:]:
            worst = max(worst, abs(value - lim))
    return MeasureLimitReport(
        tuple(k.elements for k in chain), limit.elements, step, integrals, limits, worst
    )


def net_limit_measure(family: Sequence[Subgroup]) -> FiniteMeasure:
    """Limit of uniform measures over a family directed by reverse inclusion.

    The family must contain the intersection of all its members (it is then the
    terminal element of the net, and the net is eventually constant).
    """
    if not family:
        raise GroupError("family must be non-empty")
    inter = family[0]
    for k in family[1:]:
        inter = inter.intersect(k)
    if inter not in family:
        raise GroupError("family has no terminal element; the net is not eventually constant")
    return uniform_measure(inter)


# ---------------------------------------------------------------------------
# file formats


def _encode_complex(values: np.ndarray) -> list[list[float]]:
    return [[float(z.real), float(z.imag)] for z in values]


def _decode_complex(raw) -> np.ndarray:
    if not isinstance(raw, list):
        raise ValueError("values must be a list of [re, im] pairs")
    out = []
    for item in raw:
        if isinstance(item, (int, float)) and not isinstance(item, bool):
            out.append(complex(item))
            continue
        if (
            not isinstance(item, list)
            or len(item) != 2
            or not all(isinstance(p, (int, float)) and not isinstance(p, bool) for p in item)
        ):
            raise ValueError(f"bad complex entry {item!r}")
        out.append(complex(item[0], item[1]))
    return np.array(out, dtype=complex)


def afunction_to_json(u: AFunction) -> dict:
    return {"group": u.group.spec, "values": _encode_complex(u.values)}


def vnoperator_to_json(t: VNOperator) -> dict:
    return {"group": t.group.spec, "coeffs": _encode_complex(t.coeffs)}


def _load(doc: dict, key: str, group: FiniteGroup | None):
    if not isinstance(doc, dict) or "group" not in doc or key not in doc:
        raise ValueError(f"expected an object with 'group' and '{key}'")
    if group is None:
        group = construct_group(doc["group"])
    elif doc["group"] != group.spec:
        raise ValueError(f"file is for group {doc['group']!r}, not {group.spec!r}")
    return group, _decode_complex(doc[key])


def afunction_from_json(doc: dict, group: FiniteGroup | None = None) -> AFunction:
    g, v = _load(doc, "values", group)
    return AFunction(g, v)


def vnoperator_from_json(doc: dict, group: FiniteGroup | None = None) -> VNOperator:
    g, c = _load(doc, "coeffs", group)
    return VNOperator(g, c)


def load_afunction(path: str | Path, group: FiniteGroup | None = None) -> AFunction:
    with open(path) as fh:
        return afunction_from_json(json.load(fh), group)
