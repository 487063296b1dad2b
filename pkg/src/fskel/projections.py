"""Projections on A(G) and their duals on VN(G).

``P_K`` averages over left translates by ``K``; ``P_c`` cuts down to a right
coset; ``P_(B,K) = 1_B * P_K``.  Duals act on coefficient functions so that
supports are exact index sets.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable, Sequence

import numpy as np

from .fourier import (
    TOL_ALG,
    AFunction,
    UnitaryRep,
    VNOperator,
    identity_operator,
    lam,
    operator_norm,
)
from .groups import (
    FiniteGroup,
    GroupError,
    GroupHom,
    Subgroup,
    as_group,
    right_cosets,
)
from .lattice import SkeletonIndex


# ---------------------------------------------------------------------------
# Haar averaging on a representation space


def haar_average_Q(rep: UnitaryRep, k: Subgroup) -> np.ndarray:
    """``Q = (1/|K|) sum_{y in K} pi(y)``, the orthogonal projection onto the K-fixed vectors."""
    if k.parent is not rep.group:
        raise GroupError("K is not a subgroup of the representation's group")
    return rep.matrices[list(k.elements)].mean(axis=0)


def fixed_space_dim(rep: UnitaryRep, k: Subgroup, tol: float = TOL_ALG) -> int:
    """Dimension of ``{xi : pi(a) xi = xi for all a in K}`` computed by a null-space solve."""
    eye = np.eye(rep.dim)
    stacked = np.concatenate([rep.matrices[a] - eye for a in k.elements], axis=0)
    sv = np.linalg.svd(stacked, compute_uv=False)
    return int(rep.dim - np.sum(sv > tol * max(1.0, sv.max(initial=0.0))))


# ---------------------------------------------------------------------------
# projections on A(G)


def _left_average_index(k: Subgroup) -> np.ndarray:
    """``idx[a, x] = a^-1 x`` for ``a`` in ``K``."""
    g = k.parent
    cache = k.__dict__.get("_left_average_index")
    if cache is None:
        cache = g.table[g.inverses[list(k.elements)]]
        cache.setflags(write=False)
        k.__dict__["_left_average_index"] = cache
    return cache


def project_haar_P_K(u: AFunction, k: Subgroup) -> AFunction:
    """``(Pu)(x) = (1/|K|) sum_{a in K} u(a^-1 x)``"""
    if k.parent is not u.group:
        raise GroupError("K is not a subgroup of u's group")
    return AFunction(u.group, u.values[_left_average_index(k)].mean(axis=0))


def project_coset_P_c(u: AFunction, coset: Sequence[int]) -> AFunction:
    """Pointwise product with the indicator of ``coset``."""
    mask = np.zeros(u.group.order, dtype=bool)
    mask[list(coset)] = True
    return AFunction(u.group, np.where(mask, u.values, 0))


def project_combined(u: AFunction, idx: SkeletonIndex) -> AFunction:
    """``P_(B,K) u = 1_B * P_K u``"""
    pk = project_haar_P_K(u, idx.K)
    return AFunction(u.group, np.where(idx.B.indicator, pk.values, 0))


def is_left_invariant(u: AFunction, k: Subgroup, tol: float = TOL_ALG) -> bool:
    return bool(np.max(np.abs(u.values[_left_average_index(k)] - u.values[None, :])) <= tol)


# ---------------------------------------------------------------------------
# duals on VN(G)


def dual_haar(t: VNOperator, k: Subgroup) -> VNOperator:
    """``Q_K T``: coefficients ``c'(y) = (1/|K|) sum_{a in K} c(a y)``."""
    g = t.group
    idx = g.table[list(k.elements)]  # idx[a, y] = a y
    return VNOperator(g, t.coeffs[idx].mean(axis=0))


def dual_coset(t: VNOperator, coset: Sequence[int]) -> VNOperator:
    """Zero the coefficients outside ``coset``."""
    mask = np.zeros(t.group.order, dtype=bool)
    mask[list(coset)] = True
    return VNOperator(t.group, np.where(mask, t.coeffs, 0))


def dual_combined(t: VNOperator, idx: SkeletonIndex) -> VNOperator:
    """Mask to ``B`` then average over ``K`` (the two steps commute since ``K <= B``)."""
    return dual_haar(dual_coset(t, idx.B.elements), idx.K)


def quotient_pullback(u_bar: AFunction, q: GroupHom, kernel: Subgroup | None = None) -> AFunction:
    """``u_bar o q`` on the source of the quotient map."""
    if u_bar.group is not q.target:
        raise GroupError("u_bar does not live on the target of q")
    if kernel is not None:
        got = sorted(q.kernel())
        if kernel.parent is q.source:
            want = sorted(kernel.elements)
        else:
            # kernel given inside the ambient group: match through element labels
            pos = {lab: i for i, lab in enumerate(q.source.labels)}
            want = sorted(pos[kernel.parent.labels[x]] for x in kernel.elements)
        if got != want:
            raise GroupError(f"kernel mismatch: q has kernel {got}, expected {want}")
    return AFunction(q.source, u_bar.values[list(q.map)])


def open_subgroup_iso(u: AFunction, h: Subgroup, tol: float = 0.0) -> AFunction:
    """Restrict ``u`` (supported in ``H``) to ``H`` realised as its own group."""
    if h.parent is not u.group:
        raise GroupError("H is not a subgroup of u's group")
    outside = np.flatnonzero(~h.indicator & (np.abs(u.values) > tol))
    if outside.size:
        raise GroupError(f"support leaks outside H at element {int(outside[0])}")
    h_group, _ = as_group(h)
    return AFunction(h_group, u.values[list(h.elements)])


def pimsner_popa_reconstruct(t: VNOperator, h: Subgroup) -> VNOperator:
    """``sum_c P_H*(T lambda(x_c^-1)) lambda(x_c)`` over right cosets ``c = H x_c``."""
    g = t.group
    parts = right_cosets(g, h)
    total = VNOperator(g, np.zeros(g.order, dtype=complex))
    for rep in parts.representatives:
        piece = dual_coset(t @ lam(g, g.inv(rep)), h.elements) @ lam(g, rep)
        total = total + piece
    return total


def dual_coset_via_subgroup(t: VNOperator, h: Subgroup, x: int) -> VNOperator:
    """``P_H*(T lambda(x^-1)) lambda(x)``, which should equal ``P_{Hx}*(T)``."""
    g = t.group
    return dual_coset(t @ lam(g, g.inv(x)), h.elements) @ lam(g, x)


# ---------------------------------------------------------------------------
# descriptors

KINDS = ("haar_K", "coset_c", "combined_BK", "dual_haar_K", "dual_coset_c", "dual_combined_BK")


@dataclass(frozen=True)
class ProjectionDescriptor:
    kind: str
    group: FiniteGroup
    B: Subgroup | None = None
    K: Subgroup | None = None
    coset: tuple[int, ...] | None = None

    def __post_init__(self):
        if self.kind not in KINDS:
            raise ValueError(f"unknown projection kind {self.kind!r}")
        if self.kind.endswith("haar_K") and self.K is None:
            raise ValueError("haar projection needs K")
        if self.kind.endswith("coset_c") and self.coset is None:
            raise ValueError("coset projection needs a coset")
        if self.kind.endswith("combined_BK"):
            if self.B is None or self.K is None:
                raise ValueError("combined projection needs B and K")

    @classmethod
    def combined(cls, idx: SkeletonIndex, dual: bool = False) -> "ProjectionDescriptor":
        kind = "dual_combined_BK" if dual else "combined_BK"
        return cls(kind, idx.group, B=idx.B, K=idx.K)

    @property
    def is_dual(self) -> bool:
        return self.kind.startswith("dual_")

    def apply(self, x):
        k = self.kind.removeprefix("dual_")
        if self.is_dual:
            if k == "haar_K":
                return dual_haar(x, self.K)
            if k == "coset_c":
                return dual_coset(x, self.coset)
            return dual_haar(dual_coset(x, self.B.elements), self.K)
        if k == "haar_K":
            return project_haar_P_K(x, self.K)
        if k == "coset_c":
            return project_coset_P_c(x, self.coset)
        return AFunction(x.group, np.where(self.B.indicator, project_haar_P_K(x, self.K).values, 0))

    def as_json(self) -> dict:
        return {
            "kind": self.kind,
            "B": list(self.B.elements) if self.B is not None else None,
            "K": list(self.K.elements) if self.K is not None else None,
            "coset": list(self.coset) if self.coset is not None else None,
        }


# ---------------------------------------------------------------------------
# conditional-expectation audit

CE_CHECKS = (
    "idempotent",
    "product_closed",
    "adjoint_closed",
    "unit",
    "bimodule",
    "positive",
    "contractive",
)


@dataclass
class CheckResult:
    name: str
    cases: int = 0
    failures: int = 0
    max_violation: float = 0.0
    witness: dict | None = None

    @property
    def passed(self) -> bool:
        return self.failures == 0

    def record(self, violation: float, tol: float, witness: Callable[[], dict]):
        """Count one case; the first failing case becomes the witness."""
        self.cases += 1
        self.max_violation = max(self.max_violation, float(violation))
        if not violation <= tol:
            self.failures += 1
            if self.witness is None:
                self.witness = {"violation": float(violation), **witness()}


@dataclass
class ExpectationAudit:
    descriptor: ProjectionDescriptor
    checks: dict[str, CheckResult] = field(default_factory=dict)

    @property
    def passed(self) -> bool:
        return all(c.passed for c in self.checks.values())

    def failed_checks(self) -> list[str]:
        return [name for name, c in self.checks.items() if not c.passed]


def random_operator(group: FiniteGroup, rng: np.random.Generator) -> VNOperator:
    n = group.order
    return VNOperator(group, (rng.standard_normal(n) + 1j * rng.standard_normal(n)) / np.sqrt(2))


def _coeff_json(t: VNOperator) -> list[list[float]]:
    return [[float(z.real), float(z.imag)] for z in t.coeffs]


def _scale(*ops: VNOperator) -> float:
    return max([1.0] + [float(np.max(np.abs(o.coeffs), initial=0.0)) for o in ops])


def conditional_expectation_audit(
    desc: ProjectionDescriptor,
    sample_count: int = 100,
    seed: int = 42,
    tol: float = TOL_ALG,
) -> ExpectationAudit:
    """Check the conditional-expectation axioms for a dual projection.

    Range elements are tested both on the deterministic spanning set
    ``E(lambda(x))`` and on images of random operators; violations are
    measured relative to the size of the operands involved.
    """
    if not desc.is_dual:
        raise ValueError(f"{desc.kind} is not a dual projection")
    g = desc.group
    E = desc.apply
    rng = np.random.default_rng(seed)
    audit = ExpectationAudit(desc, {name: CheckResult(name) for name in CE_CHECKS})
    c = audit.checks

    basis = [E(lam(g, x)) for x in g.elements()]
    basis = [b for b in basis if np.max(np.abs(b.coeffs)) > tol]
    samples = [random_operator(g, rng) for _ in range(sample_count)]
    range_samples = [E(t) for t in samples]

    def in_range_violation(t: VNOperator) -> float:
        return E(t).max_abs_diff(t) / _scale(t)

    # (a) idempotence
    for t, et in zip(samples, range_samples):
        c["idempotent"].record(E(et).max_abs_diff(et) / _scale(et), tol, lambda: {"T": _coeff_json(t)})

    # (b) closure under products, spanning set first
    pairs = [(a, b) for a in basis for b in basis]
    pairs += list(zip(range_samples, range_samples[1:] + range_samples[:1]))
    for a, b in pairs:
        ab = a @ b
        c["product_closed"].record(in_range_violation(ab), tol, lambda: {"A": _coeff_json(a), "B": _coeff_json(b)})

    # (c) closure under adjoints
    for a in basis + range_samples:
        c["adjoint_closed"].record(
            in_range_violation(a.adjoint()), tol, lambda: {"A": _coeff_json(a), "A*": _coeff_json(a.adjoint())}
        )

    # (d) the image of the identity is a two-sided unit for the range
    unit = E(identity_operator(g))
    c["unit"].record(in_range_violation(unit), tol, lambda: {"unit": _coeff_json(unit)})
    for a in basis + range_samples[: max(1, sample_count // 10)]:
        viol = max((unit @ a).max_abs_diff(a), (a @ unit).max_abs_diff(a)) / _scale(a)
        c["unit"].record(viol, tol, lambda: {"unit": _coeff_json(unit), "A": _coeff_json(a)})

    # (e) bimodule property
    for i, t in enumerate(samples):
        a = range_samples[(i + 1) % len(range_samples)]
        b = range_samples[(i + 2) % len(range_samples)]
        lhs = E(a @ t @ b)
        rhs = a @ E(t) @ b
        c["bimodule"].record(
            lhs.max_abs_diff(rhs) / _scale(a, b, t) ** 3,
            tol,
            lambda: {"A": _coeff_json(a), "T": _coeff_json(t), "B": _coeff_json(b)},
        )

    # (f) positivity of E(T* T)
    for t in samples:
        m = E(t.adjoint() @ t).matrix()
        herm = float(np.max(np.abs(m - m.conj().T)))
        lowest = float(np.linalg.eigvalsh((m + m.conj().T) / 2)[0])
        viol = max(herm, -lowest) / _scale(t) ** 2
        c["positive"].record(viol, tol, lambda: {"T": _coeff_json(t)})

    # (g) operator-norm contractivity
    for t, et in zip(samples, range_samples):
        viol = max(0.0, operator_norm(et) - operator_norm(t)) / max(1.0, operator_norm(t))
        c["contractive"].record(viol, tol, lambda: {"T": _coeff_json(t)})

    return audit
