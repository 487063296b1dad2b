"""Independent routes to the Fourier-algebra norm.

None of these go through the singular values of the convolution matrix:

* :func:`cyclic_fourier_l1` -- on ``Z/n`` the norm is the l1 sum of the DFT coefficients.
* :func:`abelian_fourier_l1` -- the same on any abelian group, with characters
  found by brute-force enumeration of homomorphisms into roots of unity.
* :func:`factorization_norm` -- numerically minimise ``||xi|| ||eta||`` over
  factorisations ``u(x) = <lambda(x) xi, eta>``.  Any exact factorisation gives an
  upper bound, so the result can never fall below the true norm.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass

import numpy as np
from scipy.optimize import minimize

from .fourier import AFunction
from .groups import FiniteGroup, GroupError, subgroup_generated


def cyclic_fourier_l1(values: np.ndarray) -> float:
    """``sum_k |u_hat(k)|`` with ``u_hat(k) = (1/n) sum_x u(x) e^{-2 pi i k x / n}``."""
    values = np.asarray(values, dtype=complex)
    return float(np.abs(np.fft.fft(values) / len(values)).sum())


def characters(group: FiniteGroup) -> np.ndarray:
    """All characters of an abelian group, one per row (shape ``(|G|, |G|)``).

    Picks generators greedily, assigns each a root of unity of its order, and
    keeps the assignments that extend consistently to a homomorphism.
    """
    if not group.is_abelian:
        raise GroupError("characters() needs an abelian group")
    gens: list[int] = []
    span = subgroup_generated(group, [])
    for x in group.elements():
        if x not in span:
            gens.append(x)
            span = subgroup_generated(group, gens)
    orders = [group.element_order(g) for g in gens]
    chars = []
    for ks in itertools.product(*(range(m) for m in orders)):
        chi = _extend(group, gens, [np.exp(2j * np.pi * k / m) for k, m in zip(ks, orders)])
        if chi is not None:
            chars.append(chi)
    if len(chars) != group.order:
        raise AssertionError(f"found {len(chars)} characters for a group of order {group.order}")
    return np.array(chars)


def _extend(group: FiniteGroup, gens, images) -> np.ndarray | None:
    chi = np.full(group.order, np.nan, dtype=complex)
    chi[group.identity] = 1.0
    frontier = [group.identity]
    while frontier:
        nxt = []
        for x in frontier:
            for g, z in zip(gens, images):
                y = group.mul(x, g)
                val = chi[x] * z
                if np.isnan(chi[y]):
                    chi[y] = val
                    nxt.append(y)
                elif abs(chi[y] - val) > 1e-9:
                    return None
        frontier = nxt
    return chi


def abelian_fourier_l1(u: AFunction) -> float:
    """``sum_chi |(1/n) sum_x u(x) conj(chi(x))|`` over all characters."""
    chars = characters(u.group)
    coeffs = chars.conj() @ u.values / u.group.order
    return float(np.abs(coeffs).sum())


@dataclass(frozen=True)
class Factorization:
    xi: np.ndarray
    eta: np.ndarray
    residual: float

    @property
    def value(self) -> float:
        return float(np.linalg.norm(self.xi) * np.linalg.norm(self.eta))


def coefficient_function(group: FiniteGroup, xi: np.ndarray, eta: np.ndarray) -> np.ndarray:
    """``u(x) = <lambda(x) xi, eta> = sum_t xi(x^-1 t) conj(eta(t))``."""
    # reindex t = x s:  u(x) = sum_s xi(s) conj(eta(x s))
    return np.conj(eta)[group.table] @ xi


def _xi_for(group: FiniteGroup, eta: np.ndarray, u: np.ndarray):
    a = np.conj(eta)[group.table]  # a[x, s] = conj(eta(x s))
    xi, *_ = np.linalg.lstsq(a, u, rcond=None)
    return xi, float(np.linalg.norm(a @ xi - u))


def factorization_norm(
    u: AFunction,
    restarts: int = 6,
    seed: int = 0,
    feasibility_tol: float = 1e-10,
) -> Factorization:
    """Best factorisation found by local minimisation over ``eta`` on the unit sphere.

    For fixed ``eta`` the constraint is linear in ``xi``, so ``xi`` is the
    minimum-norm solution and only ``eta`` is optimised.  Restarts are random.
    The returned factorisation is exact up to ``feasibility_tol`` relative
    residual; infeasible candidates are discarded.
    """
    g = u.group
    n = g.order
    target = u.values
    scale = max(float(np.linalg.norm(target)), 1e-300)
    if np.linalg.norm(target) == 0:
        return Factorization(np.zeros(n, complex), np.eye(1, n, 0, dtype=complex)[0], 0.0)
    rng = np.random.default_rng(seed)

    def unpack(p):
        eta = p[:n] + 1j * p[n:]
        return eta / np.linalg.norm(eta)

    def objective(p):
        eta = unpack(p)
        xi, res = _xi_for(g, eta, target)
        return np.linalg.norm(xi) + 1e3 * res / scale * (1 + np.linalg.norm(xi))

    starts = [np.concatenate([np.ones(n), np.zeros(n)])]
    starts += [rng.standard_normal(2 * n) for _ in range(restarts)]
    best: Factorization | None = None
    for p0 in starts:
        # nudge away from exactly-singular starting points
        p0 = p0 + 1e-3 * rng.standard_normal(2 * n)
        result = minimize(objective, p0, method="BFGS", options={"gtol": 1e-10, "maxiter": 2000})
        eta = unpack(result.x)
        xi, res = _xi_for(g, eta, target)
        if res > feasibility_tol * scale:
            continue
        cand = Factorization(xi, eta, res)
        if best is None or cand.value < best.value:
            best = cand
    if best is None:
        raise RuntimeError("no feasible factorisation found")
    return best
