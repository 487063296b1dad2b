import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from fskel.fourier import AFunction, VNOperator, a_norm, delta, indicator, lam, pairing, regular_representation
from fskel.groups import (
    construct_group,
    enumerate_subgroups,
    normal_subgroups,
    normalizer,
    quotient_group,
    right_cosets,
    subgroup_generated,
)
from fskel.lattice import SkeletonIndex, build_index_family
from fskel.projections import (
    CE_CHECKS,
    ProjectionDescriptor,
    conditional_expectation_audit,
    dual_combined,
    dual_coset,
    dual_haar,
    fixed_space_dim,
    haar_average_Q,
    is_left_invariant,
    open_subgroup_iso,
    pimsner_popa_reconstruct,
    project_combined,
    project_coset_P_c,
    project_haar_P_K,
    quotient_pullback,
)

SMALL = ["cyclic:4", "cyclic:6", "symmetric:3", "quaternion", "dihedral:8"]


def sub(g, *labels):
    return subgroup_generated(g, [g.index_of_label(x) for x in labels])


def rand_u(g, rng):
    return AFunction(g, rng.standard_normal(g.order) + 1j * rng.standard_normal(g.order))


def rand_t(g, rng):
    return VNOperator(g, rng.standard_normal(g.order) + 1j * rng.standard_normal(g.order))


def test_haar_average_examples():
    z2 = construct_group("cyclic:2")
    assert np.allclose(haar_average_Q(regular_representation(z2), z2.whole), np.full((2, 2), 0.5))
    s3 = construct_group("symmetric:3")
    rep = regular_representation(s3)
    assert np.allclose(haar_average_Q(rep, s3.trivial), np.eye(6))
    q = haar_average_Q(rep, sub(s3, "(1 2 3)"))
    assert np.linalg.matrix_rank(q) == 2
    assert fixed_space_dim(rep, sub(s3, "(1 2 3)")) == 2


def test_project_haar_examples():
    z4 = construct_group("cyclic:4")
    h = sub(z4, "2")
    u = rand_u(z4, np.random.default_rng(0))
    assert project_haar_P_K(u, z4.trivial).max_abs_diff(u) == 0
    p = project_haar_P_K(delta(z4, 0), h)
    assert np.allclose(p.values, [0.5, 0, 0.5, 0])
    assert a_norm(p) == pytest.approx(0.5)
    s3 = construct_group("symmetric:3")
    a3 = sub(s3, "(1 2 3)")
    p = project_haar_P_K(delta(s3, 0), a3)
    assert np.allclose(p.values, indicator(s3, a3.elements).values / 3)
    assert a_norm(p) == pytest.approx(1 / 3)


def test_project_coset_examples():
    z4 = construct_group("cyclic:4")
    one = indicator(z4, z4.elements())
    assert project_coset_P_c(one, tuple(z4.elements())).max_abs_diff(one) == 0
    assert np.array_equal(project_coset_P_c(one, (1, 3)).values, [0, 1, 0, 1])
    u = rand_u(z4, np.random.default_rng(1))
    assert np.all(project_coset_P_c(project_coset_P_c(u, (1, 3)), (0, 2)).values == 0)


def test_project_combined_examples():
    z4 = construct_group("cyclic:4")
    o = sub(z4, "2")
    u = rand_u(z4, np.random.default_rng(2))
    assert project_combined(u, SkeletonIndex(o, z4.whole, z4.trivial)).max_abs_diff(u) == 0
    assert np.allclose(project_combined(delta(z4, 0), SkeletonIndex(o, o, o)).values, [0.5, 0, 0.5, 0])
    assert np.all(project_combined(delta(z4, 1), SkeletonIndex(o, o, z4.trivial)).values == 0)


def test_dual_examples():
    s3 = construct_group("symmetric:3")
    k = sub(s3, "(1 2)")
    rng = np.random.default_rng(3)
    t = rand_t(s3, rng)
    assert dual_haar(t, s3.trivial).max_abs_diff(t) == 0
    for x in s3.elements():
        want = np.zeros(6)
        want[[s3.mul(a, x) for a in k.elements]] = 1 / len(k)
        assert np.allclose(dual_haar(lam(s3, x), k).coeffs, want)
    for c in right_cosets(s3, k).classes:
        for x in s3.elements():
            out = dual_coset(lam(s3, x), c)
            assert np.array_equal(out.coeffs, lam(s3, x).coeffs if x in c else np.zeros(6))
        masked = dual_coset(t, c)
        assert masked.support() <= set(c)
    o = s3.whole
    top = SkeletonIndex(o, s3.whole, s3.trivial)
    assert dual_combined(t, top).max_abs_diff(t) == 0
    o = k
    idx = SkeletonIndex(o, o, o)
    x_out = next(x for x in s3.elements() if x not in o.element_set)
    assert np.all(dual_combined(lam(s3, x_out), idx).coeffs == 0)


@settings(max_examples=30, deadline=None)
@given(st.sampled_from(SMALL), st.data())
def test_adjointness(spec, data):
    g = construct_group(spec)
    rng = np.random.default_rng(data.draw(st.integers(0, 2**31)))
    subs = enumerate_subgroups(g)
    k = data.draw(st.sampled_from(subs))
    u, t = rand_u(g, rng), rand_t(g, rng)
    assert abs(pairing(project_haar_P_K(u, k), t) - pairing(u, dual_haar(t, k))) < 1e-9
    c = data.draw(st.sampled_from(right_cosets(g, k).classes))
    assert abs(pairing(project_coset_P_c(u, c), t) - pairing(u, dual_coset(t, c))) < 1e-9
    o = data.draw(st.sampled_from(subs))
    idx = data.draw(st.sampled_from(list(build_index_family(g, o))))
    assert abs(pairing(project_combined(u, idx), t) - pairing(u, dual_combined(t, idx))) < 1e-9


@settings(max_examples=30, deadline=None)
@given(st.sampled_from(SMALL), st.data())
def test_haar_projection_properties(spec, data):
    g = construct_group(spec)
    rng = np.random.default_rng(data.draw(st.integers(0, 2**31)))
    k = data.draw(st.sampled_from(enumerate_subgroups(g)))
    u = rand_u(g, rng)
    p = project_haar_P_K(u, k)
    assert is_left_invariant(p, k)
    assert project_haar_P_K(p, k).max_abs_diff(p) < 1e-12
    assert a_norm(p) <= a_norm(u) + 1e-9


def test_quotient_pullback_examples():
    z4 = construct_group("cyclic:4")
    h = sub(z4, "2")
    quo, q = quotient_group(z4.whole, h)
    ident = delta(quo, quo.identity)
    up = quotient_pullback(ident, q, h)
    assert np.array_equal(up.values, [1, 0, 1, 0])
    assert a_norm(up) == pytest.approx(1) and a_norm(ident) == pytest.approx(1)
    one = indicator(quo, quo.elements())
    assert np.array_equal(quotient_pullback(one, q, h).values, np.ones(4))
    s3 = construct_group("symmetric:3")
    quo, q = quotient_group(s3.whole, s3.trivial)
    rng = np.random.default_rng(4)
    v = rand_u(quo, rng)
    assert a_norm(quotient_pullback(v, q, s3.trivial)) == pytest.approx(a_norm(v))


@pytest.mark.parametrize("spec", ["dihedral:8", "quaternion", "symmetric:3"])
def test_quotient_pullback_isometry(spec):
    g = construct_group(spec)
    rng = np.random.default_rng(5)
    for k in normal_subgroups(g.whole):
        quo, q = quotient_group(g.whole, k)
        v = rand_u(quo, rng)
        assert abs(a_norm(quotient_pullback(v, q, k)) - a_norm(v)) < 1e-9


def test_open_subgroup_iso_examples():
    z4 = construct_group("cyclic:4")
    h = sub(z4, "2")
    u = open_subgroup_iso(indicator(z4, [0, 2]), h)
    assert np.array_equal(u.values, [1, 1])
    assert a_norm(u) == pytest.approx(1)
    d = open_subgroup_iso(delta(z4, 0), h)
    assert np.array_equal(d.values, [1, 0]) and a_norm(d) == pytest.approx(1)
    v = rand_u(z4, np.random.default_rng(6))
    # H = G: the same values on a relabelled copy of G
    assert np.array_equal(open_subgroup_iso(v, z4.whole).values, v.values)
    with pytest.raises(ValueError):
        open_subgroup_iso(delta(z4, 1), h)


def test_pimsner_popa_examples():
    z4 = construct_group("cyclic:4")
    h = sub(z4, "2")
    assert pimsner_popa_reconstruct(lam(z4, 1), h).max_abs_diff(lam(z4, 1)) == 0
    s3 = construct_group("symmetric:3")
    a3 = sub(s3, "(1 2 3)")
    rng = np.random.default_rng(7)
    for _ in range(5):
        t = rand_t(s3, rng)
        assert pimsner_popa_reconstruct(t, a3).max_abs_diff(t) < 1e-9
    inside = VNOperator(s3, indicator(s3, a3.elements).values * 2)
    assert dual_coset(inside, a3.elements).max_abs_diff(inside) == 0


def test_ce_audit_passing_cases():
    z4 = construct_group("cyclic:4")
    h = sub(z4, "2")
    desc = ProjectionDescriptor("dual_coset_c", z4, coset=h.elements)
    assert conditional_expectation_audit(desc, sample_count=20).passed
    for o in enumerate_subgroups(z4):
        for idx in build_index_family(z4, o):
            assert conditional_expectation_audit(ProjectionDescriptor.combined(idx, dual=True), 20).passed


def test_ce_audit_s3_failure_localised():
    s3 = construct_group("symmetric:3")
    k = sub(s3, "(1 2)")
    idx = SkeletonIndex(k, s3.whole, k)
    assert not idx.b_normalizes_k()
    for seed in (0, 1, 42, 1234):
        audit = conditional_expectation_audit(ProjectionDescriptor.combined(idx, dual=True), 20, seed)
        assert "adjoint_closed" in audit.failed_checks()
        w = audit.checks["adjoint_closed"].witness
        assert w is not None and "violation" in w
    # the deterministic witness is Q_K lambda(x) for some x outside N(K)
    first = conditional_expectation_audit(ProjectionDescriptor.combined(idx, dual=True), 20, 0)
    again = conditional_expectation_audit(ProjectionDescriptor.combined(idx, dual=True), 20, 99)
    assert first.checks["adjoint_closed"].witness == again.checks["adjoint_closed"].witness
    assert normalizer(s3, k) == k


@pytest.mark.parametrize("spec", ["symmetric:3", "dihedral:8", "quaternion"])
def test_ce_outcome_matches_normalizer_predicate(spec):
    g = construct_group(spec)
    for o in enumerate_subgroups(g):
        for idx in build_index_family(g, o):
            audit = conditional_expectation_audit(ProjectionDescriptor.combined(idx, dual=True), 10)
            assert audit.passed == idx.b_normalizes_k()
            assert set(audit.checks) == set(CE_CHECKS)


def test_descriptor_validation():
    z4 = construct_group("cyclic:4")
    with pytest.raises(ValueError):
        ProjectionDescriptor("haar_K", z4)
    with pytest.raises(ValueError):
        ProjectionDescriptor("nope", z4)
    with pytest.raises(ValueError):
        conditional_expectation_audit(ProjectionDescriptor("haar_K", z4, K=z4.whole))
    d = ProjectionDescriptor("combined_BK", z4, B=z4.whole, K=z4.trivial)
    assert d.as_json() == {"kind": "combined_BK", "B": [0, 1, 2, 3], "K": [0], "coset": None}
