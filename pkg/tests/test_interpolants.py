import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from oracles import naive_ifwht, product_group_values
from wgl import dyadic_core as dc
from wgl import interpolants as it
from wgl import riesz_products as rp

DELTA2 = math.sqrt(math.sinh(1) - 1)


def unit(rng, n, s=2.0, cx=False):
    x = rng.standard_normal(n) + (1j * rng.standard_normal(n) if cx else 0)
    return x / rp.vector_norm(x, s)


# --- plans -----------------------------------------------------------------


def test_plan_sizes():
    assert it.build_cascade_plan(3, 3, "full").sizes == (3, 4, 11)
    p = it.build_cascade_plan(3, 3, "odd")
    assert p.sizes == (3, 1) and p.terminated
    assert it.build_cascade_plan(4, 5, "odd").sizes == (4, 4, 4, 4, 4)


def test_plan_index_maps_enumerate_ascending_masks():
    p = it.build_cascade_plan(4, 2, "odd")
    assert list(p.levels[1].index_map) == [7, 11, 13, 14]
    f = it.build_cascade_plan(3, 2, "full")
    assert list(f.levels[1].index_map) == [3, 5, 6, 7]


def test_plan_cap_error_names_level():
    with pytest.raises(dc.DomainError, match="level 4 would have 2036"):
        it.build_cascade_plan(3, 4, "full")
    with pytest.raises(dc.DomainError, match="level 3"):
        it.build_cascade_plan(5, 3, "odd")
    with pytest.raises(ValueError):
        it.build_cascade_plan(3, 0)
    with pytest.raises(ValueError):
        it.build_cascade_plan(3, 2, "even")


# --- vector cascade ----------------------------------------------------------


def test_vector_cascade_examples():
    p = it.build_cascade_plan(3, 2, "odd")
    v = it.vector_cascade(np.eye(3)[0], p)
    assert not np.any(v[1])
    v = it.vector_cascade(np.ones(3) / math.sqrt(3), p, "Q", 2)
    assert v[1] == pytest.approx([-1 / (3 * math.sqrt(3))])


def test_vector_cascade_kind_branch_enforced():
    p = it.build_cascade_plan(4, 2)
    with pytest.raises(ValueError):
        it.vector_cascade(np.ones(4), p, "P", 2)
    with pytest.raises(ValueError):
        it.vector_cascade(np.ones(4), p, "Q", 3)
    with pytest.raises(dc.DomainError):
        it.vector_cascade(np.ones(3), p)


@settings(max_examples=40, deadline=None)
@given(st.integers(0, 2**32 - 1), st.sampled_from([1.0, 1.3, 2.0, 2.5, 4.0, math.inf]))
def test_vector_cascade_geometric_decay(seed, s):
    rng = np.random.default_rng(seed)
    x = rng.standard_normal(4)
    p = it.build_cascade_plan(4, 3)
    vecs = it.vector_cascade(x, p, None, s)
    d = it.level_decay(s)
    for a, b in zip(vecs, vecs[1:]):
        assert rp.vector_norm(b, s) <= d * rp.vector_norm(a, s) * (1 + 1e-12) + 1e-15
    if s == 2:
        assert d == pytest.approx(DELTA2)


# --- ultra-interpolant --------------------------------------------------------


def test_single_coordinate_and_small_n_are_exact():
    p = it.build_cascade_plan(1, 1)
    F = it.ultra_interpolant([1.0], p)
    assert np.allclose(F.factors[0].coeffs, [0, 1])
    assert it.pairing(F, F).value == pytest.approx(1)
    rng = np.random.default_rng(0)
    p2 = it.build_cascade_plan(2, 1)
    x, y = rng.standard_normal(2), rng.standard_normal(2)
    F, G = it.ultra_interpolant(x, p2), it.ultra_interpolant(y, p2)
    assert np.allclose(F.factors[0].coeffs, dc.WalshSeries.rademacher_sum(x).coeffs)
    v, bound = it.pairing(F, G)
    assert v == pytest.approx(np.dot(x, y), abs=1e-15) and bound > 0


def test_orthogonal_basis_vectors_pair_to_zero():
    p = it.build_cascade_plan(3, 2)
    assert it.pairing(it.ultra_interpolant(np.eye(3)[0], p), it.ultra_interpolant(np.eye(3)[1], p)).value == 0


@settings(max_examples=40, deadline=None)
@given(st.integers(0, 2**32 - 1), st.sampled_from([1.0, 1.5, 2.0, 3.0, math.inf]), st.booleans())
def test_factor_structure(seed, s, cx):
    rng = np.random.default_rng(seed)
    x = unit(rng, 4, s, cx)
    F = it.ultra_interpolant(x, it.build_cascade_plan(4, 3), s)
    assert np.max(np.abs(F.level1_singletons() - x)) <= 1e-12
    for f in F.factors:
        assert f.coeffs[0] == 0
    bounded = F.sup_certificate if s <= 2 else F.m_certificate
    assert bounded <= F.stated_bound * (1 + 1e-9)


def test_sup_certificate_n3_depth3():
    rng = np.random.default_rng(4)
    p = it.build_cascade_plan(3, 3)
    for _ in range(50):
        x = unit(rng, 3)
        F = it.ultra_interpolant(x, p)
        assert F.sup_certificate <= math.exp(0.5) / (1 - DELTA2) + 1e-12
    assert math.exp(0.5) / (1 - DELTA2) == pytest.approx(2.83563, abs=1e-5)


@pytest.mark.parametrize("s", [1.0, 1.5, 2.0, 3.0, math.inf])
@pytest.mark.parametrize("cx", [False, True])
def test_pairing_matches_explicit_product_group(s, cx):
    rng = np.random.default_rng(int(7 * (s if s < 10 else 9)) + cx)
    t = it.conjugate_exponent(s)
    p = it.build_cascade_plan(4, 2)
    x, y = unit(rng, 4, s, cx), unit(rng, 4, t, cx)
    F, G = it.ultra_interpolant(x, p, s), it.ultra_interpolant(y, p, t)
    fv = product_group_values([naive_ifwht(f.coeffs) for f in F.factors])
    gv = product_group_values([naive_ifwht(g.coeffs) for g in G.factors])
    direct = np.mean(fv * gv)
    value, bound = it.pairing(F, G)
    assert value == pytest.approx(direct, abs=1e-12)
    assert abs(value - np.dot(x, y)) <= bound * (1 + 1e-9) + 1e-15
    # the telescoping identity: value - x.y = (-1)^(J-1) tail(x) . tail(y)
    J = len(p.levels)
    assert value - np.dot(x, y) == pytest.approx((-1) ** (J - 1) * np.dot(F.tail, G.tail), abs=1e-13)


def test_materialize_agrees_with_product_group_oracle():
    rng = np.random.default_rng(9)
    F = it.ultra_interpolant(unit(rng, 4), it.build_cascade_plan(4, 3))
    oracle = product_group_values([naive_ifwht(f.coeffs) for f in F.factors])
    mat = it.materialize(F).values
    # oracle enumerates level 1 slowest; materialize puts level 1 in the low bits
    sizes = [1 << lv.size for lv in F.plan.levels]
    reordered = oracle.reshape(sizes).transpose(list(range(len(sizes)))[::-1]).reshape(-1)
    assert np.allclose(mat, reordered, atol=1e-12)
    assert dc.sup_norm(mat) <= F.sup_certificate + 1e-12


def test_coefficient_norm_over_disjoint_factors():
    rng = np.random.default_rng(2)
    F = it.ultra_interpolant(unit(rng, 4), it.build_cascade_plan(4, 2))
    mat = dc.fwht(it.materialize(F))
    for s in (1.0, 2.0, 3.0, math.inf):
        assert F.coeff_norm(s) == pytest.approx(dc.ls_coeff_norm(mat, s), rel=1e-10)


@settings(max_examples=40, deadline=None)
@given(st.integers(0, 2**32 - 1), st.sampled_from([1.2, 2.0, 2.5]), st.integers(1, 4))
def test_pairing_residual_bound(seed, s, J):
    rng = np.random.default_rng(seed)
    t = it.conjugate_exponent(s)
    p = it.build_cascade_plan(4, J)
    x, y = rng.standard_normal(4), rng.standard_normal(4)
    value, bound = it.pairing(it.ultra_interpolant(x, p, s), it.ultra_interpolant(y, p, t))
    assert abs(value - np.dot(x, y)) <= bound * (1 + 1e-9) + 1e-15


def test_pairing_n3_depth3_and_plan_mismatch():
    rng = np.random.default_rng(11)
    p = it.build_cascade_plan(3, 3)
    for _ in range(100):
        x, y = unit(rng, 3), unit(rng, 3)
        value, bound = it.pairing(it.ultra_interpolant(x, p), it.ultra_interpolant(y, p))
        assert abs(value - np.dot(x, y)) <= (math.sinh(1) - 1) ** 3 * (1 + 1e-9)
        assert bound == pytest.approx((math.sinh(1) - 1) ** 3)
    with pytest.raises(dc.DomainError):
        it.pairing(it.ultra_interpolant(np.ones(3), p), it.ultra_interpolant(np.ones(4), it.build_cascade_plan(4, 3)))


def test_endpoints_complex():
    rng = np.random.default_rng(12)
    for _ in range(200):
        n = int(rng.integers(1, 9))
        x = rng.standard_normal(n) + 1j * rng.standard_normal(n)
        p = it.build_cascade_plan(n, 2 if n == 4 else 1)
        F1 = it.ultra_interpolant(x, p, 1.0)
        l1 = np.sum(np.abs(x))
        assert (2 / math.pi) * l1 <= F1.sup_certificate * (1 + 1e-12) <= l1 * (1 + 1e-12) + 1e-12
        Finf = it.ultra_interpolant(x, p, math.inf)
        linf = np.max(np.abs(x))
        assert linf <= Finf.m_certificate * (1 + 1e-12) <= 4 * linf * (1 + 1e-12)


def test_ultra_interpolant_errors():
    p = it.build_cascade_plan(3, 1)
    with pytest.raises(ValueError):
        it.ultra_interpolant(np.ones(3), p, 0.5)
    with pytest.raises(dc.DomainError):
        it.ultra_interpolant(np.ones(2), p)
    with pytest.raises(dc.DomainError):
        it.materialize(it.ultra_interpolant(np.ones(4), it.build_cascade_plan(4, 6)))


# --- uniformizer --------------------------------------------------------------


def test_e_inverse_solves_the_equation():
    for K, delta in ((3.0, 0.5), (40.0, 0.2), (100.0, 0.999), (math.e, 1e-6)):
        xi = it.e_inverse(delta, K)
        assert xi >= 1
        assert it.e_function(xi, K) == pytest.approx(delta, rel=1e-10)
    with pytest.raises(ValueError):
        it.e_inverse(5.0, 1.0)
    with pytest.raises(ValueError):
        it.e_inverse(0.0, 3.0)


def test_e_inverse_monotone_in_delta():
    xs = [it.e_inverse(d, 30.0) for d in np.linspace(0.05, 0.99, 30)]
    assert all(a > b for a, b in zip(xs, xs[1:]))


def test_exp_square_integral_and_estimate():
    assert it.exp_square_integral(np.eye(5)[0]) == pytest.approx(math.e)
    k3 = it.estimate_exp_square_constant(3, 500, seed=1)
    assert k3 >= math.e  # Jensen
    assert k3 == it.estimate_exp_square_constant(3, 500, seed=1)


def test_uniformize_basis_vector_is_unclipped():
    rep = it.uniformize(np.eye(6)[0], 0.3, kappa_hat=10.0)
    assert rep.l2_dist == 0 and np.allclose(rep.g.coeffs, dc.WalshSeries.rademacher_sum(np.eye(6)[0]).coeffs)
    assert not rep.hard_failures


def test_uniformize_contract_n10():
    rng = np.random.default_rng(13)
    K = it.estimate_exp_square_constant(10, 2000, seed=0)
    for delta in (0.2, 0.5, 0.8):
        for _ in range(15):
            x = unit(rng, 10)
            rep = it.uniformize(x, delta, kappa_hat=K)
            assert np.max(np.abs(rep.g.singletons() - x)) <= 1e-10
            assert rep.l2_dist <= rep.substitute_budget * (1 + 1e-9)
            assert rep.sup_g <= rep.substitute_sup_bound * (1 + 1e-9)
            assert rep.kappa_used >= K and rep.xi >= 1


def test_uniformize_scaling_and_complex():
    rng = np.random.default_rng(14)
    x = unit(rng, 8)
    a, b = it.uniformize(x, 0.4, kappa_hat=20.0), it.uniformize(3 * x, 0.4, kappa_hat=20.0)
    assert b.sup_g == pytest.approx(3 * a.sup_g) and b.l2_dist == pytest.approx(3 * a.l2_dist, abs=1e-12)
    z = unit(rng, 8, cx=True)
    rep = it.uniformize(z, 0.4, kappa_hat=20.0)
    assert not rep.hard_failures and np.allclose(rep.g.singletons(), z)


def test_uniformize_flat_vector_clips():
    x = np.ones(10) / math.sqrt(10)
    rep = it.uniformize(x, 0.5, kappa_hat=it.exp_square_integral(x))
    assert rep.xi < math.sqrt(10)  # the corner value is clipped
    assert 0 < rep.l2_dist <= rep.substitute_budget
    assert not rep.hard_failures


def test_uniformize_errors():
    with pytest.raises(ValueError):
        it.uniformize(np.ones(3), 1.0)
    with pytest.raises(ValueError):
        it.uniformize(np.zeros(3), 0.5, kappa_hat=3.0)


def test_lambda_p_threshold_closed_form():
    for p in (2.5, 3, 4, 8):
        k2 = math.sqrt(p)
        xi = it.lambda_p_threshold(0.3, p, k2)
        # it solves 2 xi^((2-p)/2) kappa2^(p/2) kappa = delta
        assert 2 * xi ** ((2 - p) / 2) * k2 ** (p / 2) * math.sqrt(2) == pytest.approx(0.3)
        assert xi == pytest.approx(it.lambda_p_constant(p, k2) * 0.3 ** (2 / (2 - p)))


def test_lambda_p_threshold_not_monotone_in_p():
    xs = [it.lambda_p_threshold(0.3, p, math.sqrt(p)) for p in (2.2, 3, 8, 100)]
    assert xs[0] > xs[1] > xs[2] and xs[3] > xs[2]


def test_uniformize_lambda_p():
    rep = it.uniformize_lambda_p(np.eye(5)[0], 0.5, 4)
    assert rep.l2_dist == 0
    rng = np.random.default_rng(15)
    for _ in range(20):
        x = unit(rng, 8)
        rep = it.uniformize_lambda_p(x, 2.0, 4)
        assert np.allclose(rep.g.singletons(), x)
        assert rep.l2_dist <= rep.substitute_budget * (1 + 1e-9)
    rep = it.uniformize_lambda_p(np.ones(8) / math.sqrt(8), 2.0, 4, kappa2_hat=0.5)
    assert rep.kappa_used > 0.5 and rep.notes
    with pytest.raises(ValueError):
        it.uniformize_lambda_p(np.ones(3), 0.5, 2)
