import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from scipy.stats import special_ortho_group

from symspace.errors import NotInImage, NotTriangular
from symspace.liealg import SignatureParams, build_basis
from symspace.solvgroup import (
    CosetRep,
    SolvablePoint,
    cartan_coords,
    euler_params,
    euler_reconstruct,
    exp_2k_blocks,
    inverse,
    k_matrix,
    m_matrix,
    multiply,
    paint_rotate,
    point_from_m,
    product,
    product_r1_closed,
    product_r2_closed,
    sigma,
    sigma_inverse,
    sigma_matrix,
)
from symspace.numerics import expm

R2 = math.sqrt(2)
GROUP_PARAMS = [SignatureParams(1, 1), SignatureParams(1, 3), SignatureParams(2, 1), SignatureParams(2, 2), SignatureParams(3, 1)]


def _pt(p, seed, scale=1.0):
    return SolvablePoint.random(p, np.random.default_rng(seed), scale)


def test_origin_maps_to_identity():
    p = SignatureParams(2, 1)
    assert np.array_equal(sigma_matrix(SolvablePoint.zeros(p)), np.eye(p.N))
    assert sigma_inverse(np.eye(p.N), p).allclose(SolvablePoint.zeros(p), atol=0)
    assert np.allclose(m_matrix(SolvablePoint.zeros(p)).M, np.eye(p.N))


def test_sigma_rank_two_closed_form():
    p = SignatureParams(2, 1)
    y1, y2, y3, y4 = 0.3, -0.4, 0.7, -1.1
    U = np.array([0.5, -0.2])
    V = np.array([-0.8, 0.6])
    L = sigma_matrix(SolvablePoint(p, [y1, y2], [y3, y4], np.array([U, V])))
    e1, e2, E2 = math.exp(y1), math.exp(y2), math.exp(-y2)
    VV, UU, UV = V @ V, U @ U, U @ V
    expect = np.zeros((6, 6))
    expect[0] = [e1, e1 * y3 / R2,
                 0.5 * e1 * (R2 * U[0] + y3 * V[0]), 0.5 * e1 * (R2 * U[1] + y3 * V[1]),
                 -0.125 * e1 * (4 * UV + R2 * (y3 * VV - 4 * y4)), -0.25 * e1 * (UU + 2 * y3 * y4)]
    expect[1] = [0, e2, e2 * V[0] / R2, e2 * V[1] / R2, -0.25 * e2 * VV, -e2 * y4 / R2]
    expect[2] = [0, 0, 1, 0, -V[0] / R2, -U[0] / R2]
    expect[3] = [0, 0, 0, 1, -V[1] / R2, -U[1] / R2]
    expect[4] = [0, 0, 0, 0, E2, -E2 * y3 / R2]
    expect[5] = [0, 0, 0, 0, 0, 1 / e1]
    assert np.abs(L - expect).max() < 1e-14


def test_sigma_inverse_rank_one_formula():
    p = SignatureParams(1, 2)
    y = _pt(p, 3)
    L = sigma_matrix(y)
    assert abs(y.cartan[0] - math.log(L[0, 0])) < 1e-14
    for i in range(p.q):
        assert abs(y.short[0, i] + R2 * L[1 + i, p.N - 1]) < 1e-14


@pytest.mark.parametrize("p", GROUP_PARAMS + [SignatureParams(2, 2)], ids=str)
def test_sigma_roundtrip(p):
    for seed in range(20):
        y = _pt(p, seed, 1.5)
        assert sigma_inverse(sigma_matrix(y), p).allclose(y, atol=1e-12)


@settings(max_examples=60, deadline=None)
@given(st.sampled_from(GROUP_PARAMS), st.integers(0, 2**31 - 1))
def test_sigma_roundtrip_property(p, seed):
    y = _pt(p, seed, 2.0)
    back = sigma_inverse(sigma(y).L, p)
    assert np.abs(back.as_vector() - y.as_vector()).max() <= 1e-12 * max(1.0, np.abs(y.as_vector()).max()) * 10


def test_sigma_inverse_errors():
    p = SignatureParams(1, 1)
    L = sigma_matrix(_pt(p, 0))
    bad = L.copy()
    bad[3, 0] = 0.5
    with pytest.raises(NotTriangular):
        sigma_inverse(bad, p)
    neg = L.copy()
    neg[0, 0] = -1.0
    with pytest.raises(NotInImage):
        sigma_inverse(neg, p)


@pytest.mark.parametrize("p", GROUP_PARAMS, ids=str)
def test_coset_rep_invariants(p):
    for seed in range(5):
        assert sigma(_pt(p, seed)).check()


@pytest.mark.parametrize("p", GROUP_PARAMS, ids=str)
def test_product_matches_matrices(p):
    rng = np.random.default_rng(7)
    for _ in range(200):
        u = SolvablePoint.random(p, rng)
        v = SolvablePoint.random(p, rng)
        w = product(u, v)
        lhs = sigma_matrix(w)
        rhs = np.linalg.solve(sigma_matrix(u), sigma_matrix(v))
        assert np.abs(lhs - rhs).max() <= 1e-12 * max(1.0, np.abs(rhs).max())


def test_group_identities():
    p = SignatureParams(2, 2)
    u, v = _pt(p, 1), _pt(p, 2)
    z = SolvablePoint.zeros(p)
    assert product(u, u).allclose(z, atol=1e-12)
    assert product(z, v).allclose(v, atol=1e-12)
    assert multiply(u, inverse(u)).allclose(z, atol=1e-12)
    assert product(u, v).allclose(multiply(inverse(u), v), atol=1e-12)


def test_product_rank_one_closed_form():
    for s in (1, 3):
        p = SignatureParams(1, s)
        for seed in range(50):
            u, v = _pt(p, seed), _pt(p, seed + 1000)
            assert product_r1_closed(u, v).allclose(product(u, v), atol=1e-12)
    p = SignatureParams(1, 2)
    u, v = _pt(p, 5), _pt(p, 6)
    w = product(u, v)
    assert abs(w.cartan[0] - (v.cartan[0] - u.cartan[0])) < 1e-14
    assert np.allclose(w.short[0], v.short[0] - math.exp(u.cartan[0] - v.cartan[0]) * u.short[0], atol=1e-13)


@pytest.mark.parametrize("s", [1, 2, 3])
def test_product_rank_two_closed_form(s):
    p = SignatureParams(2, s)
    rng = np.random.default_rng(s)
    for _ in range(100):
        u = SolvablePoint.random(p, rng)
        v = SolvablePoint.random(p, rng)
        a, b = product_r2_closed(u, v), product(u, v)
        assert np.abs(a.as_vector() - b.as_vector()).max() <= 1e-12 * max(1.0, np.abs(b.as_vector()).max())


def test_m_matrix_rank_one_ts_point():
    p = SignatureParams(1, 1)
    w1, w2 = 0.4, -0.9
    M = m_matrix(SolvablePoint(p, [w1], [], [[w2, 0.0]])).M
    e, em = math.exp(w1), math.exp(-w1)
    expect = np.array([
        [e * e * (w2 ** 2 + 4) ** 2 / 16, e * w2 * (w2 ** 2 + 4) / (4 * R2), 0, -w2 ** 2 / 4],
        [0, (w2 ** 2 + 2) / 2, 0, -em * w2 / R2],
        [0, 0, 1, 0],
        [0, 0, 0, em * em],
    ])
    expect = np.triu(expect) + np.triu(expect, 1).T
    assert np.abs(M - expect).max() < 1e-14


@pytest.mark.parametrize("p", GROUP_PARAMS, ids=str)
def test_m_matrix_group_membership(p):
    eta_t, eta_b = build_basis(p).eta_t, build_basis(p).eta_b
    for seed in range(10):
        y = _pt(p, seed)
        for M, eta in ((m_matrix(y).M, eta_t), (m_matrix(y, "EtaB").M, eta_b)):
            scale = np.abs(M).max() ** 2
            assert np.abs(M @ eta @ M - eta).max() <= 1e-10 * scale
            assert abs(np.linalg.det(M) - 1) <= 1e-10 * scale
            assert np.all(np.linalg.eigvalsh(M) > 0)
            assert np.array_equal(M, M.T)


def test_m_matrix_coset_independence():
    """Right-multiplying L by an element of the compact subgroup leaves M unchanged."""
    p = SignatureParams(2, 1)
    om = build_basis(p).omega
    n = p.r + p.q
    y = _pt(p, 11)
    L = sigma_matrix(y)
    for seed in range(5):
        hb = np.zeros((p.N, p.N))
        hb[:n, :n] = special_ortho_group.rvs(n, random_state=seed)
        hb[n:, n:] = special_ortho_group.rvs(p.r, random_state=seed + 50)
        h = om.T @ hb @ om
        Lh = L @ h
        assert np.abs(Lh @ Lh.T - m_matrix(y).M).max() < 1e-12


def test_point_from_m_roundtrip():
    p = SignatureParams(2, 2)
    y = _pt(p, 4)
    assert point_from_m(m_matrix(y).M, p).allclose(y, atol=1e-11)


def test_euler_params():
    p = SignatureParams(2, 1)
    z = euler_params(SolvablePoint.zeros(p))
    assert np.allclose(z.mu, 0) and z.degenerate
    y = SolvablePoint(p, [0.9, 0.3], [0, 0], np.zeros((2, 2)))
    ep = euler_params(y)
    assert np.allclose(ep.mu, [1.8, 0.6])
    outer = [0, 1, p.N - 2, p.N - 1]
    assert np.allclose(np.abs(ep.O[:, outer]), np.eye(p.N)[:, outer], atol=1e-12)
    for seed in range(10):
        y = _pt(p, seed)
        ep = euler_params(y)
        assert np.all(np.diff(ep.mu) <= 0)
        assert np.allclose(ep.O @ ep.O.T, np.eye(p.N), atol=1e-10)
        assert np.abs(euler_reconstruct(ep, p) - m_matrix(y).M).max() <= 1e-10 * np.abs(m_matrix(y).M).max()


def test_cartan_coords():
    p = SignatureParams(2, 1)
    assert np.allclose(cartan_coords(SolvablePoint.zeros(p)), 0)
    y = SolvablePoint(p, [0.7, -0.2], [0, 0], np.zeros((2, 2)))
    sv = np.linalg.svd(cartan_coords(y), compute_uv=False)
    assert np.allclose(sorted(sv), sorted(np.abs(y.cartan)), atol=1e-12)
    for seed in range(5):
        y = _pt(p, seed)
        xi = cartan_coords(y)
        assert np.abs(expm(2 * k_matrix(xi)) - m_matrix(y, "EtaB").M).max() < 1e-9


def test_hyperbolic_blocks_match_exponential(rng):
    for r, n in ((1, 2), (2, 3), (3, 5)):
        xi = rng.normal(scale=0.6, size=(r, n))
        assert np.abs(exp_2k_blocks(xi) - expm(2 * k_matrix(xi))).max() < 1e-10


def test_paint_rotation_is_linear_on_short_blocks():
    p = SignatureParams(2, 2)
    y = _pt(p, 9)
    R = special_ortho_group.rvs(p.q, random_state=3)
    z = paint_rotate(y, R)
    assert np.allclose(z.short, y.short @ R.T, atol=1e-12)
    assert np.allclose(z.cartan, y.cartan) and np.allclose(z.long, y.long)
    with pytest.raises(ValueError):
        paint_rotate(y, np.ones((p.q, p.q)))


def test_point_json_roundtrip():
    p = SignatureParams(2, 1)
    y = _pt(p, 2)
    assert SolvablePoint.from_json(y.to_json()).allclose(y, atol=0)
    with pytest.raises(ValueError):
        SolvablePoint(p, [np.nan, 0], [0, 0], np.zeros((2, 2)))
    with pytest.raises(ValueError):
        SolvablePoint.from_vector(p, np.zeros(3))
