"""Acceptance criteria 1-9, each timed against its budget.

Every test records one "criterion N: pass|FAIL" line; the lines are echoed
immediately and again in the terminal summary.
"""
import math
import time
from contextlib import contextmanager
from fractions import Fraction

import numpy as np
import pytest
from scipy.stats import special_ortho_group

from symspace import arithmetic as ar
from symspace import cmap as cm
from symspace import harmonics as hm
from symspace.geodesy import (
    dist_r1_paint_form,
    distance,
    distance_trlog,
    geodesic,
    norm_squared,
    norm_squared_r1,
    norm_squared_r2,
)
from symspace.liealg import QSqrt2, SignatureParams, build_basis, eta_antisymmetric
from symspace.numerics import cholesky_upper
from symspace.solvgroup import SolvablePoint, paint_rotate, product, sigma_inverse, sigma_matrix
from symspace.titssatake import (
    ETA3,
    ETA5,
    GAMMA_SL2,
    GAMMA_SP4,
    R2S1,
    SIEGEL_ORIGIN,
    fiber_normal_decompose,
    fl_action,
    spinor_solvable,
    spinor_to_vector_sl2,
    spinor_to_vector_sp4,
    to_siegel,
)

from conftest import load_fixture

RESULTS = []
SEED = 20240611


@contextmanager
def criterion(n, budget):
    t0 = time.perf_counter()
    ok = False
    try:
        yield
        elapsed = time.perf_counter() - t0
        assert elapsed < budget, f"took {elapsed:.1f}s, budget {budget}s"
        ok = True
    finally:
        line = f"criterion {n}: {'pass' if ok else 'FAIL'} ({time.perf_counter() - t0:.2f}s)"
        RESULTS.append(line)
        print(line)


def _rel(a, b):
    return abs(a - b) / max(1.0, abs(b))


def _scaled(x, scale):
    return x / max(1.0, scale)


# --- 1 ---------------------------------------------------------------------------------

def test_criterion_1_integer_suite():
    with criterion(1, 5.0):
        rels = ar.sp4z_relations()
        assert rels and all(r.holds for r in rels), [r.name for r in rels if not r.holds]
        for r, q in [(r, q) for r in range(1, 5) for q in range(1, 4)]:
            assert all(x.holds for x in ar.sorqz_relations(r, q))
        G = ar.p32()
        table = load_fixture("p32_table.json")
        assert len(G) == 32
        assert {g.key() for g in G} == {ar.IntMatrix.of(e["matrix"]).key() for e in table.values()}
        assert len(ar.conjugacy_classes(G)) == 14
        orbit = ar.orbit_of_translations(G)
        keys = {u.key() for u in orbit}
        assert len(orbit) == 16 and all(u.inv().key() in keys for u in orbit)


# --- 2 ---------------------------------------------------------------------------------

def test_criterion_2_weyl_orders():
    with criterion(2, 60.0):
        for r, n in zip(range(1, 5), (2, 16, 192, 3072)):
            assert ar.weyl_group_order(r, 1) == n == 2 ** (2 * r - 1) * math.factorial(r)
        for (r, q), n in {(2, 2): 32, (2, 3): 64, (2, 4): 128, (3, 2): 384, (3, 3): 768}.items():
            assert ar.weyl_group_order(r, q) == n


# --- 3 ---------------------------------------------------------------------------------

def test_criterion_3_casimir_anchors():
    with criterion(3, 5.0):
        assert hm.casimir(4, (2,)) == 9
        assert hm.casimir(4, (4,)) == 24
        assert hm.casimir(4, (2, 2)) == 12
        for N in range(2, 21):
            assert hm.casimir(N, (2,)) == Fraction(2 * (N - 1) * (N + 2), N)


# --- 4 ---------------------------------------------------------------------------------

def test_criterion_4_numeric_laplacian():
    rng = np.random.default_rng(SEED)
    with criterion(4, 120.0):
        for f, val in [(hm.fundamental_harmonic(4, 1, 2), 9),
                       (hm.harmonic_level2(4, (4,), (1, 2, 3, 4)), 24),
                       (hm.harmonic_level2(4, (2, 2), (1, 2, 3, 4)), 12)]:
            for _ in range(10):
                ratio = hm.eigenvalue_ratio(4, f, hm.random_point(4, rng))
                assert abs(ratio - val) / val < 1e-3
        f31 = hm.harmonic_level2(4, (3, 1), (1, 2, 3, 4))
        for _ in range(50):
            assert abs(f31(hm.random_point(4, rng))) <= 1e-13


# --- 5 ---------------------------------------------------------------------------------

def test_criterion_5_distance_oracles():
    rng = np.random.default_rng(SEED)
    with criterion(5, 30.0):
        for r, s in [(1, 1), (1, 3), (2, 1), (2, 2)]:
            p = SignatureParams(r, s)
            pts = [SolvablePoint.random(p, rng) for _ in range(1001)]
            for u, v, w in zip(pts[:-1], pts[1:], pts[2:] + pts[:1]):
                d = distance(u, v)
                assert _rel(distance_trlog(u, v), d) <= 1e-9
                x = product(u, v)
                if r == 1:
                    assert _rel(norm_squared_r1(x), d * d) <= 1e-9
                    assert _rel(dist_r1_paint_form(u, v), d) <= 1e-9
                else:
                    assert _rel(norm_squared_r2(x), d * d) <= 1e-9
                assert distance(u, w) + distance(w, v) - d >= -1e-9
            for k in range(20):
                R = special_ortho_group.rvs(p.q, random_state=k)
                n2 = norm_squared(pts[k])
                assert abs(norm_squared(paint_rotate(pts[k], R)) - n2) <= 1e-10 * max(1, n2)
        p = SignatureParams(1, 1)
        for lam in np.linspace(-3, 3, 25):
            w = SolvablePoint(p, [lam], [], [[0.0, 0.0]])
            assert abs(norm_squared(w) - 4 * lam * lam) <= 1e-12 * max(1, 4 * lam * lam)


# --- 6 ---------------------------------------------------------------------------------

def test_criterion_6_geodesic_contract():
    rng = np.random.default_rng(SEED)
    with criterion(6, 30.0):
        for p in (SignatureParams(1, 1), SignatureParams(1, 2), SignatureParams(2, 1), SignatureParams(2, 2)):
            for _ in range(25):
                u, v = SolvablePoint.random(p, rng), SolvablePoint.random(p, rng)
                g = geodesic(u, v)
                assert np.abs(g.sampler(0.0).as_vector() - u.as_vector()).max() <= 1e-8
                assert np.abs(g.sampler(1.0).as_vector() - v.as_vector()).max() <= 1e-8
                m, d = g.sampler(0.5), distance(u, v)
                assert abs(distance(u, m) + distance(m, v) - d) <= 1e-8 * max(1, d)
        for p in (SignatureParams(1, 2), SignatureParams(2, 2)):
            for _ in range(10):
                a, b = (SolvablePoint.random(p, rng) for _ in range(2))
                a, b = (SolvablePoint(p, y.cartan, y.long, np.pad(y.short[:, :1], ((0, 0), (0, p.q - 1))))
                        for y in (a, b))
                for y in geodesic(a, b).samples(9):
                    assert np.abs(y.short[:, 1:]).max() <= 1e-9


# --- 7 ---------------------------------------------------------------------------------

def _exact(x):
    """Lift a float entry of the form a + b*sqrt2 (small denominators) to Q(sqrt2)."""
    for b in (Fraction(0), *(Fraction(k, 2) for k in (-2, -1, 1, 2))):
        a = Fraction(x - float(b) * math.sqrt(2)).limit_denominator(8)
        if abs(float(QSqrt2(a, b)) - x) < 1e-15:
            return QSqrt2(a, b)
    raise ValueError(f"{x!r} is not a small element of Q(sqrt2)")


def _exact_matrix(m):
    out = np.empty(m.shape, dtype=object)
    for idx in np.ndindex(m.shape):
        out[idx] = _exact(float(m[idx]))
    return out


def _clifford_exact(gammas, eta, factor):
    g = [_exact_matrix(G) for G in gammas]
    n = g[0].shape[0]
    for i in range(len(g)):
        for j in range(len(g)):
            anti = g[i].dot(g[j]) + g[j].dot(g[i])
            target = np.eye(n) * factor * eta[i, j]
            if not all(anti[idx] == _exact(target[idx]) for idx in np.ndindex(anti.shape)):
                return False
    return True


def _random_sl2(rng):
    m = rng.normal(size=(2, 2))
    if np.linalg.det(m) < 0:
        m[:, 0] *= -1
    return m / math.sqrt(np.linalg.det(m))


def _random_sp4(rng):
    return spinor_solvable(rng.uniform(-1, 1, 6)) @ _random_sp4_rotation(rng)


def _random_sp4_rotation(rng):
    # U(2) inside Sp(4,R): [[A, -B], [B, A]] with A + iB unitary
    z = rng.normal(size=(2, 2)) + 1j * rng.normal(size=(2, 2))
    u, _ = np.linalg.qr(z)
    return np.block([[u.real, -u.imag], [u.imag, u.real]])


def test_criterion_7_spinor_maps():
    rng = np.random.default_rng(SEED)
    with criterion(7, 5.0):
        assert _clifford_exact(GAMMA_SL2, ETA3, 1)
        assert _clifford_exact(GAMMA_SP4, ETA5, 2)
        for _ in range(200):
            a, b = _random_sl2(rng), _random_sl2(rng)
            Oa, Ob = spinor_to_vector_sl2(a), spinor_to_vector_sl2(b)
            res = np.abs(spinor_to_vector_sl2(a @ b) - Oa @ Ob).max()
            assert _scaled(res, np.abs(Oa).max() * np.abs(Ob).max()) <= 1e-12
            A, B = _random_sp4(rng), _random_sp4(rng)
            OA, OB = spinor_to_vector_sp4(A), spinor_to_vector_sp4(B)
            res = np.abs(spinor_to_vector_sp4(A @ B) - OA @ OB).max()
            assert _scaled(res, np.abs(OA).max() * np.abs(OB).max()) <= 1e-12
        for _ in range(200):
            w = rng.uniform(-1.5, 1.5, 6)
            direct = to_siegel(w)
            via = fl_action(spinor_solvable(w), SIEGEL_ORIGIN)
            assert _scaled(np.abs(via.Z - direct.Z).max(), np.abs(direct.Z).max()) <= 1e-12


# --- 8 ---------------------------------------------------------------------------------

QUATERNIONIC_DIM_REQUIRED = 20


def test_criterion_8_cmap():
    rng = np.random.default_rng(SEED)
    t0 = time.perf_counter()
    attainable_ok = False
    try:
        for _ in range(20):
            p = cm.QMPoint.random(rng).sk
            N = cm.period_matrix(p)
            assert _scaled(np.abs(cm.period_matrix_definition(p) - N).max(), np.abs(N).max()) <= 1e-10
            M, L = cm.m4_inverse(p), cm.lambda_matrix(p)
            assert _scaled(np.abs(L.T @ L - M).max(), np.abs(M).max()) <= 1e-12
        o = cm.origin_values()
        assert np.abs(o["N"] - 1j * np.eye(3)).max() < 1e-14
        assert np.abs(o["M4inv"] - np.eye(6)).max() < 1e-14
        for _ in range(20):
            assert cm.maurer_cartan_residual(cm.QMPoint.random(rng)) <= 1e-5
        for _ in range(100):
            assert np.linalg.eigvalsh(cm.qm_metric(cm.QMPoint.random(rng))).min() > 0
        assert time.perf_counter() - t0 < 60.0
        attainable_ok = True
    finally:
        # the metric is positive definite but 12x12, so the sub-check on its size fails
        full = attainable_ok and cm.DIM == QUATERNIONIC_DIM_REQUIRED
        line = (f"criterion 8: {'pass' if full else 'FAIL'} ({time.perf_counter() - t0:.2f}s; "
                f"other sub-checks {'pass' if attainable_ok else 'FAIL'}, metric is {cm.DIM}x{cm.DIM} "
                f"not {QUATERNIONIC_DIM_REQUIRED}x{QUATERNIONIC_DIM_REQUIRED})")
        RESULTS.append(line)
        print(line)


@pytest.mark.xfail(strict=True, reason="the quaternionic metric of this space is 12x12, not 20x20")
def test_criterion_8_metric_is_20x20():
    g = cm.qm_metric(cm.ORIGIN_QM)
    assert g.shape == (QUATERNIONIC_DIM_REQUIRED, QUATERNIONIC_DIM_REQUIRED)


# --- 9 ---------------------------------------------------------------------------------

ALL_PARAMS = [SignatureParams(r, s, odd=odd) for r in range(1, 5) for s in range(0, 4) for odd in (False, True)
              if not (s == 0 and not odd)]


def test_criterion_9_round_trips():
    rng = np.random.default_rng(SEED)
    with criterion(9, 10.0):
        for p in ALL_PARAMS:
            for _ in range(5):
                y = SolvablePoint.random(p, rng, 0.5)
                L = sigma_matrix(y)
                back = sigma_inverse(L, p)
                assert np.abs(back.as_vector() - y.as_vector()).max() <= 1e-12 * max(1, np.abs(y.as_vector()).max())
                assert np.abs(cholesky_upper(L @ L.T) - L).max() <= 1e-12 * max(1, np.abs(L).max())
        for _ in range(50):
            y = SolvablePoint.random(R2S1, rng)
            L = sigma_matrix(y)
            assert np.abs(fiber_normal_decompose(y).reconstruct() - L).max() <= 1e-12 * max(1, np.abs(L).max())
        for p in ALL_PARAMS:
            b = build_basis(p)
            assert len(b.solvable) == p.r * (p.r + p.q) == p.dim_solv
            assert p.odd or p.q == 2 * p.s
            assert all(eta_antisymmetric(g.exact, b.eta_t_exact) for g in b.solvable)
