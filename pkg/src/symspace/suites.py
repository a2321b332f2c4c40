"""Self-check suites shared by the CLI ``verify`` and ``cmap check`` commands."""
from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from . import arithmetic as ar
from . import cmap as cm
from . import harmonics as hm
from .geodesy import (
    distance,
    distance_trlog,
    geodesic,
    norm_squared,
    norm_squared_r1,
    norm_squared_r2,
)
from .liealg import SignatureParams, build_basis, eta_antisymmetric
from .numerics import cholesky_upper
from .solvgroup import SolvablePoint, m_matrix, product, sigma_inverse, sigma_matrix
from .titssatake import (
    C_S,
    SIEGEL_ORIGIN,
    fiber_normal_decompose,
    fl_action,
    leaf,
    leaf_norm_r1s1,
    spinor_solvable,
    spinor_to_vector_sl2,
    spinor_to_vector_sp4,
    to_siegel,
    ts_project,
)

SUITES = ("geometry", "arithmetic", "harmonics", "cmap")


@dataclass
class Check:
    name: str
    ok: bool
    value: object = None
    detail: dict = field(default_factory=dict)

    def line(self) -> str:
        return f"{self.name}: {'pass' if self.ok else 'FAIL'}"

    def to_json(self) -> dict:
        v = self.value
        if isinstance(v, (np.floating, np.integer)):
            v = v.item()
        return {"name": self.name, "ok": bool(self.ok), "value": v, **self.detail}


def _rel(a: float, b: float) -> float:
    return abs(a - b) / max(1.0, abs(b))


def _random_sl2(rng) -> np.ndarray:
    from scipy.linalg import expm
    a, b, c = rng.normal(size=3)
    return expm(np.array([[a, b], [c, -a]]))


def _random_sp4(rng) -> np.ndarray:
    from scipy.linalg import expm
    S = rng.normal(size=(4, 4)) * 0.5
    S = S + S.T
    return expm(-C_S @ S)


# --- geometry -----------------------------------------------------------------

def geometry_suite(rng: np.random.Generator, pairs: int = 30) -> list:
    out = []
    p1 = SignatureParams(1, 0, odd=True)
    d = distance(SolvablePoint(p1, [0.0], [], [[0.0]]), SolvablePoint(p1, [1.0], [], [[0.0]]))
    out.append(Check("distance((0),(1)) r=1 = 2", _rel(d, 2.0) < 1e-12, d))

    for r, s in [(1, 1), (1, 3), (2, 1), (2, 2)]:
        p = SignatureParams(r, s)
        worst_trlog = worst_closed = 0.0
        slack = math.inf
        for _ in range(pairs):
            u, v, w = (SolvablePoint.random(p, rng) for _ in range(3))
            duv = distance(u, v)
            worst_trlog = max(worst_trlog, _rel(distance_trlog(u, v), duv))
            x = product(u, v)
            closed = norm_squared_r1(x) if r == 1 else norm_squared_r2(x)
            worst_closed = max(worst_closed, _rel(closed, duv * duv))
            slack = min(slack, distance(u, w) + distance(w, v) - duv)
        out.append(Check(f"distance oracles agree ({r},{s})", max(worst_trlog, worst_closed) < 1e-9,
                         max(worst_trlog, worst_closed)))
        out.append(Check(f"triangle inequality ({r},{s})", slack >= -1e-9, slack))

    p = SignatureParams(2, 1)
    u, v = SolvablePoint.random(p, rng), SolvablePoint.random(p, rng)
    g = geodesic(u, v)
    end = np.abs(g.sampler(1.0).as_vector() - v.as_vector()).max()
    out.append(Check("geodesic endpoint (2,1)", end < 1e-8, end))
    mid = g.sampler(0.5)
    add = abs(distance(u, mid) + distance(mid, v) - distance(u, v))
    out.append(Check("geodesic midpoint additivity (2,1)", add < 1e-8, add))

    worst = 0.0
    for r, s in [(1, 1), (2, 1), (2, 2), (3, 1)]:
        p = SignatureParams(r, s)
        y = SolvablePoint.random(p, rng)
        worst = max(worst, np.abs(sigma_inverse(sigma_matrix(y), p).as_vector() - y.as_vector()).max())
        M = m_matrix(y).M
        worst = max(worst, np.abs(sigma_inverse(cholesky_upper(M), p).as_vector() - y.as_vector()).max())
    out.append(Check("sigma / cholesky round trip", worst < 1e-10, worst))

    bases = [build_basis(SignatureParams(r, s)) for r, s in [(1, 1), (2, 1), (3, 2)]]
    ok = all(eta_antisymmetric(g.exact, b.eta_t_exact) for b in bases for g in b.solvable)
    out.append(Check("solvable generators eta-antisymmetric", ok))

    y = SolvablePoint.random(SignatureParams(2, 1), rng)
    fd = fiber_normal_decompose(y)
    err = np.abs(fd.reconstruct() - sigma_matrix(y)).max()
    out.append(Check("fiber decomposition round trip", err < 1e-10, err))

    p = SignatureParams(1, 1)
    base = ts_project(SolvablePoint.random(p, rng))
    n0 = leaf_norm_r1s1(base.cartan[0], base.short[0, 0])
    spread = max(abs(norm_squared(leaf(base, [phi]).point) - n0) for phi in np.linspace(0, 2 * math.pi, 9))
    out.append(Check("leaf norm constant (1,1)", spread < 1e-8, spread))

    h1 = h2 = 0.0
    for _ in range(20):
        a, b = _random_sl2(rng), _random_sl2(rng)
        h1 = max(h1, np.abs(spinor_to_vector_sl2(a @ b) - spinor_to_vector_sl2(a) @ spinor_to_vector_sl2(b)).max())
        A, B = _random_sp4(rng), _random_sp4(rng)
        h2 = max(h2, np.abs(spinor_to_vector_sp4(A @ B) - spinor_to_vector_sp4(A) @ spinor_to_vector_sp4(B)).max())
    out.append(Check("spinor map SL(2) homomorphism", h1 < 1e-10, h1))
    out.append(Check("spinor map Sp(4) homomorphism", h2 < 1e-10, h2))
    w = rng.uniform(-1, 1, 6)
    two = np.abs(fl_action(spinor_solvable(w), SIEGEL_ORIGIN).Z - to_siegel(w).Z).max()
    out.append(Check("Siegel two-path agreement", two < 1e-12, two))
    return out


# --- arithmetic ---------------------------------------------------------------------

def arithmetic_suite(rng: np.random.Generator | None = None) -> list:
    out = [Check(f"Sp4 {r.name} [{r.mode}]", r.holds) for r in ar.sp4z_relations()]
    G = ar.p32()
    out.append(Check("|P32| = 32", len(G) == 32, len(G)))
    out.append(Check("P32 conjugacy classes = 14", len(ar.conjugacy_classes(G)) == 14))
    orbit = ar.orbit_of_translations(G)
    keys = {u.key() for u in orbit}
    out.append(Check("|orbit| = 16, inverse closed", len(orbit) == 16 and all(u.inv().key() in keys for u in orbit),
                     len(orbit)))
    for r, q in [(2, 1), (3, 1)]:
        rels = ar.sorqz_relations(r, q)
        out.append(Check(f"SO({r},{r + q},Z) relations ({len(rels)})", all(x.holds for x in rels)))
    for (r, q), n in {(1, 1): 2, (2, 1): 16, (3, 1): 192, (4, 1): 3072, (2, 2): 32, (2, 3): 64,
                      (2, 4): 128, (3, 2): 384, (3, 3): 768}.items():
        k = ar.weyl_group_order(r, q)
        out.append(Check(f"|W({r},{q})| = {n}", k == n, k))
    return out


# --- harmonics ------------------------------------------------------------------------

def harmonics_suite(rng: np.random.Generator, points: int = 2) -> list:
    out = []
    for lam, val in [((2,), 9), ((4,), 24), ((2, 2), 12)]:
        c = hm.casimir(4, hm.Partition(lam))
        out.append(Check(f"casimir(4,{hm.Partition(lam)}) = {val}", c == val, str(c)))
    out.append(Check("casimir(N,(2)) = 2(N-1)(N+2)/N for N=2..20",
                     all(hm.casimir(N, (2,)) == hm.casimir_sym2_formula(N) for N in range(2, 21))))
    fns = [("Laplacian M^12 = 9", hm.fundamental_harmonic(4, 1, 2), 9),
           ("Laplacian Young(1234) = 24", hm.harmonic_level2(4, (4,), (1, 2, 3, 4)), 24),
           ("Laplacian Young(12,34) = 12", hm.harmonic_level2(4, (2, 2), (1, 2, 3, 4)), 12)]
    for name, f, val in fns:
        worst = 0.0
        for _ in range(points):
            x = hm.random_point(4, rng)
            worst = max(worst, abs(hm.eigenvalue_ratio(4, f, x) - val) / val)
        out.append(Check(name, worst < 1e-3, worst))
    f31 = hm.harmonic_level2(4, (3, 1), (1, 2, 3, 4))
    worst = max(abs(f31(hm.random_point(4, rng))) for _ in range(10))
    out.append(Check("(3,1) symmetrizer vanishes", worst <= 1e-13, worst))
    return out


# --- c-map -------------------------------------------------------------------------------

def cmap_suite(rng: np.random.Generator, points: int = 5) -> list:
    out = []
    wN = wM = wL = wS = 0.0
    pd = True
    for _ in range(points * 4):
        q = cm.QMPoint.random(rng)
        p = q.sk
        N = cm.period_matrix(p)
        wN = max(wN, np.abs(cm.period_matrix_definition(p) - N).max() / np.abs(N).max())
        M = cm.m4_inverse(p)
        L = cm.lambda_matrix(p)
        wL = max(wL, np.abs(L.T @ L - M).max() / np.abs(M).max())
        wM = max(wM, np.abs(cm.m4_inverse_definition(p) - M).max() / np.abs(M).max())
        wS = max(wS, 0.0 if cm.is_symplectic(L) else 1.0)
        pd = pd and np.linalg.eigvalsh(cm.qm_metric(q)).min() > 0
    out.append(Check("period matrix definition = closed form", wN <= 1e-10, wN))
    out.append(Check("M4^-1 definition = closed form", wM <= 1e-12, wM))
    out.append(Check("M4^-1 = Lambda^T Lambda", wL <= 1e-12, wL))
    out.append(Check("Lambda symplectic", wS == 0.0))
    o = cm.origin_values()
    out.append(Check("origin N = i 1", np.abs(o["N"] - 1j * np.eye(3)).max() < 1e-14))
    out.append(Check("origin M4^-1 = 1", np.abs(o["M4inv"] - np.eye(6)).max() < 1e-14))
    mc = max(cm.maurer_cartan_residual(cm.QMPoint.random(rng)) for _ in range(points))
    out.append(Check("Maurer-Cartan residual <= 1e-5", mc <= 1e-5, mc))
    out.append(Check(f"{cm.DIM}x{cm.DIM} quaternionic metric positive definite", bool(pd)))
    dr = cm.dictionary_residual()
    out.append(Check("vielbein dictionary maps onto solvable frame", dr < 1e-12, dr))
    m = cm.match_liealg()
    out.append(Check("solvable frame isomorphic to Solv(so(3,4))", m["residual"] < 1e-12, m["residual"]))
    return out


def run_suite(name: str, seed: int = 0) -> list:
    from .errors import UnknownSuite
    rng = np.random.default_rng(seed)
    if name == "all":
        out = []
        for s in SUITES:
            out += run_suite(s, seed)
        return out
    if name == "geometry":
        return geometry_suite(rng)
    if name == "arithmetic":
        return arithmetic_suite(rng)
    if name == "harmonics":
        return harmonics_suite(rng)
    if name == "cmap":
        return cmap_suite(rng)
    raise UnknownSuite(f"unknown suite {name!r}; choose from {', '.join(SUITES + ('all',))}")
