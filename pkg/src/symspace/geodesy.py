"""Geodesic distance, closed-form norms, Noether charges and geodesic curves."""
from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .errors import EigenvalueBelowOne, NegativeDiscriminant
from .liealg import SQRT2, SignatureParams, build_basis
from .numerics import arccosh_stable, cholesky_upper, expm, logm_spd, sym_eigen
from .solvgroup import (
    BasisTag,
    SolvablePoint,
    inverse_L,
    m_matrix,
    product,
    sigma_inverse,
    sigma_matrix,
)

# d² = TRLOG_CONSTANT · Tr log² M(w); fixed on the Cartan ray by fit_trlog_constant()
TRLOG_CONSTANT = 0.5
GEODESIC_SAMPLES = 33


def _mb_block(w: SolvablePoint) -> np.ndarray:
    p = w.params
    Mb = m_matrix(w, BasisTag.EtaB).M
    n = p.r + p.q
    blk = Mb[n:, n:]
    return 0.5 * (blk + blk.T)


def norm_eigenvalues(w: SolvablePoint) -> np.ndarray:
    """Eigenvalues (≥ 1) of the lower-right r×r block of M in the η_b basis, ascending."""
    if not w.as_vector().any():
        # basis-change roundoff would otherwise leave a sqrt(ulp) floor on d
        return np.ones(w.params.r)
    lam =sym_eigen(_mb_block(w), tol=1e-6).eigenvalues
    if np.any(lam < 1.0 - 1e-9):
        raise EigenvalueBelowOne(f"eigenvalue {lam.min():.12g} below one")
    return lam


def norm_squared(w: SolvablePoint) -> float:
    """Squared distance from the origin: Σ arccosh²(λ_i)."""
    lam = norm_eigenvalues(w)
    return float(np.sum(arccosh_stable(lam) ** 2))


def distance_report(u: SolvablePoint, v: SolvablePoint) -> dict:
    w = product(u, v)
    lam = norm_eigenvalues(w)
    arcs = arccosh_stable(lam)
    d2 = float(np.sum(arcs ** 2))
    return {"d": math.sqrt(d2), "d2": d2, "eigenvalues": lam.tolist(), "arccosh": arcs.tolist()}


def distance(u: SolvablePoint, v: SolvablePoint) -> float:
    if u.params != v.params:
        raise ValueError("points belong to different spaces")
    return math.sqrt(norm_squared(product(u, v)))


def trlog2(w: SolvablePoint) -> float:
    """Tr log² M(w); proportional to the squared distance."""
    Q = logm_spd(m_matrix(w).M, tol=1e-300)
    return float(np.sum(Q * Q.T))


def distance_trlog(u: SolvablePoint, v: SolvablePoint, c: float = TRLOG_CONSTANT) -> float:
    return math.sqrt(c * trlog2(product(u, v)))


def fit_trlog_constant(lam: float = 1.0) -> float:
    """Ratio of the canonical d² to Tr log² on the Cartan ray of rank one."""
    p = SignatureParams(1, 0, odd=True)
    w = SolvablePoint(p, [lam], [], [[0.0]])
    return norm_squared(w) / trlog2(w)


def norm_squared_r1(w: SolvablePoint) -> float:
    """Rank-one closed form; depends only on w₁ and the paint norm of w₂."""
    if w.params.r != 1:
        raise ValueError("rank-one formula needs r = 1")
    a, d = r1_split(w)
    return float(arccosh_stable(a + d) ** 2)


def r1_split(w: SolvablePoint) -> tuple:
    """(𝒜_TS, Δ): the Tits-Satake part and the subpaint correction of the rank-one argument."""
    w1 = w.cartan[0]
    row = w.short[0]
    w2 = row[0] if row.size else 0.0
    R2 = float(row[1:] @ row[1:]) if row.size > 1 else 0.0
    e2 = math.exp(2 * w1)
    a_ts = (16 * math.exp(-2 * w1) + 8 * w2 * w2 + e2 * (w2 * w2 + 4) ** 2) / 32
    delta = R2 * (e2 * (R2 + 8) + 2 * e2 * w2 * w2 + 8) / 32
    return a_ts, delta


def r2_invariants(w: SolvablePoint) -> tuple:
    """The seven paint invariants (w1, w2, w3, w4, 𝕌², 𝕍², 𝕌·𝕍)."""
    if w.params.r != 2:
        raise ValueError("rank-two invariants need r = 2")
    U, V = w.short
    return (*w.cartan, *w.long, float(U @ U), float(V @ V), float(U @ V))


def r2_AB(w: SolvablePoint) -> tuple:
    w1, w2, w3, w4, UU, VV, UV = r2_invariants(w)
    e = math.exp
    ch, sh = math.cosh(w2), math.sinh(w2)
    t1 = UU + 2 * w3 * w4 + 4
    t2 = 4 * UV + SQRT2 * ((VV + 4) * w3 - 4 * w4)
    t3 = UU + e(-2 * w2) * w3 * w3 + e(2 * w2) * w4 * w4
    t4 = VV * e(w2) + 8 * sh
    t5 = VV * sh + (VV + 8) * ch
    A = (32 * VV + 4 * e(2 * w1) * t1 ** 2 + 32 * t3 + e(2 * w1) * t2 ** 2
         + 2 * t4 ** 2 + 2 * t5 ** 2 + 64 * e(-2 * w1)) / 128
    first = (e(2 * (w1 + w2)) * t1 * t2
             + 4 * (4 * UV * e(2 * w2) + SQRT2 * (VV + 4) * e(4 * w2) * w4 - 4 * SQRT2 * w3))
    second = (32 * VV - 4 * e(2 * w1) * t1 ** 2 - 32 * t3 + e(2 * w1) * t2 ** 2
              + 2 * t4 ** 2 + 2 * t5 ** 2 - 64 * e(-2 * w1))
    B = (16 * e(-4 * w2) * first ** 2 + second ** 2) / 16384
    return A, B


def norm_squared_r2(w: SolvablePoint) -> float:
    """Rank-two closed form from the trace and discriminant of the 2×2 block."""
    A, B = r2_AB(w)
    if B < -1e-9 * max(1.0, A * A):
        raise NegativeDiscriminant(f"discriminant {B:.3e}")
    sB = math.sqrt(max(B, 0.0))
    return float(arccosh_stable((A - sB) / 2) ** 2 + arccosh_stable((A + sB) / 2) ** 2)


def dist_r1_paint_form(U: SolvablePoint, V: SolvablePoint) -> float:
    """Rank-one distance written through the rescaled paint vectors 𝕏, 𝕐."""
    lam, mu = U.cartan[0], V.cartan[0]
    X = math.exp((lam - mu) / 2) * U.short[0]
    Y = math.exp((mu - lam) / 2) * V.short[0]
    d2 = float((X - Y) @ (X - Y))
    A = math.cosh(2 * (lam - mu)) + 0.5 * math.cosh(lam - mu) * d2 + d2 * d2 / 32
    return float(arccosh_stable(A))


@dataclass
class NoetherCharge:
    Q: np.ndarray
    origin_point: SolvablePoint
    Q0: np.ndarray = field(repr=False, default=None)

    def norm_squared(self) -> float:
        """½ Tr Q₀², the squared geodesic length."""
        return float(0.5 * np.trace(self.Q0 @ self.Q0))


def noether_charge(u: SolvablePoint, v: SolvablePoint) -> NoetherCharge:
    """Q with Qᵀ = log(M(u)⁻¹M(v)); Q₀ is the same charge moved to the origin."""
    p = u.params
    w = product(u, v)
    Q0 = logm_spd(m_matrix(w).M, tol=1e-300)
    Lu = sigma_matrix(u)
    Q = Lu @ Q0 @ inverse_L(Lu, p)
    return NoetherCharge(Q, u, Q0)


@dataclass
class GeodesicCurve:
    u: SolvablePoint
    v: SolvablePoint
    charge: NoetherCharge

    def matrix_at(self, t: float) -> np.ndarray:
        Lu = sigma_matrix(self.u)
        return Lu @ expm(t * self.charge.Q0) @ Lu.T

    def sampler(self, t: float) -> SolvablePoint:
        if t == 0.0:
            return self.u
        M = self.matrix_at(t)
        return sigma_inverse(cholesky_upper(0.5 * (M + M.T)), self.u.params)

    def samples(self, n: int = GEODESIC_SAMPLES) -> list:
        return [self.sampler(float(t)) for t in np.linspace(0.0, 1.0, n)]

    def length(self) -> float:
        return math.sqrt(max(self.charge.norm_squared(), 0.0))


def geodesic(u: SolvablePoint, v: SolvablePoint) -> GeodesicCurve:
    if u.params != v.params:
        raise ValueError("points belong to different spaces")
    return GeodesicCurve(u, v, noether_charge(u, v))


def is_eta_antisymmetric(Q: np.ndarray, p: SignatureParams, tol: float = 1e-10) -> bool:
    eta = build_basis(p).eta_t
    return bool(np.max(np.abs(Q.T @ eta + eta @ Q)) <= tol * max(1.0, np.max(np.abs(Q))))
