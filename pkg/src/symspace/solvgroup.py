"""Solvable group coordinates, the Σ-map and its inverse, product law, M-matrix."""
from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache
from typing import Optional

import numpy as np

from .errors import NotInImage, NotTriangular
from .liealg import SQRT2, SignatureParams, build_basis, long_root_labels
from .numerics import (
    BasisTag,
    RealMatrix,
    cholesky_upper,
    expm_nilpotent,
    logm_spd,
    sym_eigen,
)


@dataclass(frozen=True)
class SolvablePoint:
    """Υ split by role: r Cartan, r²−r long-root, r×q short-root coordinates."""

    params: SignatureParams
    cartan: np.ndarray
    long: np.ndarray
    short: np.ndarray  # shape (r, q)

    def __post_init__(self):
        p = self.params
        c = np.array(self.cartan, dtype=float).reshape(p.r)
        lg = np.array(self.long, dtype=float).reshape(p.r * p.r - p.r)
        sh = np.array(self.short, dtype=float).reshape(p.r, p.q)
        for a in (c, lg, sh):
            if not np.all(np.isfinite(a)):
                raise ValueError("non-finite solvable coordinate")
            a.setflags(write=False)
        object.__setattr__(self, "cartan", c)
        object.__setattr__(self, "long", lg)
        object.__setattr__(self, "short", sh)

    @classmethod
    def zeros(cls, p: SignatureParams) -> "SolvablePoint":
        return cls(p, np.zeros(p.r), np.zeros(p.r * p.r - p.r), np.zeros((p.r, p.q)))

    @classmethod
    def from_vector(cls, p: SignatureParams, v) -> "SolvablePoint":
        v = np.asarray(v, dtype=float).ravel()
        if v.size != p.dim_solv:
            raise ValueError(f"expected {p.dim_solv} coordinates, got {v.size}")
        r, nl = p.r, p.r * p.r - p.r
        return cls(p, v[:r], v[r:r + nl], v[r + nl:])

    @classmethod
    def random(cls, p: SignatureParams, rng: np.random.Generator, scale: float = 1.0) -> "SolvablePoint":
        return cls.from_vector(p, scale * rng.uniform(-1.0, 1.0, p.dim_solv))

    def as_vector(self) -> np.ndarray:
        return np.concatenate([self.cartan, self.long, self.short.ravel()])

    def __len__(self):
        return self.params.dim_solv

    def to_json(self) -> dict:
        d = self.params.to_json()
        d.update(cartan=self.cartan.tolist(), long=self.long.tolist(), short=self.short.tolist())
        return d

    @classmethod
    def from_json(cls, d: dict) -> "SolvablePoint":
        p = SignatureParams(int(d["r"]), int(d["s"]), bool(d.get("odd", False)))
        short = d.get("short", [])
        short = np.zeros((p.r, p.q)) if (p.q == 0 and not np.size(short)) else np.asarray(short, dtype=float)
        return cls(p, d["cartan"], d.get("long", []), short)

    def allclose(self, other: "SolvablePoint", atol: float = 1e-12) -> bool:
        return self.params == other.params and np.allclose(self.as_vector(), other.as_vector(), rtol=0, atol=atol)


@dataclass(frozen=True)
class CosetRep:
    """Upper-triangular solvable group element in the η_t basis."""

    L: np.ndarray
    params: Optional[SignatureParams] = None

    def check(self, tol: float = 1e-12) -> bool:
        eta = build_basis(self.params).eta_t
        scale = max(1.0, np.max(np.abs(self.L))) ** 2
        ok = np.max(np.abs(self.L.T @ eta @ self.L - eta)) <= tol * scale
        ok &= np.allclose(np.tril(self.L, -1), 0.0)
        ok &= abs(np.prod(np.diag(self.L)) - 1.0) <= tol * scale
        return bool(ok)


@dataclass(frozen=True)
class MMatrix:
    M: np.ndarray
    basis_tag: BasisTag = BasisTag.EtaT

    def as_real(self) -> RealMatrix:
        return RealMatrix(self.M, self.basis_tag)


@lru_cache(maxsize=None)
def _float_generators(p: SignatureParams):
    b = build_basis(p)
    lg = np.array([g.matrix for g in b.long]).reshape(-1, p.N, p.N)
    sh = np.array([g.matrix for g in b.short]).reshape(-1, p.N, p.N)
    return lg, sh


def _combine(coeffs: np.ndarray, gens: np.ndarray, N: int) -> np.ndarray:
    if gens.shape[0] == 0:
        return np.zeros((N, N))
    return np.tensordot(coeffs, gens, axes=1)


def _ordered_exp(coeffs, gens: np.ndarray, N: int) -> np.ndarray:
    out = np.eye(N)
    for c, g in zip(coeffs, gens):
        if c:
            out = out @ expm_nilpotent(c * g)
    return out


def sigma_matrix(y: SolvablePoint) -> np.ndarray:
    """exp(Cartan) followed by ordered single exponentials of long then short generators."""
    p = y.params
    lg, sh = _float_generators(p)
    d = np.ones(p.N)
    d[:p.r] = np.exp(y.cartan)
    d[p.N - p.r:] = np.exp(-y.cartan[::-1])
    A = _ordered_exp(y.long, lg, p.N)
    B = _ordered_exp(y.short.ravel(), sh, p.N)
    return (d[:, None] * A) @ B


def sigma(y: SolvablePoint) -> CosetRep:
    return CosetRep(sigma_matrix(y), y.params)


def inverse_L(L: np.ndarray, p: SignatureParams) -> np.ndarray:
    """L⁻¹ = η Lᵀ η for any element of the η_t-orthogonal group."""
    eta = build_basis(p).eta_t
    return eta @ L.T @ eta


def sigma_inverse(L, p: Optional[SignatureParams] = None) -> SolvablePoint:
    """Peel Cartan, short and long factors off an upper-triangular group element."""
    if isinstance(L, CosetRep):
        p = L.params if p is None else p
        L = L.L
    L = np.asarray(L, dtype=float)
    if p is None:
        raise ValueError("signature parameters required")
    r, q, N = p.r, p.q, p.N
    scale = max(1.0, np.max(np.abs(L)))
    if np.max(np.abs(np.tril(L, -1))) > 1e-9 * scale:
        raise NotTriangular("matrix has entries below the diagonal")
    diag = np.diag(L)
    if np.any(diag <= 0):
        raise NotInImage("non-positive diagonal entry")
    cartan = np.log(diag[:r])
    X = L / diag[:, None]  # = A·B with A = exp(long), B = exp(short)
    short = np.zeros((r, q))
    if q:
        A11 = X[:r, :r]
        S_top = np.linalg.solve(A11, X[:r, r:r + q])
        short = SQRT2 * S_top
    lg, sh = _float_generators(p)
    B = _ordered_exp(short.ravel(), sh, N)
    A = X @ inverse_L(B, p)
    long = _peel_long(A, p, lg)
    return SolvablePoint(p, cartan, long, short)


@lru_cache(maxsize=None)
def _long_order(p: SignatureParams):
    """Long roots sorted by a positive grading, with their primary matrix slots."""
    grade = np.arange(p.r, 0, -1, dtype=float)
    items = []
    for k, (sign, i, j) in enumerate(long_root_labels(p.r)):
        b = j if sign == "-" else p.N - 1 - j
        h = grade[i] - grade[j] if sign == "-" else grade[i] + grade[j]
        items.append((h, k, (i, b)))
    items.sort()
    return tuple(items)


def _peel_long(A: np.ndarray, p: SignatureParams, lg: np.ndarray) -> np.ndarray:
    """Invert the ordered long-root product one grade at a time."""
    c = np.zeros(lg.shape[0])
    for _, k, slot in _long_order(p):
        lower = _ordered_exp(c, lg, p.N)
        c[k] = SQRT2 * (A[slot] - lower[slot])
    return c


def multiply(g: SolvablePoint, u: SolvablePoint) -> SolvablePoint:
    """Coordinates of the group product g·u."""
    return sigma_inverse(sigma_matrix(g) @ sigma_matrix(u), g.params)


def inverse(u: SolvablePoint) -> SolvablePoint:
    return sigma_inverse(inverse_L(sigma_matrix(u), u.params), u.params)


def product(u: SolvablePoint, v: SolvablePoint) -> SolvablePoint:
    """w with Σ(w) = Σ(u)⁻¹·Σ(v)."""
    if u.params != v.params:
        raise ValueError("points belong to different spaces")
    p = u.params
    return sigma_inverse(inverse_L(sigma_matrix(u), p) @ sigma_matrix(v), p)


def paint_rotate(y: SolvablePoint, R) -> SolvablePoint:
    """Action of a paint rotation R ∈ O(q): Σ ↦ KΣK⁻¹ with K = 1 ⊕ R ⊕ 1."""
    p = y.params
    R = np.asarray(R, dtype=float)
    if R.shape != (p.q, p.q) or not np.allclose(R @ R.T, np.eye(p.q), atol=1e-12):
        raise ValueError("R must be orthogonal of size q")
    K = np.eye(p.N)
    K[p.r:p.r + p.q, p.r:p.r + p.q] = R
    return sigma_inverse(K @ sigma_matrix(y) @ K.T, p)


def product_r1_closed(u: SolvablePoint, v: SolvablePoint) -> SolvablePoint:
    """Closed-form u⁻¹·v for rank one."""
    p = u.params
    w1 = v.cartan[0] - u.cartan[0]
    w2 = v.short[0] - math.exp(u.cartan[0] - v.cartan[0]) * u.short[0]
    return SolvablePoint(p, [w1], [], w2.reshape(1, -1))


def product_r2_closed(u: SolvablePoint, v: SolvablePoint) -> SolvablePoint:
    """Closed-form u⁻¹·v for rank two (long coordinates: ε1−ε2, ε1+ε2)."""
    p = u.params
    u1, u2 = u.cartan
    v1, v2 = v.cartan
    u3, u4 = u.long
    v3, v4 = v.long
    U5, U6 = u.short
    V5, V6 = v.short
    e = math.exp
    w1 = v1 - u1
    w2 = v2 - u2
    w3 = v3 - e(u1 - u2 - v1 + v2) * u3
    w4 = (v4
          + e(u2 - v1 - v2) * (e(u1) * U5 @ U6 - e(v1) * U6 @ V5) / SQRT2
          - 0.25 * e(2 * (u2 - v2)) * v3 * (U6 @ U6)
          + 0.25 * e(u1 + u2 - v1 - v2) * (u3 * (U6 @ U6) - 4 * u4))
    W5 = V5 + e(u2 - v2) * v3 * U6 / SQRT2 - 0.5 * e(u1 - v1) * (SQRT2 * u3 * U6 + 2 * U5)
    W6 = V6 - e(u2 - v2) * U6
    return SolvablePoint(p, [w1, w2], [w3, w4], np.array([W5, W6]))


def m_matrix(y: SolvablePoint, basis: str | BasisTag = BasisTag.EtaT) -> MMatrix:
    """M = L Lᵀ in the η_t basis, or Ω M Ωᵀ in the η_b basis."""
    tag = BasisTag(basis) if isinstance(basis, str) else basis
    L = sigma_matrix(y)
    M = L @ L.T
    if tag is BasisTag.EtaB:
        om = build_basis(y.params).omega
        M = om @ M @ om.T
    elif tag is not BasisTag.EtaT:
        raise ValueError("basis must be EtaT or EtaB")
    return MMatrix(0.5 * (M + M.T), tag)


def point_from_m(M: np.ndarray, p: SignatureParams) -> SolvablePoint:
    """Solvable coordinates of the point labelled by an η_t-basis M-matrix."""
    return sigma_inverse(cholesky_upper(M), p)


@dataclass(frozen=True)
class EulerParams:
    mu: np.ndarray
    O: np.ndarray
    degenerate: bool = False


def euler_params(y: SolvablePoint, tol: float = 1e-9) -> EulerParams:
    """M = O·exp(Σ μ_i H_i)·Oᵀ with O orthogonal and η_t-preserving, μ descending."""
    p = y.params
    r, N = p.r, p.N
    M = m_matrix(y).M
    eta = build_basis(p).eta_t
    e = sym_eigen(M, tol=1e-8)
    lam, vec = e.eigenvalues, e.eigenvectors
    top = np.argsort(lam)[::-1][:r]
    mu = np.log(lam[top])
    degenerate = bool(np.any(mu < tol) or (r > 1 and np.any(np.abs(np.diff(mu)) < tol)))
    O = np.zeros((N, N))
    for k, idx in enumerate(top):
        v = vec[:, idx]
        O[:, k] = v
        O[:, N - 1 - k] = eta @ v
    if p.q:
        rest = [i for i in np.argsort(lam)[::-1] if i not in set(top)]
        # the remaining unit-eigenvalue space sits between the two extremes
        mid = sorted(rest, key=lambda i: abs(math.log(lam[i])))[: p.q]
        O[:, r:r + p.q] = vec[:, mid]
    return EulerParams(mu, O, degenerate)


def euler_reconstruct(ep: EulerParams, p: SignatureParams) -> np.ndarray:
    d = np.ones(p.N)
    d[:p.r] = np.exp(ep.mu)
    d[p.N - p.r:] = np.exp(-ep.mu[::-1])
    return (ep.O * d) @ ep.O.T


def cartan_coords(y: SolvablePoint) -> np.ndarray:
    """ξ (r×(r+q)) with exp(2K_b[ξ]) = M in the η_b basis."""
    p = y.params
    Mb = m_matrix(y, BasisTag.EtaB).M
    logM = logm_spd(Mb, tol=1e-300)
    n = p.r + p.q
    return 0.5 * logM[n:, :n]


def k_matrix(xi: np.ndarray) -> np.ndarray:
    r, n = xi.shape
    K = np.zeros((r + n, r + n))
    K[n:, :n] = xi
    K[:n, n:] = xi.T
    return K


def exp_2k_blocks(xi: np.ndarray) -> np.ndarray:
    """Closed hyperbolic-block form of exp(2K[ξ]) in the η_b ordering."""
    r, n = xi.shape
    u, s, vt = np.linalg.svd(xi, full_matrices=True)
    # ξ = u diag(s) vt[:r]
    ch_r = u @ np.diag(np.cosh(2 * s)) @ u.T
    sv = np.zeros(n)
    sv[: s.size] = s
    ch_n = vt.T @ np.diag(np.cosh(2 * sv)) @ vt
    sh = u @ np.diag(np.sinh(2 * s)) @ vt[: s.size]
    out = np.zeros((r + n, r + n))
    out[:n, :n] = ch_n
    out[n:, n:] = ch_r
    out[n:, :n] = sh
    out[:n, n:] = sh.T
    return out
