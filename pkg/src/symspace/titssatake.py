"""Tits-Satake projection, disk and Siegel realizations, leaves, fiber subgroup, spinor maps."""
from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from .errors import NotSymplectic, NotUnimodular, SingularDenominator
from .liealg import SQRT2, SignatureParams, build_basis
from .numerics import cholesky_upper, expm
from .solvgroup import SolvablePoint, inverse_L, m_matrix, sigma_inverse, sigma_matrix


# --- projection -------------------------------------------------------------

def ts_project(y: SolvablePoint) -> SolvablePoint:
    """Keep Cartan, long and the first paint component of every short block."""
    short = np.zeros_like(y.short)
    if y.short.shape[1]:
        short[:, 0] = y.short[:, 0]
    return SolvablePoint(y.params, y.cartan, y.long, short)


def ts_reduce(y: SolvablePoint) -> SolvablePoint:
    """The projected point written in the coordinates of the split subspace SO(r, r+1)."""
    tp = y.params.ts()
    short = y.short[:, :1] if tp.q else np.zeros((tp.r, 0))
    return SolvablePoint(tp, y.cartan, y.long, short)


def ts_embed(y: SolvablePoint, p: SignatureParams) -> SolvablePoint:
    """Inverse of :func:`ts_reduce` into the full space ``p``."""
    short = np.zeros((p.r, p.q))
    if p.q and y.short.shape[1]:
        short[:, 0] = y.short[:, 0]
    return SolvablePoint(p, y.cartan, y.long, short)


def is_ts_point(y: SolvablePoint, tol: float = 0.0) -> bool:
    return bool(np.all(np.abs(y.short[:, 1:]) <= tol))


# --- complex realizations ---------------------------------------------------

@dataclass(frozen=True)
class DiskPoint:
    re: float
    im: float

    @property
    def value(self) -> complex:
        return complex(self.re, self.im)

    def modulus(self) -> float:
        return math.hypot(self.re, self.im)


def to_upper_plane(u1: float, u21: float) -> tuple:
    """(x, y) of z = ½e^{Υ₁}Υ₂₁ + i e^{Υ₁}."""
    return 0.5 * math.exp(u1) * u21, math.exp(u1)


def to_disk(u1: float, u21: float) -> DiskPoint:
    x, y = to_upper_plane(u1, u21)
    den = x * x + (y + 1) ** 2
    return DiskPoint((x * x + y * y - 1) / den, -2 * x / den)


def disk_closed_form(u1: float, u21: float) -> DiskPoint:
    """Rational expression of the Cayley image in terms of Υ₁, Υ₂₁."""
    e1, e2 = math.exp(u1), math.exp(2 * u1)
    den = e2 * (u21 * u21 + 4) + 8 * e1 + 4
    return DiskPoint((e2 * (u21 * u21 + 4) - 4) / den, -4 * e1 * u21 / den)


def disk_geodesic(a: DiskPoint, b: DiskPoint, n: int = 33) -> np.ndarray:
    """Points of the Poincaré-disk geodesic from a to b, as (re, im) rows."""
    za, zb = a.value, b.value
    # move a to the origin, follow the ray, move back
    phi = lambda z: (z - za) / (1 - np.conj(za) * z)
    inv = lambda z: (z + za) / (1 + np.conj(za) * z)
    wb = phi(zb)
    out = inv(np.linspace(0.0, 1.0, n) * wb)
    return np.column_stack([out.real, out.imag])


@dataclass(frozen=True)
class SiegelPoint:
    X: np.ndarray
    Y: np.ndarray

    @property
    def Z(self) -> np.ndarray:
        return self.X + 1j * self.Y

    @classmethod
    def from_complex(cls, Z: np.ndarray) -> "SiegelPoint":
        Z = np.asarray(Z, dtype=complex)
        return cls(Z.real.copy(), Z.imag.copy())

    def is_valid(self, tol: float = 1e-10) -> bool:
        sym = np.allclose(self.X, self.X.T, atol=tol) and np.allclose(self.Y, self.Y.T, atol=tol)
        return bool(sym and np.linalg.eigvalsh(0.5 * (self.Y + self.Y.T)).min() > tol)


def _ts_r2_coords(w) -> tuple:
    if isinstance(w, SolvablePoint):
        if w.params.r != 2:
            raise ValueError("Siegel realization needs r = 2")
        sh = w.short[:, 0] if w.short.shape[1] else np.zeros(2)
        return (*w.cartan, *w.long, sh[0], sh[1])
    return tuple(float(x) for x in w)


def to_siegel(w) -> SiegelPoint:
    """Z = X + iY of a rank-two Tits-Satake point (w₁..w₆)."""
    w1, w2, w3, w4, w5, w6 = _ts_r2_coords(w)
    x11 = (w6 * (4 * w5 + SQRT2 * w3 * w6) - 4 * SQRT2 * w4) / 8
    x12 = (2 * w5 + SQRT2 * w3 * w6) / 4
    X = np.array([[x11, x12], [x12, w3 / SQRT2]])
    y11 = math.exp(-w1 - w2) * (math.exp(2 * w2) * w6 * w6 + 4) / 4
    y12 = 0.5 * math.exp(w2 - w1) * w6
    Y = np.array([[y11, y12], [y12, math.exp(w2 - w1)]])
    return SiegelPoint(X, Y)


def spinor_solvable(w) -> np.ndarray:
    """4×4 symplectic preimage of the rank-two Tits-Satake solvable element."""
    w1, w2, w3, w4, w5, w6 = _ts_r2_coords(w)
    e = math.exp
    return np.array([
        [e(-(w1 + w2) / 2), 0.5 * e((w2 - w1) / 2) * w6,
         0.25 * e((w1 + w2) / 2) * (w5 * w6 - 2 * SQRT2 * w4),
         0.25 * e((w1 - w2) / 2) * (2 * w5 + SQRT2 * w3 * w6)],
        [0.0, e((w2 - w1) / 2), 0.5 * e((w1 + w2) / 2) * w5, e((w1 - w2) / 2) * w3 / SQRT2],
        [0.0, 0.0, e((w1 + w2) / 2), 0.0],
        [0.0, 0.0, -0.5 * e((w1 + w2) / 2) * w6, e((w1 - w2) / 2)],
    ])


def symplectic_solvable(a) -> np.ndarray:
    """Six-parameter upper block-triangular element of Sp(4,R) (a₁, a₂ > 0)."""
    a1, a2, a3, a4, a5, a6 = (float(x) for x in a)
    r, q, t = math.sqrt(a1 * a2), math.sqrt(a2 / a1), math.sqrt(a1 / a2)
    return np.array([
        [1 / r, a6 / r, -SQRT2 * a4 / r - a5 * a6 / r, a5 / r],
        [0.0, q, q * a5 - SQRT2 * q * a3 * a6, SQRT2 * q * a3],
        [0.0, 0.0, r, 0.0],
        [0.0, 0.0, -t * a6, t],
    ])


def fl_action(g: np.ndarray, Z) -> SiegelPoint:
    """(AZ + B)(CZ + D)⁻¹ for a 4×4 matrix split into 2×2 blocks."""
    g = np.asarray(g, dtype=float)
    Zc = Z.Z if isinstance(Z, SiegelPoint) else np.asarray(Z, dtype=complex)
    A, B, C, D = g[:2, :2], g[:2, 2:], g[2:, :2], g[2:, 2:]
    den = C @ Zc + D
    if abs(np.linalg.det(den)) < 1e-14:
        raise SingularDenominator("CZ + D is not invertible")
    out = (A @ Zc + B) @ np.linalg.inv(den)
    out = 0.5 * (out + out.T)
    return SiegelPoint.from_complex(out)


SIEGEL_ORIGIN = SiegelPoint(np.zeros((2, 2)), np.eye(2))


# --- spinor maps --------------------------------------------------------------

GAMMA_SL2 = (
    np.array([[0.0, 0.0], [1.0, 0.0]]),
    np.diag([-1.0, 1.0]) / SQRT2,
    np.array([[0.0, 1.0], [0.0, 0.0]]),
)
ETA3 = np.fliplr(np.eye(3))
ETA5 = np.fliplr(np.eye(5))
C_S = np.block([[np.zeros((2, 2)), np.eye(2)], [-np.eye(2), np.zeros((2, 2))]])


def _gamma_sp4() -> tuple:
    G = [np.zeros((4, 4)) for _ in range(5)]
    G[0][0, 3], G[0][1, 2] = SQRT2, -SQRT2
    G[1][0, 1], G[1][3, 2] = SQRT2, SQRT2
    G[2] = np.diag([1.0, -1.0, 1.0, -1.0])
    G[3][1, 0], G[3][2, 3] = SQRT2, SQRT2
    G[4][2, 1], G[4][3, 0] = -SQRT2, SQRT2
    return tuple(G)


GAMMA_SP4 = _gamma_sp4()


def spinor_to_vector_sl2(m, tol: float = 1e-12) -> np.ndarray:
    """SL(2,R) → SO(1,2): O_i^j = Tr(m⁻¹γ_i m γ_k) η^{kj}."""
    m = np.asarray(m, dtype=float)
    if abs(np.linalg.det(m) - 1.0) > tol * max(1.0, np.max(np.abs(m)) ** 2):
        raise NotUnimodular("det(m) != 1")
    mi = np.array([[m[1, 1], -m[0, 1]], [-m[1, 0], m[0, 0]]])
    g = GAMMA_SL2
    T = np.array([[np.trace(mi @ g[i] @ m @ g[k]) for k in range(3)] for i in range(3)])
    return T @ ETA3


def _check_symplectic(S, tol):
    S = np.asarray(S, dtype=float)
    scale = max(1.0, np.max(np.abs(S))) ** 2
    if np.max(np.abs(S.T @ C_S @ S - C_S)) > tol * scale:
        raise NotSymplectic("Sᵀ C S != C")
    return S, -C_S @ S.T @ C_S  # inverse of a symplectic matrix


def spinor_adjoint_sp4(S, tol: float = 1e-12) -> np.ndarray:
    """O^i_j = ¼ Tr(Γ_iᵀ S⁻¹ Γ_j S), i.e. S⁻¹Γ_jS = O^i_j Γ_i.

    Reproduces the triangular solvable images, but reverses products:
    O[AB] = O[B]O[A].
    """
    S, Si = _check_symplectic(S, tol)
    G = GAMMA_SP4
    return np.array([[0.25 * np.trace(G[i].T @ Si @ G[j] @ S) for j in range(5)] for i in range(5)])


def spinor_to_vector_sp4(S, tol: float = 1e-12) -> np.ndarray:
    """Sp(4,R) → SO(2,3) homomorphism: SΓ_jS⁻¹ = O^i_j Γ_i.

    Equals spinor_adjoint_sp4(S)⁻¹, so spinor_solvable(w)⁻¹ maps to L(W).
    """
    S, Si = _check_symplectic(S, tol)
    G = GAMMA_SP4
    return np.array([[0.25 * np.trace(G[i].T @ S @ G[j] @ Si) for j in range(5)] for i in range(5)])


def borel_sl2(u1: float, u21: float) -> np.ndarray:
    """Upper-triangular SL(2) element whose vector image is the rank-one TS representative."""
    a = math.exp(u1 / 2)
    return np.array([[a, 0.5 * a * u21], [0.0, 1 / a]])


# --- Grassmannian leaves ------------------------------------------------------

@lru_cache(maxsize=None)
def fiber_generators(p: SignatureParams) -> tuple:
    """Compact generators Ω − Ωᵀ for short roots with paint index ≥ 2, lexicographic."""
    b = build_basis(p)
    out = []
    for g in b.short:
        i, I = g.indices
        if I >= 2:
            m = g.matrix
            out.append(m - m.T)
    return tuple(out)


@dataclass(frozen=True)
class LeafElement:
    base: SolvablePoint
    angles: tuple
    point: SolvablePoint
    M: np.ndarray


def leaf_rotation(p: SignatureParams, angles) -> np.ndarray:
    gens = fiber_generators(p)
    angles = np.atleast_1d(np.asarray(angles, dtype=float))
    if angles.size != len(gens):
        raise ValueError(f"expected {len(gens)} angles, got {angles.size}")
    O = np.eye(p.N)
    for phi, F in zip(angles, gens):
        O = O @ expm(phi * F)
    return O


def leaf(pts: SolvablePoint, angles) -> LeafElement:
    """Rotate a Tits-Satake point by the compact fiber group and read back its coordinates."""
    p = pts.params
    O = leaf_rotation(p, angles)
    M = O @ m_matrix(pts).M @ O.T
    M = 0.5 * (M + M.T)
    y = sigma_inverse(cholesky_upper(M), p)
    return LeafElement(pts, tuple(np.atleast_1d(angles).tolist()), y, M)


def leaf_r1s1_coords(w1: float, w2: float, phi: float) -> tuple:
    """Closed-form solvable coordinates (Υ₁, Υ₂₁, Υ₂₂) along the r=1, s=1 leaf."""
    c, s = math.cos(phi), math.sin(phi)
    den = math.exp(2 * w1) * (w2 * w2 + 4) * (c - 1) - 4 * (c + 1)
    u1 = 0.5 * math.log(1.0 / den ** 2) + w1 + math.log(8.0)
    u22 = -0.25 * (math.exp(w1) * w2 * w2 + 8 * math.sinh(w1)) * s
    return u1, w2, u22


def leaf_r1s1_xyz(w1: float, w2: float, phi: float) -> tuple:
    """(x, y, Υ₂₂) of a leaf point: upper-plane projection plus the fiber coordinate."""
    rho = math.exp(w1)
    sig = rho * w2 / 2
    k = rho * rho + sig * sig
    D = -(k - 1) * math.cos(phi) + k + 1
    return 2 * sig / D, 2 * rho / D, -(k - 1) * math.sin(phi) / rho


def leaf_norm_r1s1(w1: float, w2: float) -> float:
    """Squared norm shared by every point of the r=1, s=1 leaf through (w₁, w₂)."""
    arg = (16 * math.exp(-2 * w1) + 8 * w2 * w2 + math.exp(2 * w1) * (w2 * w2 + 4) ** 2) / 32
    return math.acosh(arg) ** 2


# --- fiber normal subgroup (r=2, s=1) ----------------------------------------

R2S1 = SignatureParams(2, 1)


def fiber_L(rho: float, p: float, q: float) -> np.ndarray:
    """Three-parameter element of the normal fiber subgroup."""
    m = np.eye(6)
    m[0, 3], m[0, 4], m[0, 5] = 2 * p, rho - 4 * p * q, -2 * p * p
    m[1, 3], m[1, 4], m[1, 5] = 2 * q, -2 * q * q, -rho
    m[3, 4], m[3, 5] = -2 * q, -2 * p
    return m


def fiber_compose(a: tuple, b: tuple) -> tuple:
    r1, p1, q1 = a
    r2, p2, q2 = b
    return (4 * p2 * q1 + r1 + r2, p1 + p2, q1 + q2)


def central_N(rho: float) -> np.ndarray:
    return fiber_L(rho, 0.0, 0.0)


def fiber_conjugate_params(w: SolvablePoint, rho: float, p: float, q: float) -> tuple:
    """(λ, h, k) with L·𝔏(ρ,p,q)·L⁻¹ = 𝔏(λ,h,k)."""
    w1, w2 = w.cartan
    w3 = w.long[0]
    w52, w62 = w.short[0, 1], w.short[1, 1]
    lam = math.exp(w1 + w2) * (SQRT2 * p * w62 - SQRT2 * q * w52 + SQRT2 * q * q * w3 + rho)
    h = 0.5 * math.exp(w1) * (2 * p + SQRT2 * q * w3)
    k = q * math.exp(w2)
    return lam, h, k


@dataclass(frozen=True)
class FiberDecomposition:
    ts: SolvablePoint  # Tits-Satake point with w₄ = 0, in the r=2, s=1 space
    rho: float
    p: float
    q: float

    def reconstruct(self) -> np.ndarray:
        return sigma_matrix(self.ts) @ central_N(self.rho) @ fiber_L(0.0, self.p, self.q)


def fiber_normal_decompose(y: SolvablePoint) -> FiberDecomposition:
    """Split L(Υ) = L_TS(w₄=0)·𝔑(ρ)·𝔏(0,p,q)."""
    if y.params != R2S1:
        raise ValueError("fiber decomposition is defined for r=2, s=1")
    L = sigma_matrix(y)
    q = L[1, 3] / (2 * L[1, 1])
    p = (L[0, 3] - 2 * q * L[0, 1]) / (2 * L[0, 0])
    R = L @ inverse_L(fiber_L(0.0, p, q), R2S1)
    yr = sigma_inverse(R, R2S1)
    ts = SolvablePoint(R2S1, yr.cartan, [yr.long[0], 0.0], [[yr.short[0, 0], 0.0], [yr.short[1, 0], 0.0]])
    Nm = inverse_L(sigma_matrix(ts), R2S1) @ R
    return FiberDecomposition(ts, float(Nm[0, 4]), float(p), float(q))
