"""c-map of SL(2,R)/SO(2) x SO(1,2)/SO(2) into SO(3,4)/SO(3)xSO(4).

Coordinates of the quaternionic point are ordered (U, a, P, Q, x, y, Z1..Z6) with
S = P + iQ and z = x + iy.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import DegenerateSection, SingularF
from .liealg import SignatureParams, build_basis, structure_constants, to_float

SQRT2 = math.sqrt(2.0)
ALPHA = -1.0 / 64.0
# coupling of Z^T C dZ inside da in the metric itself
METRIC_ALPHA = 2.0
DIM = 12

C_SYMP = np.block([[np.zeros((3, 3)), np.eye(3)], [-np.eye(3), np.zeros((3, 3))]])
_REV3 = np.eye(3)[::-1]


@dataclass(frozen=True)
class SK2Point:
    S: complex
    z: complex

    def __post_init__(self):
        if not (self.S.imag > 0 and self.z.imag > 0):
            raise ValueError("SK2Point needs Im S > 0 and Im z > 0")

    @classmethod
    def from_real(cls, P, Q, x, y) -> "SK2Point":
        return cls(complex(P, Q), complex(x, y))

    @property
    def P(self) -> float:
        return self.S.real

    @property
    def Q(self) -> float:
        return self.S.imag

    @property
    def x(self) -> float:
        return self.z.real

    @property
    def y(self) -> float:
        return self.z.imag

    def real(self) -> tuple:
        return self.P, self.Q, self.x, self.y


ORIGIN_SK = SK2Point(1j, 1j)


@dataclass(frozen=True)
class QMPoint:
    U: float
    a: float
    sk: SK2Point
    Z: tuple

    def as_vector(self) -> np.ndarray:
        return np.array([self.U, self.a, *self.sk.real(), *self.Z], dtype=float)

    @classmethod
    def from_vector(cls, v) -> "QMPoint":
        v = [float(t) for t in v]
        return cls(v[0], v[1], SK2Point.from_real(*v[2:6]), tuple(v[6:12]))

    @classmethod
    def random(cls, rng: np.random.Generator, scale: float = 0.5) -> "QMPoint":
        P, x = rng.normal(scale=scale, size=2)
        Q, y = np.exp(rng.normal(scale=scale, size=2))
        return cls(float(rng.normal(scale=scale)), float(rng.normal(scale=scale)),
                   SK2Point.from_real(P, Q, x, y), tuple(rng.normal(scale=scale, size=6)))


ORIGIN_QM = QMPoint(0.0, 0.0, ORIGIN_SK, (0.0,) * 6)


# --- special geometry --------------------------------------------------------------

def holomorphic_section(p: SK2Point) -> np.ndarray:
    """(X^1, X^2, X^3, F_1, F_2, F_3)."""
    S, z = p.S, p.z
    return np.array([z * z / (2 * SQRT2), z / 2, -1 / (2 * SQRT2),
                     -S / (2 * SQRT2), S * z / 2, S * z * z / (2 * SQRT2)])


def _section_derivatives(p: SK2Point) -> list:
    """Holomorphic derivatives of the section along S and z."""
    S, z = p.S, p.z
    dS = np.array([0, 0, 0, -1 / (2 * SQRT2), z / 2, z * z / (2 * SQRT2)], dtype=complex)
    dz = np.array([z / SQRT2, 0.5, 0, 0, S / 2, S * z / SQRT2], dtype=complex)
    return [dS, dz]


def symplectic_pairing(p: SK2Point) -> float:
    """i(X̄·F − F̄·X); real, equal to −Q y² for this section."""
    w = holomorphic_section(p)
    X, F = w[:3], w[3:]
    k = 1j * (np.conj(X) @ F - np.conj(F) @ X)
    return float(k.real)


def kahler_potential(p: SK2Point) -> float:
    """𝒦 = −log|i⟨Ω|Ω̄⟩| = −log(Q y²)."""
    k = symplectic_pairing(p)
    if abs(k) < 1e-300:
        raise DegenerateSection("symplectic pairing vanishes")
    return -math.log(abs(k))


def kahler_metric(p: SK2Point, h: float = 1e-4) -> np.ndarray:
    """diag(g_SS̄, g_zz̄) from ¼ times the flat Laplacian of 𝒦 in each plane."""
    P, Q, x, y = p.real()

    def K(P, Q, x, y):
        return kahler_potential(SK2Point.from_real(P, Q, x, y))

    k0 = K(P, Q, x, y)
    gS = (K(P + h, Q, x, y) + K(P - h, Q, x, y) + K(P, Q + h, x, y) + K(P, Q - h, x, y) - 4 * k0) / (4 * h * h)
    gz = (K(P, Q, x + h, y) + K(P, Q, x - h, y) + K(P, Q, x, y + h) + K(P, Q, x, y - h) - 4 * k0) / (4 * h * h)
    return np.diag([gS, gz])


def kahler_metric_closed(p: SK2Point) -> np.ndarray:
    return np.diag([1 / (4 * p.Q ** 2), 1 / (2 * p.y ** 2)])


def period_matrix_definition(p: SK2Point) -> np.ndarray:
    """𝒩 = h∘f⁻¹ from the covariant derivatives of the section.

    Written in the closed-form conventions: Λ order reversed and complex conjugated, which is
    what the negative sign of i⟨Ω|Ω̄⟩ amounts to.
    """
    w = holomorphic_section(p)
    X, F = w[:3], w[3:]
    k = 1j * (np.conj(X) @ F - np.conj(F) @ X)
    cols_f, cols_h = [], []
    for d in _section_derivatives(p):
        dK = -(1j * (np.conj(X) @ d[3:] - np.conj(F) @ d[:3])) / k
        cols_f.append(d[:3] + dK * X)
        cols_h.append(d[3:] + dK * F)
    f = np.column_stack(cols_f + [np.conj(X)])
    h = np.column_stack(cols_h + [np.conj(F)])
    if abs(np.linalg.det(f)) < 1e-14 * max(1.0, np.abs(f).max()) ** 3:
        raise SingularF("f matrix is singular")
    N = h @ np.linalg.inv(f)
    return _REV3 @ np.conj(N) @ _REV3


def period_matrix(p: SK2Point) -> np.ndarray:
    """Closed form of 𝒩."""
    P, Q, x, y = p.real()
    s = x * x + y * y
    y2 = y * y
    return np.array([
        [1j * Q * s * s / y2, 1j * SQRT2 * Q * x * s / y2, P - 1j * Q * x * x / y2],
        [1j * SQRT2 * Q * x * s / y2, P + 1j * Q * (2 * x * x / y2 + 1), -1j * SQRT2 * Q * x / y2],
        [P - 1j * Q * x * x / y2, -1j * SQRT2 * Q * x / y2, 1j * Q / y2],
    ])


def m4_block(N: np.ndarray) -> np.ndarray:
    """[[Im + Re Im⁻¹ Re, −Re Im⁻¹], [−Im⁻¹ Re, Im⁻¹]]."""
    Re, Im = N.real, N.imag
    Ii = np.linalg.inv(Im)
    return np.block([[Im + Re @ Ii @ Re, -Re @ Ii], [-Ii @ Re, Ii]])


def m4_inverse_definition(p: SK2Point) -> np.ndarray:
    """M₄⁻¹ from 𝒩: the inverse of the block matrix, i.e. ℂᵀ·block·ℂ."""
    B = m4_block(period_matrix(p))
    return C_SYMP.T @ B @ C_SYMP


def m4_inverse(p: SK2Point) -> np.ndarray:
    """Closed form of M₄⁻¹ (positive definite)."""
    P, Q, x, y = p.real()
    s = x * x + y * y
    q = Q * y * y
    PQ = P * P + Q * Q
    r = SQRT2
    return np.array([
        [1 / q, -r * x / q, -x * x / q, -P * x * x / q, -r * P * x / q, P / q],
        [-r * x / q, (2 * x * x / (y * y) + 1) / Q, r * x * s / q, r * P * x * s / q, P * (2 * x * x + y * y) / q, -r * P * x / q],
        [-x * x / q, r * x * s / q, s * s / q, P * s * s / q, r * P * x * s / q, -P * x * x / q],
        [-P * x * x / q, r * P * x * s / q, P * s * s / q, PQ * s * s / q, r * x * PQ * s / q, -x * x * PQ / q],
        [-r * P * x / q, P * (2 * x * x + y * y) / q, r * P * x * s / q, r * x * PQ * s / q, PQ * (2 * x * x + y * y) / q, -r * x * PQ / q],
        [P / q, -r * P * x / q, -P * x * x / q, -x * x * PQ / q, -r * x * PQ / q, PQ / q],
    ])


def lambda_matrix(p: SK2Point) -> np.ndarray:
    """Symplectic image Λ(𝔤⁻¹) of the element moving (z, S) to (i, i)."""
    P, Q, x, y = p.real()
    sq = math.sqrt(Q)
    r = SQRT2
    return np.array([
        [1 / (sq * y), -r * x / (sq * y), -x * x / (sq * y), -P * x * x / (sq * y), -r * P * x / (sq * y), P / (sq * y)],
        [0, 1 / sq, r * x / sq, r * P * x / sq, P / sq, 0],
        [0, 0, y / sq, P * y / sq, 0, 0],
        [0, 0, 0, sq * y, 0, 0],
        [0, 0, 0, r * sq * x, sq, 0],
        [0, 0, 0, -sq * x * x / y, -r * sq * x / y, sq / y],
    ])


def is_symplectic(m: np.ndarray, tol: float = 1e-12) -> bool:
    err = np.abs(m.T @ C_SYMP @ m - C_SYMP).max()
    return bool(err <= tol * max(1.0, np.abs(m).max() ** 2))


# --- quaternionic metric and vielbein ------------------------------------------------

def qm_metric(q: QMPoint) -> np.ndarray:
    """12×12 metric with the dZ term sign chosen so that it is positive definite.

    ds² = ¼(dU² + 4 g dz dz̄ + e^{−2U}(da + ZᵀℂdZ)² + 2 e^{−U} dZᵀ M₄⁻¹ dZ).
    """
    p = q.sk
    Z = np.asarray(q.Z, dtype=float)
    g = np.zeros((DIM, DIM))
    g[0, 0] = 0.25
    gS, gz = np.diag(kahler_metric_closed(p))
    g[2, 2] = g[3, 3] = gS
    g[4, 4] = g[5, 5] = gz
    phi = np.zeros(DIM)
    phi[1] = 1.0
    phi[6:] = Z @ C_SYMP
    g += 0.25 * math.exp(-2 * q.U) * np.outer(phi, phi)
    g[6:, 6:] += 0.5 * math.exp(-q.U) * m4_inverse(p)
    return g


def vielbein(q: QMPoint, alpha: float = ALPHA) -> np.ndarray:
    """E[I, μ]: row I is the one-form E^{I+1} in the coordinate basis.

    E⁶ = e^{−U}(da + α/2 ZᵀℂdZ), E^{6+i} = e^{−U/2}(Λ dZ)^i.
    """
    P, Q, x, y = q.sk.real()
    Z = np.asarray(q.Z, dtype=float)
    E = np.zeros((DIM, DIM))
    E[0, 0] = 1.0
    E[1, 2] = 1 / (2 * Q)
    E[2, 3] = 1 / (2 * Q)
    E[3, 4] = 1 / (2 * y)
    E[4, 5] = 1 / (2 * y)
    E[5, 1] = math.exp(-q.U)
    E[5, 6:] = math.exp(-q.U) * alpha / 2 * (Z @ C_SYMP)
    E[6:, 6:] = math.exp(-q.U / 2) * lambda_matrix(q.sk)
    return E


def fit_gram_form(alpha: float = METRIC_ALPHA) -> np.ndarray:
    """Diagonal constant form 𝔮 with Eᵀ𝔮E = qm_metric, least squares at the origin."""
    E = vielbein(ORIGIN_QM, alpha)
    g = qm_metric(ORIGIN_QM)
    A = np.stack([np.outer(E[I], E[I]).ravel() for I in range(DIM)], axis=1)
    sol, *_ = np.linalg.lstsq(A, g.ravel(), rcond=None)
    return sol


def gram_metric(q: QMPoint, form: np.ndarray | None = None, alpha: float = METRIC_ALPHA) -> np.ndarray:
    form = fit_gram_form(alpha) if form is None else form
    E = vielbein(q, alpha)
    return E.T @ np.diag(form) @ E


# dE^I + Σ c E^J ∧ E^K = 0, 1-based labels
def mc_equations(alpha: float = ALPHA) -> dict:
    r = 2 * SQRT2
    return {
        1: [], 2: [(-2, 2, 3)], 3: [], 4: [(-2, 4, 5)], 5: [],
        6: [(-alpha, 7, 10), (-alpha, 8, 11), (-alpha, 9, 12), (1, 1, 6)],
        7: [(0.5, 1, 7), (-2, 2, 12), (1, 3, 7), (r, 4, 8), (2, 5, 7)],
        8: [(0.5, 1, 8), (-2, 2, 11), (1, 3, 8), (-r, 4, 9)],
        9: [(0.5, 1, 9), (-2, 2, 10), (1, 3, 9), (-2, 5, 9)],
        10: [(0.5, 1, 10), (-1, 3, 10), (-2, 5, 10)],
        11: [(0.5, 1, 11), (-1, 3, 11), (-r, 4, 10)],
        12: [(0.5, 1, 12), (-1, 3, 12), (r, 4, 11), (2, 5, 12)],
    }


_S = 1 / SQRT2
SOLV_FRAME_EQUATIONS = {
    1: [], 2: [], 3: [],
    4: [(1, 1, 4), (-1, 2, 4)],
    5: [(1, 1, 5), (-1, 3, 5), (_S, 4, 6)],
    6: [(1, 2, 6), (-1, 3, 6)],
    7: [(1, 1, 7), (1, 2, 7), (-_S, 5, 9), (_S, 6, 8), (-_S, 10, 11)],
    8: [(1, 1, 8), (1, 3, 8), (_S, 4, 9), (-_S, 10, 12)],
    9: [(1, 2, 9), (1, 3, 9), (-_S, 11, 12)],
    10: [(1, 1, 10), (_S, 4, 11), (_S, 5, 12)],
    11: [(1, 2, 11), (_S, 6, 12)],
    12: [(1, 3, 12)],
}


def vielbein_dictionary() -> np.ndarray:
    """D with E = D 𝔢."""
    D = np.zeros((DIM, DIM))
    rows = {
        1: {1: 1, 2: 1}, 2: {4: 1}, 3: {1: 0.5, 2: -0.5}, 4: {12: 1}, 5: {3: 0.5}, 6: {7: 1},
        7: {8: -32 * SQRT2}, 8: {10: -8 * SQRT2}, 9: {5: -2 * SQRT2}, 10: {6: 1}, 11: {11: 4}, 12: {9: 16},
    }
    for I, row in rows.items():
        for A, c in row.items():
            D[I - 1, A - 1] = c
    return D


def two_form_tensor(eqs: dict) -> np.ndarray:
    """F[I] antisymmetric with dE^I = Σ_{J<K} F[I,J,K] E^J∧E^K."""
    F = np.zeros((DIM, DIM, DIM))
    for I, terms in eqs.items():
        for c, J, K in terms:
            F[I - 1, J - 1, K - 1] -= c
            F[I - 1, K - 1, J - 1] += c
    return F


def transform_two_forms(F: np.ndarray, D: np.ndarray) -> np.ndarray:
    """Two-form tensor of 𝔢 = D⁻¹E given that of E."""
    Di = np.linalg.inv(D)
    G = np.einsum("ij,jkl->ikl", Di, F)
    return np.einsum("ka,ikl,lb->iab", D, G, D)


def exterior_derivative(q: QMPoint, h: float = 1e-4, alpha: float = ALPHA) -> np.ndarray:
    """dE[I, μ, ν] = ∂_μE^I_ν − ∂_νE^I_μ by central differences."""
    x0 = q.as_vector()
    dE = np.zeros((DIM, DIM, DIM))
    for mu in range(DIM):
        e = np.zeros(DIM)
        e[mu] = h
        der = (vielbein(QMPoint.from_vector(x0 + e), alpha) - vielbein(QMPoint.from_vector(x0 - e), alpha)) / (2 * h)
        dE[:, mu, :] += der
        dE[:, :, mu] -= der
    return dE


def maurer_cartan_residuals(q: QMPoint, h: float = 1e-4, alpha: float = ALPHA) -> np.ndarray:
    """Max-abs residual of each of the 12 equations, coordinate components."""
    E = vielbein(q, alpha)
    dE = exterior_derivative(q, h, alpha)
    out = np.zeros(DIM)
    for I, terms in mc_equations(alpha).items():
        F = dE[I - 1].copy()
        for c, J, K in terms:
            F += c * (np.outer(E[J - 1], E[K - 1]) - np.outer(E[K - 1], E[J - 1]))
        out[I - 1] = np.abs(F).max()
    return out


def maurer_cartan_residual(q: QMPoint, h: float = 1e-4) -> float:
    return float(maurer_cartan_residuals(q, h).max())


def extracted_two_forms(q: QMPoint, h: float = 1e-4) -> np.ndarray:
    """Structure two-forms of the vielbein in the E basis, read off numerically."""
    E = vielbein(q)
    Ei = np.linalg.inv(E)
    dE = exterior_derivative(q, h)
    # dE^I_{μν} = Σ_{J,K} F^I_{JK} E^J_μ E^K_ν with F antisymmetric
    return np.einsum("imn,mj,nk->ijk", dE, Ei, Ei)


def dictionary_residual(alpha: float = ALPHA) -> float:
    """Mismatch between the E equations pushed through the dictionary and the 𝔢 equations."""
    F = transform_two_forms(two_form_tensor(mc_equations(alpha)), vielbein_dictionary())
    G = two_form_tensor(SOLV_FRAME_EQUATIONS)
    return float(np.abs(F - G).max())


def solv_structure_constants() -> np.ndarray:
    """f[C, A, B] with [T_A, T_B] = f^C_AB T_C read from the 𝔢 equations."""
    return -two_form_tensor(SOLV_FRAME_EQUATIONS)


def _weights(f: np.ndarray, rank: int) -> np.ndarray:
    n = f.shape[0]
    w = np.zeros((n, rank))
    for A in range(rank, n):
        for i in range(rank):
            w[A, i] = f[A, i, A]
    return w


def match_liealg(tol: float = 1e-12) -> dict:
    """Root-by-root isomorphism between the 𝔢 algebra and liealg's Solv(so(3,4)).

    Roots are matched by Cartan weight; root vectors are rescaled along brackets and every bracket
    is then compared. Returns the scalings and the worst bracket mismatch.
    """
    rank = 3
    f_sol = solv_structure_constants()
    b = build_basis(SignatureParams(3, 0, odd=True))
    raw = structure_constants(b)
    n = raw.shape[0]
    f_lie = np.array([[[float(to_float(np.array([[raw[C, A, B]]]))[0, 0]) for B in range(n)] for A in range(n)]
                      for C in range(n)])
    if n != DIM:
        raise AssertionError(f"liealg solvable dimension {n} != {DIM}")
    w_sol, w_lie = _weights(f_sol, rank), _weights(f_lie, rank)
    perm = {}
    for A in range(rank, DIM):
        hits = [B for B in range(rank, DIM) if np.allclose(w_lie[B], w_sol[A], atol=tol)]
        if len(hits) != 1:
            raise AssertionError(f"root {w_sol[A]} has {len(hits)} matches")
        perm[A] = hits[0]
    lam = {}
    height = lambda A: w_sol[A].sum()
    pairs = [(A, B, C) for A in range(rank, DIM) for B in range(rank, DIM) for C in range(rank, DIM)
             if A < B and abs(f_sol[C, A, B]) > tol]
    for A, B, C in sorted(pairs, key=lambda t: height(t[2])):
        for X in (A, B):
            lam.setdefault(X, 1.0)
        if C not in lam:
            lie = f_lie[perm[C], perm[A], perm[B]]
            if abs(lie) < tol:
                return {"scalings": lam, "residual": float("inf")}
            lam[C] = lam[A] * lam[B] * lie / f_sol[C, A, B]
    for A in range(rank, DIM):
        lam.setdefault(A, 1.0)
    worst = 0.0
    for A in range(rank, DIM):
        for B in range(rank, DIM):
            for C in range(rank, DIM):
                mapped = lam[A] * lam[B] / lam[C] * f_lie[perm[C], perm[A], perm[B]]
                worst = max(worst, abs(mapped - f_sol[C, A, B]))
    return {"scalings": {k + 1: v for k, v in lam.items()}, "permutation": {k + 1: v + 1 for k, v in perm.items()},
            "residual": worst}


def origin_values() -> dict:
    return {"N": period_matrix(ORIGIN_SK), "M4inv": m4_inverse(ORIGIN_SK)}
