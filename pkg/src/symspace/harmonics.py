"""Harmonics on SL(N,R)/SO(N): Borel coset representatives, Casimir spectrum, numeric Laplacian."""
from __future__ import annotations

import itertools
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from typing import Callable, Sequence

import numpy as np

from .errors import SingularMetric, TooManyRows
from .numerics import expm_nilpotent

OUTER_STEP = 5e-3
INNER_STEP = 1e-5


@dataclass(frozen=True)
class Partition:
    parts: tuple

    def __post_init__(self):
        parts = tuple(int(p) for p in self.parts)
        if any(p <= 0 for p in parts) or any(a < b for a, b in zip(parts, parts[1:])):
            raise ValueError(f"not a partition: {parts}")
        object.__setattr__(self, "parts", parts)

    @classmethod
    def parse(cls, text: str) -> "Partition":
        text = text.strip().strip("()")
        return cls(tuple(int(t) for t in text.split(",") if t.strip()) if text else ())

    @property
    def size(self) -> int:
        return sum(self.parts)

    def is_even(self) -> bool:
        return all(p % 2 == 0 for p in self.parts)

    def __str__(self) -> str:
        return "(" + ",".join(map(str, self.parts)) + ")"


def borel_dimension(N: int) -> int:
    return N * (N + 1) // 2 - 1


@lru_cache(maxsize=None)
def borel_basis(N: int) -> tuple:
    """Cartan generators E_ii − E_{i+1,i+1}, then E_{i,i+h} graded by height h."""
    out = []
    for i in range(N - 1):
        H = np.zeros((N, N))
        H[i, i], H[i + 1, i + 1] = 1.0, -1.0
        out.append(H)
    for h in range(1, N):
        for i in range(N - h):
            E = np.zeros((N, N))
            E[i, i + h] = 1.0
            out.append(E)
    for m in out:
        m.setflags(write=False)
    return tuple(out)


def borel_rep(N: int, ups: Sequence[float]) -> np.ndarray:
    """L(Υ) = Π exp(Υ_A T^A) in graded order; upper triangular, unit determinant."""
    ups = np.asarray(ups, dtype=float)
    if ups.shape != (borel_dimension(N),):
        raise ValueError(f"need {borel_dimension(N)} coordinates for N={N}")
    basis = borel_basis(N)
    h = sum(c * H for c, H in zip(ups[: N - 1], basis[: N - 1]))
    L = np.diag(np.exp(np.diag(h))) if N > 1 else np.eye(1)
    for c, E in zip(ups[N - 1:], basis[N - 1:]):
        L = L @ expm_nilpotent(c * E)
    return L


def m_matrix(N: int, ups) -> np.ndarray:
    L = borel_rep(N, ups)
    return L @ L.T


# --- Casimir --------------------------------------------------------------------

def highest_weight(N: int, lam: Partition) -> list:
    """Young weight λ projected to the traceless hyperplane, as Fractions."""
    if len(lam.parts) > N - 1:
        raise TooManyRows(f"partition {lam} has more than N-1 = {N - 1} rows")
    parts = list(lam.parts) + [0] * (N - len(lam.parts))
    shift = Fraction(lam.size, N)
    return [Fraction(p) - shift for p in parts]


def weyl_vector(N: int) -> list:
    return [Fraction(N + 1, 2) - i for i in range(1, N + 1)]


def casimir(N: int, lam) -> Fraction:
    """⟨Λ + 2ρ, Λ⟩ in the trace form of the fundamental representation."""
    if not isinstance(lam, Partition):
        lam = Partition(tuple(lam))
    L = highest_weight(N, lam)
    rho = weyl_vector(N)
    return sum((l + 2 * r) * l for l, r in zip(L, rho))


def casimir_sym2_formula(N: int) -> Fraction:
    if N < 2:
        raise ValueError("N >= 2")
    return Fraction(2 * (N - 1) * (N + 2), N)


def dynkin_labels(lam: Partition, N: int) -> list:
    parts = list(lam.parts) + [0] * (N - len(lam.parts))
    return [parts[i] - parts[i + 1] for i in range(N - 1)]


def enumerate_even_partitions(total: int) -> list:
    """Partitions of ``total`` into even parts, in reverse lexicographic order."""
    if total < 0 or total % 2:
        return []

    def rec(rest, cap):
        if rest == 0:
            yield ()
            return
        for p in range(min(rest, cap), 0, -1):
            if p % 2 == 0:
                for tail in rec(rest - p, p):
                    yield (p,) + tail

    return [Partition(t) for t in rec(total, total)]


# --- level-2 harmonics ------------------------------------------------------------

def young_symmetrize(T: Callable, rows: Sequence[Sequence[int]], idx: Sequence[int]) -> float:
    """Young operator (column antisymmetrizer after row symmetrizer) applied to T at idx.

    ``rows`` lists tensor positions, e.g. ((0, 1, 2), (3,)) for the (3,1) tableau.
    """
    n = len(idx)
    cols = [[row[c] for row in rows if c < len(row)] for c in range(len(rows[0]))]

    def perms_of(groups):
        per_group = [list(itertools.permutations(g)) for g in groups]
        for choice in itertools.product(*per_group):
            sigma = list(range(n))
            for g, img in zip(groups, choice):
                for a, b in zip(g, img):
                    sigma[a] = b
            yield sigma

    def sign(sigma):
        s, seen = 1, [False] * n
        for i in range(n):
            if seen[i]:
                continue
            j, length = i, 0
            while not seen[j]:
                seen[j] = True
                j = sigma[j]
                length += 1
            if length % 2 == 0:
                s = -s
        return s

    total = 0.0
    for q in perms_of(cols):
        sq = sign(q)
        for p in perms_of(rows):
            # (q∘p) acting on index positions
            total += sq * T([idx[q[p[k]]] for k in range(n)])
    return total


def harmonic_level2(N: int, lam, indices: Sequence[int]) -> Callable:
    """Level-2 harmonic component as a function of Υ; indices are 1-based (A, B, C, D)."""
    if not isinstance(lam, Partition):
        lam = Partition(tuple(lam))
    A, B, C, D = (i - 1 for i in indices)
    if min(A, B, C, D) < 0 or max(A, B, C, D) >= N:
        raise ValueError("index out of range")
    if lam.parts == (4,):
        def f(ups):
            m = m_matrix(N, ups)
            return m[A, B] * m[C, D] + m[A, C] * m[B, D] + m[B, C] * m[A, D]
    elif lam.parts == (2, 2):
        def f(ups):
            m = m_matrix(N, ups)
            return 2 * m[A, B] * m[C, D] - m[C, B] * m[A, D] - m[A, C] * m[B, D]
    elif lam.parts == (3, 1):
        def f(ups):
            m = m_matrix(N, ups)
            return young_symmetrize(lambda ix: m[ix[0], ix[1]] * m[ix[2], ix[3]], ((0, 1, 2), (3,)), (A, B, C, D))
    else:
        raise ValueError(f"no level-2 harmonic for {lam}")
    return f


def fundamental_harmonic(N: int, A: int, B: int) -> Callable:
    return lambda ups: m_matrix(N, ups)[A - 1, B - 1]


# --- Laplace-Beltrami ------------------------------------------------------------------

def vielbein(N: int, ups, h: float = INNER_STEP) -> list:
    """Symmetric parts V_μ of L⁻¹∂_μL by central differences."""
    ups = np.asarray(ups, dtype=float)
    L = borel_rep(N, ups)
    Li = np.linalg.inv(L)
    out = []
    for k in range(ups.size):
        e = np.zeros_like(ups)
        e[k] = h
        th = Li @ (borel_rep(N, ups + e) - borel_rep(N, ups - e)) / (2 * h)
        out.append(0.5 * (th + th.T))
    return out


def metric(N: int, ups) -> np.ndarray:
    V = vielbein(N, ups)
    return np.array([[np.sum(a * b) for b in V] for a in V])


def _flux(N: int, f: Callable, x: np.ndarray) -> tuple:
    g = metric(N, x)
    det = np.linalg.det(g)
    if not det > 0:
        raise SingularMetric(f"metric determinant {det:.3e}")
    grad = np.empty(x.size)
    for k in range(x.size):
        e = np.zeros_like(x)
        e[k] = INNER_STEP
        grad[k] = (f(x + e) - f(x - e)) / (2 * INNER_STEP)
    sg = np.sqrt(det)
    return sg * np.linalg.solve(g, grad), sg


def laplace_beltrami(N: int, f: Callable, ups, h: float = OUTER_STEP) -> float:
    """(1/√g) ∂_μ(√g g^{μν} ∂_ν f) at Υ, outer divergence Richardson-extrapolated."""
    x = np.asarray(ups, dtype=float)
    _, sg = _flux(N, f, x)

    def div(step):
        tot = 0.0
        for k in range(x.size):
            e = np.zeros_like(x)
            e[k] = step
            tot += (_flux(N, f, x + e)[0][k] - _flux(N, f, x - e)[0][k]) / (2 * step)
        return tot

    d1, d2 = div(h), div(h / 2)
    return float((4 * d2 - d1) / 3 / sg)


def eigenvalue_ratio(N: int, f: Callable, ups) -> float:
    return laplace_beltrami(N, f, ups) / f(np.asarray(ups, dtype=float))


def random_point(N: int, rng: np.random.Generator, scale: float = 0.5) -> np.ndarray:
    return rng.normal(scale=scale, size=borel_dimension(N))
