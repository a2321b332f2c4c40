"""The so(r, r+q) algebra in the triangular basis: generators, structure constants, roots.

Matrix entries of the generators live in Q(√2) and are stored exactly as
:class:`QSqrt2` numbers inside numpy object arrays; float copies are cached
for the numerical modules.
"""
from __future__ import annotations

import itertools
import json
import math
from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache
from typing import Optional

import numpy as np

from .errors import NotClosed

SQRT2 = math.sqrt(2.0)


class QSqrt2:
    """Exact number a + b√2 with rational a, b."""

    __slots__ = ("a", "b")

    def __init__(self, a=0, b=0):
        self.a = Fraction(a)
        self.b = Fraction(b)

    @staticmethod
    def _lift(x):
        if isinstance(x, QSqrt2):
            return x
        if isinstance(x, (int, Fraction)):
            return QSqrt2(x, 0)
        return NotImplemented

    def __add__(self, o):
        o = self._lift(o)
        if o is NotImplemented:
            return o
        return QSqrt2(self.a + o.a, self.b + o.b)

    __radd__ = __add__

    def __neg__(self):
        return QSqrt2(-self.a, -self.b)

    def __sub__(self, o):
        o = self._lift(o)
        if o is NotImplemented:
            return o
        return QSqrt2(self.a - o.a, self.b - o.b)

    def __rsub__(self, o):
        return (-self) + o

    def __mul__(self, o):
        o = self._lift(o)
        if o is NotImplemented:
            return o
        return QSqrt2(self.a * o.a + 2 * self.b * o.b, self.a * o.b + self.b * o.a)

    __rmul__ = __mul__

    def conj(self):
        return QSqrt2(self.a, -self.b)

    def __truediv__(self, o):
        o = self._lift(o)
        if o is NotImplemented:
            return o
        den = o.a * o.a - 2 * o.b * o.b
        if den == 0:
            raise ZeroDivisionError("division by zero in Q(sqrt2)")
        num = self * o.conj()
        return QSqrt2(num.a / den, num.b / den)

    def __eq__(self, o):
        o = self._lift(o)
        if o is NotImplemented:
            return False
        return self.a == o.a and self.b == o.b

    def __hash__(self):
        return hash((self.a, self.b))

    def __bool__(self):
        return bool(self.a) or bool(self.b)

    def __float__(self):
        return float(self.a) + float(self.b) * SQRT2

    def __repr__(self):
        if not self.b:
            return str(self.a)
        if not self.a:
            return f"{self.b}*sqrt2"
        return f"({self.a}+{self.b}*sqrt2)"

    def pair(self) -> list:
        return [str(self.a), str(self.b)]


ZERO = QSqrt2(0)
ONE = QSqrt2(1)
INV_SQRT2 = QSqrt2(0, Fraction(1, 2))


def exact_zeros(n: int, m: Optional[int] = None) -> np.ndarray:
    m = n if m is None else m
    out = np.empty((n, m), dtype=object)
    for idx in np.ndindex(out.shape):
        out[idx] = ZERO
    return out


def exact_eye(n: int) -> np.ndarray:
    out = exact_zeros(n)
    for i in range(n):
        out[i, i] = ONE
    return out


def to_float(m: np.ndarray) -> np.ndarray:
    return np.vectorize(float, otypes=[float])(m) if m.size else np.zeros(m.shape)


def exact_is_zero(m: np.ndarray) -> bool:
    return not any(bool(x) for x in m.flat)


@dataclass(frozen=True)
class SignatureParams:
    """Signature data of SO(r, r+q) with q = 2s (+1 when ``odd``)."""

    r: int
    s: int
    odd: bool = False

    def __post_init__(self):
        if self.r < 1:
            raise ValueError("r must be >= 1")
        if self.s < 0:
            raise ValueError("s must be >= 0")

    @property
    def q(self) -> int:
        return 2 * self.s + (1 if self.odd else 0)

    @property
    def N(self) -> int:
        return 2 * self.r + self.q

    @property
    def dim_solv(self) -> int:
        return self.r * (self.r + self.q)

    def bar(self, i: int) -> int:
        """Index paired with ``i`` by the invariant form (paint indices pair with themselves)."""
        if self.r <= i < self.r + self.q:
            return i
        return self.N - 1 - i

    def paint(self, I: int) -> int:
        """Matrix index of paint component ``I`` (0-based)."""
        return self.r + I

    def ts(self) -> "SignatureParams":
        """Signature of the maximally split (Tits-Satake) subspace."""
        return SignatureParams(self.r, 0, odd=self.q > 0)

    def to_json(self) -> dict:
        d = {"r": self.r, "s": self.s}
        if self.odd:
            d["odd"] = True
        return d


def build_eta_t_exact(p: SignatureParams) -> np.ndarray:
    eta = exact_zeros(p.N)
    for i in range(p.N):
        eta[i, p.bar(i)] = ONE
    return eta


def build_eta_t(p: SignatureParams) -> np.ndarray:
    """Invariant form with anti-diagonal outer blocks and an identity paint block."""
    return to_float(build_eta_t_exact(p))


def build_eta_b(p: SignatureParams) -> np.ndarray:
    return np.diag([1.0] * (p.r + p.q) + [-1.0] * p.r)


def build_omega_exact(p: SignatureParams) -> np.ndarray:
    """Change of basis with Ω η_t Ωᵀ = η_b: paint rows, then sums, then differences."""
    N, r, q = p.N, p.r, p.q
    om = exact_zeros(N)
    for I in range(q):
        om[I, r + I] = ONE
    for i in range(r):
        om[q + i, i] = INV_SQRT2
        om[q + i, N - 1 - i] = INV_SQRT2
        om[q + r + i, i] = INV_SQRT2
        om[q + r + i, N - 1 - i] = -INV_SQRT2
    return om


def build_omega(p: SignatureParams) -> np.ndarray:
    return to_float(build_omega_exact(p))


@dataclass(frozen=True)
class RootVector:
    components: tuple
    kind: str  # "Long" or "Short"
    paint_index: Optional[int] = None  # 1-based, short roots only

    def __post_init__(self):
        if self.kind not in ("Long", "Short"):
            raise ValueError("kind must be Long or Short")

    def label(self) -> str:
        parts = []
        for i, c in enumerate(self.components):
            if c:
                parts.append(("+" if c > 0 else "-") + f"e{i + 1}")
        s = "".join(parts).lstrip("+") or "0"
        if self.paint_index is not None:
            s += f"^{self.paint_index}"
        return s


def ts_project_root(v: RootVector, p: Optional[SignatureParams] = None) -> RootVector:
    """Forget the paint index; the restricted root is unchanged."""
    return RootVector(tuple(v.components), v.kind, None)


@dataclass
class Generator:
    kind: str  # cartan | long | short | paint
    indices: tuple
    exact: np.ndarray
    root: Optional[RootVector] = None
    primary: Optional[tuple] = None  # matrix slot that identifies the generator

    @property
    def matrix(self) -> np.ndarray:
        return to_float(self.exact)


def _elem(N, a, b, val=ONE):
    m = exact_zeros(N)
    m[a, b] = val
    return m


def _root_generator(p: SignatureParams, a: int, b: int) -> np.ndarray:
    """(E_ab − E_b̄ā)/√2, the η_t-antisymmetric step operator."""
    N = p.N
    m = exact_zeros(N)
    m[a, b] = m[a, b] + INV_SQRT2
    m[p.bar(b), p.bar(a)] = m[p.bar(b), p.bar(a)] - INV_SQRT2
    return m


def long_root_labels(r: int) -> list:
    """Positive long roots: differences then sums, each in lexicographic order."""
    out = [("-", i, j) for i, j in itertools.combinations(range(r), 2)]
    out += [("+", i, j) for i, j in itertools.combinations(range(r), 2)]
    return out


@dataclass
class LieBasis:
    params: SignatureParams
    cartan: list
    long: list
    short: list
    paint: list
    eta_t: np.ndarray
    eta_b: np.ndarray
    omega: np.ndarray
    eta_t_exact: np.ndarray = field(repr=False, default=None)

    @property
    def solvable(self) -> list:
        return self.cartan + self.long + self.short

    def solvable_float(self) -> np.ndarray:
        return np.array([g.matrix for g in self.solvable])

    def to_json(self) -> str:
        rows = []
        for g in self.solvable + self.paint:
            rows.append({
                "kind": g.kind,
                "indices": list(g.indices),
                "matrix": [[x.pair() for x in row] for row in g.exact],
            })
        return json.dumps({"params": self.params.to_json(), "generators": rows})


@lru_cache(maxsize=None)
def build_basis(p: SignatureParams) -> LieBasis:
    r, q, N = p.r, p.q, p.N
    cartan = []
    for i in range(r):
        m = exact_zeros(N)
        m[i, i] = ONE
        m[N - 1 - i, N - 1 - i] = -ONE
        cartan.append(Generator("cartan", (i + 1,), m, None, (i, i)))
    longs = []
    for sign, i, j in long_root_labels(r):
        b = j if sign == "-" else N - 1 - j
        comp = [0] * r
        comp[i] = 1
        comp[j] = -1 if sign == "-" else 1
        root = RootVector(tuple(comp), "Long")
        longs.append(Generator("long", (sign, i + 1, j + 1), _root_generator(p, i, b), root, (i, b)))
    shorts = []
    for i in range(r):
        for I in range(q):
            comp = tuple(1 if k == i else 0 for k in range(r))
            root = RootVector(comp, "Short", I + 1)
            shorts.append(Generator("short", (i + 1, I + 1), _root_generator(p, i, p.paint(I)), root, (i, p.paint(I))))
    paint = []
    for I, J in itertools.combinations(range(q), 2):
        m = exact_zeros(N)
        m[p.paint(I), p.paint(J)] = ONE
        m[p.paint(J), p.paint(I)] = -ONE
        paint.append(Generator("paint", (I + 1, J + 1), m, None, (p.paint(I), p.paint(J))))
    eta_exact = build_eta_t_exact(p)
    return LieBasis(p, cartan, longs, shorts, paint, build_eta_t(p), build_eta_b(p), build_omega(p), eta_exact)


def commutator(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    return a.dot(b) - b.dot(a)


def _sparse_rows(m: np.ndarray) -> dict:
    rows = {}
    for (i, j), v in np.ndenumerate(m):
        if v:
            rows.setdefault(i, []).append((j, v))
    return rows


def eta_antisymmetric(x: np.ndarray, eta: np.ndarray) -> bool:
    """Exact test of x^T eta + eta x = 0, done sparsely since generators have few entries."""
    res = {}
    eta_rows = _sparse_rows(eta)
    for (j, i), v in np.ndenumerate(x):
        if not v:
            continue
        for k, e in eta_rows.get(j, ()):
            res[i, k] = res.get((i, k), ZERO) + v * e
    x_rows = _sparse_rows(x)
    for (i, j), e in np.ndenumerate(eta):
        if not e:
            continue
        for k, v in x_rows.get(j, ()):
            res[i, k] = res.get((i, k), ZERO) + e * v
    return not any(bool(v) for v in res.values())


def decompose(x: np.ndarray, gens: list) -> list:
    """Exact coefficients of ``x`` over generators identified by their primary slots."""
    coeffs = []
    acc = exact_zeros(*x.shape)
    for g in gens:
        c = x[g.primary] / g.exact[g.primary]
        coeffs.append(c)
        if c:
            acc = acc + g.exact * c
    if not exact_is_zero(acc - x):
        raise NotClosed("element leaves the span of the given generators")
    return coeffs


@lru_cache(maxsize=None)
def _structure_constants_cached(p: SignatureParams):
    b = build_basis(p)
    gens = b.solvable
    n = len(gens)
    f = np.empty((n, n, n), dtype=object)
    for idx in np.ndindex(f.shape):
        f[idx] = ZERO
    for B in range(n):
        for C in range(B + 1, n):
            cs = decompose(commutator(gens[B].exact, gens[C].exact), gens)
            for A, c in enumerate(cs):
                f[A, B, C] = c
                f[A, C, B] = -c
    return f


def structure_constants(b: LieBasis) -> np.ndarray:
    """Tensor f[A, B, C] with [T_B, T_C] = f^A_BC T_A, exact entries."""
    return _structure_constants_cached(b.params).copy()


def jacobi_residual(f: np.ndarray) -> bool:
    """True when the Jacobi identity holds exactly for the tensor ``f``."""
    n = f.shape[0]
    for A, B, C, D in itertools.product(range(n), repeat=4):
        if not (B < C < D):
            continue
        tot = ZERO
        for E in range(n):
            tot = tot + f[E, B, C] * f[A, E, D] + f[E, C, D] * f[A, E, B] + f[E, D, B] * f[A, E, C]
        if tot:
            return False
    return True


def positive_roots(p: SignatureParams) -> list:
    b = build_basis(p)
    return [g.root for g in b.long + b.short]


def ts_root_count(p: SignatureParams) -> dict:
    """Distinct restricted roots after projection with their multiplicities."""
    counts: dict = {}
    for v in positive_roots(p):
        key = ts_project_root(v, p)
        counts[key] = counts.get(key, 0) + 1
    return counts
