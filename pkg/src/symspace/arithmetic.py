"""Exact integer matrix groups: Sp(4,Z) generators, SO(r,r+q,Z) generators, closure, classes."""
from __future__ import annotations

import itertools
import math
from collections import deque
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Optional

import numpy as np
import scipy.linalg

from .errors import Exceeded, NonIntegerEntry, SingularDenominator
from .titssatake import SiegelPoint
from .titssatake import fl_action as _fl_real

C_S = ((0, 0, 1, 0), (0, 0, 0, 1), (-1, 0, 0, 0), (0, -1, 0, 0))


@dataclass(frozen=True)
class IntMatrix:
    """Exact integer matrix tagged with the group it belongs to.

    ``group`` is ``("Sp4",)`` or ``("SOrq", r, q)``.
    """

    rows: tuple
    group: tuple = ("Sp4",)

    @classmethod
    def of(cls, rows, group=("Sp4",)) -> "IntMatrix":
        return cls(tuple(tuple(int(x) for x in row) for row in rows), tuple(group))

    @property
    def n(self) -> int:
        return len(self.rows)

    def __matmul__(self, other: "IntMatrix") -> "IntMatrix":
        cols = list(zip(*other.rows))
        out = tuple(tuple(sum(a * b for a, b in zip(row, col)) for col in cols) for row in self.rows)
        return IntMatrix(out, self.group)

    def T(self) -> "IntMatrix":
        return IntMatrix(tuple(zip(*self.rows)), self.group)

    def __neg__(self) -> "IntMatrix":
        return IntMatrix(tuple(tuple(-x for x in row) for row in self.rows), self.group)

    def identity(self) -> "IntMatrix":
        return identity(self.n, self.group)

    def is_identity(self) -> bool:
        return self == self.identity()

    def form(self) -> "IntMatrix":
        return invariant_form(self.n, self.group)

    def inv(self) -> "IntMatrix":
        """Inverse from the invariant form: −C Mᵀ C or η Mᵀ η."""
        f = self.form()
        out = f @ self.T() @ f
        return -out if self.group[0] == "Sp4" else out

    def __pow__(self, k: int) -> "IntMatrix":
        base = self if k >= 0 else self.inv()
        k = abs(k)
        out = self.identity()
        while k:
            if k & 1:
                out = out @ base
            base = base @ base
            k >>= 1
        return out

    def preserves_form(self) -> bool:
        f = self.form()
        return self.T() @ f @ self == f

    def array(self) -> np.ndarray:
        return np.array(self.rows, dtype=float)

    def key(self) -> tuple:
        return tuple(itertools.chain.from_iterable(self.rows))

    def to_json(self) -> list:
        return [[str(x) for x in row] for row in self.rows]


def identity(n: int, group=("Sp4",)) -> IntMatrix:
    return IntMatrix(tuple(tuple(int(i == j) for j in range(n)) for i in range(n)), tuple(group))


def invariant_form(n: int, group: tuple) -> IntMatrix:
    if group[0] == "Sp4":
        return IntMatrix(C_S, group)
    r = group[1]
    return IntMatrix(tuple(tuple((1 if i < r else -1) if i == j else 0 for j in range(n)) for i in range(n)), group)


def sp4(rows) -> IntMatrix:
    return IntMatrix.of(rows, ("Sp4",))


# --- Sp(4,Z) -------------------------------------------------------------------

def sp4z_generators() -> dict:
    """Parabolic T₁..T₈, elliptic S₁, S₂, Q₁, Q₂ and the two words 𝒜 = Q₁S₁, ℬ = Q₁²Q₂."""
    g = {
        "T1": sp4([[1, 0, 1, 0], [0, 1, 0, 0], [0, 0, 1, 0], [0, 0, 0, 1]]),
        "T2": sp4([[1, 0, 0, 0], [0, 1, 0, 1], [0, 0, 1, 0], [0, 0, 0, 1]]),
        "T3": sp4([[1, 0, 0, 1], [0, 1, 1, 0], [0, 0, 1, 0], [0, 0, 0, 1]]),
        "T4": sp4([[1, 1, 0, 0], [0, 1, 0, 0], [0, 0, 1, 0], [0, 0, -1, 1]]),
        "T5": sp4([[1, 0, 0, 0], [-1, 1, 0, 0], [0, 0, 1, 1], [0, 0, 0, 1]]),
        "T6": sp4([[1, 0, 0, 0], [0, 1, 0, 0], [-1, 0, 1, 0], [0, 0, 0, 1]]),
        "T7": sp4([[1, 0, 0, 0], [0, 1, 0, 0], [0, -1, 1, 0], [-1, 0, 0, 1]]),
        "T8": sp4([[1, 0, 0, 0], [0, 1, 0, 0], [0, 0, 1, 0], [0, -1, 0, 1]]),
        "S1": sp4([[0, 0, 1, 0], [0, 1, 0, 0], [-1, 0, 0, 0], [0, 0, 0, 1]]),
        "S2": sp4([[1, 0, 0, 0], [0, 0, 0, 1], [0, 0, 1, 0], [0, -1, 0, 0]]),
        "Q1": sp4([[0, -1, 0, 0], [1, 0, 0, 0], [0, 0, 0, -1], [0, 0, 1, 0]]),
        "Q2": sp4([[0, 0, 0, 1], [0, 0, 1, 0], [0, -1, 0, 0], [-1, 0, 0, 0]]),
    }
    g["A"] = g["Q1"] @ g["S1"]
    g["B"] = g["Q1"] @ g["Q1"] @ g["Q2"]
    for name, m in g.items():
        if not m.preserves_form():
            raise AssertionError(f"{name} is not symplectic")
    return g


def equal_up_to_sign(a: IntMatrix, b: IntMatrix) -> Optional[int]:
    """+1 if a == b, −1 if a == −b, otherwise None."""
    if a == b:
        return 1
    if a == -b:
        return -1
    return None


@dataclass(frozen=True)
class RelationResult:
    name: str
    holds: bool
    mode: str  # "matrixwise", "up to sign", "block sign" or "fails"
    note: str = ""


def block_sign(a: IntMatrix, b: IntMatrix) -> bool:
    """a = b·D with D = −1 on one SL(2) block {k, k+2} of Sp(4) and +1 elsewhere."""
    for k in (0, 1):
        d = [1, 1, 1, 1]
        d[k] = d[k + 2] = -1
        D = IntMatrix(tuple(tuple(d[i] if i == j else 0 for j in range(4)) for i in range(4)), a.group)
        if a == b @ D:
            return True
    return False


def _rel(name: str, lhs: IntMatrix, rhs: IntMatrix, note: str = "", projective: bool = False) -> RelationResult:
    s = equal_up_to_sign(lhs, rhs)
    if s == 1:
        return RelationResult(name, True, "matrixwise", note)
    if s == -1:
        return RelationResult(name, projective, "up to sign", note)
    if projective and lhs.group[0] == "Sp4" and block_sign(lhs, rhs):
        return RelationResult(name, True, "block sign", note)
    return RelationResult(name, False, "fails", note)


def sp4z_relations() -> list:
    """Every Sp(4,Z) relation with the mode in which it holds.

    Relations flagged projective may hold up to ±1, or up to −1 on the SL(2,Z) block they live in
    (trivial action on that copy's upper half plane).
    """
    g = sp4z_generators()
    I = identity(4)
    A, B = g["A"], g["B"]
    T = [g[f"T{k}"] for k in range(1, 9)]
    S1, S2, Q1, Q2 = g["S1"], g["S2"], g["Q1"], g["Q2"]
    out = [
        _rel("A^8 = 1", A ** 8, I),
        _rel("B^4 = 1", B ** 4, I),
        _rel("(BA)^4 = 1", (B @ A) ** 4, I),
        _rel("(T1 T6)^6 = 1", (T[0] @ T[5]) ** 6, I),
        _rel("(T2 T8)^6 = 1", (T[1] @ T[7]) ** 6, I),
        _rel("(T3 T7)^6 = 1", (T[2] @ T[6]) ** 6, I),
        _rel("(T4 T5)^6 = 1", (T[3] @ T[4]) ** 6, I),
        _rel("Q1^4 = 1", Q1 ** 4, I),
        _rel("Q2^4 = 1", Q2 ** 4, I),
        # a conjugate of a unipotent matrix is never the identity; the inverse is what holds
        _rel("Q1 T3 Q1^3 = T3^-1", Q1 @ T[2] @ Q1 ** 3, T[2] ** -1),
        _rel("Q2 T4 Q2^3 = T4^-1", Q2 @ T[3] @ Q2 ** 3, T[3] ** -1),
        _rel("S1 S2 = S2 S1", S1 @ S2, S2 @ S1, projective=True),
        _rel("S1^2 = 1", S1 @ S1, I, projective=True),
        _rel("S2^2 = 1", S2 @ S2, I, projective=True),
        # modular relation (ST)^3 = 1 inside each SL(2,Z) copy
        _rel("(S1 T1)^3 = 1", (S1 @ T[0]) ** 3, I, projective=True),
        _rel("(S2 T2)^3 = 1", (S2 @ T[1]) ** 3, I, projective=True),
        _rel("T3 T4 T3^-1 T4^-1 = T1^-2", T[2] @ T[3] @ T[2] ** -1 @ T[3] ** -1, T[0] ** -2),
        _rel("T3 T4^T T3^-1 T4^-T = T2^-2", T[2] @ T[3].T() @ T[2] ** -1 @ T[3].T() ** -1, T[1] ** -2),
    ]
    for a, b in [(5, 4), (6, 1), (7, 3), (8, 2)]:
        out.append(_rel(f"T{a} = T{b}^-T", T[a - 1], T[b - 1].T() ** -1))
    return out


def word_eval(word: str, gens: dict) -> IntMatrix:
    """Evaluate a dot-free word of single-letter generator names, e.g. 'ABBA'."""
    out = None
    for ch in word:
        out = gens[ch] if out is None else out @ gens[ch]
    return out if out is not None else identity(4)


# --- closure, classes -----------------------------------------------------------

def closure(gens: Iterable[IntMatrix], cap: int = 100000) -> list:
    """Finite group generated by ``gens`` in BFS order (word length, generator index)."""
    gens = list(gens)
    if not gens:
        raise ValueError("need at least one generator")
    e = gens[0].identity()
    seen = {e.key(): e}
    order = [e]
    queue = deque([e])
    while queue:
        x = queue.popleft()
        for g in gens:
            y = g @ x
            k = y.key()
            if k not in seen:
                seen[k] = y
                order.append(y)
                if len(order) > cap:
                    raise Exceeded(f"group exceeds {cap} elements")
                queue.append(y)
    return order


def element_order(m: IntMatrix, cap: int = 1000) -> int:
    x = m
    for k in range(1, cap + 1):
        if x.is_identity():
            return k
        x = x @ m
    raise Exceeded("element order exceeds cap")


def conjugacy_classes(group: list) -> list:
    keys = {g.key(): g for g in group}
    inv = {g.key(): g.inv() for g in group}
    done = set()
    classes = []
    for g in group:
        if g.key() in done:
            continue
        cls = {}
        for h in group:
            c = h @ g @ inv[h.key()]
            cls[c.key()] = c
        done.update(cls)
        classes.append(sorted(cls.values(), key=lambda m: m.key()))
    if sum(len(c) for c in classes) != len(keys):
        raise AssertionError("classes do not partition the group")
    return classes


def p32() -> list:
    g = sp4z_generators()
    return closure([g["S1"], g["S2"], g["Q1"], g["Q2"]])


def orbit_of_translations(group: Optional[list] = None) -> list:
    """Conjugation orbit of {T₁..T₄, T₁⁻¹..T₄⁻¹} under the 32-element point group."""
    group = p32() if group is None else group
    g = sp4z_generators()
    seeds = [g[f"T{k}"] for k in range(1, 5)]
    seeds += [t.inv() for t in seeds]
    orbit = {}
    for h in group:
        hi = h.inv()
        for t in seeds:
            c = h @ t @ hi
            orbit.setdefault(c.key(), c)
    return sorted(orbit.values(), key=lambda m: m.key())


def inverse_free_section(orbit: list) -> list:
    """One representative of every {u, u⁻¹} pair."""
    keys = set()
    out = []
    for u in orbit:
        if u.inv().key() in keys:
            continue
        keys.add(u.key())
        out.append(u)
    return out


def fl_action(g, Z) -> SiegelPoint:
    """Fractional linear action of an integer or real 4×4 symplectic matrix."""
    arr = g.array() if isinstance(g, IntMatrix) else np.asarray(g, dtype=float)
    return _fl_real(arr, Z)


def cayley_edges(group: list, gens: list) -> list:
    """(source index, generator index, target index) for left multiplication."""
    index = {g.key(): i for i, g in enumerate(group)}
    return [(i, k, index[(s @ x).key()]) for i, x in enumerate(group) for k, s in enumerate(gens)]


# --- SO(r, r+q, Z) ------------------------------------------------------------------

def _int_from_float(a: np.ndarray, what: str) -> tuple:
    rounded = np.rint(a)
    if np.max(np.abs(a - rounded)) > 1e-9:
        raise NonIntegerEntry(f"{what} has non-integer entries")
    return tuple(tuple(int(x) for x in row) for row in rounded)


def _root_E(r: int, q: int, kind: str, i: int, j: int) -> list:
    """Integer root generator in the diag(+ʳ, −^{r+q}) basis (0-based indices)."""
    n = 2 * r + q
    eta = [1] * r + [-1] * (r + q)

    def vec(*pairs):
        v = [0] * n
        for idx, c in pairs:
            v[idx] += c
        return v

    def outer(a, b):
        # a (η b)ᵀ − b (η a)ᵀ
        return [[a[x] * eta[y] * b[y] - b[x] * eta[y] * a[y] for y in range(n)] for x in range(n)]

    nvec = lambda k: vec((k, 1), (r + k, -1))
    mvec = lambda k: vec((k, 1), (r + k, 1))
    if kind == "short":
        z = vec((2 * r + j, 1))
        return outer(z, nvec(i))
    if kind == "-":
        return outer(mvec(j), nvec(i))
    if kind == "+":
        return outer(nvec(j), nvec(i))
    raise ValueError(kind)


def _exp_nilpotent_exact(E: list, scale: int) -> tuple:
    n = len(E)
    M = [[Fraction(scale * x) for x in row] for row in E]
    out = [[Fraction(int(i == j)) for j in range(n)] for i in range(n)]
    term = [row[:] for row in out]
    for k in range(1, n + 1):
        term = [[sum(term[i][l] * M[l][j] for l in range(n)) / k for j in range(n)] for i in range(n)]
        if not any(any(row) for row in term):
            break
        out = [[out[i][j] + term[i][j] for j in range(n)] for i in range(n)]
    if any(x.denominator != 1 for row in out for x in row):
        raise NonIntegerEntry("exp(2E) is not integral")
    return tuple(tuple(int(x) for x in row) for row in out)


def _rotation(E: list, angle: float, what: str) -> tuple:
    a = np.array(E, dtype=float)
    return _int_from_float(scipy.linalg.expm(angle * (a - a.T)), what)


def sorqz_generators(r: int, q: int) -> dict:
    """J^±_ij, J_i^I (elliptic) and T^±_ij, T_i^I (parabolic) of SO(r, r+q, Z)."""
    if r < 1 or q < 1:
        raise ValueError("need r >= 1 and q >= 1")
    grp = ("SOrq", r, q)
    out = {}
    for i, j in itertools.combinations(range(r), 2):
        for sign in "+-":
            E = _root_E(r, q, sign, i, j)
            out[f"J{i + 1}{j + 1}{sign}"] = IntMatrix(_rotation(E, math.pi / 4, f"J{i + 1}{j + 1}{sign}"), grp)
            out[f"T{i + 1}{j + 1}{sign}"] = IntMatrix(_exp_nilpotent_exact(E, 2), grp)
    for i in range(r):
        for I in range(q):
            E = _root_E(r, q, "short", i, I)
            out[f"J{i + 1}^{I + 1}"] = IntMatrix(_rotation(E, math.pi / 2, f"J{i + 1}^{I + 1}"), grp)
            out[f"T{i + 1}^{I + 1}"] = IntMatrix(_exp_nilpotent_exact(E, 2), grp)
    for name, m in out.items():
        if not m.preserves_form():
            raise AssertionError(f"{name} does not preserve the form")
    return out


def sorqz_relations(r: int, q: int) -> list:
    g = sorqz_generators(r, q)
    I = identity(2 * r + q, ("SOrq", r, q))
    out = []
    for name, m in g.items():
        if name.startswith("J") and "^" in name:
            out.append(_rel(f"({name})^2 = 1", m @ m, I))
        elif name.startswith("J"):
            out.append(_rel(f"({name})^4 = 1", m ** 4, I))
    for name, J in g.items():
        if not name.startswith("J"):
            continue
        T = g["T" + name[1:]]
        out.append(_rel(f"{name}^-1 T{name[1:]} {name} = T{name[1:]}^-T", J.inv() @ T @ J, T.T().inv()))
    for i, j in itertools.combinations(range(1, r + 1), 2):
        for K in range(1, q + 1):
            Ti, Tj = g[f"T{i}^{K}"], g[f"T{j}^{K}"]
            Tp, Tm = g[f"T{i}{j}+"], g[f"T{i}{j}-"]
            lhs = Ti @ Tj @ Ti.inv() @ Tj.inv() @ Tp
            out.append(_rel(f"[T{i}^{K}, T{j}^{K}] T{i}{j}+ = (T{i}{j}+)^-1", lhs, Tp.inv()))
            TjT = Tj.T()
            lhs = Ti @ TjT @ Ti.inv() @ TjT.inv() @ Tm
            out.append(_rel(f"[T{i}^{K}, T{j}^{K}T] T{i}{j}- = (T{i}{j}-)^-1", lhs, Tm.inv()))
    return out


def weyl_group_order(r: int, q: int, cap: int = 20000) -> int:
    g = sorqz_generators(r, q)
    return len(closure([m for k, m in g.items() if k.startswith("J")], cap=cap))


def weyl_order_formula(r: int) -> int:
    return 2 ** (2 * r - 1) * math.factorial(r)


# --- basis bridge ------------------------------------------------------------------

def diag_to_eta_t(r: int, q: int) -> np.ndarray:
    """P with Pᵀ η_d P = −η_t: columns map the triangular basis into the diagonal one.

    η_d and −η_t have the same isometry group. Index i of the triangular basis goes to
    (x_i − y_i)/√2, its partner to −(x_i + y_i)/√2 and paint indices to z_I.
    """
    n = 2 * r + q
    P = np.zeros((n, n))
    s = 1 / math.sqrt(2)
    for i in range(r):
        P[i, i], P[r + i, i] = s, -s
        P[i, n - 1 - i], P[r + i, n - 1 - i] = -s, -s
    for I in range(q):
        P[2 * r + I, r + I] = 1.0
    return P


def to_eta_t_basis(m: IntMatrix) -> np.ndarray:
    """The same group element written in the triangular basis (float)."""
    _, r, q = m.group
    P = diag_to_eta_t(r, q)
    return np.linalg.solve(P, m.array() @ P)
