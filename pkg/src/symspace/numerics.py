"""Small dense matrix kernels: eigen-decomposition, exp/log, Cholesky, finite differences.

All kernels accept plain ``numpy`` arrays or :class:`RealMatrix` wrappers and
return the same kind they were given.
"""
from __future__ import annotations

import enum
import os
from dataclasses import dataclass
from typing import Callable

import numpy as np
import scipy.linalg

from .errors import BasisMismatch, NoConvergence, NotSPD, NotSymmetric, Overflow

DEFAULT_TOL = 1e-10
FD_STEP = 1e-4


def default_tol() -> float:
    """Tolerance used for symmetry/orthogonality checks; ``SYMSPACE_TOL`` overrides it."""
    raw = os.environ.get("SYMSPACE_TOL")
    if raw:
        try:
            return float(raw)
        except ValueError:
            pass
    return DEFAULT_TOL


class BasisTag(enum.Enum):
    EtaT = "EtaT"
    EtaB = "EtaB"
    Diag = "Diag"
    None_ = "None"


@dataclass(frozen=True)
class RealMatrix:
    """Dense real matrix carrying the basis it is written in.

    Binary products between two tagged matrices with different tags are
    rejected; ``BasisTag.None_`` is compatible with everything.
    """

    a: np.ndarray
    tag: BasisTag = BasisTag.None_

    def __post_init__(self):
        arr = np.array(self.a, dtype=float)
        if arr.ndim != 2:
            raise ValueError("RealMatrix needs a 2-d array")
        if not np.all(np.isfinite(arr)):
            raise Overflow("non-finite entry in RealMatrix")
        arr.setflags(write=False)
        object.__setattr__(self, "a", arr)

    @property
    def rows(self) -> int:
        return self.a.shape[0]

    @property
    def cols(self) -> int:
        return self.a.shape[1]

    @property
    def entries(self) -> list:
        return self.a.ravel().tolist()

    @property
    def T(self) -> "RealMatrix":
        return RealMatrix(self.a.T, self.tag)

    def _merge(self, other: "RealMatrix") -> BasisTag:
        if self.tag is BasisTag.None_:
            return other.tag
        if other.tag is BasisTag.None_ or other.tag is self.tag:
            return self.tag
        raise BasisMismatch(f"{self.tag.value} vs {other.tag.value}")

    def __matmul__(self, other):
        if isinstance(other, RealMatrix):
            return RealMatrix(self.a @ other.a, self._merge(other))
        return RealMatrix(self.a @ np.asarray(other), self.tag)

    def __add__(self, other):
        if isinstance(other, RealMatrix):
            return RealMatrix(self.a + other.a, self._merge(other))
        return RealMatrix(self.a + np.asarray(other), self.tag)

    def __sub__(self, other):
        if isinstance(other, RealMatrix):
            return RealMatrix(self.a - other.a, self._merge(other))
        return RealMatrix(self.a - np.asarray(other), self.tag)

    def __array__(self, dtype=None, copy=None):
        return self.a if dtype is None else self.a.astype(dtype)

    def to_json(self) -> dict:
        return {"rows": self.rows, "cols": self.cols, "entries": self.entries, "basis": self.tag.value}

    @classmethod
    def from_json(cls, d: dict) -> "RealMatrix":
        arr = np.asarray(d["entries"], dtype=float).reshape(d["rows"], d["cols"])
        tag = BasisTag("None" if d.get("basis") in (None, "None") else d["basis"])
        return cls(arr, tag)


def _unwrap(m):
    if isinstance(m, RealMatrix):
        return m.a, m.tag
    return np.asarray(m, dtype=float), None


def _rewrap(a, tag):
    return a if tag is None else RealMatrix(a, tag)


@dataclass(frozen=True)
class SymEigen:
    eigenvalues: np.ndarray
    eigenvectors: np.ndarray

    def reconstruct(self) -> np.ndarray:
        v = self.eigenvectors
        return (v * self.eigenvalues) @ v.T


def check_symmetric(a: np.ndarray, tol: float | None = None) -> None:
    tol = default_tol() if tol is None else tol
    if a.ndim != 2 or a.shape[0] != a.shape[1]:
        raise NotSymmetric("matrix is not square")
    asym = np.max(np.abs(a - a.T)) if a.size else 0.0
    if asym > tol * max(1.0, np.max(np.abs(a))):
        raise NotSymmetric(f"asymmetry {asym:.3e} exceeds {tol:.1e}")


def sym_eigen(m, tol: float | None = None) -> SymEigen:
    """Eigen-decomposition of a symmetric matrix, eigenvalues ascending."""
    a, _ = _unwrap(m)
    check_symmetric(a, tol)
    try:
        lam, vec = np.linalg.eigh(0.5 * (a + a.T))
    except np.linalg.LinAlgError as exc:  # pragma: no cover - LAPACK failure
        raise NoConvergence(str(exc)) from exc
    return SymEigen(lam, vec)


def _is_symmetric(a: np.ndarray) -> bool:
    return a.shape[0] == a.shape[1] and np.allclose(a, a.T, rtol=0.0, atol=1e-14 * max(1.0, np.max(np.abs(a))))


def expm(m):
    a, tag = _unwrap(m)
    if a.shape[0] != a.shape[1]:
        raise ValueError("expm needs a square matrix")
    if not a.any():
        return _rewrap(np.eye(a.shape[0]), tag)
    if _is_symmetric(a):
        e = sym_eigen(a, tol=1.0)
        with np.errstate(over="ignore", invalid="ignore"):
            out = (e.eigenvectors * np.exp(e.eigenvalues)) @ e.eigenvectors.T
    else:
        out = scipy.linalg.expm(a)
    if not np.all(np.isfinite(out)):
        raise Overflow("matrix exponential overflowed")
    return _rewrap(out, tag)


def expm_nilpotent(a: np.ndarray) -> np.ndarray:
    """exp of a nilpotent matrix by its terminating series."""
    n = a.shape[0]
    out = np.eye(n)
    term = np.eye(n)
    for k in range(1, n + 1):
        term = term @ a / k
        if not term.any():
            break
        out = out + term
    return out


def logm_unipotent(a: np.ndarray) -> np.ndarray:
    """log of a unipotent matrix (1 + nilpotent) by its terminating series."""
    n = a.shape[0]
    x = a - np.eye(n)
    out = np.zeros_like(x)
    term = np.eye(n)
    for k in range(1, n + 1):
        term = term @ x
        if not term.any():
            break
        out = out + ((-1) ** (k + 1)) * term / k
    return out


def logm_spd(m, tol: float | None = None):
    a, tag = _unwrap(m)
    tol = default_tol() if tol is None else tol
    e = sym_eigen(a, tol=max(tol, 1e-8))
    if np.any(e.eigenvalues <= tol):
        raise NotSPD(f"smallest eigenvalue {e.eigenvalues.min():.3e}")
    out = (e.eigenvectors * np.log(e.eigenvalues)) @ e.eigenvectors.T
    return _rewrap(out, tag)


def cholesky_upper(m):
    """Upper-triangular ``L`` with positive diagonal and ``m = L Lᵀ``.

    Obtained from the usual lower factor of the index-reversed matrix.
    """
    a, tag = _unwrap(m)
    rev = a[::-1, ::-1]
    try:
        c = np.linalg.cholesky(0.5 * (rev + rev.T))
    except np.linalg.LinAlgError as exc:
        raise NotSPD(str(exc)) from exc
    return _rewrap(np.ascontiguousarray(c[::-1, ::-1]), tag)


def fd_derivative(f: Callable, x, i: int, h: float = FD_STEP):
    """Central difference of ``f`` along axis ``i`` at ``x``; O(h²)."""
    x = np.asarray(x, dtype=float)
    xp = x.copy()
    xm = x.copy()
    xp[i] += h
    xm[i] -= h
    fp = np.asarray(f(xp), dtype=float)
    fm = np.asarray(f(xm), dtype=float)
    return (fp - fm) / (2.0 * h)


def fd_derivative_richardson(f: Callable, x, i: int, h: float = FD_STEP):
    """Richardson-refined central difference, O(h⁴)."""
    d1 = fd_derivative(f, x, i, h)
    d2 = fd_derivative(f, x, i, h / 2)
    return (4.0 * d2 - d1) / 3.0


def arccosh_stable(x, clamp: float = 1e-9):
    """arccosh with values in [1-clamp, 1] snapped to 1."""
    x = np.asarray(x, dtype=float)
    x = np.where((x < 1.0) & (x >= 1.0 - clamp), 1.0, x)
    return np.log(x + np.sqrt((x - 1.0) * (x + 1.0)))
