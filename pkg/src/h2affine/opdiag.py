"""Finite-dimensional operator diagnostics: kernel dimension, range
codimension, Krylov cyclicity, and matrices of truncated composition operators.

All rank decisions go through :func:`matrix_rank` with one relative
tolerance, so kernel_dim + rank = n holds by construction.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .symbols import AffineSymbol

RANK_TOL = 1e-10

DISCLAIMER = ("finite-dimensional measurements only: closed range is automatic in finite "
              "dimension and an infinite-dimensional kernel cannot be exhibited, so no "
              "universality statement follows")


@dataclass(frozen=True, eq=False)
class MatrixOperator:
    entries: np.ndarray

    def __post_init__(self):
        e = np.array(self.entries, dtype=complex)
        if e.ndim != 2 or e.shape[0] != e.shape[1] or e.shape[0] < 1:
            raise ValueError(f"need a nonempty square matrix, got shape {e.shape}")
        if not np.all(np.isfinite(e)):
            raise ValueError("matrix entries must be finite")
        e.setflags(write=False)
        object.__setattr__(self, "entries", e)

    @property
    def n(self) -> int:
        return self.entries.shape[0]

    def __matmul__(self, v):
        return self.entries @ v


def _as_entries(T) -> np.ndarray:
    return T.entries if isinstance(T, MatrixOperator) else MatrixOperator(T).entries


def _rank_of(m: np.ndarray, tol: float) -> int:
    if tol <= 0:
        raise ValueError("tol must be positive")
    sv = np.linalg.svd(m, compute_uv=False)
    if sv.size == 0 or sv[0] == 0.0:
        return 0
    return int(np.sum(sv > tol * sv[0]))


def matrix_rank(T, tol: float = RANK_TOL) -> int:
    """Number of singular values above ``tol`` times the largest."""
    return _rank_of(_as_entries(T), tol)


def kernel_dim(T, tol: float = RANK_TOL) -> int:
    e = _as_entries(T)
    return e.shape[0] - _rank_of(e, tol)


def range_codim(T, tol: float = RANK_TOL) -> int:
    e = _as_entries(T)
    return e.shape[0] - _rank_of(e, tol)


def krylov_matrix(T, f) -> np.ndarray:
    """Columns T^j f / ||T^j f||, j = 0..n-1; zero columns stay zero."""
    e = _as_entries(T)
    v = np.asarray(f, dtype=complex).ravel()
    n = e.shape[0]
    if v.size != n:
        raise ValueError(f"vector length {v.size} does not match dimension {n}")
    k = np.zeros((n, n), dtype=complex)
    for j in range(n):
        nv = np.linalg.norm(v)
        if nv == 0.0:
            break
        # normalizing each power keeps the columns on one scale
        v = v / nv
        k[:, j] = v
        v = e @ v
    return k


def is_cyclic(T, f, tol: float = RANK_TOL) -> bool:
    """Whether the Krylov matrix of f has full rank at ``tol``."""
    v = np.asarray(f, dtype=complex).ravel()
    if not np.any(v):
        raise ValueError("zero vector cannot be cyclic")
    k = krylov_matrix(T, v)
    return _rank_of(k, tol) == k.shape[0]


@dataclass(frozen=True)
class CyclicCodimReport:
    n: int
    cyclic_found: bool
    trial: int | None
    codim: int
    kernel: int
    rank: int
    tol: float
    property_holds: bool | None
    note: str


def _unit_vector(rng: np.random.Generator, n: int) -> np.ndarray:
    v = rng.standard_normal(n) + 1j * rng.standard_normal(n)
    return v / np.linalg.norm(v)


def cyclic_codim_check(T, trials: int = 32, tol: float = RANK_TOL, seed: int = 0,
                       candidates=()) -> CyclicCodimReport:
    """Search for a cyclic vector; if one exists, range codimension must be 0 or 1.

    ``candidates`` are tried first, then ``trials`` unit vectors from a
    generator seeded by ``seed``.  ``property_holds`` is None when no cyclic
    vector turned up, since the implication is then vacuous.
    """
    if trials < 1:
        raise ValueError("trials must be >= 1")
    e = _as_entries(T)
    n = e.shape[0]
    rng = np.random.default_rng(seed)
    pool = [np.asarray(c, dtype=complex) for c in candidates]
    pool += [_unit_vector(rng, n) for _ in range(trials)]
    found = None
    for i, v in enumerate(pool):
        if np.any(v) and is_cyclic(e, v, tol):
            found = i
            break
    r = _rank_of(e, tol)
    codim = n - r
    if found is None:
        return CyclicCodimReport(n, False, None, codim, n - r, r, tol, None, "no cyclic vector found")
    return CyclicCodimReport(n, True, found, codim, n - r, r, tol, codim <= 1, "cyclic vector found")


@dataclass(frozen=True)
class CaradusPozziReport:
    n: int
    kernel_dim: int
    range_codim: int
    closed_range: bool
    tol: float
    disclaimer: str = DISCLAIMER


def caradus_pozzi_check(T, tol: float = RANK_TOL) -> CaradusPozziReport:
    """Kernel dimension and range codimension of T; never a universality verdict."""
    e = _as_entries(T)
    r = _rank_of(e, tol)
    n = e.shape[0]
    return CaradusPozziReport(n, n - r, n - r, True, tol)


def truncated_composition_matrix(sym: AffineSymbol, N: int) -> MatrixOperator:
    """Matrix of f -> f o phi_a on polynomials of degree <= N, monomial basis.

    Column k holds the coefficients of (a z + 1 - a)**k, built by repeated
    multiplication, so the matrix is upper triangular with diagonal a**k.
    """
    if N < 0:
        raise ValueError("N must be >= 0")
    a = sym.a
    m = np.zeros((N + 1, N + 1))
    m[0, 0] = 1.0
    for k in range(1, N + 1):
        m[1 : k + 1, k] = a * m[:k, k - 1]
        m[:k, k] += (1.0 - a) * m[:k, k - 1]
    # the recurrence rounds a*a*...*a; store the diagonal as the powers themselves
    m[np.diag_indices(N + 1)] = a ** np.arange(N + 1)
    return MatrixOperator(m)


def companion_matrix(coeffs) -> MatrixOperator:
    """Companion matrix of the monic z**n + c_{n-1} z**(n-1) + ... + c_0.

    ``coeffs`` lists c_0 .. c_{n-1}.  Ones sit on the subdiagonal, so the
    first basis vector is cyclic.
    """
    c = np.asarray(coeffs, dtype=complex)
    n = c.size
    if n < 1:
        raise ValueError("need at least one coefficient")
    m = np.zeros((n, n), dtype=complex)
    m[1:, :-1] = np.eye(n - 1)
    m[:, -1] = -c
    return MatrixOperator(m)


def jordan_block(n: int, eigenvalue: complex = 0.0) -> MatrixOperator:
    if n < 1:
        raise ValueError("n must be >= 1")
    m = eigenvalue * np.eye(n, dtype=complex) + np.eye(n, k=1, dtype=complex)
    return MatrixOperator(m)


def basis_vector(n: int, j: int = 0) -> np.ndarray:
    v = np.zeros(n, dtype=complex)
    v[j] = 1.0
    return v
