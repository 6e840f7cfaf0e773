"""Orbits f, C f, C^2 f, ... of the composition operator and the geometry of
their spans: Gram matrices, numerical rank, distances, residual sequences."""
from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from . import h2core
from .h2core import H2Function
from .special import eigenfunction, kernel
from .symbols import AffineSymbol, compose, phi_point

DEFAULT_TOL = 1e-10


class NormalizationVanishes(ArithmeticError):
    pass


class TrivialEvaluation(ValueError):
    pass


@dataclass(frozen=True, eq=False)
class OrbitAnalysis:
    """Orbit vectors with their Gram matrix and an orthonormal span basis.

    ``basis[:, j]`` belongs to orbit member ``basis_owner[j]``; members whose
    residual after projection fell below ``tol`` times their norm are listed
    in ``drop_log`` as (index, relative residual) and contribute no column.
    """
    orbit: tuple[H2Function, ...]
    vectors: np.ndarray
    gram: np.ndarray
    basis: np.ndarray
    basis_owner: tuple[int, ...]
    drop_log: tuple[tuple[int, float], ...]
    tol: float
    degree: int
    tail_bounds: tuple[float, ...] = field(default=())

    @property
    def m(self) -> int:
        return len(self.orbit) - 1

    @property
    def rank(self) -> int:
        return numerical_rank(self, self.tol)


def _stack(fns, degree: int) -> np.ndarray:
    v = np.zeros((degree + 1, len(fns)), dtype=complex)
    for j, f in enumerate(fns):
        k = min(f.degree, degree)
        v[: k + 1, j] = f.coeffs[: k + 1]
    return v


def orthonormalize(vectors: np.ndarray, tol: float = DEFAULT_TOL):
    """Modified Gram-Schmidt with one reorthogonalization pass.

    Returns (Q, owners, drops).  A column is dropped when its residual norm
    is below ``tol`` times its original norm.
    """
    q_cols: list[np.ndarray] = []
    owners: list[int] = []
    drops: list[tuple[int, float]] = []
    for j in range(vectors.shape[1]):
        v = vectors[:, j].copy()
        nv = np.linalg.norm(v)
        if nv == 0.0:
            drops.append((j, 0.0))
            continue
        for _ in range(2):
            for q in q_cols:
                v -= np.vdot(q, v) * q
        nr = np.linalg.norm(v)
        if nr < tol * nv:
            drops.append((j, float(nr / nv)))
            continue
        q_cols.append(v / nr)
        owners.append(j)
    q = np.column_stack(q_cols) if q_cols else np.zeros((vectors.shape[0], 0), dtype=complex)
    return q, tuple(owners), tuple(drops)


def analyze(fns, tol: float = DEFAULT_TOL, degree: int | None = None) -> OrbitAnalysis:
    """Gram/basis analysis for an arbitrary finite list of functions."""
    fns = tuple(fns)
    deg = max(f.degree for f in fns) if degree is None else degree
    v = _stack(fns, deg)
    g = v.conj().T @ v
    g = 0.5 * (g + g.conj().T)
    q, owners, drops = orthonormalize(v, tol)
    return OrbitAnalysis(fns, v, g, q, owners, drops, tol, deg,
                         tuple(f.tail_bound for f in fns))


def orbit(f: H2Function, sym: AffineSymbol, m: int, tol: float = DEFAULT_TOL) -> OrbitAnalysis:
    """orbit[n] = f o phi_{a**n} for n = 0..m."""
    if m < 0:
        raise ValueError("m must be >= 0")
    return analyze([f] + [compose(f, sym, n) for n in range(1, m + 1)], tol)


def normalized_gram(analysis: OrbitAnalysis) -> np.ndarray:
    """Gram matrix of the unit-normalized nonzero members."""
    d = np.sqrt(np.real(np.diag(analysis.gram)))
    keep = d > 0
    g = analysis.gram[np.ix_(keep, keep)]
    dk = d[keep]
    return g / np.outer(dk, dk)


def gram_spectrum(analysis: OrbitAnalysis) -> np.ndarray:
    """Eigenvalues of the normalized Gram matrix, largest first."""
    g = normalized_gram(analysis)
    if g.size == 0:
        return np.zeros(0)
    return np.linalg.eigvalsh(g)[::-1]


def numerical_rank(analysis: OrbitAnalysis, tol: float = DEFAULT_TOL) -> int:
    """Number of normalized-Gram eigenvalues above ``tol`` times the largest.

    Normalizing each member first makes the count independent of how orbit
    members are scaled.
    """
    if tol <= 0:
        raise ValueError("tol must be positive")
    ev = gram_spectrum(analysis)
    if ev.size == 0 or ev[0] <= 0:
        return 0
    return int(np.sum(ev > tol * ev[0]))


def _target_vector(target: H2Function, degree: int) -> np.ndarray:
    t = np.zeros(degree + 1, dtype=complex)
    k = min(target.degree, degree)
    t[: k + 1] = target.coeffs[: k + 1]
    return t


def distances_to_spans(target: H2Function, analysis: OrbitAnalysis) -> np.ndarray:
    """||target - P_k target|| for every prefix span{orbit[0..k]}, k = 0..m."""
    r = _target_vector(target, analysis.degree)
    out = np.empty(analysis.m + 1)
    cols = {owner: j for j, owner in enumerate(analysis.basis_owner)}
    current = np.linalg.norm(r)
    for k in range(analysis.m + 1):
        j = cols.get(k)
        if j is not None:
            q = analysis.basis[:, j]
            for _ in range(2):
                r = r - np.vdot(q, r) * q
            current = np.linalg.norm(r)
        out[k] = current
    return out


def distance_to_span(target: H2Function, analysis: OrbitAnalysis, m_prefix: int) -> float:
    if not 0 <= m_prefix <= analysis.m:
        raise ValueError(f"m_prefix must lie in [0, {analysis.m}]")
    return float(distances_to_spans(target, analysis)[m_prefix])


def project(target: H2Function, analysis: OrbitAnalysis, m_prefix: int | None = None) -> np.ndarray:
    """Coefficients of the orthogonal projection of ``target`` onto a prefix span."""
    m_prefix = analysis.m if m_prefix is None else m_prefix
    t = _target_vector(target, analysis.degree)
    cols = [j for j, owner in enumerate(analysis.basis_owner) if owner <= m_prefix]
    q = analysis.basis[:, cols]
    return q @ (q.conj().T @ t)


def normalized_orbit_residual(g: H2Function, s: complex, sym: AffineSymbol, n: int,
                              degree: int = 1024, guard: float = 1e-14) -> tuple[float, float]:
    """|| C^n (f_s g) / (a**(n s) g(1 - a**n)) - f_s || and an error bound.

    The product f_s g is formed in coefficient space and composed without
    using any closed form.
    """
    s = complex(s)
    if s.real < 0:
        raise ValueError("need Re(s) >= 0")
    fs = eigenfunction(s, degree)
    f = h2core.multiply(fs, g, degree=degree)
    al = sym.alpha(n)
    gv, ge = h2core.evaluate_with_bound(g, complex(1.0 - al))
    if abs(gv) < guard:
        raise NormalizationVanishes(f"normalization vanishes: |g(1 - a^{n})| = {abs(gv):.3g}")
    lam = np.exp(n * s * math.log(sym.a)) * gv
    cf = compose(f, sym, n, closed_form=False)
    diff = h2core.linear_combine([1.0 / lam, -1.0], [cf, fs])
    err = math.sqrt(diff.tail_bound)
    if ge:
        # first-order effect of the uncertainty in g(1 - a^n) on the scaling
        err += ge / abs(gv) * h2core.norm(cf) / abs(lam)
    return h2core.norm(diff), err


def tail_sum(g: H2Function, sym: AffineSymbol, k: int, m: int) -> H2Function:
    """sum_{n=k}^{m} g o phi_{a**n}."""
    if k < 1 or m < k:
        raise ValueError("need 1 <= k <= m")
    terms = [compose(g, sym, n) for n in range(k, m + 1)]
    return h2core.linear_combine([1.0] * len(terms), terms)


def orthogonal_element(f: H2Function, sym: AffineSymbol, m: int, z0: complex,
                       tol: float = 1e-12, analysis: OrbitAnalysis | None = None) -> H2Function:
    """Unit vector in span(orbit[0..m]) orthogonal to every span member vanishing at z0.

    It is the normalized projection of the reproducing kernel at z0.
    """
    if abs(z0) >= 1:
        raise ValueError("need |z0| < 1")
    an = orbit(f, sym, m) if analysis is None else analysis
    vals = [abs(h2core.evaluate(u, z0)) for u in an.orbit]
    scale_ = max(h2core.norm(u) for u in an.orbit)
    if max(vals) <= tol * max(scale_, 1.0):
        raise TrivialEvaluation("evaluation functional trivial on span")
    p = project(kernel(z0, an.degree), an)
    return h2core.H2Function(p / np.linalg.norm(p))


@dataclass(frozen=True)
class ZeroOrbitReport:
    w: complex
    value_at_w: complex
    ns: tuple[int, ...]
    orbit_values: tuple[complex, ...]
    errors: tuple[float, ...]
    tol: float
    not_minimal_flag: bool


def zero_orbit_check(f: H2Function, sym: AffineSymbol, w: complex, n_range=range(1, 11),
                     tol: float = 1e-10) -> ZeroOrbitReport:
    """Compare |f(w)| with |f(phi_{a**n}(w))| over ``n_range``.

    The flag is raised when f(w) is clearly nonzero while every sampled orbit
    point is a zero to ``tol``; it records evidence only.
    """
    if abs(w) >= 1:
        raise ValueError("need |w| < 1")
    ns = tuple(n_range)
    v0, e0 = h2core.evaluate_with_bound(f, complex(w))
    pts = np.array([complex(phi_point(sym, n, w)) for n in ns])
    vals, errs = h2core.evaluate_with_bound(f, pts)
    errs = np.asarray(errs)
    flag = abs(v0) - e0 > tol and bool(np.all(np.abs(vals) + errs < tol))
    return ZeroOrbitReport(complex(w), complex(v0), ns, tuple(complex(v) for v in vals),
                           tuple(float(e) for e in errs), tol, flag)


def eigen_residual(f: H2Function, sym: AffineSymbol, lam: complex) -> tuple[float, float]:
    """|| f o phi_a - lam f || with the propagated truncation bound."""
    cf = compose(f, sym, 1)
    diff = h2core.linear_combine([1.0, -complex(lam)], [cf, f])
    return h2core.norm(diff), math.sqrt(diff.tail_bound)
