"""Named functions: eigenfunctions (1 - z)**s, reproducing kernels, Blaschke
partial products, and boundary sampling along the orbit points 1 - a**n."""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from . import h2core
from .h2core import H2Function
from .symbols import AffineSymbol


class NotInH2Error(ValueError):
    pass


def in_hardy_space(s: complex) -> bool:
    """(1 - z)**s lies in H^2 exactly when Re(s) > -1/2."""
    return complex(s).real > -0.5


def period_exponent(sym: AffineSymbol) -> complex:
    """t = 2 pi i / log a, the exponent with a**t = 1."""
    return 2j * math.pi / math.log(sym.a)


def eigenfunction(s: complex, degree: int = 1024) -> H2Function:
    """f_s(z) = (1 - z)**s truncated at ``degree``.

    Coefficients follow c_0 = 1, c_{k+1} = c_k (k - s) / (k + 1); the tail
    bound comes from the k**(-1 - Re s) decay of the coefficients.
    """
    s = complex(s)
    if not in_hardy_space(s):
        raise NotInH2Error(f"(1 - z)**{s} is not in H^2: need Re(s) > -1/2")
    return h2core.from_eigen_terms(((1.0, s),), degree)


def eigen_sup_bound(s: complex) -> float:
    """Upper bound 2**Re(s) exp(pi |Im s| / 2) for sup |(1 - z)**s| on the disk."""
    s = complex(s)
    if s.real < 0:
        return math.inf
    return 2.0 ** s.real * math.exp(math.pi * abs(s.imag) / 2)


def kernel(alpha: complex, degree: int = 1024) -> H2Function:
    """Reproducing kernel 1 / (1 - conj(alpha) z)."""
    alpha = complex(alpha)
    r = abs(alpha)
    if r >= 1.0:
        raise ValueError("kernel point must satisfy |alpha| < 1")
    c = np.conj(alpha) ** np.arange(degree + 1)
    tail = r ** (2 * (degree + 1)) / (1.0 - r * r) if r else 0.0
    return H2Function(c, tail, eb=True)


def kernel_orbit_point(alpha: complex, a: float) -> tuple[complex, complex]:
    """(scale, beta) with kappa_alpha o phi_a = scale * kappa_beta."""
    ab = np.conj(alpha)
    den = 1.0 - ab + ab * a
    return complex(1.0 / den), complex(alpha * a / (1.0 - alpha + alpha * a))


def blaschke_factor(c: float, degree: int) -> H2Function:
    """(c - z) / (1 - c z) for real 0 < c < 1."""
    geo = kernel(c, degree)
    return h2core.multiply(h2core.polynomial([c, -1.0]), geo)


def blaschke_partial(sym: AffineSymbol, n_start: int = 2, n_terms: int = 6,
                     degree: int = 4096) -> H2Function:
    """Partial Blaschke product over the zeros 1 - a**n, n_start <= n < n_start + n_terms.

    The neglected factors of the infinite product change values on compact
    sets by an amount controlled by the remainder sum of a**n; only the
    partial product is built.
    """
    if n_start < 1 or n_terms < 1:
        raise ValueError("need n_start >= 1 and n_terms >= 1")
    out = h2core.constant(1.0)
    for n in range(n_start, n_start + n_terms):
        c = 1.0 - sym.alpha(n)
        if not 0.0 < c < 1.0:
            raise ValueError("zero 1 - a**n must lie in (0, 1)")
        out = h2core.multiply(out, blaschke_factor(c, degree))
    return H2Function(out.coeffs, out.tail_bound, out.tail_start, None, True)


def blaschke_zeros(sym: AffineSymbol, n_start: int, n_terms: int) -> np.ndarray:
    return 1.0 - sym.a ** np.arange(n_start, n_start + n_terms, dtype=float)


def blaschke_value(zeros: np.ndarray, z):
    """Direct product of the factors, for cross-checking the series."""
    z = np.asarray(z, dtype=complex)
    out = np.ones_like(z)
    for c in zeros:
        out = out * (c - z) / (1.0 - np.conj(c) * z)
    return out


def boundary_samples(g: H2Function, sym: AffineSymbol, n_max: int = 40):
    """Values g(1 - a**n), n = 1..n_max, with per-point error bounds."""
    if n_max < 1:
        raise ValueError("n_max must be >= 1")
    z = 1.0 - sym.a ** np.arange(1, n_max + 1, dtype=float)
    v, e = h2core.evaluate_with_bound(g, z.astype(complex))
    return np.asarray(v), np.asarray(e)


@dataclass(frozen=True)
class CaseLabel:
    """Finite-sample label for the boundary behaviour of g along 1 - a**n.

    A: the tail clusters around one nonzero value ``limit``.  B: the tail is
    below ``tol``.  C: neither.  Evidence, not a limit statement.
    """
    label: str
    evidence: tuple[complex, ...]
    limit: complex | None
    tol: float


def classify_case(samples, tol: float = 1e-6) -> CaseLabel:
    samples = np.asarray(samples, dtype=complex)
    if samples.size < 8:
        raise ValueError("need at least 8 samples to classify")
    q = samples[-max(2, samples.size // 4):]
    ev = tuple(complex(x) for x in samples)
    if np.all(np.abs(q) < tol):
        return CaseLabel("B", ev, 0j, tol)
    mu = complex(q.mean())
    if np.all(np.abs(q - mu) <= tol) and abs(mu) >= 10 * tol:
        return CaseLabel("A", ev, mu, tol)
    return CaseLabel("C", ev, None, tol)


def factor_at_one(p: H2Function, tol: float = 1e-12) -> tuple[int, H2Function]:
    """Split an exact polynomial as (1 - z)**K h with h(1) != 0.

    Divides by (1 - z) while the value at 1 vanishes to ``tol`` relative to
    the coefficient l1 norm.
    """
    if not p.is_exact:
        raise ValueError("factor_at_one needs an exact polynomial")
    c = p.coeffs[: p.effective_degree() + 1].copy()
    k = 0
    while c.size > 1 and abs(c.sum()) <= tol * np.abs(c).sum():
        # p = (1 - z) q  <=>  q_j = sum_{i <= j} p_i
        q = np.cumsum(c)[:-1]
        c = q
        k += 1
    return k, h2core.polynomial(c)
