"""Truncated power series on the unit disk with explicit tail bookkeeping.

An :class:`H2Function` keeps the Taylor coefficients ``c_0 .. c_N`` of a
function in the Hardy space H^2 together with ``tail_bound``, a bound on the
squared H^2 norm of the difference between the true function and the
retained polynomial.  ``tail_start`` records the lowest coefficient index
that difference can touch: pure truncations have ``tail_start = N + 1``,
while operations that smear errors over all coefficients (composition, for
instance) lower it to 0.

Functions built from the family ``(1 - z)**s`` may also carry
``eigen_terms``, a finite expansion ``sum(lam * (1 - z)**s)``.  Composition
and evaluation use it when present; all coefficient arithmetic stays generic.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

EigenTerms = tuple[tuple[complex, complex], ...]
_EPS = float(np.finfo(float).eps)


@dataclass(frozen=True, eq=False)
class H2Function:
    coeffs: np.ndarray
    tail_bound: float = 0.0
    tail_start: int | None = None
    eigen_terms: EigenTerms | None = None
    eb: bool | None = field(default=None)

    def __post_init__(self):
        c = np.array(self.coeffs, dtype=complex).ravel()
        if c.size == 0:
            c = np.zeros(1, dtype=complex)
        if not np.all(np.isfinite(c)):
            raise ValueError("coefficients must be finite")
        c.flags.writeable = False
        object.__setattr__(self, "coeffs", c)
        tb = float(self.tail_bound)
        if not tb >= 0.0:
            raise ValueError(f"tail_bound must be nonnegative, got {tb}")
        object.__setattr__(self, "tail_bound", tb)
        ts = c.size if self.tail_start is None else int(self.tail_start)
        object.__setattr__(self, "tail_start", max(0, ts))
        if self.eigen_terms is not None:
            terms = tuple((complex(lam), complex(s)) for lam, s in self.eigen_terms)
            object.__setattr__(self, "eigen_terms", terms)

    @property
    def degree(self) -> int:
        return self.coeffs.size - 1

    @property
    def is_exact(self) -> bool:
        return self.tail_bound == 0.0

    @property
    def pure_tail(self) -> bool:
        """True when the error lives strictly beyond the retained degree."""
        return self.tail_start > self.degree

    def effective_degree(self) -> int:
        nz = np.flatnonzero(self.coeffs)
        return int(nz[-1]) if nz.size else 0

    def __repr__(self):
        return (f"H2Function(degree={self.degree}, tail_bound={self.tail_bound:.3g}, "
                f"closed_form={self.eigen_terms is not None})")

    # arithmetic sugar; everything routes through the module functions
    def __add__(self, other):
        if isinstance(other, H2Function):
            return linear_combine([1.0, 1.0], [self, other])
        return linear_combine([1.0, other], [self, constant(1.0)])

    __radd__ = __add__

    def __sub__(self, other):
        if isinstance(other, H2Function):
            return linear_combine([1.0, -1.0], [self, other])
        return linear_combine([1.0, -other], [self, constant(1.0)])

    def __rsub__(self, other):
        return linear_combine([other, -1.0], [constant(1.0), self])

    def __neg__(self):
        return scale(self, -1.0)

    def __mul__(self, other):
        if isinstance(other, H2Function):
            return multiply(self, other)
        return scale(self, other)

    def __rmul__(self, other):
        return scale(self, other)

    def __truediv__(self, other):
        return scale(self, 1.0 / other)


# -- constructors -----------------------------------------------------------

def polynomial(coeffs: Sequence[complex]) -> H2Function:
    return H2Function(np.asarray(coeffs, dtype=complex))


def constant(c: complex = 1.0) -> H2Function:
    """c * (1 - z)**0, so the closed form survives combination with f_s."""
    return H2Function(np.array([c], dtype=complex), eigen_terms=((c, 0.0),) if c else (), eb=True)


def monomial(n: int, degree: int | None = None) -> H2Function:
    """The basis vector e_n(z) = z**n, optionally padded to ``degree``."""
    if n < 0:
        raise ValueError("monomial index must be nonnegative")
    deg = n if degree is None else max(degree, n)
    c = np.zeros(deg + 1, dtype=complex)
    c[n] = 1.0
    return H2Function(c, eigen_terms=((1.0, 0.0),) if n == 0 else None, eb=True)


def zero(degree: int = 0) -> H2Function:
    return H2Function(np.zeros(degree + 1, dtype=complex), eigen_terms=(), eb=True)


def pad(f: H2Function, degree: int) -> H2Function:
    """Zero-pad an exact polynomial.  Inexact inputs are only truncated."""
    if degree == f.degree:
        return f
    if degree < f.degree:
        return truncate(f, degree)
    if not f.is_exact:
        raise ValueError("cannot pad a truncated series: its tail is unknown")
    c = np.zeros(degree + 1, dtype=complex)
    c[: f.degree + 1] = f.coeffs
    return H2Function(c, eigen_terms=f.eigen_terms, eb=f.eb)


def truncate(f: H2Function, degree: int) -> H2Function:
    if degree >= f.degree:
        return f
    dropped = f.coeffs[degree + 1:]
    if f.pure_tail:
        # dropped block and old tail occupy disjoint index ranges
        tail = float(np.sum(np.abs(dropped) ** 2)) + f.tail_bound
    else:
        tail = (_l2(dropped) + math.sqrt(f.tail_bound)) ** 2
    ts = min(f.tail_start, degree + 1)
    return H2Function(f.coeffs[: degree + 1], tail, ts, f.eigen_terms, f.eb)


# -- evaluation ---------------------------------------------------------------

def _check_disk(z):
    if np.any(np.abs(z) >= 1.0):
        raise ValueError("evaluation requires |z| < 1")


def evaluate(f: H2Function, z):
    """Horner evaluation of the retained polynomial; ``z`` may be an array."""
    z = np.asarray(z, dtype=complex)
    _check_disk(z)
    out = np.zeros_like(z)
    for c in f.coeffs[::-1]:
        out = out * z + c
    return out if out.ndim else complex(out)


def eval_error(f: H2Function, z):
    """Bound on ``|f(z) - evaluate(f, z)|``.

    Cauchy-Schwarz on the tail plus the standard Horner rounding bound
    gamma_{2N} * sum |c_k| |z|**k.
    """
    r = np.abs(np.asarray(z, dtype=complex))
    _check_disk(r)
    if f.tail_bound == 0.0:
        out = np.zeros_like(r)
    elif not math.isfinite(f.tail_bound):
        out = np.full_like(r, np.inf)
    else:
        out = math.sqrt(f.tail_bound) * r ** f.tail_start / np.sqrt(1.0 - r * r)
    acc = np.zeros_like(r)
    for c in np.abs(f.coeffs[::-1]):
        acc = acc * r + c
    u = 2 * (f.degree + 1) * _EPS
    out = out + u / (1.0 - u) * acc
    return out if out.ndim else float(out)


def closed_form_at_gap(terms: EigenTerms, gap):
    """Value of ``sum(lam * gap**s)`` with ``gap = 1 - z``, and a rounding bound.

    Passing the gap directly avoids forming points z that round onto 1.
    """
    gap = np.asarray(gap, dtype=complex)
    out = np.zeros_like(gap)
    err = np.zeros(gap.shape)
    logw = np.log(gap)
    for lam, s in terms:
        term = lam * (np.ones_like(gap) if s == 0 else np.exp(s * logw))
        out = out + term
        # relative error of exp(s log w) is about |s log w| + 1 ulps
        err = err + np.abs(term) * 4 * _EPS * (abs(s) * (np.abs(logw) + 1) + 1)
    return out, err


def closed_form_value(terms: EigenTerms, z):
    """Value of ``sum(lam * (1 - z)**s)`` on the principal branch."""
    z = np.asarray(z, dtype=complex)
    return closed_form_at_gap(terms, 1.0 - z)[0]


def evaluate_with_bound(f: H2Function, z, closed_form: bool = True):
    """Point values with error bounds; exact when a closed form is attached."""
    z = np.asarray(z, dtype=complex)
    _check_disk(z)
    if closed_form and f.eigen_terms is not None:
        v, e = closed_form_at_gap(f.eigen_terms, 1.0 - z)
    else:
        v = np.asarray(evaluate(f, z))
        e = np.asarray(eval_error(f, z))
    if v.ndim == 0:
        return complex(v), float(e)
    return v, e


# -- norms and pairings ---------------------------------------------------------

def _l2(c) -> float:
    return float(np.sqrt(np.sum(np.abs(c) ** 2)))


def norm_sq(f: H2Function) -> float:
    """Coefficient form of the squared H^2 norm of the retained polynomial."""
    return float(np.sum(np.abs(f.coeffs) ** 2))


def norm(f: H2Function) -> float:
    return math.sqrt(norm_sq(f))


def norm_sq_interval(f: H2Function) -> tuple[float, float]:
    """Interval guaranteed to contain the true squared norm."""
    v = norm_sq(f)
    t = f.tail_bound
    if f.pure_tail:
        return v, v + t
    r, e = math.sqrt(v), math.sqrt(t)
    return max(r - e, 0.0) ** 2, (r + e) ** 2


def inner(f: H2Function, g: H2Function) -> complex:
    """<f, g> = sum c_k conj(d_k); conjugate-linear in ``g``."""
    n = min(f.coeffs.size, g.coeffs.size)
    return complex(np.vdot(g.coeffs[:n], f.coeffs[:n]))


def inner_error(f: H2Function, g: H2Function) -> float:
    ef, eg = math.sqrt(f.tail_bound), math.sqrt(g.tail_bound)
    # error of f only meets coefficients of g at index >= f.tail_start
    gf = _l2(g.coeffs[f.tail_start:]) if f.tail_start <= g.degree else 0.0
    fg = _l2(f.coeffs[g.tail_start:]) if g.tail_start <= f.degree else 0.0
    return ef * gf + eg * fg + ef * eg


# -- algebra -------------------------------------------------------------------

def scale(f: H2Function, c: complex) -> H2Function:
    c = complex(c)
    terms = None if f.eigen_terms is None else tuple((lam * c, s) for lam, s in f.eigen_terms)
    return H2Function(f.coeffs * c, abs(c) ** 2 * f.tail_bound, f.tail_start, terms,
                      f.eb if c != 0 else True)


def _merge_terms(pairs) -> EigenTerms:
    acc: dict[complex, complex] = {}
    for lam, s in pairs:
        acc[s] = acc.get(s, 0j) + lam
    return tuple((lam, s) for s, lam in acc.items() if lam != 0)


def _output_degree(fns: Sequence[H2Function], exact_rule) -> int:
    inexact = [f.degree for f in fns if not f.is_exact]
    if inexact:
        return min(inexact)
    return exact_rule([f.effective_degree() for f in fns])


def linear_combine(scalars: Sequence[complex], fns: Sequence[H2Function]) -> H2Function:
    """Coefficientwise combination with triangle-inequality tail bounds.

    Exact inputs combine at their largest degree.  If any input is a
    truncated series, the result is cut at the smallest truncated degree and
    whatever is discarded is charged to the tail.
    """
    if len(scalars) != len(fns):
        raise ValueError(f"length mismatch: {len(scalars)} scalars, {len(fns)} functions")
    if not fns:
        raise ValueError("need at least one function")
    scalars = [complex(lam) for lam in scalars]
    deg = _output_degree(fns, max)
    width = max(f.degree for f in fns) + 1
    full = np.zeros(max(width, deg + 1), dtype=complex)
    err = 0.0
    ts = deg + 1
    for lam, f in zip(scalars, fns):
        full[: f.degree + 1] += lam * f.coeffs
        err += abs(lam) * math.sqrt(f.tail_bound)
        if f.tail_bound:
            ts = min(ts, f.tail_start)
    tail = (_l2(full[deg + 1:]) + err) ** 2
    terms = None
    if all(f.eigen_terms is not None for f in fns):
        terms = _merge_terms((lam * l2, s) for lam, f in zip(scalars, fns)
                             for l2, s in f.eigen_terms)
    eb = True if all(f.eb for f in fns) else None
    return H2Function(full[: deg + 1], tail, ts, terms, eb)


def multiply(f: H2Function, g: H2Function, degree: int | None = None) -> H2Function:
    """Truncated Cauchy product.

    Two exact polynomials multiply exactly (degrees add) unless ``degree``
    caps the result.  Otherwise the result stops at the smallest truncated
    input degree.  The tail charges the discarded part of the retained
    product plus ``|F|_1 |Tg| + |G|_1 |Tf| + |Tf||Tg|``, where ``|.|_1`` is the
    coefficient l1 norm, a sup-norm bound on the disk.
    """
    deg = _output_degree([f, g], sum)
    if degree is not None:
        deg = min(deg, degree)
    full = np.convolve(f.coeffs[: f.effective_degree() + 1], g.coeffs[: g.effective_degree() + 1])
    out = np.zeros(deg + 1, dtype=complex)
    k = min(full.size, deg + 1)
    out[:k] = full[:k]
    known = _l2(full[deg + 1:])
    tf, tg = math.sqrt(f.tail_bound), math.sqrt(g.tail_bound)
    err = float(np.sum(np.abs(f.coeffs))) * tg + float(np.sum(np.abs(g.coeffs))) * tf + tf * tg
    tail = (known + err) ** 2
    ts = deg + 1
    if err:
        ts = min(ts, f.tail_start if f.tail_bound else ts, g.tail_start if g.tail_bound else ts)
    terms = None
    if f.eigen_terms is not None and g.eigen_terms is not None:
        terms = _merge_terms((l1 * l2, s1 + s2) for l1, s1 in f.eigen_terms
                             for l2, s2 in g.eigen_terms)
    eb = True if (f.eb and g.eb) else None
    return H2Function(out, tail, ts, terms, eb)


def derivative(f: H2Function) -> H2Function:
    """Termwise derivative; coefficient k becomes (k + 1) c_{k+1}.

    The tail is scaled by (N + 1)**2, a heuristic: differentiation is not
    bounded on H^2, so no bound derived from ``tail_bound`` alone is rigorous.
    Closed-form inputs get their tail recomputed from the differentiated
    expansion instead.
    """
    n = f.degree
    if n == 0:
        return H2Function(np.zeros(1, dtype=complex), eigen_terms=() if f.eigen_terms is not None else None,
                          eb=True)
    k = np.arange(1, n + 1)
    c = f.coeffs[1:] * k
    terms = None
    if f.eigen_terms is not None:
        terms = _merge_terms((-lam * s, s - 1) for lam, s in f.eigen_terms if s != 0)
        tail = eigen_tail_bound(terms, n - 1)
        ts = n
    else:
        tail = f.tail_bound * (n + 1) ** 2
        ts = max(f.tail_start - 1, 0)
    return H2Function(c, tail, ts, terms, None)


# -- the (1 - z)**s family -------------------------------------------------------

def binomial_series(s: complex, degree: int) -> np.ndarray:
    """Taylor coefficients of (1 - z)**s by c_{k+1} = c_k (k - s) / (k + 1)."""
    s = complex(s)
    k = np.arange(degree, dtype=complex)
    ratios = (k - s) / (k + 1)
    c = np.empty(degree + 1, dtype=complex)
    c[0] = 1.0
    if degree:
        c[1:] = np.cumprod(ratios)
    return c


def _is_poly_exponent(s: complex) -> bool:
    return s.imag == 0 and s.real >= 0 and float(s.real).is_integer()


def eigen_tail_bound(terms: EigenTerms, degree: int) -> float:
    """Squared-norm bound on the tail beyond ``degree`` of sum(lam (1-z)**s).

    Uses |c_k| <= C k**(-1 - Re s) with C read off the last retained
    coefficient, inflated by exp(2 (|s|**2 + 1) / N) to cover the slow drift
    of |c_k| k**(1 + Re s) toward its limit.
    """
    total = 0.0
    n = max(degree, 1)
    for lam, s in terms:
        if lam == 0 or (_is_poly_exponent(s) and s.real <= degree):
            continue
        sig = s.real
        if 1 + 2 * sig <= 0:
            return math.inf
        cn = abs(binomial_series(s, n)[-1])
        c_const = cn * n ** (1 + sig) * math.exp(2 * (abs(s) ** 2 + 1) / n)
        t = c_const ** 2 * n ** (-1 - 2 * sig) / (1 + 2 * sig)
        total += abs(lam) * math.sqrt(t)
    return total ** 2


def from_eigen_terms(terms: EigenTerms, degree: int) -> H2Function:
    """Coefficient form of a finite expansion sum(lam * (1 - z)**s)."""
    terms = _merge_terms(terms)
    c = np.zeros(degree + 1, dtype=complex)
    for lam, s in terms:
        c += lam * binomial_series(s, degree)
    eb = all(s.real >= 0 for _, s in terms)
    return H2Function(c, eigen_tail_bound(terms, degree), degree + 1, terms, eb)
