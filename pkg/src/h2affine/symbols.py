"""The affine self-maps phi_a(z) = a z + 1 - a and their composition operators."""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.special import gammaln

from .h2core import H2Function, evaluate_with_bound, from_eigen_terms

# boundary samples of D_n are pulled to this fraction of its radius
BOUNDARY_PULL = 1.0 - 1e-9
# above this degree the double-double shift costs more than it buys
COMPENSATED_MAX_DEGREE = 128


@dataclass(frozen=True)
class AffineSymbol:
    a: float

    def __post_init__(self):
        a = float(self.a)
        if not 0.0 < a < 1.0:
            raise ValueError(f"symbol parameter must lie in (0, 1), got {a}")
        object.__setattr__(self, "a", a)

    def alpha(self, n: int) -> float:
        """Parameter of the n-fold iterate: phi_a composed n times is phi_{a**n}."""
        if n < 0:
            raise ValueError("iterate count must be nonnegative")
        return self.a ** n


def phi_point(sym: AffineSymbol, n: int, z):
    if n < 1:
        raise ValueError("n must be >= 1")
    al = sym.alpha(n)
    return al * np.asarray(z, dtype=complex) + (1.0 - al)


def disk_Dn(sym: AffineSymbol, n: int) -> tuple[complex, float]:
    """Center and radius of D_n = phi_{a**n}(D)."""
    if n < 1:
        raise ValueError("n must be >= 1")
    al = sym.alpha(n)
    return complex(1.0 - al), al


def taylor_shift(coeffs: np.ndarray, alpha: float) -> np.ndarray:
    """Coefficients of p(alpha z + 1 - alpha) by Horner's rule.

    Each step forms ``r <- (1 - alpha) r + alpha z r``, a convex combination
    of positive weights, so no factorials appear and nothing cancels beyond
    what the input coefficients themselves carry.
    """
    beta = 1.0 - alpha
    n = coeffs.size - 1
    r = np.zeros(n + 1, dtype=complex)
    r[0] = coeffs[n]
    for k in range(n - 1, -1, -1):
        width = n - k
        # r[0:width] holds the current partial polynomial of degree width-1
        r[width] = alpha * r[width - 1]
        r[1:width] = beta * r[1:width] + alpha * r[: width - 1]
        r[0] = beta * r[0] + coeffs[k]
    return r


_SPLITTER = 134217729.0  # 2**27 + 1


def _two_sum(x, y):
    s = x + y
    bp = s - x
    return s, (x - (s - bp)) + (y - bp)


def _split(x):
    c = _SPLITTER * x
    hi = c - (c - x)
    return hi, x - hi


def _two_prod(x, y):
    p = x * y
    xh, xl = _split(x)
    yh, yl = _split(y)
    return p, ((xh * yh - p) + xh * yl + xl * yh) + xl * yl


def _shift_real_compensated(c: np.ndarray, alpha: float) -> np.ndarray:
    # double-double Horner over the last axis: (hi, lo) pairs, beta = 1 - alpha kept exactly
    beta, beta_lo = _two_sum(1.0, -alpha)
    n = c.shape[-1] - 1
    hi = np.zeros(c.shape)
    lo = np.zeros(c.shape)
    hi[..., 0] = c[..., n]
    for k in range(n - 1, -1, -1):
        w = n - k
        ph, pl = _two_prod(alpha, hi[..., w - 1])
        hi[..., w], lo[..., w] = ph, pl + alpha * lo[..., w - 1]
        b1, e1 = _two_prod(beta, hi[..., :w])
        a1, e2 = _two_prod(alpha, hi[..., : w - 1])
        # position 0 takes the new coefficient instead of the shifted neighbour
        a1 = np.concatenate([c[..., k : k + 1], a1], axis=-1)
        e2 = np.concatenate([np.zeros(c.shape[:-1] + (1,)), e2], axis=-1)
        s1, e3 = _two_sum(b1, a1)
        lo_prev = np.concatenate([np.zeros(c.shape[:-1] + (1,)), lo[..., : w - 1]], axis=-1)
        lo[..., :w] = e1 + e2 + e3 + beta * lo[..., :w] + alpha * lo_prev + beta_lo * hi[..., :w]
        hi[..., :w] = s1
    return hi + lo


def taylor_shift_compensated(coeffs: np.ndarray, alpha: float) -> np.ndarray:
    """Taylor shift carried in double-double arithmetic.

    Same recurrence as :func:`taylor_shift` with error-free products and sums,
    so results are as accurate as a float64 rounding of a computation done
    to roughly twice the working precision.  Matters when p has a
    high-order zero near 1 and the shifted coefficients are tiny.
    """
    coeffs = np.asarray(coeffs, dtype=complex)
    parts = np.stack([coeffs.real, coeffs.imag])
    out = _shift_real_compensated(parts, alpha)
    return out[0] + 1j * out[1]


def _shift_exact(c: np.ndarray, alpha: float) -> np.ndarray:
    """Plain shift, redone in double-double where its a priori bound is loose.

    All Horner weights are positive, so shifting |c| bounds the rounding error
    of every output coefficient by (2n + 2) eps times that coefficient of the
    shifted |c|.  The switch is normwise: H^2 quantities only need the
    coefficient vector to be accurate in l2.
    """
    r = taylor_shift(c, alpha)
    if c.size - 1 > COMPENSATED_MAX_DEGREE:
        return r
    b = taylor_shift(np.abs(c).astype(complex), alpha).real * (2 * c.size) * np.finfo(float).eps
    if np.linalg.norm(b) <= 1e-13 * np.linalg.norm(r):
        return r
    return taylor_shift_compensated(c, alpha)


def composition_norm_sq_bound(alpha: float) -> float:
    """Upper bound (2 - alpha) / alpha on the squared norm of C_{phi_alpha}."""
    return (2.0 - alpha) / alpha


def compose(f: H2Function, sym: AffineSymbol, n: int, closed_form: bool = True) -> H2Function:
    """f o phi_{a**n} in coefficient form.

    With ``closed_form`` and an attached expansion ``sum(lam (1 - z)**s)`` the
    exact eigen action ``lam -> lam a**(n s)`` is used; otherwise the retained
    polynomial is Taylor-shifted and the tail is scaled by the operator-norm
    bound, spread over all coefficients.
    """
    if n < 0:
        raise ValueError("n must be >= 0")
    if n == 0:
        return f
    al = sym.alpha(n)
    if closed_form and f.eigen_terms is not None:
        la = math.log(sym.a)
        terms = tuple((lam * np.exp(n * s * la), s) for lam, s in f.eigen_terms)
        return from_eigen_terms(terms, f.degree)
    if f.tail_bound == 0.0:
        # exact polynomial: shift only the nonzero part; low degrees in extended precision
        d = f.effective_degree()
        c = np.zeros(f.degree + 1, dtype=complex)
        c[: d + 1] = _shift_exact(f.coeffs[: d + 1], al)
        return H2Function(c, eb=f.eb)
    c = taylor_shift(f.coeffs, al)
    tail = f.tail_bound * composition_norm_sq_bound(al)
    return H2Function(c, tail, 0, None, f.eb)


def leakage_factors(sym: AffineSymbol, n: int, degree: int, band: int) -> np.ndarray:
    """sqrt(sum_{k > degree} B(k, m)**2) for m = 0..band.

    ``B(k, m) = C(k, m) alpha**m (1 - alpha)**(k - m)`` is the weight a tail
    coefficient ``c_k`` contributes to output coefficient ``m``; by
    Cauchy-Schwarz the truncation error of output coefficient m is at most
    ``sqrt(tail_bound)`` times this factor.
    """
    al = sym.alpha(n)
    m = np.arange(band + 1)[:, None]
    peak = (band + 1) / al
    kmax = int(max(degree + 64, peak + 40 * math.sqrt(peak) + 200))
    if kmax - degree > 400_000:
        return np.full(band + 1, np.inf)
    out = np.zeros(band + 1)
    lo = degree + 1
    step = 4096
    while lo <= kmax:
        k = np.arange(lo, min(lo + step, kmax + 1))[None, :]
        logb = (gammaln(k + 1) - gammaln(m + 1) - gammaln(k - m + 1)
                + m * math.log(al) + (k - m) * math.log1p(-al))
        out += np.exp(2 * logb).sum(axis=1)
        lo += step
    return np.sqrt(out)


def _boundary_points(sym: AffineSymbol, n: int, samples: int) -> np.ndarray:
    c, r = disk_Dn(sym, n)
    theta = 2 * np.pi * np.arange(samples) / samples
    # keep a few ulps of room near 1, where c + r rounds onto the circle
    rr = min(BOUNDARY_PULL * r, r - 8 * np.finfo(float).eps)
    z = c + rr * np.exp(1j * theta)
    big = np.abs(z) >= 1.0
    z[big] = z[big] / np.abs(z[big]) * (1.0 - 2 * np.finfo(float).eps)
    return z


def sup_on_Dn(f: H2Function, sym: AffineSymbol, n: int, samples: int = 256) -> tuple[float, float]:
    """Sampled maximum of |f| on the (slightly shrunk) boundary circle of D_n.

    By maximum modulus this estimates the sup over D_n from below; the second
    value is the evaluation error bound at the maximizing sample.
    """
    if samples < 1:
        raise ValueError("samples must be positive")
    z = _boundary_points(sym, n, samples)
    v, e = evaluate_with_bound(f, z)
    i = int(np.argmax(np.abs(v)))
    return float(abs(v[i])), float(e[i])


@dataclass(frozen=True)
class EBDiagnostic:
    ns: tuple[int, ...]
    sups: tuple[float, ...]
    errors: tuple[float, ...]
    bounded: bool
    analytic_flag: bool | None

    @property
    def note(self) -> str:
        return "sampling heuristic; boundedness on D_n is not certified by finitely many samples"


def eb_diagnostic(f: H2Function, sym: AffineSymbol, ns=range(1, 11), samples: int = 256,
                  rtol: float = 1e-6) -> EBDiagnostic:
    """Track sampled sups over nested disks.

    The true sup over D_n can only shrink with n, so growth of the sampled
    sups beyond ``rtol`` marks the function as not eventually bounded.  A
    bounded verdict may be a false negative for mild singularities.
    """
    ns = tuple(ns)
    vals = [sup_on_Dn(f, sym, n, samples) for n in ns]
    sups = tuple(v for v, _ in vals)
    errs = tuple(e for _, e in vals)
    finite = all(math.isfinite(s) for s in sups)
    bounded = finite and max(sups) <= sups[0] * (1 + rtol) + max(errs)
    return EBDiagnostic(ns, sups, errs, bounded, f.eb)


__all__ = [
    "AffineSymbol", "phi_point", "disk_Dn", "compose", "taylor_shift", "taylor_shift_compensated", "leakage_factors",
    "composition_norm_sq_bound", "sup_on_Dn", "eb_diagnostic", "EBDiagnostic",
]
