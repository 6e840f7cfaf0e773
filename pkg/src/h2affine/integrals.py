"""Area integrals over the disk with the logarithmic weight.

Area measure is normalized, dA = dx dy / pi, so the disk has mass 1 and
    integral of |z|**(2j) log(1/|z|) dA = 1 / (2 (j + 1)**2).
The norm identity ||f o phi||**2 = 2 int |f'|**2 N_phi dA + |f(phi(0))|**2 is
evaluated through these moments after the change of variables w = phi(z);
:func:`quadrature_disk_oracle` integrates pointwise as an independent check.
"""
from __future__ import annotations

from functools import lru_cache
from typing import Callable

import numpy as np

from . import h2core
from .h2core import H2Function
from .symbols import AffineSymbol, compose


def log_weight_moment(j):
    """1 / (2 (j + 1)**2); accepts scalars or arrays of nonnegative integers."""
    j = np.asarray(j)
    if np.any(j < 0):
        raise ValueError("moment index must be nonnegative")
    out = 1.0 / (2.0 * (j + 1.0) ** 2)
    return float(out) if out.ndim == 0 else out


def weighted_norm_sq(h: H2Function) -> float:
    """integral of |h|**2 log(1/|z|) dA, from the coefficients."""
    j = np.arange(h.coeffs.size)
    return float(np.sum(np.abs(h.coeffs) ** 2 * log_weight_moment(j)))


def littlewood_paley_norm_sq(f: H2Function) -> float:
    """|f(0)|**2 + 2 int |f'|**2 log(1/|z|) dA.  Equals norm_sq(f) exactly."""
    k = np.arange(1, f.coeffs.size)
    lp = 2.0 * np.sum(k ** 2 * np.abs(f.coeffs[1:]) ** 2 * log_weight_moment(k - 1))
    return float(abs(f.coeffs[0]) ** 2 + lp)


def nevanlinna_affine(sym: AffineSymbol, n: int, w):
    """Counting function of the univalent map phi_{a**n}.

    log(a**n / |w - 1 + a**n|) inside D_n and 0 outside.  The image of 0 is
    excluded, where the value is +inf.
    """
    al = sym.alpha(n)
    w = np.asarray(w, dtype=complex)
    d = np.abs(w - (1.0 - al))
    if np.any(d == 0.0):
        raise ValueError("counting function is undefined at phi(0) = 1 - a**n")
    with np.errstate(divide="ignore"):
        out = np.where(d < al, np.log(al / np.where(d < al, d, al)), 0.0)
    return float(out) if out.ndim == 0 else out


def stanton_norm_sq(f: H2Function, sym: AffineSymbol, n: int) -> float:
    """||f o phi_{a**n}||**2 through the counting-function identity.

    2 a**(2n) sum_j |h_j|**2 / (2 (j+1)**2) + |f(1 - a**n)|**2 with
    h = f' o phi_{a**n}.
    """
    al = sym.alpha(n)
    h = compose(h2core.derivative(f), sym, n)
    v, _ = h2core.evaluate_with_bound(f, complex(1.0 - al))
    return 2.0 * al * al * weighted_norm_sq(h) + abs(v) ** 2


def counting_integral(g: H2Function, sym: AffineSymbol, n: int) -> float:
    """int |g'(w)|**2 N_{phi_{a**n}}(w) dA(w) via the change of variables."""
    al = sym.alpha(n)
    h = compose(h2core.derivative(g), sym, n)
    return al * al * weighted_norm_sq(h)


@lru_cache(maxsize=32)
def _gauss_legendre(n: int) -> tuple[np.ndarray, np.ndarray]:
    x, w = np.polynomial.legendre.leggauss(n)
    x.setflags(write=False)
    w.setflags(write=False)
    return x, w


def quadrature_disk_oracle(integrand: Callable[[np.ndarray], np.ndarray], radial_nodes: int = 64,
                           angular_nodes: int = 128, center: complex = 0.0,
                           radius: float = 1.0) -> tuple[float, float]:
    """Polar-grid quadrature of ``integrand`` dA over a disk.

    Radius rho = radius * u**2 with Gauss-Legendre in u, which absorbs
    logarithmic singularities at the center; uniform trapezoid in angle.
    Returns the value at doubled node counts and the change from the base
    grid as an error estimate.  NaN in the integrand propagates to both.
    """
    def rule(nr, na):
        x, wx = _gauss_legendre(nr)
        u = 0.5 * (x + 1.0)
        wu = 0.5 * wx
        theta = 2 * np.pi * np.arange(na) / na
        z = center + radius * (u[:, None] ** 2) * np.exp(1j * theta)[None, :]
        vals = np.asarray(integrand(z), dtype=float)
        ang = vals.sum(axis=1) * (2 * np.pi / na)
        # d(area)/pi = rho d(rho) d(theta) / pi, rho = R u^2
        return float(np.sum(wu * 2.0 * radius ** 2 * u ** 3 * ang) / np.pi)

    coarse = rule(radial_nodes, angular_nodes)
    fine = rule(2 * radial_nodes, 2 * angular_nodes)
    return fine, abs(fine - coarse)


def stanton_norm_sq_quadrature(f: H2Function, sym: AffineSymbol, n: int,
                               radial_nodes: int = 48, angular_nodes: int = 0) -> tuple[float, float]:
    """Same quantity as :func:`stanton_norm_sq` by pointwise quadrature over D_n.

    Evaluates |f'(w)|**2 N(w) on a polar grid centered at 1 - a**n; no
    composition coefficients or moments are used.
    """
    al = sym.alpha(n)
    c = 1.0 - al
    df = h2core.derivative(f)
    if angular_nodes <= 0:
        angular_nodes = max(64, 2 * (df.effective_degree() + 2))

    def integrand(w):
        d = np.abs(w - c)
        vals = np.abs(h2core.evaluate_with_bound(df, w)[0]) ** 2
        return vals * np.log(al / np.maximum(d, 1e-300))

    val, err = quadrature_disk_oracle(integrand, radial_nodes, angular_nodes, c, al)
    f0, _ = h2core.evaluate_with_bound(f, complex(c))
    return 2.0 * val + abs(f0) ** 2, 2.0 * err


def counting_integral_bound(sup_dg_sq: float, sym: AffineSymbol, n: int) -> float:
    """a**(2n) K with K = sup |g'|**2 * int log(1/|z|) dA, once g' is bounded on D_n."""
    return sym.alpha(n) ** 2 * sup_dg_sq * log_weight_moment(0)


__all__ = [
    "log_weight_moment", "weighted_norm_sq", "littlewood_paley_norm_sq", "nevanlinna_affine",
    "stanton_norm_sq", "counting_integral", "quadrature_disk_oracle", "stanton_norm_sq_quadrature",
    "counting_integral_bound",
]
