import math

import numpy as np
import pytest
from hypothesis import assume, given, strategies as st

from h2affine import h2core, integrals, special
from h2affine.symbols import AffineSymbol, compose, phi_point, sup_on_Dn

import oracles
from strategies import poly_coeffs, random_poly, symbols_a

SYM = AffineSymbol(0.5)


def test_log_weight_moments():
    assert integrals.log_weight_moment(0) == pytest.approx(oracles.radial_log_moment(0), rel=1e-14)
    assert integrals.log_weight_moment(1) == pytest.approx(oracles.radial_log_moment(1), rel=1e-14)
    assert integrals.log_weight_moment(0) == 0.5 and integrals.log_weight_moment(1) == 0.125
    j = np.arange(10, 400)
    m = integrals.log_weight_moment(j)
    assert np.all(np.diff(m) < 0)
    assert np.allclose(m * 2 * j ** 2, 1, rtol=0.2)
    with pytest.raises(ValueError):
        integrals.log_weight_moment(-1)


def test_littlewood_paley_examples():
    assert integrals.littlewood_paley_norm_sq(h2core.monomial(1)) == 1.0
    k = special.kernel(0.5, 60)
    assert abs(integrals.littlewood_paley_norm_sq(k) - 4 / 3) <= 1e-10


@given(poly_coeffs(64))
def test_littlewood_paley_collapses_to_norm(c):
    f = h2core.polynomial(c)
    v = h2core.norm_sq(f)
    assert abs(integrals.littlewood_paley_norm_sq(f) - v) <= 1e-10 * v + 1e-300


def test_counting_function_values():
    sym = SYM
    for n in (1, 2, 4):
        c, r = 1 - 0.5 ** n, 0.5 ** n
        # outside D_n
        assert integrals.nevanlinna_affine(sym, n, c + 1.01 * r) == 0.0
        assert integrals.nevanlinna_affine(sym, n, -0.5) == 0.0
        # unique preimage r' gives log(1 / r')
        for rp in (0.1, 0.5, 0.9):
            w = phi_point(sym, n, rp * np.exp(0.7j))
            assert integrals.nevanlinna_affine(sym, n, w) == pytest.approx(math.log(1 / rp), rel=1e-12)
        with pytest.raises(ValueError):
            integrals.nevanlinna_affine(sym, n, c)
        vals = [integrals.nevanlinna_affine(sym, n, c + r * 10.0 ** -k) for k in range(1, 8)]
        assert np.all(np.diff(vals) > 0) and vals[-1] > 15


def test_stanton_constant():
    f = h2core.constant(2.0 - 1j)
    assert integrals.stanton_norm_sq(f, SYM, 3) == pytest.approx(5.0, rel=1e-15)


def test_stanton_monomial_square():
    f = h2core.monomial(2)
    got = integrals.stanton_norm_sq(f, SYM, 1)
    want = h2core.norm_sq(compose(f, SYM, 1))
    assert abs(got - want) <= 1e-12 * want


@pytest.mark.parametrize("a", [0.3, 0.5, 0.7])
@pytest.mark.parametrize("n", [1, 2, 5])
def test_stanton_f1_closed_form(a, n):
    sym = AffineSymbol(a)
    f = special.eigenfunction(1, 8)
    # C^n f_1 = a**n f_1 has squared norm 2 a**(2n)
    assert integrals.stanton_norm_sq(f, sym, n) == pytest.approx(2 * a ** (2 * n), rel=1e-13)


@given(poly_coeffs(32), symbols_a, st.integers(1, 5))
def test_stanton_agreement(c, a, n):
    sym = AffineSymbol(a)
    f = h2core.polynomial(c)
    want = h2core.norm_sq(compose(f, sym, n))
    got = integrals.stanton_norm_sq(f, sym, n)
    assert abs(got - want) <= 1e-8 * want + 1e-300


def test_counting_integral_examples():
    for n in (1, 3, 6):
        v = integrals.counting_integral(h2core.monomial(1), SYM, n)
        assert v == pytest.approx(0.25 ** n * 0.5, rel=1e-15)


@pytest.mark.parametrize("name", ["2+z", "2+z+z^2", "kernel"])
def test_counting_integral_ratio_window(name):
    a = 0.5
    sym = AffineSymbol(a)
    g = {"2+z": h2core.polynomial([2, 1]), "2+z+z^2": h2core.polynomial([2, 1, 1]),
         "kernel": special.kernel(0.5, 1024)}[name]
    vals = np.array([integrals.counting_integral(g, sym, n) for n in range(5, 17)])
    r = vals[1:] / vals[:-1]
    assert np.all((r >= 0.9 * a * a) & (r <= 1.1 * a * a))
    dg = h2core.derivative(g)
    s, e = sup_on_Dn(dg, sym, 5, samples=1024)
    # D_n shrinks with n, so the sup over D_5 bounds g' on every later disk
    bounds = [integrals.counting_integral_bound((s + e) ** 2, sym, n) for n in range(5, 17)]
    assert np.all(vals <= np.array(bounds) * (1 + 1e-3))


@given(poly_coeffs(12, 1), symbols_a)
def test_counting_integral_ratio_once_derivative_is_nearly_constant(c, a):
    # |g'(w) / g'(1) - 1| <= |w - 1| S2 / |g'(1)| with S2 = sum k (k - 1) |c_k|, and
    # |w - 1| <= 2 a**n on D_n; once that is below 0.02 the ratio is within 10% of a**2
    k = np.arange(c.size)
    d1 = abs(np.sum(k * c))
    assume(d1 > 1e-3)
    s2 = float(np.sum(k * (k - 1) * np.abs(c)))
    n0 = 1
    while 2 * a ** n0 * s2 / d1 > 0.02:
        n0 += 1
    assume(n0 <= 60)
    sym = AffineSymbol(a)
    g = h2core.polynomial(c)
    vals = np.array([integrals.counting_integral(g, sym, n) for n in range(n0, n0 + 8)])
    r = vals[1:] / vals[:-1] / (a * a)
    assert np.all((r >= 0.9) & (r <= 1.1))


def test_counting_integral_f_t_has_no_decay():
    t = special.period_exponent(SYM)
    f = special.eigenfunction(t, 4096)
    vals = np.array([integrals.counting_integral(f, SYM, n) for n in range(1, 8)])
    assert (vals.max() - vals.min()) / vals.max() <= 1e-6
    # eigen relation plus |f_t(1 - a**n)| = 1: value = (||f_t||**2 - 1) / 2
    want = (oracles.ft_norm_sq(0.5) - 1) / 2
    lo, hi = h2core.norm_sq_interval(f)
    assert (lo - 1) / 2 * (1 - 1e-9) <= want <= (hi - 1) / 2 * (1 + 1e-9)
    assert vals[0] <= want


def test_quadrature_mass_and_log_weight():
    v, err = integrals.quadrature_disk_oracle(lambda z: np.ones(z.shape))
    assert abs(v - 1) <= 1e-13
    v, err = integrals.quadrature_disk_oracle(lambda z: np.log(1 / np.abs(z)))
    assert abs(v - 0.5) <= 1e-8
    v, err = integrals.quadrature_disk_oracle(lambda z: np.full(z.shape, np.nan))
    assert math.isnan(v) and math.isnan(err)


@pytest.mark.parametrize("n", [1, 2, 3])
def test_quadrature_matches_moment_formula(n):
    f = h2core.monomial(2)
    quad, qerr = integrals.stanton_norm_sq_quadrature(f, SYM, n)
    assert abs(quad - integrals.stanton_norm_sq(f, SYM, n)) <= 1e-6
    g = h2core.derivative(f)

    def integrand(w):
        inside = np.abs(w - (1 - 0.5 ** n)) < 0.5 ** n
        vals = np.zeros(w.shape)
        vals[inside] = (np.abs(h2core.evaluate(g, w[inside])) ** 2
                        * integrals.nevanlinna_affine(SYM, n, w[inside]))
        return vals
    # full-disk grid: discontinuous cutoff, so only a coarse agreement is expected
    v, _ = integrals.quadrature_disk_oracle(integrand, 200, 400)
    moment = integrals.counting_integral(f, SYM, n)
    assert abs(v - moment) <= 0.05 * moment


def test_quadrature_oracle_on_random_polynomials():
    rng = np.random.default_rng(5)
    for a in (0.3, 0.5, 0.7):
        sym = AffineSymbol(a)
        for n in (1, 3, 5):
            f = random_poly(rng, 16)
            q, _ = integrals.stanton_norm_sq_quadrature(f, sym, n)
            want = h2core.norm_sq(compose(f, sym, n))
            assert abs(q - want) <= 1e-6 * want
