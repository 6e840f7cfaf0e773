import math

import numpy as np
import numpy.polynomial.polynomial as P
import pytest
from hypothesis import given, strategies as st

from h2affine import h2core, special
from h2affine.h2core import H2Function
from h2affine.symbols import AffineSymbol, compose

import oracles
from strategies import cplx, poly_coeffs, polys, symbols_a


def e(n, degree=None):
    return h2core.monomial(n, degree)


# -- construction --------------------------------------------------------------

def test_coeff_length_and_tail_invariants():
    f = special.kernel(0.5, 60)
    assert f.coeffs.size == 61 and f.degree == 60
    assert f.tail_bound >= 0
    p = h2core.polynomial([1, 2, 3])
    assert p.is_exact and p.tail_bound == 0.0


def test_rejects_bad_inputs():
    with pytest.raises(ValueError):
        H2Function([1.0, np.nan])
    with pytest.raises(ValueError):
        H2Function([1.0], tail_bound=-1.0)


def test_norm_sq_underestimate_bounded_by_tail():
    f = special.kernel(0.5, 60)
    true = 4.0 / 3.0
    v = h2core.norm_sq(f)
    assert v <= true <= v + f.tail_bound * (1 + 1e-12) + 1e-15


# -- evaluation ----------------------------------------------------------------

def test_eval_monomial():
    assert h2core.evaluate(e(1), 0.3) == pytest.approx(0.3, abs=0)


def test_eval_kernel_geometric():
    assert abs(h2core.evaluate(special.kernel(0.5, 60), 0.5) - 4 / 3) <= 1e-12


def test_eval_f1():
    assert abs(h2core.evaluate(special.eigenfunction(1, 16), 0.2) - 0.8) <= 1e-15


def test_eval_rejects_outside_disk():
    with pytest.raises(ValueError):
        h2core.evaluate(e(1), 1.0)


def test_eval_error_covers_kernel_truncation():
    f = special.kernel(0.9, 40)
    z = np.array([0.5, 0.8j, -0.85])
    true = 1.0 / (1.0 - 0.9 * z)
    got = h2core.evaluate(f, z)
    assert np.all(np.abs(got - true) <= h2core.eval_error(f, z))


def test_closed_form_evaluation_matches_principal_branch():
    s = 0.5 + 0.5j
    f = special.eigenfunction(s, 64)
    z = np.array([0.3, -0.9, 0.99 + 0.0j, 0.2j])
    v, err = h2core.evaluate_with_bound(f, z)
    assert np.allclose(v, np.exp(s * np.log(1 - z)), rtol=1e-14, atol=0)
    assert np.all(err >= 0)


# -- norms and pairings --------------------------------------------------------

@pytest.mark.parametrize("n", [0, 1, 5, 100])
def test_norm_of_monomials(n):
    assert h2core.norm_sq(e(n)) == 1.0


def test_norm_kernel():
    assert abs(h2core.norm_sq(special.kernel(0.5, 60)) - 4 / 3) <= 1e-12


def test_norm_f_t_against_radial_quadrature():
    a = 0.5
    t = special.period_exponent(AffineSymbol(a))
    f = special.eigenfunction(t, 4096)
    lo, hi = h2core.norm_sq_interval(f)
    assert lo <= oracles.ft_norm_sq(a) <= hi
    # integral mean of |f_t|^2 on |z| = r, with f_t evaluated pointwise by its closed form
    r = 0.999
    m = 1 << 15
    z = r * np.exp(2j * np.pi * np.arange(m) / m)
    mean = float(np.mean(np.abs(np.exp(t * np.log(1 - z))) ** 2))
    weighted = float(np.sum(np.abs(f.coeffs) ** 2 * r ** (2 * np.arange(f.coeffs.size))))
    tail = f.tail_bound * r ** (2 * (f.degree + 1))
    assert weighted * (1 - 1e-12) <= mean <= (weighted + tail) * (1 + 1e-12)
    assert mean <= hi


def test_norm_interval_contains_exact_value():
    for s in (0.5, 1 + 1j, 0.25j):
        f = special.eigenfunction(s, 2048)
        lo, hi = h2core.norm_sq_interval(f)
        assert lo <= oracles.eigen_norm_sq(s) <= hi


def test_inner_orthogonal_monomials():
    assert h2core.inner(e(1), e(2)) == 0


def test_inner_reproducing_example():
    assert abs(h2core.inner(h2core.polynomial([1, 1]), special.kernel(0.5, 60)) - 1.5) <= 1e-15


@given(poly_coeffs(12), st.sampled_from([0.3, 0.5, 0.7]), st.integers(1, 4), st.integers(0, 12))
def test_pairing_with_monomial_is_scaled_derivative(c, a, n, m):
    f = h2core.polynomial(c)
    cf = compose(f, AffineSymbol(a), n)
    al = a ** n
    want = al ** m * P.polyval(1 - al, P.polyder(c, m)) / math.factorial(m) if m < c.size else 0.0
    got = h2core.inner(cf, e(m))
    assert abs(got - want) <= 1e-12 * max(1.0, np.abs(c).sum() * 2 ** m)


@given(polys(20), polys(20))
def test_inner_conjugate_symmetric(f, g):
    assert abs(h2core.inner(f, g) - np.conj(h2core.inner(g, f))) <= 1e-13 * (1 + h2core.norm(f) * h2core.norm(g))


# -- derivative ----------------------------------------------------------------

def test_derivative_examples():
    d = h2core.derivative(e(2))
    assert np.array_equal(d.coeffs[:2], [0, 2])
    assert not np.any(h2core.derivative(h2core.constant(5.0)).coeffs)


def test_derivative_of_eigenfunction():
    f2 = special.eigenfunction(2, 64)
    d = h2core.derivative(f2)
    want = -2 * np.array(oracles.binomial_coeffs(1, d.degree))
    assert np.max(np.abs(d.coeffs - want)) <= 1e-14


@given(poly_coeffs(40, 1))
def test_derivative_inverts_antiderivative(c):
    # antiderivative with zero constant term, defined here only
    anti = np.concatenate([[0], c / np.arange(1, c.size + 1)])
    d = h2core.derivative(h2core.polynomial(anti))
    assert np.allclose(d.coeffs, c, rtol=1e-14, atol=1e-15)


def test_derivative_tail_scaled():
    f = special.kernel(0.5, 30)
    g = H2Function(f.coeffs, tail_bound=1e-6)
    assert h2core.derivative(g).tail_bound == pytest.approx(1e-6 * 31 ** 2)


# -- multiply ------------------------------------------------------------------

def test_multiply_monomials():
    p = h2core.multiply(e(1), e(2))
    assert np.array_equal(p.coeffs, [0, 0, 0, 1])


def test_multiply_square_roots():
    h = special.eigenfunction(0.5, 512)
    p = h2core.multiply(h, h)
    want = np.zeros(513)
    want[:2] = [1, -1]
    assert np.max(np.abs(p.coeffs - want)) <= 1e-12


def test_multiply_telescopes():
    n = 50
    geo = h2core.polynomial(np.ones(n + 1))
    p = h2core.multiply(special.eigenfunction(1, n), geo, degree=n)
    want = np.zeros(n + 1)
    want[0] = 1
    assert np.max(np.abs(p.coeffs - want)) <= 1e-15
    # the discarded -z**(n+1) is charged to the tail
    assert p.tail_bound == pytest.approx(1.0)


def test_multiply_tail_bound_contains_truth():
    f = special.kernel(0.6, 30)
    g = special.kernel(-0.5j, 30)
    p = h2core.multiply(f, g)
    exact = h2core.multiply(special.kernel(0.6, 400), special.kernel(-0.5j, 400), degree=400).coeffs
    diff = np.sum(np.abs(p.coeffs - exact[:31]) ** 2) + np.sum(np.abs(exact[31:]) ** 2)
    assert diff <= p.tail_bound


@given(polys(16), polys(16))
def test_multiply_commutative(f, g):
    a, b = h2core.multiply(f, g), h2core.multiply(g, f)
    scale_ = max(1.0, np.abs(a.coeffs).max())
    assert np.max(np.abs(a.coeffs - b.coeffs)) <= 1e-13 * scale_


@given(polys(10), polys(10), polys(10))
def test_multiply_associative(f, g, h):
    a = h2core.multiply(h2core.multiply(f, g), h)
    b = h2core.multiply(f, h2core.multiply(g, h))
    scale_ = max(1.0, np.abs(f.coeffs).sum() * np.abs(g.coeffs).sum() * np.abs(h.coeffs).sum())
    n = max(a.coeffs.size, b.coeffs.size)
    ca, cb = np.zeros(n, complex), np.zeros(n, complex)
    ca[: a.coeffs.size], cb[: b.coeffs.size] = a.coeffs, b.coeffs
    assert np.max(np.abs(ca - cb)) <= 1e-13 * scale_


# -- linear_combine ------------------------------------------------------------

def test_linear_combine_cancels():
    f = special.kernel(0.3, 20)
    z = h2core.linear_combine([1, -1], [f, f])
    assert not np.any(z.coeffs)


def test_linear_combine_halves():
    z = h2core.linear_combine([0.5, 0.5], [e(0), e(0)])
    assert np.array_equal(z.coeffs, [1])


def test_linear_combine_unit_plus_f_t():
    sym = AffineSymbol(0.5)
    t = special.period_exponent(sym)
    f = h2core.linear_combine([1, 1], [e(0), special.eigenfunction(t, 256)])
    assert f.eigen_terms is not None
    assert dict((s, lam) for lam, s in f.eigen_terms) == {0j: 1, complex(t): 1}
    w = 1 - math.sqrt(2)
    assert abs(h2core.evaluate_with_bound(f, w)[0]) <= 1e-12


def test_linear_combine_length_mismatch():
    with pytest.raises(ValueError):
        h2core.linear_combine([1.0], [e(0), e(1)])


# -- properties ----------------------------------------------------------------

@given(poly_coeffs(64))
def test_parseval_against_trapezoid(c):
    n = c.size - 1
    m = 4 * max(n, 1)
    theta = 2 * np.pi * np.arange(m) / m
    vals = P.polyval(np.exp(1j * theta), c)
    mean = float(np.mean(np.abs(vals) ** 2))
    v = h2core.norm_sq(h2core.polynomial(c))
    assert abs(v - mean) <= 1e-10 * max(v, 1e-300) + 1e-300


@given(poly_coeffs(24), st.sampled_from([0.3, 0.5j, -0.7]))
def test_reproducing_property(c, alpha):
    p = h2core.polynomial(c)
    k = special.kernel(alpha, p.degree)
    assert abs(h2core.inner(p, k) - h2core.evaluate(p, alpha)) <= 1e-12 * max(1.0, np.abs(c).sum())


def test_scale_and_operators():
    f = h2core.polynomial([1, 2])
    g = 2 * f - f
    assert np.array_equal(g.coeffs, f.coeffs)
    assert np.array_equal((f / 2).coeffs, [0.5, 1])


def test_pad_and_truncate():
    f = special.kernel(0.5, 10)
    g = h2core.truncate(f, 4)
    assert g.degree == 4
    assert g.tail_bound >= f.tail_bound
    assert h2core.pad(h2core.polynomial([1, 2]), 5).degree == 5
