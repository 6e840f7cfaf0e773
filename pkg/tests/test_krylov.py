import math

import numpy as np
import pytest
from hypothesis import given, strategies as st

from h2affine import h2core, integrals, krylov, special
from h2affine.symbols import AffineSymbol, compose

import oracles
from strategies import random_poly

SYM = AffineSymbol(0.5)
T = special.period_exponent(SYM)


def _check_invariants(an):
    g = an.gram
    assert np.max(np.abs(g - g.conj().T)) <= 1e-14 * max(1.0, np.abs(g).max())
    assert np.all(np.linalg.eigvalsh(g) >= -1e-12 * max(1.0, np.abs(g).max()))
    q = an.basis
    assert np.max(np.abs(q.conj().T @ q - np.eye(q.shape[1]))) <= 1e-12
    assert an.rank <= min(an.m + 1, an.degree + 1)


def test_orbit_of_eigenfunction_is_a_line():
    f = special.eigenfunction(1.5, 256)
    an = krylov.orbit(f, SYM, 8)
    _check_invariants(an)
    for n, u in enumerate(an.orbit):
        assert np.allclose(u.coeffs, 0.5 ** (1.5 * n) * f.coeffs, atol=1e-15)
    assert an.rank == 1
    assert krylov.numerical_rank(krylov.orbit(special.eigenfunction(1, 64), SYM, 10), 1e-10) == 1


def test_orbit_of_z_spans_two_dimensions():
    an = krylov.orbit(h2core.monomial(1), SYM, 10)
    _check_invariants(an)
    assert an.rank == 2
    assert krylov.numerical_rank(krylov.orbit(h2core.monomial(1), SYM, 1)) == 2


@pytest.mark.parametrize("d", [0, 1, 3, 6])
def test_polynomial_orbit_rank_at_most_degree_plus_one(d):
    rng = np.random.default_rng(d)
    p = random_poly(rng, d)
    for m in (d, d + 5, 20):
        an = krylov.orbit(p, SYM, m)
        _check_invariants(an)
        assert an.rank <= d + 1


def test_kernel_orbit_rank_agrees_with_high_precision_oracle():
    g = oracles.kernel_orbit_gram(0.5, 0.5, 5)
    an = krylov.orbit(special.kernel(0.5, 1024), SYM, 5)
    ev_ref = np.array(oracles.gram_eigenvalues(g))
    ev = krylov.gram_spectrum(an)
    # leading eigenvalues agree with the 60-digit oracle; the smallest is near rounding level
    assert np.allclose(ev[:4], ev_ref[:4], rtol=1e-8)
    assert krylov.numerical_rank(an, 1e-10) == oracles.oracle_rank(g, 1e-10)
    assert krylov.numerical_rank(krylov.orbit(special.kernel(0, 64), SYM, 5)) == 1


@pytest.mark.parametrize("m", [1, 2, 3, 4])
def test_well_conditioned_kernel_orbits_have_full_rank(m):
    g = oracles.kernel_orbit_gram(0.5, 0.5, m)
    assert oracles.oracle_rank(g, 1e-10) == m + 1
    assert krylov.orbit(special.kernel(0.5, 1024), SYM, m).rank == m + 1


@given(st.lists(st.floats(-3, 3), min_size=11, max_size=11))
def test_rank_invariant_under_member_scaling(logs):
    f = h2core.monomial(1)
    base = krylov.orbit(f, SYM, 10)
    scaled = krylov.analyze([h2core.scale(u, 10.0 ** x) for u, x in zip(base.orbit, logs)])
    assert scaled.rank == base.rank == 2
    kb = krylov.orbit(special.kernel(0.5, 512), SYM, 4)
    ks = krylov.analyze([h2core.scale(u, 10.0 ** x) for u, x in zip(kb.orbit, logs)])
    assert ks.rank == kb.rank


def test_distance_of_member_is_zero():
    f = special.eigenfunction(2, 128)
    an = krylov.orbit(f, SYM, 4)
    assert krylov.distance_to_span(f, an, 0) <= 1e-12


def test_distance_constant_to_orbit_decays():
    g = h2core.pad(h2core.polynomial([2, 1]), 64)
    an = krylov.orbit(g, SYM, 40)
    d = krylov.distances_to_spans(h2core.constant(3.0), an)
    assert np.all(np.diff(d) <= 1e-15)
    assert d[-1] < 1e-8


def test_distance_to_f_t_orbit_is_constant():
    f = special.eigenfunction(T, 4096)
    an = krylov.orbit(f, SYM, 12)
    d = krylov.distances_to_spans(h2core.constant(1.0), an)
    floor = math.sqrt(1 - 1 / h2core.norm_sq(f))
    assert np.max(d) - np.min(d) < 1e-10
    assert np.all(np.abs(d - floor) <= 1e-12)
    assert an.rank == 1


def test_monotone_distances_random_targets():
    rng = np.random.default_rng(8)
    an = krylov.orbit(special.kernel(0.3 + 0.3j, 256), AffineSymbol(0.7), 6)
    for _ in range(10):
        t = random_poly(rng, 20)
        d = krylov.distances_to_spans(t, an)
        assert np.all(np.diff(d) <= 1e-14 * max(1.0, d[0]))


def test_residual_for_constant_g_is_zero():
    for s in (0, 1, 2):
        for n in (1, 4, 9):
            r, err = krylov.normalized_orbit_residual(h2core.constant(1.0), s, SYM, n, degree=256)
            assert r <= 1e-12 + err


@pytest.mark.parametrize("s", [0, 2])
def test_residual_decays_like_a(s):
    g = h2core.polynomial([2, 1])
    rs = np.array([krylov.normalized_orbit_residual(g, s, SYM, n, degree=1024)[0] for n in range(5, 21)])
    ratio = rs[1:] / rs[:-1]
    assert np.all((ratio >= 0.45) & (ratio <= 0.55))


def test_residual_rate_against_counting_integral():
    # squared residual <= 2 sup|f_s|**2 / M**2 * counting integral, M = inf |g(1 - a**n)|
    g = h2core.polynomial([2, 1])
    for s in (0, 1, 2):
        fs_sup = special.eigen_sup_bound(s)
        for n in range(2, 15):
            r, err = krylov.normalized_orbit_residual(g, s, SYM, n, degree=512)
            M = abs(h2core.evaluate(g, 1 - 0.5 ** n))
            bound = 2 * fs_sup ** 2 / M ** 2 * integrals.counting_integral(g, SYM, n)
            assert r * r <= bound * (1 + 1e-9) + 1e-24


def test_residual_rejects_vanishing_normalization():
    with pytest.raises(krylov.NormalizationVanishes):
        krylov.normalized_orbit_residual(h2core.polynomial([1, -1]), 0, SYM, 48, degree=64)


def test_slow_decay_pathway():
    g = h2core.polynomial([2, 1])
    eps_ = 0.5
    r2 = np.array([krylov.normalized_orbit_residual(g, 1, SYM, n, degree=512)[0] ** 2 for n in range(4, 16)])
    assert np.all(r2[1:] / r2[:-1] <= SYM.a ** (2 * eps_))


def test_tail_sum_examples():
    g = h2core.polynomial([1, -1])
    L = 1.0
    s1 = krylov.tail_sum(g, SYM, 1, 10)
    s2 = krylov.tail_sum(g, SYM, 1, 20)
    inc = h2core.norm(h2core.linear_combine([1, -1], [s2, s1]))
    bound = sum(0.5 ** n * math.sqrt(L) + 0.5 ** n for n in range(11, 21))
    assert inc <= bound
    z = krylov.tail_sum(h2core.zero(3), SYM, 1, 5)
    assert not np.any(z.coeffs)
    with pytest.raises(ValueError):
        krylov.tail_sum(g, SYM, 3, 2)


def test_tail_sum_of_f_t_diverges_linearly():
    f = special.eigenfunction(T, 4096)
    nf = h2core.norm(f)
    for m in (1, 5, 12):
        s = krylov.tail_sum(f, SYM, 1, m)
        assert abs(h2core.norm(s) / (m * nf) - 1) <= 1e-8


def test_orthogonal_element_for_z_at_zero():
    g = krylov.orthogonal_element(h2core.monomial(1), SYM, 6, 0.0)
    assert np.allclose(np.abs(g.coeffs[:2]), [1, 0], atol=1e-12)
    an = krylov.orbit(h2core.monomial(1), SYM, 6)
    rng = np.random.default_rng(2)
    for _ in range(20):
        c = rng.standard_normal(7) + 1j * rng.standard_normal(7)
        h = h2core.linear_combine(list(c), list(an.orbit))
        h = h2core.linear_combine([1, -h2core.evaluate(h, 0.0)], [h, h2core.constant(1.0)])
        assert abs(h2core.evaluate(h, 0.0)) <= 1e-12
        assert abs(h2core.inner(g, h)) <= 1e-12 * max(1.0, h2core.norm(h))


def test_orthogonal_element_one_dimensional_span():
    f = special.kernel(0.4, 64)
    g = krylov.orthogonal_element(f, SYM, 0, 0.3)
    ip = h2core.inner(g, f) / h2core.norm(f)
    assert abs(abs(ip) - 1) <= 1e-12


def test_orthogonal_element_rejects_trivial_evaluation():
    with pytest.raises(krylov.TrivialEvaluation):
        krylov.orthogonal_element(h2core.monomial(2, 4) - h2core.monomial(2, 4), SYM, 2, 0.1)


def test_zero_orbit_checks():
    B = special.blaschke_partial(SYM, 2, 6, 4096)
    rep = krylov.zero_orbit_check(B, SYM, 0.0, range(2, 8))
    assert rep.not_minimal_flag
    f = h2core.linear_combine([1, 1], [h2core.constant(1.0), special.eigenfunction(T, 512)])
    w = 1 - math.sqrt(2)
    rep = krylov.zero_orbit_check(f, SYM, w)
    assert abs(rep.value_at_w) <= 1e-12
    assert all(abs(v) <= 1e-9 for v in rep.orbit_values)
    assert not rep.not_minimal_flag
    assert not krylov.zero_orbit_check(h2core.constant(1.0), SYM, 0.2).not_minimal_flag


def test_eigen_residual_examples():
    f = special.eigenfunction(1 + 1j, 2048)
    r, tail = krylov.eigen_residual(f, SYM, np.exp((1 + 1j) * math.log(0.5)))
    assert r <= 1e-6 + tail
    f = h2core.linear_combine([1, 1], [h2core.constant(1.0), special.eigenfunction(T, 2048)])
    r, tail = krylov.eigen_residual(f, SYM, 1.0)
    assert r <= 1e-8 + tail
    r, _ = krylov.eigen_residual(h2core.monomial(1), SYM, 1.0)
    assert r == pytest.approx(0.5 * math.sqrt(2), rel=1e-15)


@pytest.mark.parametrize("f", [h2core.monomial(1), h2core.polynomial([0, 2, -1]),
                               h2core.polynomial([-0.25, 0, 1])])
def test_finitely_many_zeros_give_rank_two(f):
    assert krylov.orbit(f, SYM, 10).rank >= 2
