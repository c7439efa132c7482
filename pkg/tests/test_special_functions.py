import math

import mpmath as mp
import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from reslab.special_functions import (
    ChebyshevU,
    Gegenbauer,
    Jacobi,
    PolyFamily,
    eval_poly,
    gamma_ratio,
    gauss_jacobi_rule,
    gegenbauer_connection_coeff,
    gegenbauer_linearization,
    gegenbauer_square_coeff,
    jacobi_derivative,
    lgamma_sign,
    mellin_gegenbauer,
    pochhammer,
)


def _jacobi_mp(n, a, b, x):
    # explicit binomial sum, evaluated in extended precision
    x = mp.mpf(x)
    return sum(
        mp.binomial(n + a, n - s) * mp.binomial(n + b, s) * ((x - 1) / 2) ** s * ((x + 1) / 2) ** (n - s)
        for s in range(n + 1)
    )


def _gegenbauer_mp(n, lam, x):
    x = mp.mpf(x)
    return sum(
        (-1) ** k * mp.gamma(n - k + lam) / (mp.gamma(lam) * mp.factorial(k) * mp.factorial(n - 2 * k)) * (2 * x) ** (n - 2 * k)
        for k in range(n // 2 + 1)
    )


@pytest.mark.parametrize("n", [0, 1, 2, 7, 30])
@pytest.mark.parametrize("x", [-1.0, -0.3, 0.0, 0.55, 1.0])
def test_families_against_mpmath(n, x):
    with mp.workdps(40):
        u, p, c = _gegenbauer_mp(n, 1, x), _jacobi_mp(n, 1.5, 0.5, x), _gegenbauer_mp(n, 2, x)
    assert eval_poly(ChebyshevU(), n, x) == pytest.approx(float(u), rel=1e-12, abs=1e-12)
    assert eval_poly(Jacobi(1.5, 0.5), n, x) == pytest.approx(float(p), rel=1e-12, abs=1e-12)
    assert eval_poly(Gegenbauer(2.0), n, x) == pytest.approx(float(c), rel=1e-12, abs=1e-12)


def test_chebyshev_at_one_is_n_plus_one():
    assert [eval_poly(ChebyshevU(), n, 1.0) for n in range(6)] == [1, 2, 3, 4, 5, 6]


def test_domain_and_parameter_errors():
    with pytest.raises(ValueError):
        eval_poly(ChebyshevU(), 2, 1.5)
    with pytest.raises(ValueError):
        eval_poly(ChebyshevU(), -1, 0.0)
    with pytest.raises(ValueError):
        Jacobi(-1.0, 0.0)
    with pytest.raises(ValueError):
        Gegenbauer(-0.5)
    with pytest.raises(ValueError):
        PolyFamily("X")


def test_vectorised_evaluation():
    x = np.linspace(-1, 1, 11)
    v = eval_poly(Jacobi(0.5, 0.5), 4, x)
    assert v.shape == x.shape
    assert v[3] == pytest.approx(eval_poly(Jacobi(0.5, 0.5), 4, float(x[3])))


def test_jacobi_derivative_by_mpmath():
    for x in (-0.7, 0.2, 0.9):
        d = float(mp.diff(lambda t: _jacobi_mp(5, 1.5, 1.5, t), x))
        assert jacobi_derivative(5, 1.5, 1.5, x) == pytest.approx(d, rel=1e-10)


def test_pochhammer():
    assert pochhammer(1.0, 5) == 120.0
    assert pochhammer(0.5, 3) == pytest.approx(0.5 * 1.5 * 2.5)
    assert pochhammer(-1.0, 1) == -1.0
    assert pochhammer(-2.0, 3) == 0.0
    assert pochhammer(3.0, 0) == 1.0
    with pytest.raises(ValueError):
        pochhammer(1.0, -1)


def test_gamma_helpers():
    lg, s = lgamma_sign(-0.5)
    assert s == -1 and math.exp(lg) == pytest.approx(abs(math.gamma(-0.5)))
    with pytest.raises(ValueError):
        lgamma_sign(-2.0)
    assert gamma_ratio([5.0], [3.0]) == pytest.approx(12.0)
    assert gamma_ratio([2.0], [-1.0]) == 0.0


@pytest.mark.parametrize("a,b", [(0.5, 0.5), (1.5, 1.5), (2.5, 2.5), (0.0, 0.0), (2.0, 5.0)])
def test_gauss_jacobi_nodes_and_moments(a, b):
    n = 24
    r = gauss_jacobi_rule(n, a, b)
    assert np.all(np.diff(r.nodes) > 0)
    assert np.all(r.weights > 0)
    # exact for degree <= 2n - 1
    for k in (0, 1, 5, 2 * n - 1):
        exact = float(mp.quad(lambda t: t ** k * (1 - t) ** a * (1 + t) ** b, [-1, 0, 1]))
        assert float(np.dot(r.weights, r.nodes ** k)) == pytest.approx(exact, rel=1e-12, abs=1e-14)


def test_gauss_jacobi_large_rule_monomials():
    r = gauss_jacobi_rule(512, 1.5, 1.5)
    exact = float(mp.beta(2.5, 2.5) * 2 ** 4)
    assert float(np.sum(r.weights)) == pytest.approx(exact, rel=5e-14)


def test_gauss_jacobi_errors_and_readonly():
    with pytest.raises(ValueError):
        gauss_jacobi_rule(0, 0.5, 0.5)
    with pytest.raises(ValueError):
        gauss_jacobi_rule(4, -1.0, 0.5)
    r = gauss_jacobi_rule(8, 0.5, 0.5)
    with pytest.raises(ValueError):
        r.nodes[0] = 0.0


def _expand_product(m, n, lam, npts=64):
    # project C_m C_n on C_k through the Gegenbauer weight
    r = gauss_jacobi_rule(npts, lam - 0.5, lam - 0.5)
    p = eval_poly(Gegenbauer(lam), m, r.nodes) * eval_poly(Gegenbauer(lam), n, r.nodes)
    out = {}
    for k in range(m + n + 1):
        ck = eval_poly(Gegenbauer(lam), k, r.nodes)
        out[k] = float(np.dot(r.weights, p * ck) / np.dot(r.weights, ck * ck))
    return out


@pytest.mark.parametrize("m,n,lam", [(2, 3, 2.0), (4, 4, 1.0), (5, 2, 2.5)])
def test_linearization_by_projection(m, n, lam):
    proj = _expand_product(m, n, lam)
    for l in range(min(m, n) + 1):
        assert gegenbauer_linearization(m, n, lam, l) == pytest.approx(proj[m + n - 2 * l], rel=1e-11)


def test_square_coefficient_matches_linearization():
    assert gegenbauer_square_coeff(2, 2.0, 1) == pytest.approx(3.2, rel=1e-14)
    for n in range(6):
        for l in range(n + 1):
            assert gegenbauer_square_coeff(n, 2.0, l) == pytest.approx(
                gegenbauer_linearization(n, n, 2.0, n - l), rel=1e-12
            )


@pytest.mark.parametrize("n,mu,lam", [(4, 1.0, 2.0), (5, 2.5, 1.5), (6, 2.0, 2.0)])
def test_connection_by_projection(n, mu, lam):
    r = gauss_jacobi_rule(40, lam - 0.5, lam - 0.5)
    p = eval_poly(Gegenbauer(mu), n, r.nodes)
    for l in range(n // 2 + 1):
        ck = eval_poly(Gegenbauer(lam), n - 2 * l, r.nodes)
        proj = float(np.dot(r.weights, p * ck) / np.dot(r.weights, ck * ck))
        assert gegenbauer_connection_coeff(n, mu, lam, l) == pytest.approx(proj, rel=1e-11, abs=1e-13)


def test_mellin_values():
    assert mellin_gegenbauer(1.0, 2.0, 0) == pytest.approx(3 * math.pi / 16, rel=1e-14)
    for z, lam, n in [(2.0, 1.5, 3), (1.5, 2.0, 4), (3.0, 1.0, 2)]:
        exact = float(mp.quad(lambda t: t ** (z - 1) * (1 - t * t) ** (lam - 0.5) * _gegenbauer_mp(n, lam, t), [0, 1]))
        assert mellin_gegenbauer(z, lam, n) == pytest.approx(exact, rel=1e-12, abs=1e-14)
    with pytest.raises(ValueError):
        mellin_gegenbauer(0.0, 1.0, 1)


@settings(max_examples=60, deadline=None)
@given(st.integers(0, 12), st.floats(0.1, 4.0), st.floats(-1.0, 1.0))
def test_gegenbauer_parity(n, lam, x):
    f = Gegenbauer(lam)
    assert eval_poly(f, n, -x) == pytest.approx((-1) ** n * eval_poly(f, n, x), rel=1e-12, abs=1e-12)


@settings(max_examples=40, deadline=None)
@given(st.integers(0, 10), st.integers(0, 10))
def test_linearization_sums_to_product_at_one(m, n):
    lam = 2.0
    lhs = eval_poly(Gegenbauer(lam), m, 1.0) * eval_poly(Gegenbauer(lam), n, 1.0)
    rhs = sum(
        gegenbauer_linearization(m, n, lam, l) * eval_poly(Gegenbauer(lam), m + n - 2 * l, 1.0)
        for l in range(min(m, n) + 1)
    )
    assert rhs == pytest.approx(lhs, rel=1e-11)
