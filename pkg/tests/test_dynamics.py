import math
import time

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from reslab.dynamics import (
    SpectralState,
    energy,
    force,
    integrate,
    kernel_field,
    modified_energy,
    p_equation_leading_term,
    phase_distance,
    potential,
    return_distance,
    rhs,
    diophantine_margin,
    diophantine_member,
    solve_p_equation,
    sobolev_norm,
    time_reversal_error,
    TimeFourierField,
)
from reslab.models import CH, CW, YM, eigenvalue

MODELS = [CW, YM, CH(0), CH(3)]


def _state(model, n, eps, seed=0):
    rng = np.random.default_rng(seed)
    return SpectralState(eps * rng.standard_normal(n), eps * rng.standard_normal(n))


@pytest.mark.parametrize("model", MODELS, ids=lambda m: m.label)
def test_rhs_at_rest_is_zero(model):
    assert np.all(rhs(model, np.zeros(8), 8) == 0.0)


def test_cw_single_mode_acceleration():
    eps = 0.1
    u = np.zeros(6)
    u[0] = eps
    a = rhs(CW, u, 6)
    assert a[0] == pytest.approx(-eps - eps ** 3, rel=1e-14)


def test_linear_equation_ignores_nonlinearity():
    u = np.linspace(0.1, 0.5, 6)
    a = rhs(YM, u, 6, nonlinear=False)
    w = np.array([eigenvalue(YM, j) for j in range(6)], dtype=float)
    assert np.allclose(a, -w ** 2 * u, rtol=1e-15)


@pytest.mark.parametrize("model", MODELS, ids=lambda m: m.label)
def test_force_is_minus_gradient(model):
    u = _state(model, 6, 0.3, 1).u
    g = np.zeros(6)
    h = 1e-6
    for j in range(6):
        e = np.zeros(6)
        e[j] = h
        g[j] = (potential(model, u + e) - potential(model, u - e)) / (2 * h)
    assert np.allclose(force(model, u, 6), -g, rtol=1e-7, atol=1e-10)


def test_batched_force_matches_rows():
    u = np.random.default_rng(3).standard_normal((5, 6)) * 0.2
    fb = force(YM, u, 6)
    for k in range(5):
        assert np.allclose(fb[k], force(YM, u[k], 6), rtol=1e-13, atol=1e-15)


@pytest.mark.parametrize("scheme", ["StormerVerlet", "Rotation"])
@pytest.mark.parametrize("model", [CW, YM, CH(2)], ids=lambda m: m.label)
def test_linear_period_return(model, scheme):
    steps = 2 ** 14
    for n in range(6):
        u0 = np.zeros(6)
        u0[n] = 1.0
        T = 2 * math.pi / eigenvalue(model, n)
        tr = integrate(model, SpectralState(u0, np.zeros(6)), T / steps, steps, scheme, nonlinear=False, energy_every=steps)
        assert np.linalg.norm(tr.final.u - u0) <= 1e-6


@pytest.mark.parametrize("model", MODELS, ids=lambda m: m.label)
def test_energy_drift_short(model):
    s0 = _state(model, 16, 0.05, 4)
    tr = integrate(model, s0, 1e-3, 5000)
    assert tr.energy_drift <= 1e-7
    assert tr.energy_fluctuation <= 1e-3


def test_modified_energy_reduces_to_energy():
    s0 = _state(CW, 6, 0.1, 5)
    assert modified_energy(CW, s0, 0.0) == energy(CW, s0)


@pytest.mark.parametrize("scheme", ["StormerVerlet", "Rotation"])
@pytest.mark.parametrize("model", MODELS, ids=lambda m: m.label)
def test_time_reversal(model, scheme):
    s0 = _state(model, 16, 0.05, 6)
    assert time_reversal_error(model, s0, 1e-3, 2000, scheme) <= 1e-10


def test_integrate_is_deterministic():
    s0 = _state(YM, 8, 0.1, 7)
    a = integrate(YM, s0, 1e-2, 300).final
    b = integrate(YM, s0, 1e-2, 300).final
    assert np.array_equal(a.u, b.u) and np.array_equal(a.v, b.v)


def test_samples():
    s0 = _state(CW, 4, 0.1, 8)
    tr = integrate(CW, s0, 0.01, 100, sample_every=10)
    assert len(tr.samples) == 11
    assert tr.samples[-1][0] == pytest.approx(1.0)


def test_integrate_errors():
    s0 = _state(CW, 4, 0.1)
    with pytest.raises(ValueError):
        integrate(CW, s0, 0.0, 10)
    with pytest.raises(ValueError):
        integrate(CW, s0, 0.1, 10, scheme="Euler")
    with pytest.raises(ValueError):
        SpectralState(np.zeros(3), np.zeros(4))
    with pytest.raises(ValueError):
        SpectralState(np.array([np.nan]), np.zeros(1))


def test_return_distance_decreases_with_eps():
    d = [return_distance(CW, 0, e) for e in (0.1, 0.05)]
    assert d[1] < d[0] / 3


# ---------------------------------------------------------------- Diophantine


def test_diophantine_examples():
    assert diophantine_member(1.013, 0.1, CW, 64)
    margin, l = diophantine_margin(1.013, CW, 200)
    assert l == 77 and margin < 0.1
    alpha = 0.1
    assert not diophantine_member(1 + alpha / 2, alpha, CW, 64)
    assert diophantine_margin(1 + alpha / 2, CW, 64)[1] == 20


def test_diophantine_excludes_equal_eigenvalue():
    # w = 1: every l is itself an eigenvalue; the next ones are at distance 1
    margin, l = diophantine_margin(1.0, CW, 10)
    assert margin == 1.0 and l == 1


def test_diophantine_rational_fails():
    assert diophantine_margin(1.5, CW, 10)[0] == 0.0


def test_diophantine_progressions():
    # YM starts at 2, CH(mu) at 1 + 2 mu with step 2
    assert diophantine_margin(1.0, YM, 1) == (1.0, 1)
    assert diophantine_margin(1.0, CH(1), 1) == (2.0, 1)


def test_diophantine_fast():
    diophantine_margin(1.013, CW, 64)
    t = time.perf_counter()
    for _ in range(100):
        diophantine_margin(1.013, CW, 64)
    assert (time.perf_counter() - t) / 100 < 1e-3


def test_diophantine_errors():
    with pytest.raises(ValueError):
        diophantine_member(1.1, 0.4, CW, 10)
    with pytest.raises(ValueError):
        diophantine_margin(-1.0, CW, 10)
    with pytest.raises(ValueError):
        diophantine_margin(1.1, CW, 0)


@settings(max_examples=50, deadline=None)
@given(st.floats(0.5, 3.0), st.integers(1, 60))
def test_margin_matches_brute_force(omega, lmax):
    best = math.inf
    for l in range(1, lmax + 1):
        for j in range(int(omega * l) + 5):
            wj = j + 1
            if wj != l:
                best = min(best, l * abs(omega * l - wj))
    assert diophantine_margin(omega, CW, lmax)[0] == pytest.approx(best, rel=1e-12, abs=1e-15)


# ---------------------------------------------------------------- P-equation


def test_zero_kernel_gives_zero_solution():
    v = kernel_field(CW, [0.0], 8, 32)
    r = solve_p_equation(CW, v, 1.013, 8, 32)
    assert np.all(r.q.q == 0.0)


@pytest.mark.parametrize("model", [CW, YM], ids=lambda m: m.label)
def test_p_equation_residual_and_kernel(model):
    v = kernel_field(model, [0.01], 12, 32)
    r = solve_p_equation(model, v, 1.013, 12, 32, alpha=0.1)
    assert r.residual <= 1e-13
    assert r.q.norm() > 0
    # no component on kernel pairs l = w_j
    for j in range(12):
        wj = eigenvalue(model, j)
        if wj <= 32:
            assert r.q.q[wj, j] == 0.0


def test_p_equation_scaling_cw_is_cubic():
    n = [solve_p_equation(CW, kernel_field(CW, [a], 12, 32), 1.013, 12, 32).q.norm() for a in (1e-2, 5e-3)]
    assert math.log2(n[0] / n[1]) == pytest.approx(3.0, abs=0.05)


def test_ym_leading_term():
    v = kernel_field(YM, [1e-3], 12, 32)
    r = solve_p_equation(YM, v, 1.013, 12, 32)
    lead = p_equation_leading_term(YM, v, 1.013, 12, 32)
    assert sobolev_norm(r.q.q - lead.q) < 1e-2 * lead.norm()
    with pytest.raises(ValueError):
        p_equation_leading_term(CW, v, 1.013, 12, 32)


def test_p_equation_errors():
    v = kernel_field(CW, [0.01], 8, 32)
    with pytest.raises(ValueError):
        solve_p_equation(CW, v, 1.5, 8, 32, alpha=0.1)
    with pytest.raises(ValueError):
        solve_p_equation(CW, v, 1.013, 9, 32)
    with pytest.raises(ArithmeticError):
        solve_p_equation(CW, v, 1.5, 8, 32)
    with pytest.raises(ValueError):
        kernel_field(CW, [0.0] * 40 + [1.0], 8, 32)


def test_sobolev_norm_weights():
    q = np.zeros((3, 2))
    q[0, 0] = 1.0
    assert sobolev_norm(q) == pytest.approx(math.sqrt(2.0))
    q = np.zeros((3, 2))
    q[1, 1] = 1.0
    assert sobolev_norm(q) == pytest.approx(math.sqrt(16 * 2))
    assert TimeFourierField(q).L == 2 and TimeFourierField(q).N == 2
