import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from reslab.models import CH, CW, YM, eigenvalue
from reslab.resonant import (
    average_cubic,
    average_quadratic_ym,
    c_gggg,
    dM_one_mode,
    frak_F0,
    frak_q,
    one_mode,
    operator_M,
    operator_M_pm_ym,
    support_bound,
    ym_uv,
)
from oracles import frak_F0_time, time_average

MODELS = [CW, YM, CH(0), CH(2), CH(1, 2)]


def _rand_state(rng, n=4, k=3):
    xi = np.zeros(n)
    idx = rng.choice(n, size=k, replace=False)
    xi[idx] = rng.normal(size=k)
    return xi


@pytest.mark.parametrize("model", MODELS, ids=lambda m: m.label)
def test_average_cubic_against_time_average(model):
    rng = np.random.default_rng(11)
    for _ in range(3):
        xi = _rand_state(rng)
        nout = support_bound(model, xi) + 1
        a = average_cubic(model, xi)
        b = time_average(model, xi, nout, steps=256, part="cubic" if model.id == "YM" else "all")
        assert np.max(np.abs(a - b)) <= 1e-12 * max(1.0, np.max(np.abs(b)))


def test_average_quadratic_is_zero():
    rng = np.random.default_rng(3)
    xi = _rand_state(rng, 5, 4)
    assert np.all(average_quadratic_ym(xi) == 0.0)
    t = time_average(YM, xi, 12, steps=256, part="quad")
    assert np.max(np.abs(t)) <= 1e-12


def test_frak_F0_against_time_oracle():
    rng = np.random.default_rng(5)
    for _ in range(2):
        xi = _rand_state(rng, 3, 2)
        a = frak_F0(xi)
        b = frak_F0_time(xi, len(a), steps=256)
        assert np.max(np.abs(a - b)) <= 1e-12 * max(1.0, np.max(np.abs(b)))


def test_truncation_errors():
    with pytest.raises(ValueError):
        average_cubic(CW, np.array([0.0, 1.0]), trunc=3)
    with pytest.raises(ValueError):
        average_cubic(CW, np.ones((2, 2)))


@settings(max_examples=25, deadline=None)
@given(st.floats(-3, 3).filter(lambda s: abs(s) > 1e-3), st.integers(0, 2**31 - 1))
def test_cubic_homogeneity(s, seed):
    xi = _rand_state(np.random.default_rng(seed))
    a = average_cubic(CW, s * xi)
    b = s ** 3 * average_cubic(CW, xi)
    assert np.max(np.abs(a - b)) <= 1e-12 * max(1.0, np.max(np.abs(b)))


@settings(max_examples=15, deadline=None)
@given(st.integers(0, 2**31 - 1))
def test_F0_even_under_sign_flip(seed):
    xi = _rand_state(np.random.default_rng(seed), 3, 2)
    assert np.max(np.abs(frak_F0(-xi) + frak_F0(xi))) <= 1e-13 * max(1.0, np.max(np.abs(frak_F0(xi))))


def test_known_amplitudes():
    assert one_mode(CW, 0).amplitude == pytest.approx(np.sqrt(8 / 3), rel=1e-14)
    assert one_mode(YM, 0, -1).amplitude == pytest.approx(-2.74587, abs=1e-5)
    assert c_gggg(CW, 3) == 4.0


@pytest.mark.parametrize("gamma", range(6))
def test_ym_q_condition(gamma):
    assert 8 * frak_q(gamma) - 3 * c_gggg(YM, gamma) > 0


@pytest.mark.parametrize("model,gamma", [(CW, 2), (CH(1), 1), (YM, 1)], ids=str)
def test_one_mode_zero(model, gamma):
    om = one_mode(model, gamma, -1)
    v = om.vector(gamma + 1)
    r = operator_M_pm_ym(v) if model.id == "YM" else operator_M(model, v)
    assert np.linalg.norm(r) <= 1e-12 * abs(om.amplitude) ** 3


def test_operator_M_rejects_ym():
    with pytest.raises(ValueError):
        operator_M(YM, np.array([1.0]))


@pytest.mark.parametrize("gamma", range(6))
def test_ym_scaling_direction(gamma):
    # along the 1-mode itself the differential is 2 w^2, so u + v = -2 w^2 / K^2
    u, v = ym_uv(gamma, gamma)
    k2 = one_mode(YM, gamma, -1).amplitude ** 2
    assert u + v == pytest.approx(-2 * eigenvalue(YM, gamma) ** 2 / k2, rel=1e-12)


def _fd_check(model, gamma, rng):
    m_max = 2 * gamma + 3
    n = m_max + 1
    om = one_mode(model, gamma, -1 if model.id == "YM" else 1)
    op = (lambda x: operator_M_pm_ym(x)) if model.id == "YM" else (lambda x: operator_M(model, x))
    base = om.vector(n)
    dm = dM_one_mode(model, gamma, m_max)
    worst = 0.0
    for _ in range(3):
        d = rng.normal(size=n)
        h = 1e-5
        fd = (op(base + h * d)[:n] - op(base - h * d)[:n]) / (2 * h)
        worst = max(worst, np.linalg.norm(fd - dm @ d) / np.linalg.norm(dm @ d))
    return worst


@pytest.mark.parametrize("model,gamma", [(CW, 1), (CH(1), 1), (YM, 0), (YM, 2)], ids=str)
def test_differential_against_finite_differences(model, gamma):
    assert _fd_check(model, gamma, np.random.default_rng(gamma)) <= 1e-6


def test_dM_requires_room():
    with pytest.raises(ValueError):
        dM_one_mode(CW, 2, 3)
