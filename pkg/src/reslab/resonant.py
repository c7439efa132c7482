"""Averages along the linear flow and the resonant operators built from them.

A mode vector ``xi`` is a 1-D float array indexed by mode number. All
averages are evaluated by exact resonance bookkeeping: each product of
cosines contributes only when its frequency combination vanishes.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from .fourier import (
    ch_coeff_ggmm,
    coefficient_tensors,
    cw_coeff,
    oracle_coeff,
    ym_c_ggmm,
    ym_cbar,
)
from .models import CW, YM, ModelSpec, as_model, eigenvalue

__all__ = [
    "OneModeData",
    "average_cubic",
    "average_quadratic_ym",
    "one_mode",
    "operator_M",
    "frak_F0",
    "frak_q",
    "operator_M_pm_ym",
    "dM_one_mode",
    "frak_ab",
    "support_bound",
]


def _omegas(model, n):
    return np.array([eigenvalue(model, j) for j in range(n)], dtype=np.int64)


def _mode_index(model: ModelSpec, w):
    """Vectorized inverse of the spectrum; -1 where w is not an eigenvalue."""
    w = np.abs(np.asarray(w, dtype=np.int64))
    if model.id == "CW":
        n = w - 1
    elif model.id == "YM":
        n = w - 2
    else:
        r = w - 1 - model.mu1 - model.mu2
        n = np.where(r % 2 == 0, r // 2, -1)
    return np.where(n >= 0, n, -1)


def _as_vector(xi):
    xi = np.asarray(xi, dtype=float)
    if xi.ndim != 1:
        raise ValueError("mode vector must be one-dimensional")
    return xi


def support_bound(model, xi, degree: int = 3) -> int:
    """Largest mode that a degree-``degree`` average of ``xi`` can reach."""
    m = as_model(model)
    nz = np.nonzero(_as_vector(xi))[0]
    if nz.size == 0:
        return 0
    top = degree * eigenvalue(m, int(nz[-1]))
    n = 0
    while eigenvalue(m, n + 1) <= top:
        n += 1
    return n


def _check_trunc(model, xi, trunc, degree=3):
    xi = _as_vector(xi)
    if trunc is None:
        trunc = max(len(xi), support_bound(model, xi, degree) + 1)
    if len(xi) > trunc:
        if np.any(xi[trunc:]):
            raise ValueError("xi is supported beyond the truncation")
        xi = xi[:trunc]
    if support_bound(model, xi, degree) >= trunc:
        raise ValueError("truncation too small to contain the analytic support")
    out = np.zeros(trunc)
    out[: len(xi)] = xi
    return out, trunc


def average_cubic(model, xi, trunc: int | None = None) -> np.ndarray:
    """Average of the cubic nonlinearity along the linear flow started at xi."""
    m = as_model(model)
    x, trunc = _check_trunc(m, xi, trunc)
    out = np.zeros(trunc)
    s = np.nonzero(x)[0]
    if s.size == 0:
        return out
    c4 = coefficient_tensors(m, trunc)[0]
    w = _omegas(m, trunc)
    wi, wj, wk = np.ix_(w[s], w[s], w[s])
    amp = np.einsum("i,j,k->ijk", x[s], x[s], x[s])
    ii, jj, kk = np.meshgrid(s, s, s, indexing="ij")
    for s2 in (1, -1):
        for s3 in (1, -1):
            mi = _mode_index(m, wi + s2 * wj + s3 * wk)
            ok = (mi >= 0) & (mi < trunc)
            vals = c4[ii[ok], jj[ok], kk[ok], mi[ok]] * amp[ok]
            np.add.at(out, mi[ok], -0.125 * vals)
    return out


def average_quadratic_ym(xi, trunc: int | None = None) -> np.ndarray:
    """Average of the quadratic YM term; identically zero by coefficient support."""
    x, trunc = _check_trunc(YM, xi, trunc, degree=2)
    out = np.zeros(trunc)
    s = np.nonzero(x)[0]
    for i in s:
        for j in s:
            for s2 in (1, -1):
                w = eigenvalue(YM, i) + s2 * eigenvalue(YM, j)
                mi = int(_mode_index(YM, w))
                if 0 <= mi < trunc and w != 0:
                    out[mi] += -0.75 * ym_cbar(i, j, mi) * x[i] * x[j]
    return out


def _ym_cbar_tensor(n):
    i, j, m = np.meshgrid(np.arange(n), np.arange(n), np.arange(n), indexing="ij")
    ok = (np.abs(i - j) <= m) & (m <= i + j) & ((i + j - m) % 2 == 0)
    num = (i + j - m + 2) * (i - j + m + 2) * (-i + j + m + 2) * (i + j + m + 6)
    den = 4.0 * np.sqrt(2.0 * np.pi * (i + 1) * (i + 3) * (j + 1) * (j + 3) * (m + 1) * (m + 3))
    return np.where(ok, num / den, 0.0)


@lru_cache(maxsize=16)
def _cbar(n):
    t = _ym_cbar_tensor(n)
    t.setflags(write=False)
    return t


def frak_F0(xi, trunc: int | None = None) -> np.ndarray:
    """Cubic backreaction of the quadratic YM term on the resonant system."""
    x, trunc = _check_trunc(YM, xi, trunc)
    out = np.zeros(trunc)
    s = np.nonzero(x)[0]
    if s.size == 0:
        return out
    top = int(s[-1])
    nnu = 2 * top + 1
    ncb = max(trunc, nnu)
    cb = _cbar(ncb)
    w = _omegas(YM, ncb)
    nu = np.arange(nnu)
    wn2 = (w[nu] ** 2)[None, None, :]
    for sgn in (1, -1):
        l = (w[s][:, None] + sgn * w[s][None, :])  # (i, j)
        lam = wn2 - (l ** 2)[:, :, None]
        resonant = lam == 0
        coef = np.where(resonant, 0.0, cb[np.ix_(s, s, nu)] / np.where(resonant, 1, lam))
        # A[i, j, nu] * xi_i xi_j
        a = coef * np.outer(x[s], x[s])[:, :, None]
        for s1 in (1, -1):
            theta = l[:, :, None] + s1 * w[s][None, None, :]  # (i, j, kappa)
            mi = _mode_index(YM, theta)
            ok = (mi >= 0) & (mi < trunc) & (theta != 0)
            mi_safe = np.where(ok, mi, 0)
            # cb[kappa, nu, m] gathered as (i, j, kappa, nu)
            kap = np.broadcast_to(s[None, None, :], mi.shape)
            g = cb[kap[..., None], nu[None, None, None, :], mi_safe[..., None]]
            contrib = np.einsum("ijn,ijkn,k->ijk", a, g, x[s])
            np.add.at(out, mi_safe[ok], 2.25 * contrib[ok])
    return out


@dataclass(frozen=True)
class OneModeData:
    model: ModelSpec
    gamma: int
    amplitude: float
    sign: int
    c_gggg: float
    q: float | None = None

    def vector(self, trunc: int) -> np.ndarray:
        v = np.zeros(trunc)
        v[self.gamma] = self.amplitude
        return v


def c_gggg(model, gamma: int) -> float:
    m = as_model(model)
    if m.id == "CW":
        return float(cw_coeff(gamma, gamma, gamma, gamma))
    if m.id == "CH" and m.mu1 == m.mu2:
        return ch_coeff_ggmm(gamma, gamma, m.mu1)
    return oracle_coeff(m, (gamma,) * 4)


def frak_q(gamma: int) -> float:
    wg = eigenvalue(YM, gamma)
    s = 0.0
    for nu in range(2 * gamma + 1):
        wn = eigenvalue(YM, nu)
        s += ym_cbar(gamma, gamma, nu) ** 2 * (2.0 / wn ** 2 + 1.0 / (wn ** 2 - 4 * wg ** 2))
    return 2.25 * s


def one_mode(model, gamma: int, sign: int = 1) -> OneModeData:
    """Rescaled single-mode zero of the resonant operator."""
    m = as_model(model)
    if gamma < 0:
        raise ValueError("gamma must be non-negative")
    sg = 1 if sign >= 0 else -1
    w = eigenvalue(m, gamma)
    c = c_gggg(m, gamma)
    if m.id in ("CW", "CH"):
        return OneModeData(m, gamma, sg * math.sqrt(8.0 * w ** 2 / (3.0 * c)), sg, c)
    q = frak_q(gamma)
    if not 8.0 * q > 3.0 * c:
        raise ArithmeticError(f"8q - 3c is not positive for gamma={gamma}")
    return OneModeData(m, gamma, sg * math.sqrt(8.0 * w ** 2 / (8.0 * q - 3.0 * c)), sg, c, q)


def operator_M(model, xi, trunc: int | None = None) -> np.ndarray:
    m = as_model(model)
    if m.id == "YM":
        raise ValueError("use operator_M_pm_ym for YM")
    x, trunc = _check_trunc(m, xi, trunc)
    return _omegas(m, trunc) ** 2 * x + average_cubic(m, x, trunc)


def operator_M_pm_ym(xi, sign: int = -1, trunc: int | None = None) -> np.ndarray:
    x, trunc = _check_trunc(YM, xi, trunc)
    sg = 1 if sign >= 0 else -1
    return sg * _omegas(YM, trunc) ** 2 * x + average_cubic(YM, x, trunc) + frak_F0(x, trunc)


# ------------------------------------------------------- differentials


def frak_ab(gamma: int, m: int) -> tuple[float, float]:
    """Coefficients of the differential of F0 at the YM 1-mode.

    Returns (a, b); b is zero for m > 2 gamma, where the coupling is absent.
    """
    w = lambda n: eigenvalue(YM, n)
    wg, wm = w(gamma), w(m)
    a = 0.0
    for nu in range(m + gamma + 1):
        a += 4.5 * ym_cbar(gamma, nu, m) ** 2 / (w(nu) ** 2 - (wm + wg) ** 2)
        if w(nu) != abs(wm - wg):
            a += 4.5 * ym_cbar(m, gamma, nu) ** 2 / (w(nu) ** 2 - (wm - wg) ** 2)
    # both sign pairs of +-w_kappa +- w_m = 0 hit when kappa = m, hence 9/2
    for nu in range(2 * gamma + 1):
        a += 4.5 * ym_cbar(m, nu, m) * ym_cbar(gamma, gamma, nu) / w(nu) ** 2
    b = 0.0
    if m <= 2 * gamma:
        mb = 2 * gamma - m
        for nu in range(2 * gamma + 1):
            b += 2.25 * ym_cbar(mb, nu, m) * ym_cbar(gamma, gamma, nu) / (w(nu) ** 2 - 4 * wg ** 2)
        d = w(mb) - wg
        for nu in range(m + gamma + 1):
            if w(nu) != abs(d):
                b += 4.5 * ym_cbar(gamma, nu, m) * ym_cbar(mb, gamma, nu) / (w(nu) ** 2 - d ** 2)
    return a, b


def _c_ggmm(model, g, n):
    """C_{g g n n}, from the closed families where they apply."""
    m = as_model(model)
    lo, hi = min(g, n), max(g, n)
    if m.id == "CW":
        return float(cw_coeff(g, g, n, n))
    if m.id == "CH" and m.mu1 == m.mu2:
        return ch_coeff_ggmm(lo, hi, m.mu1)
    if m.id == "YM" and hi >= 2 * lo + 1:
        return ym_c_ggmm(lo, hi)
    return oracle_coeff(m, (g, g, n, n))


def _c_cross(model, g, n):
    """C_{g, 2g-n, g, n}."""
    m = as_model(model)
    if m.id == "CW":
        return float(cw_coeff(g, 2 * g - n, g, n))
    return oracle_coeff(m, (g, 2 * g - n, g, n))


def ym_uv(gamma: int, m: int) -> tuple[float, float | None]:
    """Entries of the scaled YM differential: u on the diagonal, v on the
    anti-diagonal partner 2 gamma - m (None when m > 2 gamma)."""
    om = one_mode(YM, gamma, -1)
    k2 = om.amplitude ** 2
    a, b = frak_ab(gamma, m)
    u = eigenvalue(YM, m) ** 2 / k2 + 0.75 * _c_ggmm(YM, gamma, m) - a
    if m > 2 * gamma:
        return u, None
    v = 0.375 * _c_cross(YM, gamma, m) - b
    return u, v


def dM_one_mode(model, gamma: int, m_max: int) -> np.ndarray:
    """Differential of the resonant operator at the 1-mode, as a dense
    (m_max+1) x (m_max+1) matrix acting on modes 0..m_max.

    For YM this is the differential of the minus operator.
    """
    m = as_model(model)
    if m_max < 2 * gamma + 1:
        raise ValueError("need m_max >= 2 gamma + 1")
    n = m_max + 1
    out = np.zeros((n, n))
    wg = eigenvalue(m, gamma)
    if m.id == "YM":
        k2 = one_mode(YM, gamma, -1).amplitude ** 2
        for r in range(n):
            u, v = ym_uv(gamma, r)
            out[r, r] += -k2 * u
            if v is not None:
                out[r, 2 * gamma - r] += -k2 * v
        return out
    cg = c_gggg(m, gamma)
    for r in range(n):
        out[r, r] += eigenvalue(m, r) ** 2 - 2.0 * wg ** 2 * _c_ggmm(m, gamma, r) / cg
        if r <= 2 * gamma:
            out[r, 2 * gamma - r] += -wg ** 2 * _c_cross(m, gamma, r) / cg
    return out
