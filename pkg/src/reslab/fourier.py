"""Mode-coupling coefficients.

CW quadruple coefficients count matches between two Chebyshev addition
ranges. CH and YM coefficients on the families used by the non-degeneracy
analysis have closed forms built from Gegenbauer linearization, connection
and Mellin integrals. Every closed form is paired with a Gauss-Jacobi
quadrature of the defining integral.
"""
from __future__ import annotations

import math
from functools import lru_cache
from itertools import product

import numpy as np

from .models import ModelSpec, as_model, ch_norm, eigenvalue, ym_norm
from .special_functions import ChebyshevU, Jacobi, eval_poly, gauss_jacobi_rule

SQRT_2_PI = math.sqrt(2.0 / math.pi)


# ---------------------------------------------------------------- resonance

def resonance_satisfied(model, indices, signs) -> bool:
    """Exact integer test of sum(sign * omega_index) == 0."""
    if len(indices) != len(signs):
        raise ValueError("indices and signs differ in length")
    return sum(int(s) * eigenvalue(model, i) for i, s in zip(indices, signs)) == 0


def vanishing_class(model, indices, signs) -> bool:
    """True for a resonance with exactly one minus sign.

    Such coefficients vanish by degree counting: the polynomial of highest
    degree is orthogonal to the product of the others.
    """
    if sum(1 for s in signs if s < 0) != 1:
        return False
    return resonance_satisfied(model, indices, signs)


# ---------------------------------------------------------------------- CW

def cw_coeff(i: int, j: int, k: int, m: int) -> int:
    """C_ijkm: matches between |i-j|..i+j and |k-m|..k+m in steps of two."""
    lo1, hi1 = abs(i - j), i + j
    lo2, hi2 = abs(k - m), k + m
    if (lo1 - lo2) % 2:
        return 0
    lo, hi = max(lo1, lo2), min(hi1, hi2)
    return max(0, (hi - lo) // 2 + 1)


def cw_coeff_double_sum(i: int, j: int, k: int, m: int) -> int:
    return sum(
        1
        for r in range(abs(i - j), i + j + 1, 2)
        for s in range(abs(k - m), k + m + 1, 2)
        if r == s
    )


def cw_resonant_value(i: int, j: int, k: int, m: int, signs=(1, 1, -1, -1)) -> int:
    """C_ijkm on a resonance with two minus signs equals omega of the smallest index."""
    if sum(1 for s in signs if s < 0) != 2 or not resonance_satisfied("CW", (i, j, k, m), signs):
        raise ValueError("indices do not satisfy a two-minus-sign resonance")
    return eigenvalue("CW", min(i, j, k, m))


# ---------------------------------------------------------------------- CH

def ch_xi(lam: int, mu: int) -> float:
    """Squared norm of C_{2 lam}^{(2 mu + 1/2)} against (1 - x^2)^(2 mu)."""
    lg = (
        math.lgamma(2 * lam + 4 * mu + 1)
        - math.lgamma(2 * lam + 1)
        - 2 * math.lgamma(2 * mu + 0.5)
    )
    return math.pi * 2.0 ** (1 - 4 * mu) * math.exp(lg) / (4 * lam + 4 * mu + 1)


def ch_Mcoeff(m: int, mu: int, lam: int) -> float:
    if lam > m or lam < 0:
        raise ValueError("need 0 <= lam <= m")
    lg = (
        math.lgamma(lam + 0.5) + math.lgamma(2 * mu + 0.5) + math.lgamma(lam + mu + 0.5)
        - math.lgamma(lam + mu + 1) - math.lgamma(lam + 2 * mu + 1)
        + math.lgamma(m - lam + 0.5) + math.lgamma(m + lam + 2 * mu + 1)
        - math.lgamma(m - lam + 1) - math.lgamma(m + lam + 2 * mu + 1.5)
    )
    return (4 * lam + 4 * mu + 1) * (2 * mu + 2 * m + 1) * math.exp(lg) / (2.0 * math.pi ** 1.5)


def ch_Mcoeff_step(m: int, mu: int, lam: int) -> float:
    """Closed form of M_{m+1}(lam) - M_m(lam)."""
    if lam + mu == 0:
        # M_m(0) is identically 1 when mu = 0
        return 0.0
    lg = (
        math.lgamma(lam + 0.5) + math.lgamma(2 * mu + 0.5) + math.lgamma(lam + mu + 1.5)
        + math.lgamma(m - lam + 0.5) + math.lgamma(m + lam + 2 * mu + 1)
        - math.lgamma(lam + mu) - math.lgamma(lam + 2 * mu + 1)
        - math.lgamma(m - lam + 2) - math.lgamma(m + lam + 2 * mu + 2.5)
    )
    return -(4 * lam + 4 * mu + 1) * math.exp(lg) / math.pi ** 1.5


def ch_coeff_ggmm(gamma: int, m: int, mu: int) -> float:
    """C_{gamma gamma m m} for CH with mu1 = mu2 = mu, valid for m >= gamma."""
    if m < gamma:
        raise ValueError("need m >= gamma")
    return 0.5 * sum(
        ch_Mcoeff(gamma, mu, lam) * ch_Mcoeff(m, mu, lam) * ch_xi(lam, mu)
        for lam in range(gamma + 1)
    )


def ch_coeff_00mm(m: int, mu: int) -> float:
    lg = (
        2 * (math.lgamma(mu + 0.5) - math.lgamma(mu + 1))
        + math.lgamma(m + 0.5) + math.lgamma(m + 2 * mu + 1)
        - math.lgamma(m + 1) - math.lgamma(m + 2 * mu + 1.5)
    )
    return (2 * mu + 1) * (2 * mu + 2 * m + 1) * math.exp(lg) / (2.0 * math.pi)


def ch_coeff_11mm(m: int, mu: int) -> float:
    lg = (
        2 * (math.lgamma(mu + 0.5) - math.lgamma(mu + 2))
        + math.lgamma(m - 0.5) + math.lgamma(m + 2 * mu + 1)
        - math.lgamma(m + 1) - math.lgamma(m + 2 * mu + 2.5)
    )
    poly = (mu + 1) * (2 * mu + 1) * (2 * mu + 3) * (2 * mu + 2 * m + 1) * (-mu + 2 * m * (2 * mu + m + 1) - 1)
    return poly * math.exp(lg) / (8.0 * math.pi)


# ---------------------------------------------------------------------- YM

def ym_w(n: int) -> float:
    """Normalization of C_n^{(2)} in the YM basis."""
    return math.sqrt(8.0 / math.pi) / math.sqrt((n + 1) * (n + 3))


def ym_cbar(i: int, j: int, m: int) -> float:
    """Quadratic coupling of three YM modes against sin^4 x."""
    if not (abs(i - j) <= m <= i + j) or (i + j - m) % 2:
        return 0.0
    num = (i + j - m + 2) * (i - j + m + 2) * (-i + j + m + 2) * (i + j + m + 6)
    den = 4.0 * math.sqrt(2.0 * math.pi * (i + 1) * (i + 3) * (j + 1) * (j + 3) * (m + 1) * (m + 3))
    return num / den


def ym_cbar_family(which: str, gamma: int, tau: int, m: int | None = None) -> float:
    if not 0 <= tau <= gamma:
        raise ValueError("need 0 <= tau <= gamma")
    g, t = gamma, tau
    if which == "gg2tau":
        return 2 * SQRT_2_PI * (t + 1) ** 2 * (g - t + 1) * (g + t + 3) / (
            (g + 1) * (g + 3) * math.sqrt(4 * t * (t + 2) + 3)
        )
    if m is None or m < 2 * gamma + 1:
        raise ValueError("need m >= 2 gamma + 1")
    if which == "m2taum":
        return 2 * SQRT_2_PI * (t + 1) ** 2 * (m - t + 1) * (m + t + 3) / (
            (m + 1) * (m + 3) * math.sqrt(4 * t * (t + 2) + 3)
        )
    if which == "cross":
        return 2 * SQRT_2_PI * (t + 1) * (g - t + 1) * (m + t + 3) * (m - g + t + 1) / math.sqrt(
            (g + 1) * (g + 3) * (m + 1) * (m + 3) * (m - g + 2 * t + 1) * (m - g + 2 * t + 3)
        )
    raise ValueError(f"unknown family {which!r}")


def _ym_delta(gamma, l2, n2):
    return (
        (l2 + 1) ** 2 * (-1) ** n2 * (gamma - l2 + 1) * (gamma + l2 + 3) * 4.0 ** (l2 - n2)
        * math.gamma(2 * l2 - n2 + 2)
        / ((4 * l2 * (l2 + 2) + 3) * math.gamma(n2 + 1) * math.gamma(2 * l2 - 2 * n2 + 1))
    )


def _ym_J(m, l2, n2):
    k = l2 - n2
    mm = m * (m + 4)
    out = (
        3.0 * math.sqrt(math.pi) * (5 * l2 * (3 * mm + 1) + mm * (4 - 15 * n2) - 5 * (n2 - 4))
        * math.gamma(k + 0.5) / (8.0 * math.gamma(k + 5))
    )
    g2k = math.gamma(2 * k + 1)
    for l1 in range(2, k + 2):
        out += (
            math.pi * l1 * (l1 + 1) ** 2 * (2 * l1 - 1) * 4.0 ** (-k - 2)
            * (l1 - m - 1) * (l1 + m + 3) * g2k
            / (math.gamma(-l1 + k + 2) * math.gamma(l1 + k + 3))
        )
    for l1 in range(2, k + 1):
        out -= (
            math.pi * (l1 + 1) ** 2 * (l1 + 2) * (2 * l1 + 5) * 4.0 ** (-k - 2)
            * (l1 - m - 1) * (l1 + m + 3) * g2k
            / (math.gamma(-l1 + k + 1) * math.gamma(l1 + k + 4))
        )
    return out


def ym_c_ggmm(gamma: int, m: int) -> float:
    """Quartic coupling C_{gamma gamma m m} of YM for m >= gamma.

    Derived for m >= 2 gamma + 1; the same sum also holds down to m = gamma.
    """
    if m < gamma:
        raise ValueError("need m >= gamma")
    s = sum(
        _ym_delta(gamma, l2, n2) * _ym_J(m, l2, n2)
        for l2 in range(gamma + 1)
        for n2 in range(l2 + 1)
    )
    return ym_w(gamma) ** 2 * ym_w(m) ** 2 * s


def ym_c_00mm(m: int) -> float:
    return 4.0 * (m * (m + 4) + 5) / (3.0 * math.pi * (m + 1) * (m + 3))


def ym_c_11mm(m: int) -> float:
    return 2.0 * (m * (m + 4) + 7) / (math.pi * (m + 1) * (m + 3))


# ------------------------------------------------------------------ oracle

def _oracle_setup(m: ModelSpec, nidx: int, deg: int):
    npts = max(64, deg // 2 + 8)
    if m.id == "CW":
        r = gauss_jacobi_rule(npts, 0.5, 0.5)
        return r, 2.0 / math.pi
    if m.id == "YM":
        e = 1.5 if nidx == 3 else 2.5
        r = gauss_jacobi_rule(npts, e, e)
        return r, 1.0
    a, b = (nidx * m.mu1) / 2.0, (nidx * m.mu2) / 2.0
    # the half-integer powers of (1 -+ y) from each eigenfunction go in the weight
    r = gauss_jacobi_rule(npts, a, b)
    return r, 0.5


def _basis_values(m: ModelSpec, n: int, y):
    if m.id == "CW":
        return eval_poly(ChebyshevU(), n, y)
    if m.id == "YM":
        return ym_norm(n) * eval_poly(Jacobi(1.5, 1.5), n, y)
    return ch_norm(n, m.mu1, m.mu2) * eval_poly(Jacobi(m.mu1, m.mu2), n, y)


def oracle_coeff(model, indices) -> float:
    """Gauss-Jacobi evaluation of the defining integral of a coupling coefficient."""
    m = as_model(model)
    idx = tuple(int(i) for i in indices)
    if len(idx) == 3 and m.id != "YM":
        raise ValueError("three-index coefficients exist only for YM")
    if len(idx) not in (3, 4) or min(idx) < 0:
        raise ValueError("need three or four non-negative indices")
    rule, pref = _oracle_setup(m, len(idx), sum(idx) + 2)
    vals = np.ones_like(rule.nodes)
    for n in idx:
        vals = vals * _basis_values(m, n, rule.nodes)
    out = pref * float(np.dot(rule.weights, vals))
    if not math.isfinite(out):
        raise ArithmeticError("quadrature produced a non-finite value")
    return out


@lru_cache(maxsize=64)
def coefficient_tensors(model: ModelSpec, n: int):
    """Dense quartic tensor (and YM quadratic tensor) over modes 0..n-1.

    Returns (C4, C3) with C3 None outside YM. Entries are read-only.
    """
    m = as_model(model)
    if m.id == "CW":
        ii = np.arange(n)
        i, j, k, l = np.meshgrid(ii, ii, ii, ii, indexing="ij")
        lo1, hi1 = np.abs(i - j), i + j
        lo2, hi2 = np.abs(k - l), k + l
        cnt = (np.minimum(hi1, hi2) - np.maximum(lo1, lo2)) // 2 + 1
        c4 = np.where(((lo1 - lo2) % 2 == 0) & (cnt > 0), cnt, 0).astype(float)
        c4.setflags(write=False)
        return c4, None
    rule, pref = _oracle_setup(m, 4, 4 * n + 2)
    e = np.array([_basis_values(m, j, rule.nodes) for j in range(n)])
    c4 = pref * np.einsum("iq,jq,kq,lq,q->ijkl", e, e, e, e, rule.weights, optimize=True)
    c4.setflags(write=False)
    if m.id != "YM":
        return c4, None
    c3 = np.zeros((n, n, n))
    for i, j, k in product(range(n), repeat=3):
        c3[i, j, k] = ym_cbar(i, j, k)
    c3.setflags(write=False)
    return c4, c3


def coeff(model, i: int, j: int, k: int, m: int) -> float:
    """Quartic coefficient using the closed form where one exists."""
    mod = as_model(model)
    if mod.id == "CW":
        return float(cw_coeff(i, j, k, m))
    return oracle_coeff(mod, (i, j, k, m))
