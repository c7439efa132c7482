"""Orthogonal polynomials, Gauss-Jacobi quadrature and Gegenbauer algebra.

All polynomial evaluation uses three-term recurrences. Coefficient formulas
that involve large gamma ratios go through sign-tracked ``lgamma``.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache

import numpy as np

__all__ = [
    "PolyFamily",
    "ChebyshevU",
    "Jacobi",
    "Gegenbauer",
    "QuadratureRule",
    "eval_poly",
    "jacobi_derivative",
    "pochhammer",
    "lgamma_sign",
    "gamma_ratio",
    "gauss_jacobi_rule",
    "gegenbauer_linearization",
    "gegenbauer_square_coeff",
    "gegenbauer_connection_coeff",
    "mellin_gegenbauer",
]


@dataclass(frozen=True)
class PolyFamily:
    kind: str
    a: float = 0.0
    b: float = 0.0
    lam: float = 0.0

    def __post_init__(self):
        if self.kind not in ("U", "P", "C"):
            raise ValueError(f"unknown polynomial family {self.kind!r}")
        if self.kind == "P" and (self.a <= -1 or self.b <= -1):
            raise ValueError("Jacobi parameters must exceed -1")
        if self.kind == "C" and self.lam <= -0.5:
            raise ValueError("Gegenbauer parameter must exceed -1/2")


def ChebyshevU() -> PolyFamily:
    return PolyFamily("U")


def Jacobi(a: float, b: float) -> PolyFamily:
    return PolyFamily("P", a=float(a), b=float(b))


def Gegenbauer(lam: float) -> PolyFamily:
    return PolyFamily("C", lam=float(lam))


def _check_domain(x):
    arr = np.asarray(x, dtype=float)
    if np.any(np.abs(arr) > 1.0 + 1e-12):
        raise ValueError("argument outside [-1, 1]")
    return arr


def _jacobi_pair(n, a, b, x):
    """Return (P_n, P_{n-1}) for the Jacobi family at x."""
    p0 = np.ones_like(x)
    if n == 0:
        return p0, np.zeros_like(x)
    p1 = 0.5 * (a - b) + 0.5 * (a + b + 2.0) * x
    ab = a + b
    for k in range(2, n + 1):
        c = 2.0 * k + ab
        a1 = 2.0 * k * (k + ab) * (c - 2.0)
        a2 = (c - 1.0) * (a * a - b * b)
        a3 = (c - 2.0) * (c - 1.0) * c
        a4 = 2.0 * (k + a - 1.0) * (k + b - 1.0) * c
        p0, p1 = p1, ((a2 + a3 * x) * p1 - a4 * p0) / a1
    return p1, p0


def eval_poly(family: PolyFamily, n: int, x):
    """Evaluate the degree-n member of ``family`` at x in [-1, 1]."""
    if n < 0:
        raise ValueError("degree must be non-negative")
    arr = _check_domain(x)
    scalar = arr.ndim == 0
    arr = np.atleast_1d(arr)
    if family.kind == "P":
        out = _jacobi_pair(n, family.a, family.b, arr)[0]
    else:
        lam = 1.0 if family.kind == "U" else family.lam
        p0 = np.ones_like(arr)
        p1 = 2.0 * lam * arr
        if n == 0:
            out = p0
        else:
            for k in range(2, n + 1):
                p0, p1 = p1, (2.0 * (k + lam - 1.0) * arr * p1 - (k + 2.0 * lam - 2.0) * p0) / k
            out = p1
    return float(out[0]) if scalar else out


def _jacobi_dp(n, a, b, x):
    if n == 0:
        return np.zeros_like(x)
    return 0.5 * (n + a + b + 1.0) * _jacobi_pair(n - 1, a + 1.0, b + 1.0, x)[0]


def jacobi_derivative(n: int, a: float, b: float, x):
    arr = np.atleast_1d(_check_domain(x))
    out = _jacobi_dp(n, a, b, arr)
    return float(out[0]) if np.ndim(x) == 0 else out


def pochhammer(a: float, n: int) -> float:
    """Rising factorial (a)_n as an explicit product.

    Non-positive integer ``a`` is handled by the product itself, so
    (-k)_n is exactly zero once n > k and a finite integer otherwise.
    """
    if n < 0 or int(n) != n:
        raise ValueError("n must be a non-negative integer")
    if not math.isfinite(a):
        raise ValueError("a must be finite")
    out = 1.0
    for k in range(int(n)):
        f = a + k
        if f == 0.0:
            return 0.0
        out *= f
    return out


def lgamma_sign(x: float) -> tuple[float, int]:
    """(log|Gamma(x)|, sign Gamma(x)); raises at the poles."""
    if x <= 0 and x == math.floor(x):
        raise ValueError(f"Gamma has a pole at {x}")
    if x > 0:
        return math.lgamma(x), 1
    return math.lgamma(x), -1 if math.floor(x) % 2 else 1


def gamma_ratio(num, den) -> float:
    """prod Gamma(num) / prod Gamma(den). A pole in ``den`` gives zero."""
    for d in den:
        if d <= 0 and d == math.floor(d):
            return 0.0
    s, sign = 0.0, 1
    for v in num:
        lg, sg = lgamma_sign(v)
        s += lg
        sign *= sg
    for v in den:
        lg, sg = lgamma_sign(v)
        s -= lg
        sign *= sg
    return sign * math.exp(s)


@dataclass(frozen=True)
class QuadratureRule:
    nodes: np.ndarray
    weights: np.ndarray
    a: float
    b: float


def _gj_nodes(npts, a, b, tol=1e-15, maxit=100):
    # Newton on all roots at once; each correction deflates the others.
    # Chebyshev-type cosine guesses, index shifted by the endpoint exponents
    k = np.arange(1, npts + 1)
    x = np.cos(np.pi * (4.0 * k - 1.0 + 2.0 * a) / (4.0 * npts + 2.0 * (a + b + 1.0)))
    for _ in range(maxit):
        p, _ = _jacobi_pair(npts, a, b, x)
        dp = _jacobi_dp(npts, a, b, x)
        diff = x[:, None] - x[None, :]
        np.fill_diagonal(diff, np.inf)
        s = np.sum(1.0 / diff, axis=1)
        delta = p / (dp - p * s)
        x = x - delta
        if np.max(np.abs(delta)) <= tol:
            break
    else:
        raise RuntimeError("Gauss-Jacobi Newton iteration did not converge")
    # plain Newton polish
    for _ in range(2):
        p, _ = _jacobi_pair(npts, a, b, x)
        x = x - p / _jacobi_dp(npts, a, b, x)
    return np.sort(x)


@lru_cache(maxsize=256)
def _gauss_jacobi_cached(npts, a, b):
    x = _gj_nodes(npts, a, b)
    dp = _jacobi_dp(npts, a, b, x)
    # gamma-ratio constant as a running product: lgamma loses digits at large n
    k = np.arange(2, npts + 1, dtype=float)
    c = 2.0 ** (a + b + 1.0) * math.gamma(a + 2.0) * math.gamma(b + 2.0) / math.gamma(a + b + 2.0)
    c *= float(np.prod((k + a) * (k + b) / (k * (k + a + b))))
    w = c / ((1.0 - x * x) * dp * dp)
    x.setflags(write=False)
    w.setflags(write=False)
    return QuadratureRule(x, w, a, b)


def gauss_jacobi_rule(npts: int, a: float, b: float) -> QuadratureRule:
    """Nodes and weights for weight (1-x)^a (1+x)^b on [-1, 1]."""
    if npts < 1:
        raise ValueError("need at least one node")
    if a <= -1 or b <= -1:
        raise ValueError("Jacobi parameters must exceed -1")
    return _gauss_jacobi_cached(int(npts), float(a), float(b))


def _lpoch(a, n):
    # log of (a)_n for a > 0
    return math.lgamma(a + n) - math.lgamma(a)


def gegenbauer_linearization(m: int, n: int, lam: float, l: int) -> float:
    """Coefficient of C_{m+n-2l} in C_m C_n (parameter lam)."""
    if l < 0 or l > min(m, n):
        return 0.0
    if lam <= 0:
        raise ValueError("linearization implemented for lam > 0")
    s = (
        math.log(m + n + lam - 2 * l)
        - math.log(m + n + lam - l)
        + math.lgamma(m + n - 2 * l + 1)
        - math.lgamma(l + 1)
        - math.lgamma(m - l + 1)
        - math.lgamma(n - l + 1)
        + _lpoch(lam, l)
        + _lpoch(lam, m - l)
        + _lpoch(lam, n - l)
        + _lpoch(2 * lam, m + n - l)
        - _lpoch(lam, m + n - l)
        - _lpoch(2 * lam, m + n - 2 * l)
    )
    return math.exp(s)


def gegenbauer_square_coeff(n: int, lam: float, l: int) -> float:
    """Coefficient of C_{2l} in C_n^2."""
    if l < 0 or l > n:
        return 0.0
    if lam <= 0:
        raise ValueError("square coefficients implemented for lam > 0")
    s = (
        -math.lgamma(n + 1)
        + math.lgamma(n + 1) - math.lgamma(l + 1) - math.lgamma(n - l + 1)
        + math.lgamma(2 * l + 1)
        + _lpoch(lam, l)
        + _lpoch(lam, n - l)
        + _lpoch(2 * l + 2 * lam, n - l)
        - math.lgamma(l + 1)
        - _lpoch(l + lam, l)
        - _lpoch(2 * l + lam + 1, n - l)
    )
    return math.exp(s)


def gegenbauer_connection_coeff(n: int, mu: float, lam: float, l: int) -> float:
    """Coefficient of C^{lam}_{n-2l} in C^{mu}_n."""
    if l < 0 or 2 * l > n:
        return 0.0
    return (
        (lam + n - 2 * l) / lam
        * pochhammer(mu, n - l) / pochhammer(lam + 1.0, n - l)
        * pochhammer(mu - lam, l) / math.factorial(l)
    )


def mellin_gegenbauer(z: float, lam: float, n: int) -> float:
    """Integral of x^(z-1) (1-x^2)^(lam-1/2) C_n^{lam}(x) over [0, 1]."""
    if z <= 0:
        raise ValueError("need Re z > 0")
    if lam <= -0.5:
        raise ValueError("need lam > -1/2")
    return (
        math.pi
        * 2.0 ** (1.0 - 2.0 * lam - z)
        * gamma_ratio(
            [n + 2.0 * lam, z],
            [n + 1.0, lam, 0.5 + 0.5 * n + lam + 0.5 * z, 0.5 + 0.5 * z - 0.5 * n],
        )
    )
