"""The three model problems on the Einstein cylinder: the conformal cubic
wave equation in spherical symmetry (CW), the same equation in Hopf
coordinates with fixed angular frequencies (CH) and the equivariant
Yang-Mills equation around its static solution (YM).

Each model carries a Sturm-Liouville operator with integer spectrum, an
orthonormal eigenbasis and a weighted inner product.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .special_functions import ChebyshevU, Jacobi, eval_poly, gauss_jacobi_rule

MODEL_IDS = ("CW", "CH", "YM")


@dataclass(frozen=True)
class ModelSpec:
    id: str
    mu1: int = 0
    mu2: int = 0

    def __post_init__(self):
        if self.id not in MODEL_IDS:
            raise ValueError(f"unknown model {self.id!r}")
        if self.id == "CH":
            if int(self.mu1) != self.mu1 or int(self.mu2) != self.mu2 or self.mu1 < 0 or self.mu2 < 0:
                raise ValueError("CH exponents must be non-negative integers")

    @property
    def label(self) -> str:
        if self.id == "CH":
            return f"CH(mu1={self.mu1},mu2={self.mu2})"
        return self.id


CW = ModelSpec("CW")
YM = ModelSpec("YM")


def CH(mu1: int = 0, mu2: int | None = None) -> ModelSpec:
    return ModelSpec("CH", int(mu1), int(mu1 if mu2 is None else mu2))


def as_model(model) -> ModelSpec:
    if isinstance(model, ModelSpec):
        return model
    key = str(model).upper()
    if key == "CH":
        return CH(0)
    return ModelSpec(key)


def eigenvalue(model, n: int) -> int:
    """Square root of the n-th eigenvalue of the linear operator."""
    m = as_model(model)
    if n < 0:
        raise ValueError("mode index must be non-negative")
    if m.id == "CW":
        return n + 1
    if m.id == "YM":
        return n + 2
    return 2 * n + 1 + m.mu1 + m.mu2


def mode_of_eigenvalue(model, w) -> int | None:
    """Inverse of ``eigenvalue``; None when w is not in the spectrum."""
    m = as_model(model)
    if w != int(w):
        return None
    w = int(w)
    if m.id == "CW":
        n = w - 1
    elif m.id == "YM":
        n = w - 2
    else:
        r = w - 1 - m.mu1 - m.mu2
        if r % 2:
            return None
        n = r // 2
    return n if n >= 0 else None


def ym_norm(n: int) -> float:
    return math.sqrt(
        (n + 2) * math.exp(math.lgamma(n + 1) + math.lgamma(n + 4) - 2 * math.lgamma(n + 2.5))
    ) / (2.0 * math.sqrt(2.0))


def ch_norm(n: int, mu1: int, mu2: int) -> float:
    w = 2 * n + 1 + mu1 + mu2
    lg = (
        math.lgamma(n + 1) + math.lgamma(n + mu1 + mu2 + 1)
        - math.lgamma(n + mu1 + 1) - math.lgamma(n + mu2 + 1)
    )
    return math.sqrt(w * 2.0 ** (-(mu1 + mu2)) * math.exp(lg))


def eigenpoly(model, n: int, y):
    """Eigenfunction written in the variable y = cos x (cos 2x for CH)."""
    m = as_model(model)
    y = np.asarray(y, dtype=float)
    if m.id == "CW":
        return eval_poly(ChebyshevU(), n, y)
    if m.id == "YM":
        return ym_norm(n) * eval_poly(Jacobi(1.5, 1.5), n, y)
    return (
        ch_norm(n, m.mu1, m.mu2)
        * np.sqrt(np.clip(1.0 - y, 0.0, None)) ** m.mu1
        * np.sqrt(np.clip(1.0 + y, 0.0, None)) ** m.mu2
        * eval_poly(Jacobi(m.mu1, m.mu2), n, y)
    )


def _to_y(m, x):
    x = np.asarray(x, dtype=float)
    return np.clip(np.cos(2.0 * x if m.id == "CH" else x), -1.0, 1.0)


def domain(model) -> tuple[float, float]:
    return (0.0, math.pi / 2) if as_model(model).id == "CH" else (0.0, math.pi)


def eigenfunction(model, n: int, x):
    """n-th orthonormal eigenfunction evaluated at x in the spatial domain."""
    m = as_model(model)
    lo, hi = domain(m)
    if np.any(np.asarray(x) < lo - 1e-12) or np.any(np.asarray(x) > hi + 1e-12):
        raise ValueError("x outside the spatial domain")
    return eigenpoly(m, n, _to_y(m, x))


def weight(model, x):
    m = as_model(model)
    x = np.asarray(x, dtype=float)
    if m.id == "CW":
        return (2.0 / math.pi) * np.sin(x) ** 2
    if m.id == "YM":
        return np.sin(x) ** 4
    return np.sin(2.0 * x)


def physical_rule(model, npts: int = 64, extra_weight: float = 0.0):
    """Gauss rule for the model inner product, returned in the x variable.

    ``extra_weight`` adds powers of sin^2 x (CW/YM) to the weight; it is
    used for the sin^2 x u^3 term of YM. Returns (x, w).
    """
    m = as_model(model)
    if m.id == "CW":
        r = gauss_jacobi_rule(npts, 0.5 + extra_weight, 0.5 + extra_weight)
        return np.arccos(r.nodes), (2.0 / math.pi) * r.weights
    if m.id == "YM":
        r = gauss_jacobi_rule(npts, 1.5 + extra_weight, 1.5 + extra_weight)
        return np.arccos(r.nodes), r.weights
    r = gauss_jacobi_rule(npts, 0.0, 0.0)
    return 0.5 * np.arccos(r.nodes), 0.5 * r.weights


def inner_product(model, f, g, npts: int = 64) -> float:
    """Weighted L2 inner product of two callables on the spatial domain."""
    x, w = physical_rule(model, npts)
    return float(np.sum(w * f(x) * g(x)))


def apply_operator(model, f, x, h: float = 1e-4):
    """Apply the linear Sturm-Liouville operator to ``f`` by central differences."""
    m = as_model(model)
    x = np.asarray(x, dtype=float)
    d2 = (f(x + h) - 2.0 * f(x) + f(x - h)) / h ** 2
    d1 = (f(x + h) - f(x - h)) / (2.0 * h)
    if m.id == "CW":
        return -d2 - 2.0 / np.tan(x) * d1 + f(x)
    if m.id == "YM":
        return -d2 - 4.0 / np.tan(x) * d1 + 4.0 * f(x)
    pot = m.mu1 ** 2 / np.sin(x) ** 2 + m.mu2 ** 2 / np.cos(x) ** 2 + 1.0
    return -d2 - (1.0 / np.tan(x) - np.tan(x)) * d1 + pot * f(x)
