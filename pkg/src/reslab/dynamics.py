"""Galerkin dynamics in mode space, Diophantine frequency tests and the
truncated P-equation.

The truncated system is u'' + w^2 u = f(u) with f^m(u) = -C_{ijkm} u^i u^j u^k
(plus -3 cbar_{ijm} u^i u^j for YM); it is Hamiltonian with potential
V(u) = C.u^4 / 4 + cbar.u^3.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from functools import lru_cache

import numpy as np

from .fourier import coefficient_tensors
from .models import as_model, eigenvalue
from .resonant import one_mode

__all__ = [
    "SpectralState",
    "TimeFourierField",
    "Trajectory",
    "PEquationResult",
    "rhs",
    "force",
    "energy",
    "integrate",
    "time_reversal_error",
    "return_distance",
    "phase_distance",
    "diophantine_margin",
    "diophantine_member",
    "solve_p_equation",
    "p_equation_leading_term",
    "kernel_field",
    "sobolev_norm",
    "modified_energy",
    "potential",
]

SCHEMES = ("StormerVerlet", "Rotation")


@dataclass
class SpectralState:
    u: np.ndarray
    v: np.ndarray
    t: float = 0.0

    def __post_init__(self):
        self.u = np.asarray(self.u, dtype=float)
        self.v = np.asarray(self.v, dtype=float)
        if self.u.shape != self.v.shape or self.u.ndim != 1:
            raise ValueError("u and v must be vectors of equal length")
        if not (np.all(np.isfinite(self.u)) and np.all(np.isfinite(self.v))):
            raise ValueError("state has non-finite entries")


@lru_cache(maxsize=64)
def _omegas_cached(model, n):
    w = np.array([eigenvalue(model, j) for j in range(n)], dtype=float)
    w.setflags(write=False)
    return w


def _omegas(model, n):
    return _omegas_cached(as_model(model), n)


def _tensors(model, n):
    return coefficient_tensors(as_model(model), n)


def force(model, u, N: int | None = None) -> np.ndarray:
    """Nonlinearity f(u) in mode space. ``u`` may carry leading batch axes."""
    m = as_model(model)
    u = np.asarray(u, dtype=float)
    n = u.shape[-1] if N is None else N
    if u.shape[-1] != n:
        raise ValueError("state dimension must equal N")
    c4, c3 = _tensors(m, n)
    if u.ndim == 1:
        # three matrix-vector products
        t = (u @ c4.reshape(n, -1)).reshape(n, n * n)
        out = -(u @ (u @ t).reshape(n, n))
        if c3 is not None:
            out -= 3.0 * (u @ (u @ c3.reshape(n, -1)).reshape(n, n))
        return out
    a = np.tensordot(u, c4, axes=([-1], [0]))  # (..., j, k, m)
    out = -np.einsum("...jkm,...j,...k->...m", a, u, u)
    if c3 is not None:
        out -= 3.0 * np.einsum("...jm,...j->...m", np.tensordot(u, c3, axes=([-1], [0])), u)
    return out


def rhs(model, state, N: int | None = None, nonlinear: bool = True) -> np.ndarray:
    """Acceleration -w^2 u + f(u)."""
    u = state.u if isinstance(state, SpectralState) else np.asarray(state, dtype=float)
    n = len(u) if N is None else N
    if len(u) != n:
        raise ValueError("state dimension must equal N")
    a = -_omegas(model, n) ** 2 * u
    if nonlinear:
        a = a + force(model, u, n)
    return a


def potential(model, u) -> float:
    m = as_model(model)
    c4, c3 = _tensors(m, len(u))
    v = 0.25 * float(np.einsum("ijkl,i,j,k,l->", c4, u, u, u, u, optimize=True))
    if c3 is not None:
        v += float(np.einsum("ijk,i,j,k->", c3, u, u, u))
    return v


def energy(model, state: SpectralState, nonlinear: bool = True) -> float:
    w = _omegas(model, len(state.u))
    h = 0.5 * float(np.sum(state.v ** 2 + w ** 2 * state.u ** 2))
    return h + (potential(model, state.u) if nonlinear else 0.0)


def _hessian(model, u, nonlinear):
    m = as_model(model)
    n = len(u)
    hess = np.diag(_omegas(m, n) ** 2)
    if nonlinear:
        c4, c3 = _tensors(m, n)
        hess = hess + 3.0 * np.einsum("ijkl,i,j->kl", c4, u, u)
        if c3 is not None:
            hess = hess + 6.0 * np.einsum("ijk,i->jk", c3, u)
    return hess


def modified_energy(model, state: SpectralState, dt: float, nonlinear: bool = True) -> float:
    """Shadow Hamiltonian of kick-drift-kick leapfrog to O(dt^2)."""
    g = -rhs(model, state.u, nonlinear=nonlinear)
    hv = _hessian(model, state.u, nonlinear) @ state.v
    return energy(model, state, nonlinear) + dt ** 2 * (float(state.v @ hv) / 12.0 - float(g @ g) / 24.0)


@dataclass
class Trajectory:
    final: SpectralState
    energy0: float
    energy_drift: float
    energy_fluctuation: float
    samples: list = field(default_factory=list)


def _stepper(model, n, dt, scheme, nonlinear):
    m = as_model(model)
    w = _omegas(m, n)
    if scheme == "StormerVerlet":
        def step(u, v, a):
            v = v + 0.5 * dt * a
            u = u + dt * v
            a = rhs(m, u, n, nonlinear)
            return u, v + 0.5 * dt * a, a
        return step, lambda u: rhs(m, u, n, nonlinear)
    # exact linear rotation between half kicks of the nonlinearity
    c, s = np.cos(w * dt), np.sin(w * dt)

    def fk(u):
        return force(m, u, n) if nonlinear else np.zeros_like(u)

    def step(u, v, a):
        v = v + 0.5 * dt * a
        u, v = c * u + s / w * v, -w * s * u + c * v
        a = fk(u)
        return u, v + 0.5 * dt * a, a
    return step, fk


def integrate(
    model,
    state0: SpectralState,
    dt: float,
    steps: int,
    scheme: str = "StormerVerlet",
    nonlinear: bool = True,
    sample_every: int = 0,
    energy_every: int | None = None,
) -> Trajectory:
    """Symplectic integration of the truncated system.

    ``energy_drift`` is the relative secular change of the leapfrog shadow
    energy, ``energy_fluctuation`` the largest relative excursion of the
    plain energy, which oscillates at O((w dt)^2) without drifting.
    """
    if dt <= 0:
        raise ValueError("dt must be positive")
    if scheme not in SCHEMES:
        raise ValueError(f"unknown scheme {scheme!r}")
    m = as_model(model)
    n = len(state0.u)
    step, acc = _stepper(m, n, dt, scheme, nonlinear)
    u, v = state0.u.copy(), state0.v.copy()
    a = acc(u)
    shadow = (lambda s: modified_energy(m, s, dt, nonlinear)) if scheme == "StormerVerlet" else (
        lambda s: energy(m, s, nonlinear)
    )
    e0 = energy(m, state0, nonlinear)
    s0 = shadow(state0)
    every = energy_every or max(1, steps // 1000)
    fl = dr = 0.0
    samples = []
    if sample_every:
        samples.append((state0.t, u.copy(), v.copy(), e0))
    for k in range(1, steps + 1):
        u, v, a = step(u, v, a)
        if k % every == 0 or k == steps:
            st = SpectralState(u, v, state0.t + k * dt)
            fl = max(fl, abs(energy(m, st, nonlinear) - e0))
            dr = max(dr, abs(shadow(st) - s0))
        if sample_every and k % sample_every == 0:
            samples.append((state0.t + k * dt, u.copy(), v.copy(), energy(m, SpectralState(u, v), nonlinear)))
    scale = abs(e0) if e0 != 0 else 1.0
    final = SpectralState(u, v, state0.t + steps * dt)
    return Trajectory(final, e0, dr / scale, fl / scale, samples)


def time_reversal_error(model, state0: SpectralState, dt: float, steps: int, scheme: str = "StormerVerlet") -> float:
    """Max-norm distance to the start after s steps forward and s steps back."""
    fwd = integrate(model, state0, dt, steps, scheme, energy_every=steps).final
    back = integrate(model, SpectralState(fwd.u, -fwd.v), dt, steps, scheme, energy_every=steps).final
    return float(max(np.max(np.abs(back.u - state0.u)), np.max(np.abs(-back.v - state0.v))))


def phase_distance(model, a: SpectralState, b: SpectralState) -> float:
    """Distance in the phase-space norm sqrt(sum w_j^2 du_j^2 + dv_j^2)."""
    w = _omegas(model, len(a.u))
    return float(np.sqrt(np.sum(w ** 2 * (a.u - b.u) ** 2 + (a.v - b.v) ** 2)))


def return_distance(
    model, gamma: int, eps: float, N: int = 16, T: float = 2.0 * math.pi, steps: int = 2048,
    scheme: str = "Rotation",
) -> float:
    """Relative phase-space distance between the state at T and the rescaled
    1-mode eps * K e_gamma started at rest.

    Positions alone return to fourth order, since the start is a turning
    point; velocities carry the O(eps^2) phase slip.
    """
    m = as_model(model)
    amp = one_mode(m, gamma, -1 if m.id == "YM" else 1).amplitude
    u0 = np.zeros(N)
    u0[gamma] = eps * amp
    s0 = SpectralState(u0, np.zeros(N))
    tr = integrate(m, s0, T / steps, steps, scheme, energy_every=steps)
    zero = SpectralState(np.zeros(N), np.zeros(N))
    return phase_distance(m, tr.final, s0) / phase_distance(m, s0, zero)


# ---------------------------------------------------------------- Diophantine


def _progression(model):
    m = as_model(model)
    if m.id == "CW":
        return 1, 1
    if m.id == "YM":
        return 2, 1
    return 1 + m.mu1 + m.mu2, 2


def diophantine_margin(omega: float, model, l_max: int) -> tuple[float, int]:
    """(min_l l |w l - w_j|, argmin l) over the nearest admissible eigenvalues."""
    if l_max < 1:
        raise ValueError("l_max must be at least 1")
    if not math.isfinite(omega) or omega <= 0:
        raise ValueError("omega must be positive and finite")
    a, d = _progression(model)
    l = np.arange(1, int(l_max) + 1, dtype=float)
    x = omega * l
    base = np.floor((x - a) / d)
    best = np.full(l.shape, np.inf)
    # two on each side, so an excluded eigenvalue w_j = l is skipped over
    for off in (-1, 0, 1, 2):
        n = base + off
        wj = a + d * n
        ok = (n >= 0) & (wj != l)
        best = np.where(ok, np.minimum(best, np.abs(x - wj)), best)
    marg = l * best
    k = int(np.argmin(marg))
    return float(marg[k]), k + 1


def diophantine_member(omega: float, alpha: float, model, l_max: int) -> bool:
    """|w l - w_j| >= alpha / l for all 1 <= l <= l_max and eigenvalues w_j != l."""
    if not 0 < alpha < 1.0 / 3.0:
        raise ValueError("need 0 < alpha < 1/3")
    return diophantine_margin(omega, model, l_max)[0] >= alpha


# ---------------------------------------------------------------- P-equation


@dataclass
class TimeFourierField:
    """q(t) = sum_j sum_l q[l, j] cos(l t) e_j."""
    q: np.ndarray

    @property
    def L(self) -> int:
        return self.q.shape[0] - 1

    @property
    def N(self) -> int:
        return self.q.shape[1]

    def norm(self, s: float = 2.0, k: int = 1) -> float:
        return sobolev_norm(self.q, s, k)


def sobolev_norm(q, s: float = 2.0, k: int = 1) -> float:
    """H^k_s norm with mode weight (1 + j)^(2s), so the lowest mode counts."""
    q = np.asarray(q)
    l = np.arange(q.shape[0])[:, None]
    j = np.arange(q.shape[1])[None, :]
    tw = np.where(l == 0, 2.0, (1.0 + l ** 2) ** k)
    return float(math.sqrt(np.sum((1.0 + j) ** (2 * s) * tw * q ** 2)))


def kernel_field(model, amps, N: int = 16, L: int = 64) -> TimeFourierField:
    """v = sum_j amps[j] cos(w_j t) e_j, an element of the kernel of L_1."""
    q = np.zeros((L + 1, N))
    for j, a in enumerate(amps):
        if a:
            wj = eigenvalue(model, j)
            if j >= N or wj > L:
                raise ValueError("kernel mode outside the truncation")
            q[wj, j] = a
    return TimeFourierField(q)


def _synth(q, M):
    # cosine series sampled at t_k = 2 pi k / M
    L = q.shape[0] - 1
    spec = np.zeros((M // 2 + 1, q.shape[1]))
    spec[: L + 1] = q
    spec[0] *= 2.0
    return np.fft.irfft(spec, n=M, axis=0) * (M / 2.0)


def _analyse(f, L):
    M = f.shape[0]
    c = np.fft.rfft(f, axis=0).real * (2.0 / M)
    c[0] *= 0.5
    return c[: L + 1]


def _lambda(model, N, L, omega):
    w = _omegas(model, N)
    l = np.arange(L + 1, dtype=float)
    lam = w[None, :] ** 2 - (l[:, None] * omega) ** 2
    kern = np.zeros((L + 1, N), dtype=bool)
    for j in range(N):
        wj = eigenvalue(model, j)
        if wj <= L:
            kern[wj, j] = True
    return lam, kern


def _pf(model, field, N, L, M, kern, part="all"):
    u = _synth(field, M)
    m = as_model(model)
    if part == "quad":
        c3 = _tensors(m, N)[1]
        fu = -3.0 * np.einsum("tjm,tj->tm", np.tensordot(u, c3, axes=([-1], [0])), u)
    else:
        fu = force(m, u, N)
    c = _analyse(fu, L)
    c[kern] = 0.0
    return c


@dataclass
class PEquationResult:
    q: TimeFourierField
    residual: float
    iterations: int
    min_divisor: float


def solve_p_equation(
    model,
    v: TimeFourierField,
    omega: float,
    N: int = 16,
    L: int = 64,
    M: int | None = None,
    tol: float = 1e-12,
    max_iter: int = 200,
    alpha: float | None = None,
) -> PEquationResult:
    """Fixed point of q = L_w^{-1} P f(v + q) on modes < N and frequencies <= L.

    Products are formed on M = 4L equispaced times. The kernel pairs
    l = w_j are removed by P and never divided by.
    """
    m = as_model(model)
    M = 4 * L if M is None else M
    if v.q.shape != (L + 1, N):
        raise ValueError("v must have shape (L+1, N)")
    if alpha is not None and not diophantine_member(omega, alpha, m, L):
        raise ValueError(f"omega={omega} fails the Diophantine test with alpha={alpha} up to l={L}")
    lam, kern = _lambda(m, N, L, omega)
    safe = np.where(kern, 1.0, lam)
    if np.any(~kern & (lam == 0.0)):
        raise ArithmeticError("zero divisor outside the kernel")
    mind = float(np.min(np.abs(lam[~kern])))
    q = np.zeros_like(v.q)
    prev = math.inf
    for it in range(1, max_iter + 1):
        new = np.where(kern, 0.0, _pf(m, v.q + q, N, L, M, kern) / safe)
        step = sobolev_norm(new - q)
        q = new
        if not math.isfinite(step) or (it > 5 and step > prev and step > 1.0):
            k = np.unravel_index(np.argmin(np.where(kern, np.inf, np.abs(lam))), lam.shape)
            raise ArithmeticError(
                f"P-equation iteration diverges; smallest divisor lambda[j={k[1]}, l={k[0]}] = {lam[k]:.3e}"
            )
        prev = step
        if step <= tol:
            break
    res = sobolev_norm(lam * q - _pf(m, v.q + q, N, L, M, kern))
    return PEquationResult(TimeFourierField(q), res, it, mind)


def p_equation_leading_term(model, v: TimeFourierField, omega: float, N: int = 16, L: int = 64, M=None):
    """L_w^{-1} P f2(v): the quadratic part of the YM solution."""
    m = as_model(model)
    if m.id != "YM":
        raise ValueError("only YM has a quadratic term")
    M = 4 * L if M is None else M
    lam, kern = _lambda(m, N, L, omega)
    return TimeFourierField(np.where(kern, 0.0, _pf(m, v.q, N, L, M, kern, "quad") / np.where(kern, 1.0, lam)))
