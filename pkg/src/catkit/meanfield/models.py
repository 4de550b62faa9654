"""Closed-form mean-field objectives.

Both built-in models have the shape ``quadratic(c) - chi(rho(c))`` with

    chi(rho) = (1/beta) ln[A + e^{-lam*beta} cosh(beta sqrt(rho))],

which is entire in ``rho`` (cosh of a square root is even), so values,
gradients and Hessians follow from ``chi``, ``chi'`` and ``chi''``.  All three
are evaluated in log space, so nothing overflows for large ``beta`` or large
arguments.  The objectives also accept complex arrays, which the contour
Taylor expansion relies on.
"""

from __future__ import annotations

import math
from dataclasses import asdict, dataclass, fields, replace

import numpy as np

LN2 = math.log(2.0)


def lncosh(z):
    """``ln cosh z`` for real or complex ``z`` (complex branch chosen by Re z >= 0)."""
    z = np.asarray(z)
    if np.iscomplexobj(z):
        z = np.where(z.real < 0, -z, z)
        return z + np.log1p(np.exp(-2 * z)) - LN2
    a = np.abs(z)
    return a + np.log1p(np.exp(-2 * a)) - LN2


def _logaddexp(a, b):
    if np.iscomplexobj(a) or np.iscomplexobj(b):
        m = np.maximum(np.real(a), np.real(b))
        return m + np.log(np.exp(a - m) + np.exp(b - m))
    return np.logaddexp(a, b)


def _sqrt(rho):
    if np.iscomplexobj(rho):
        return np.sqrt(rho)
    return np.sqrt(np.maximum(rho, 0.0))


@dataclass(frozen=True)
class Chi:
    """``chi(rho) = (1/beta) ln[e^{log_a} + e^{-lam_beta} cosh(beta sqrt(rho))]``."""

    beta: float
    log_a: float
    lam_beta: float

    def value(self, rho):
        r = _sqrt(rho)
        return _logaddexp(self.log_a, -self.lam_beta + lncosh(self.beta * r)) / self.beta

    def derivs(self, rho):
        """``(chi, chi', chi'')`` for real ``rho >= 0``."""
        rho = np.asarray(rho, dtype=float)
        b = self.beta
        r = np.sqrt(np.maximum(rho, 0.0))
        x = b * r
        L = np.logaddexp(self.log_a, -self.lam_beta + lncosh(x))
        small = x < 1e-2
        xs = np.where(small, 1.0, x)
        rs = np.where(small, 1.0, r)
        em = np.exp(-2 * xs)
        # S = sinh(x)/r = e^x * sig ;  S_rho = e^x * tau
        sig = np.where(small, 0.0, (1 - em) / (2 * rs))
        tau = np.where(small, 0.0, (xs * (1 + em) - (1 - em)) / (4 * rs ** 3))
        w = np.exp(-self.lam_beta + xs - L)
        d1 = np.where(small, 0.0, 0.5 * w * sig)
        d2a = np.where(small, 0.0, 0.5 * w * tau)
        if np.any(small):
            # series: S = b (1 + b^2 rho/6 + b^4 rho^2/120), S_rho = b^3/6 + b^5 rho/60 + b^7 rho^2/1680
            ws = np.exp(-self.lam_beta - L)
            S = b * (1 + b * b * rho / 6 + b ** 4 * rho ** 2 / 120)
            Sr = b ** 3 / 6 + b ** 5 * rho / 60 + b ** 7 * rho ** 2 / 1680
            d1 = np.where(small, 0.5 * ws * S, d1)
            d2a = np.where(small, 0.5 * ws * Sr, d2a)
        d2 = d2a - b * d1 * d1
        return L / b, d1, d2


@dataclass(frozen=True)
class MeanFieldParams:
    """Couplings of the pairing model; ``beta`` is the inverse temperature."""

    beta: float = 1.0
    h: float = 0.0
    mu: float = 0.0
    lam: float = 0.0
    gam: float = 0.0
    delt: float = 0.0
    beta_on_shift: bool = False  # alternative reading: shift term beta*(mu + 2 delt c2)

    def __post_init__(self):
        for f in fields(self):
            v = getattr(self, f.name)
            if f.name != "beta_on_shift" and not math.isfinite(v):
                raise ValueError(f"parameter {f.name} must be finite")
        if not self.beta > 0:
            raise ValueError("beta must be positive")

    def with_(self, **kw) -> "MeanFieldParams":
        return replace(self, **kw)

    def to_json(self) -> dict:
        return asdict(self)


@dataclass(frozen=True)
class StrongCouplingParams:
    u1: float = 1.0
    u2: float = 0.0

    def __post_init__(self):
        if not (math.isfinite(self.u1) and math.isfinite(self.u2)):
            raise ValueError("u1, u2 must be finite")

    def with_(self, **kw) -> "StrongCouplingParams":
        return replace(self, **kw)

    def to_json(self) -> dict:
        return asdict(self)


class Model:
    """Interface shared by the built-in objectives and user callbacks.

    ``objective(c)`` takes an array whose leading axis runs over coordinates
    and broadcasts over the rest.  ``even`` lists the coordinates the
    objective is exactly even in.
    """

    dim: int = 2
    even: tuple = ()
    names: tuple = ()
    complex_ok: bool = False
    params = None

    def objective(self, c):
        raise NotImplementedError

    def gradient(self, c):
        return _fd_gradient(self.objective, np.asarray(c, float))

    def hessian(self, c):
        return _fd_hessian(self.objective, np.asarray(c, float))

    def length_scales(self, c):
        return np.ones(self.dim)

    def with_params(self, **kw) -> "Model":
        raise NotImplementedError

    def default_box(self):
        return [(-1.0, 1.0)] * self.dim


class PairingModel(Model):
    """``gam c1^2 + delt c2^2 - P0(c1, c2)`` with the closed-form single-site pressure."""

    dim = 2
    even = (0,)
    names = ("c1", "c2")
    complex_ok = True

    def __init__(self, params: MeanFieldParams):
        self.params = params
        p = params
        self.chi = Chi(p.beta, float(lncosh(p.beta * p.h)), p.lam * p.beta)
        self._k = p.beta if p.beta_on_shift else 1.0

    def with_params(self, **kw):
        return PairingModel(self.params.with_(**kw))

    def _rho(self, c1, c2):
        p = self.params
        w = p.mu + 2 * p.delt * c2
        s = w - p.lam
        return w, s, s * s + p.gam ** 2 * c1 * c1

    def pressure(self, c):
        c1, c2 = c[0], c[1]
        w, _, rho = self._rho(c1, c2)
        return -LN2 / self.params.beta + self._k * w + self.chi.value(rho)

    def objective(self, c):
        c = np.asarray(c) if np.iscomplexobj(c) else np.asarray(c, dtype=float)
        p = self.params
        return p.gam * c[0] ** 2 + p.delt * c[1] ** 2 - self.pressure(c)

    def gradient(self, c):
        c = np.asarray(c, dtype=float)
        p = self.params
        c1, c2 = c[0], c[1]
        _, s, rho = self._rho(c1, c2)
        _, d1, _ = self.chi.derivs(rho)
        g1 = 2 * p.gam * c1 - d1 * 2 * p.gam ** 2 * c1
        g2 = 2 * p.delt * c2 - 2 * p.delt * self._k - d1 * 4 * p.delt * s
        return np.array([g1, g2])

    def hessian(self, c):
        c = np.asarray(c, dtype=float)
        p = self.params
        c1, c2 = c[0], c[1]
        _, s, rho = self._rho(c1, c2)
        _, d1, d2 = self.chi.derivs(rho)
        r1 = 2 * p.gam ** 2 * c1
        r2 = 4 * p.delt * s
        h11 = 2 * p.gam - d1 * 2 * p.gam ** 2 - d2 * r1 * r1
        h22 = 2 * p.delt - d1 * 8 * p.delt ** 2 - d2 * r2 * r2
        h12 = -d2 * r1 * r2
        return np.array([[h11, h12], [h12, h22]])

    def length_scales(self, c):
        p = self.params
        l1 = 1.0 / max(p.beta * abs(p.gam), 1.0)
        l2 = 1.0 / max(2 * p.beta * abs(p.delt), 1.0)
        return np.array([l1, l2])

    def default_box(self):
        return [(-1.0, 1.0), (-0.5, 2.5)]


class StrongCouplingModel(Model):
    """``F(c) = u1 c^2 - ln(1 + e^{-u2} cosh sqrt(u2^2 + u1^2 c^2))``."""

    dim = 1
    even = (0,)
    names = ("c",)
    complex_ok = True

    def __init__(self, params: StrongCouplingParams):
        self.params = params
        self.chi = Chi(1.0, 0.0, params.u2)

    def with_params(self, **kw):
        return StrongCouplingModel(self.params.with_(**kw))

    def _rho(self, c):
        p = self.params
        return p.u2 ** 2 + p.u1 ** 2 * c * c

    def objective(self, c):
        c = np.asarray(c) if np.iscomplexobj(c) else np.asarray(c, dtype=float)
        x = c[0]
        return self.params.u1 * x * x - self.chi.value(self._rho(x))

    def gradient(self, c):
        x = np.asarray(c, dtype=float)[0]
        u1 = self.params.u1
        _, d1, _ = self.chi.derivs(self._rho(x))
        return np.array([2 * u1 * x - d1 * 2 * u1 * u1 * x])

    def hessian(self, c):
        x = np.asarray(c, dtype=float)[0]
        u1 = self.params.u1
        _, d1, d2 = self.chi.derivs(self._rho(x))
        r = 2 * u1 * u1 * x
        return np.array([[2 * u1 - d1 * 2 * u1 * u1 - d2 * r * r]])

    def length_scales(self, c):
        return np.array([1.0 / max(abs(self.params.u1), 1.0)])


class CallbackModel(Model):
    """Wrap a user objective ``f(c) -> float``; derivatives by finite differences."""

    def __init__(self, fn, dim: int, even=(), names=None, complex_ok=False, scales=None):
        self.fn = fn
        self.dim = dim
        self.even = tuple(even)
        self.names = tuple(names or [f"c{i + 1}" for i in range(dim)])
        self.complex_ok = complex_ok
        self._scales = None if scales is None else np.asarray(scales, float)

    def objective(self, c):
        return self.fn(c)

    def length_scales(self, c):
        return self._scales if self._scales is not None else np.ones(self.dim)


class PerturbedModel(Model):
    """``base(c) + eps * prod(c_i ** powers_i)``; used for the stability proxy."""

    def __init__(self, base: Model, eps: float, powers):
        self.base = base
        self.eps = eps
        self.powers = tuple(int(p) for p in powers)
        self.dim = base.dim
        self.names = base.names
        self.complex_ok = base.complex_ok
        self.params = base.params
        self.even = tuple(i for i in base.even if self.powers[i] % 2 == 0)

    def with_params(self, **kw):
        return PerturbedModel(self.base.with_params(**kw), self.eps, self.powers)

    def _mono(self, c):
        out = 1.0
        for i, p in enumerate(self.powers):
            out = out * c[i] ** p
        return out

    def objective(self, c):
        c = np.asarray(c) if np.iscomplexobj(c) else np.asarray(c, dtype=float)
        return self.base.objective(c) + self.eps * self._mono(c)

    def gradient(self, c):
        c = np.asarray(c, float)
        g = self.base.gradient(c)
        for i, p in enumerate(self.powers):
            if p:
                q = list(self.powers)
                q[i] -= 1
                g[i] = g[i] + self.eps * p * np.prod([c[j] ** q[j] for j in range(self.dim)])
        return g

    def hessian(self, c):
        c = np.asarray(c, float)
        H = self.base.hessian(c)
        for i in range(self.dim):
            for j in range(self.dim):
                q = list(self.powers)
                coef = q[i]
                q[i] -= 1
                coef *= q[j]
                q[j] -= 1
                if coef:
                    H[i, j] += self.eps * coef * np.prod([c[m] ** q[m] for m in range(self.dim)])
        return H

    def length_scales(self, c):
        return self.base.length_scales(c)

    def default_box(self):
        return self.base.default_box()


def _fd_gradient(f, c, h=1e-6):
    g = np.zeros_like(c)
    for i in range(len(c)):
        e = np.zeros_like(c)
        e[i] = h
        g[i] = (f(c + e) - f(c - e)) / (2 * h)
    return g


def _fd_hessian(f, c, h=1e-4):
    n = len(c)
    H = np.zeros((n, n))
    for i in range(n):
        for j in range(i, n):
            ei = np.zeros(n)
            ej = np.zeros(n)
            ei[i] = h
            ej[j] = h
            v = (f(c + ei + ej) - f(c + ei - ej) - f(c - ei + ej) + f(c - ei - ej)) / (4 * h * h)
            H[i, j] = H[j, i] = v
    return H


def make_model(kind: str, params: dict) -> Model:
    kind = kind.replace("-", "_")
    if kind == "pairing":
        return PairingModel(MeanFieldParams(**params))
    if kind == "strong_coupling":
        return StrongCouplingModel(StrongCouplingParams(**params))
    raise ValueError(f"unknown model {kind!r}")
