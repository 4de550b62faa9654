"""Taylor jets of an objective about a point.

Two methods:

* ``cauchy`` (default for analytic models that accept complex input):
  Cauchy's integral formula on a torus of radii ``rho_i`` around the point,
  evaluated with an FFT.  Coefficient errors are at roundoff level
  ``eps * max|f| / rho^|e|`` plus an aliasing term ``(rho / R)^npts``.
* ``fd``: nested central differences with one Richardson step (step sizes
  ``h0`` and ``h0/2``, ``h0`` in units of the model length scale); works
  with any real callback.

The raw jet is then projected onto the symmetric part.  Coordinates the
model is exactly even in are always projected; the remaining coordinates
are projected too, and the discarded mass is reported as the symmetry
residual.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from ..groups import SignAction, reynolds_project
from ..jets import FLOAT, Jet, monomials
from .models import Model

MAX_ORDER = 6
SYMMETRY_GATE = 1e-5
# FD base step in units of the model length scale; near-optimal for fourth
# derivatives once the Richardson step removes the O(h^2) error
FD_STEP = 0.1


@dataclass(frozen=True)
class TaylorResult:
    jet: Jet  # fully projected (even in every coordinate)
    raw: Jet  # before any projection
    partial: Jet  # projected on the model's exact symmetries only
    value: float  # objective at the point (the dropped constant)
    residual: float  # relative size of the terms removed by the full projection
    exact_residual: float  # largest |coefficient| odd in an exactly-even coordinate
    symmetric: bool  # residual <= gate
    method: str

    @property
    def warning(self) -> bool:
        return not self.symmetric


def _cauchy(model: Model, point, order, radii, npts):
    d = model.dim
    w = np.exp(2j * np.pi * np.arange(npts) / npts)
    if npts % 2 == 0:
        w[npts // 2:] = -w[:npts // 2]  # antipodal nodes exactly opposite
    axes = [point[i] + radii[i] * w for i in range(d)]
    grid = np.meshgrid(*axes, indexing="ij")
    vals = np.asarray(model.objective(np.array(grid)), dtype=complex)
    # split along exactly-even axes centred at 0 so odd modes come from the antisymmetric part
    parts = [(vals, {})]
    for i in model.even:
        if point[i] == 0 and npts % 2 == 0:
            new = []
            for v, tags in parts:
                flip = np.roll(v, npts // 2, axis=i)
                new.append(((v + flip) / 2, {**tags, i: 0}))
                new.append(((v - flip) / 2, {**tags, i: 1}))
            parts = new
    ffts = [(np.fft.fftn(v) / npts ** d, tags) for v, tags in parts]
    coeffs = {}
    for e in monomials(d, 0, order):
        total = sum(F[e] for F, tags in ffts if all(e[i] % 2 == q for i, q in tags.items()))
        scale = np.prod([radii[i] ** e[i] for i in range(d)])
        coeffs[e] = float((total / scale).real)
    return coeffs


def _stencil(q: int):
    """Central-difference points and weights for the ``q``-th derivative (unit step)."""
    if q == 0:
        return np.array([0.0]), np.array([1.0])
    p = max(1, (q + 1) // 2)
    pts = np.arange(-p, p + 1, dtype=float)
    V = np.vander(pts, increasing=True).T
    rhs = np.zeros(len(pts))
    rhs[q] = math.factorial(q)
    return pts, np.linalg.solve(V, rhs)


def _fd(model: Model, point, order, steps):
    d = model.dim
    stencils = {q: _stencil(q) for q in range(order + 1)}

    def deriv(e, hs):
        grids = [stencils[q][0] * hs[i] + point[i] for i, q in enumerate(e)]
        wts = [stencils[q][1] / hs[i] ** q for i, q in enumerate(e)]
        mesh = np.meshgrid(*grids, indexing="ij")
        vals = np.asarray(model.objective(np.array(mesh)), dtype=float)
        W = wts[0]
        for w in wts[1:]:
            W = np.multiply.outer(W, w)
        return float(np.sum(W * vals))

    # odd orders along an exactly-even axis centred at 0 vanish identically
    zero_odd = [i for i in model.even if point[i] == 0]
    coeffs = {}
    for e in monomials(d, 0, order):
        if any(e[i] % 2 for i in zero_odd):
            coeffs[e] = 0.0
            continue
        if sum(e) == 0:
            coeffs[e] = float(model.objective(np.asarray(point, float)))
            continue
        D1 = deriv(e, steps)
        D2 = deriv(e, steps / 2)
        D = (4 * D2 - D1) / 3
        coeffs[e] = D / math.prod(math.factorial(q) for q in e)
    return coeffs


def taylor_coefficients(model: Model, point, order: int, method: str | None = None,
                        radii=None, npts: int = 32, h0: float = FD_STEP) -> dict:
    point = np.asarray(point, dtype=float)
    if order > MAX_ORDER:
        raise ValueError(f"Taylor order is limited to {MAX_ORDER}")
    method = method or ("cauchy" if model.complex_ok else "fd")
    scales = np.asarray(model.length_scales(point), float)
    if method == "cauchy":
        if not model.complex_ok:
            raise ValueError("contour Taylor expansion needs an objective that accepts complex input")
        r = 0.5 * scales if radii is None else np.broadcast_to(np.asarray(radii, float), (model.dim,))
        return _cauchy(model, point, order, r, npts)
    if method == "fd":
        return _fd(model, point, order, h0 * scales)
    raise ValueError(f"unknown Taylor method {method!r}")


def taylor_at(model: Model, point, order: int = 4, method: str | None = None, radii=None,
              npts: int = 32, h0: float = FD_STEP, gate: float = SYMMETRY_GATE) -> TaylorResult:
    """Projected Taylor jet of ``model.objective`` about ``point`` (constant dropped)."""
    coeffs = taylor_coefficients(model, point, order, method, radii, npts, h0)
    d = model.dim
    value = coeffs.pop((0,) * d)
    raw = Jet(d, order, {e: c for e, c in coeffs.items() if c != 0}, FLOAT)
    exact_gens = [tuple(-1 if j == i else 1 for j in range(d)) for i in model.even]
    partial = reynolds_project(raw, SignAction(d, tuple(exact_gens)))
    full = reynolds_project(raw, SignAction.full(d))
    exact_res = max((abs(c) for e, c in raw if any(e[i] % 2 for i in model.even)), default=0.0)
    big = max((abs(c) for e, c in raw if sum(e) >= 2), default=0.0)
    dropped = max((abs(c) for e, c in partial if sum(e) >= 2 and any(p % 2 for p in e)), default=0.0)
    residual = dropped / big if big > 0 else 0.0
    symmetric = residual <= gate
    used = method or ("cauchy" if model.complex_ok else "fd")
    return TaylorResult(full, raw, partial, float(value), float(residual), float(exact_res), symmetric, used)
