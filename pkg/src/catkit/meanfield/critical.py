"""Critical points, global minimisation and degeneracy tuning."""

from __future__ import annotations

import logging
from dataclasses import dataclass, field

import numpy as np
from scipy.optimize import brentq, minimize

from .models import Chi, lncosh, MeanFieldParams, Model, PairingModel, StrongCouplingModel, StrongCouplingParams

log = logging.getLogger(__name__)

DEGENERACY_THRESHOLD = 1e-6
DEDUP_TOL = 1e-6


@dataclass(frozen=True)
class CriticalPoint:
    c: tuple
    grad_norm: float
    hess_eigs: tuple
    degenerate: bool
    objective: float

    @property
    def kind(self) -> str:
        if self.degenerate:
            return "degenerate"
        eig = np.asarray(self.hess_eigs)
        if np.all(eig > 0):
            return "minimum"
        if np.all(eig < 0):
            return "maximum"
        return "saddle"

    def to_json(self) -> dict:
        return {"c": list(self.c), "grad_norm": self.grad_norm, "hess_eigs": list(self.hess_eigs),
                "degenerate": self.degenerate, "kind": self.kind, "objective": self.objective}


def annotate(model: Model, c, threshold: float = DEGENERACY_THRESHOLD) -> CriticalPoint:
    c = np.asarray(c, float)
    g = model.gradient(c)
    eig = np.linalg.eigvalsh(model.hessian(c))
    return CriticalPoint(tuple(float(x) for x in c), float(np.linalg.norm(g)), tuple(float(x) for x in eig),
                         bool(np.min(np.abs(eig)) < threshold), float(model.objective(c)))


def newton(model: Model, c0, maxit: int = 100, gtol: float = 1e-10):
    """Damped Newton on the gradient with a backtracking line search on ``|grad|``."""
    c = np.asarray(c0, float).copy()
    g = model.gradient(c)
    gn = np.linalg.norm(g)
    for _ in range(maxit):
        if gn == 0.0:
            break
        # keep iterating below gtol: near a degenerate point convergence is only
        # linear and an early stop leaves a cloud of spurious nearby solutions
        H = model.hessian(c)
        try:
            step = -np.linalg.solve(H, g)
        except np.linalg.LinAlgError:
            step = -np.linalg.lstsq(H, g, rcond=None)[0]
        if not np.all(np.isfinite(step)):
            break
        t = 1.0
        while t > 1e-8:
            cn = c + t * step
            gnew = model.gradient(cn)
            gnn = np.linalg.norm(gnew)
            if np.isfinite(gnn) and gnn < gn:
                break
            t /= 2
        else:
            break
        c, g, gn = cn, gnew, gnn
    return c, gn, gn <= gtol


def _same_basin(model: Model, a, b, gtol: float, samples: int = 9) -> bool:
    """True when the gradient stays below ``gtol`` along the segment from ``a`` to ``b``."""
    return all(np.linalg.norm(model.gradient(a + t * (b - a))) <= gtol
               for t in np.linspace(0.0, 1.0, samples))


def _merge(model: Model, pts, dedup: float, gtol: float):
    """Drop near duplicates, preferring the smallest gradient (then the smallest |c|)."""
    pts = sorted(pts, key=lambda c: (float(np.linalg.norm(model.gradient(c))), float(np.abs(c).sum())))
    kept = []
    for c in pts:
        if any(np.max(np.abs(c - k)) < dedup or _same_basin(model, c, k, gtol) for k in kept):
            continue
        kept.append(c)
    return kept


def _seeds(box, n):
    axes = [np.linspace(lo, hi, n) for lo, hi in box]
    mesh = np.meshgrid(*axes, indexing="ij")
    return np.stack([m.ravel() for m in mesh], axis=1)


def find_critical_points(model: Model, box=None, seeds: int = 21, dedup: float = DEDUP_TOL,
                         threshold: float = DEGENERACY_THRESHOLD, gtol: float = 1e-10) -> list[CriticalPoint]:
    """Multistart damped Newton from a ``seeds^dim`` grid; results deduplicated and sorted."""
    box = box or model.default_box()
    lo = np.array([b[0] for b in box])
    hi = np.array([b[1] for b in box])
    pad = 0.05 * (hi - lo)
    found = []
    for s in _seeds(box, seeds):
        c, gn, ok = newton(model, s, gtol=gtol)
        if not ok or np.any(c < lo - pad) or np.any(c > hi + pad):
            continue
        found.append(c)
    found = _merge(model, found, dedup, gtol)
    if not found:
        log.info("no seed converged to a critical point inside the box")
    pts = [annotate(model, c, threshold) for c in found]
    return sorted(pts, key=lambda p: (round(p.objective, 12), p.c))


@dataclass(frozen=True)
class Minimum:
    c: tuple
    objective: float
    success: bool
    message: str = ""


def grid_argmin(model: Model, box, n):
    pts = _seeds(box, n)
    vals = np.asarray(model.objective(pts.T), float)
    return pts, vals


def global_minimum(model: Model, box=None, grid: int = 41, starts: int = 4) -> Minimum:
    """Coarse grid scan, then bounded quasi-Newton refinement of the best grid points."""
    box = box or model.default_box()
    pts, vals = grid_argmin(model, box, grid)
    finite = np.isfinite(vals)
    if not finite.any():
        return Minimum(tuple(float("nan") for _ in box), float("nan"), False, "objective not finite on the grid")
    order = np.argsort(np.where(finite, vals, np.inf), kind="stable")[:starts]
    best = None
    for i in order:
        res = minimize(lambda c: float(model.objective(c)), pts[i], jac=model.gradient,
                       method="L-BFGS-B", bounds=box, options={"ftol": 1e-15, "gtol": 1e-11, "maxiter": 500})
        cand = (float(res.fun), tuple(float(x) for x in res.x))
        if best is None or cand[0] < best[0] - 1e-14:
            best = cand
    if best is None or not np.isfinite(best[0]):
        return Minimum(tuple(pts[order[0]]), float(vals[order[0]]), False, "refinement failed")
    return Minimum(best[1], best[0], True)


def symmetric_branch(model: Model, box=None, grid: int = 81) -> Minimum:
    """Minimum over the subspace where every exactly-even coordinate vanishes."""
    box = box or model.default_box()
    free = [i for i in range(model.dim) if i not in model.even]
    if not free:
        c = np.zeros(model.dim)
        return Minimum(tuple(c), float(model.objective(c)), True)

    class _Sub:
        dim = len(free)

        def embed(self, y):
            y = np.asarray(y, float)
            c = np.zeros((model.dim,) + y.shape[1:])
            for k, i in enumerate(free):
                c[i] = y[k]
            return c

        def objective(self, y):
            return model.objective(self.embed(y))

        def gradient(self, y):
            return model.gradient(self.embed(y))[free]

    sub = _Sub()
    m = global_minimum(sub, [box[i] for i in free], grid=grid, starts=2)
    return Minimum(tuple(float(x) for x in sub.embed(np.asarray(m.c))), m.objective, m.success, m.message)


# --- degeneracy tuning ---------------------------------------------------------

@dataclass(frozen=True)
class TunedPoint:
    params: object
    point: tuple
    shift: float  # s = mu + 2 delt c2 - lam at the point (pairing) or u2 (strong coupling)
    roots: tuple = field(default=())


def _pairing_family(s, beta, h, mu, lam):
    """Couplings making ``(0, c2)`` a critical point with vanishing Hessian, as functions of ``s``."""
    chi = Chi(beta, float(lncosh(beta * h)), lam * beta)
    _, d1, d2 = chi.derivs(s * s)
    g1 = 2 * s * d1  # G'(s) with G(s) = chi(s^2)
    g2 = 2 * d1 + 4 * s * s * d2  # G''(s)
    delt = 1.0 / (2 * g2)
    gam = 1.0 / d1
    c2 = 1.0 + g1
    resid = mu + 2 * delt * c2 - lam - s
    return gam, delt, c2, resid


def tune_degenerate(beta: float = 1.0, h: float = 0.0, mu: float = 2.0, lam: float = 6.0,
                    s_range=(-40.0, 40.0), npts: int = 4001) -> TunedPoint:
    """Pairing couplings ``(gam, delt)`` with a fully degenerate critical point at ``c1 = 0``.

    On ``c1 = 0`` the gradient and Hessian conditions are solved in closed form
    in terms of ``s = mu + 2 delt c2 - lam``; the remaining consistency
    condition is a scalar equation in ``s``, bracketed on a grid and solved
    with Brent's method.  The root with the smallest positive ``s`` is used.
    """
    grid = np.linspace(s_range[0], s_range[1], npts)
    grid = grid[np.abs(grid) > 1e-9]

    def resid(s):
        return _pairing_family(s, beta, h, mu, lam)[3]

    vals = np.array([resid(s) for s in grid])
    roots = []
    for a, b, fa, fb in zip(grid[:-1], grid[1:], vals[:-1], vals[1:]):
        if np.isfinite(fa) and np.isfinite(fb) and np.sign(fa) != np.sign(fb) and a * b > 0:
            r = brentq(resid, a, b, xtol=1e-15, rtol=4 * np.finfo(float).eps, maxiter=200)
            gam, delt, _, _ = _pairing_family(r, beta, h, mu, lam)
            # a sign change across a pole is not a root
            if abs(resid(r)) > 1e-8 * max(1.0, abs(fa), abs(fb)):
                continue
            if gam > 0 and np.isfinite(delt):
                roots.append(r)
    if not roots:
        raise ValueError(f"no degenerate configuration found for lam={lam}")
    roots.sort(key=lambda r: (r < 0, abs(r)))
    s = roots[0]
    gam, delt, c2, _ = _pairing_family(s, beta, h, mu, lam)
    params = MeanFieldParams(beta=beta, h=h, mu=mu, lam=lam, gam=float(gam), delt=float(delt))
    return TunedPoint(params, (0.0, float(c2)), float(s), tuple(float(r) for r in roots))


def tune_strong_coupling(u2_range=(0.05, 5.0), npts: int = 500) -> TunedPoint:
    """Most degenerate point of the strong-coupling family: c^2 and c^4 coefficients vanish.

    With ``Phi(s) = chi(u2^2 + s)`` the expansion at ``c = 0`` is
    ``(u1 - u1^2 Phi'(0)) c^2 - u1^4 Phi''(0) c^4 / 2 + ...``, so ``u2`` solves
    ``Phi''(0) = 0`` and then ``u1 = 1 / Phi'(0)``.
    """
    def phi2(u2):
        return Chi(1.0, 0.0, u2).derivs(u2 * u2)[2]

    grid = np.linspace(u2_range[0], u2_range[1], npts)
    vals = np.array([phi2(u) for u in grid])
    roots = [brentq(phi2, a, b, xtol=1e-15) for a, b, fa, fb in zip(grid[:-1], grid[1:], vals[:-1], vals[1:])
             if np.sign(fa) != np.sign(fb)]
    if not roots:
        raise ValueError("no tricritical point in the u2 range")
    u2 = roots[0]
    u1 = 1.0 / Chi(1.0, 0.0, u2).derivs(u2 * u2)[1]
    return TunedPoint(StrongCouplingParams(float(u1), float(u2)), (0.0,), float(u2), tuple(roots))


def tuned_model(tp: TunedPoint) -> Model:
    if isinstance(tp.params, MeanFieldParams):
        return PairingModel(tp.params)
    return StrongCouplingModel(tp.params)
