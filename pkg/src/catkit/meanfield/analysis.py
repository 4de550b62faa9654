"""Classification of degenerate critical points of mean-field objectives."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ..classify import ClassificationResult, classify_germ
from ..groups import SignAction, reynolds_project
from ..jets import FLOAT, Jet
from ..unfolding import TransversalityReport, Unfolding, UndecidableError, is_transversal
from .critical import DEGENERACY_THRESHOLD, CriticalPoint, annotate
from .models import Model, PairingModel, StrongCouplingModel
from .taylor import SYMMETRY_GATE, TaylorResult, taylor_at, taylor_coefficients

DEFAULT_UNFOLDING_PARAMS = {PairingModel: ("lam", "gam", "delt"), StrongCouplingModel: ("u1", "u2")}


@dataclass(frozen=True)
class CriticalClassification:
    point: CriticalPoint
    taylor: TaylorResult
    germ: Jet  # projected jet with the degenerate quadratic directions zeroed
    result: ClassificationResult
    transversality: TransversalityReport | None
    unfolding_params: tuple
    note: str = ""

    @property
    def symmetric(self) -> bool:
        return self.taylor.symmetric

    @property
    def transversal(self) -> bool | None:
        return None if self.transversality is None else self.transversality.transversal


def _clean(jet: Jet, hess_diag, threshold: float, rel_tol: float) -> Jet:
    """Drop linear terms, zero degenerate quadratic directions and negligible coefficients."""
    d = jet.n
    big = max((abs(c) for e, c in jet if sum(e) >= 2), default=0.0)
    terms = {}
    for e, c in jet:
        deg = sum(e)
        if deg < 2:
            continue
        if deg == 2 and max(e) == 2 and abs(hess_diag[e.index(2)]) < threshold:
            continue
        if abs(c) <= rel_tol * big:
            continue
        terms[e] = c
    return Jet(d, jet.order, terms, FLOAT)


def parameter_directions(model: Model, point, names, order: int, rel_step: float = 1e-5, **taylor_kw):
    """Initial speeds ``dF/dp`` at fixed ``c`` as Taylor jets, by central differences in ``p``."""
    out = []
    for name in names:
        p0 = getattr(model.params, name)
        h = rel_step * max(1.0, abs(p0))
        plus = taylor_coefficients(model.with_params(**{name: p0 + h}), point, order, **taylor_kw)
        minus = taylor_coefficients(model.with_params(**{name: p0 - h}), point, order, **taylor_kw)
        terms = {e: (plus[e] - minus[e]) / (2 * h) for e in plus if sum(e) >= 1}
        out.append(Jet(model.dim, order, terms, FLOAT))
    return out


def classify_critical_point(model: Model, point, order: int | None = None, params=None,
                            threshold: float = DEGENERACY_THRESHOLD, tol: float = 1e-9,
                            gate: float = SYMMETRY_GATE, transversality: bool = True,
                            method: str | None = None) -> CriticalClassification:
    """Taylor-expand at ``point``, classify the symmetrised jet, test the coupling unfolding.

    The coupling unfolding uses the directions ``params`` (by default the
    couplings of the built-in model) and is tested on the same symmetrised
    jet, in the original coordinates; transversality is invariant under the
    coordinate change to the normal form.
    """
    point = np.asarray(point, float)
    order = order or (6 if model.dim == 1 else 4)
    cp = annotate(model, point, threshold)
    kw = {"method": method} if method else {}
    tr = taylor_at(model, point, order, gate=gate, **kw)
    hdiag = np.diag(model.hessian(point))
    germ = _clean(tr.jet, hdiag, threshold, tol)
    action = SignAction.full(model.dim)
    result = classify_germ(germ, action, tol=tol)
    names = tuple(params) if params is not None else DEFAULT_UNFOLDING_PARAMS.get(type(model), ())
    trep = None
    note = "" if tr.symmetric else f"symmetrization residual {tr.residual:.3g} above gate {gate:g}"
    if transversality and names and result.classified and model.params is not None:
        alphas = parameter_directions(model, point, names, order, **kw)
        scale = max((abs(c) for a in alphas for _, c in a), default=1.0)
        alphas = [reynolds_project(Jet(a.n, a.order, {e: c for e, c in a if abs(c) > 1e-9 * scale}, FLOAT), action)
                  for a in alphas]
        try:
            trep = is_transversal(Unfolding(germ, alphas, names), action)
        except UndecidableError as exc:
            note = (note + "; " if note else "") + str(exc)
    return CriticalClassification(cp, tr, germ, result, trep, names, note)
