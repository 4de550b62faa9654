"""Invariant unfoldings, the transversality test and universal unfoldings.

An ``r``-parameter unfolding is stored through its base germ ``f`` and the
initial speeds ``alpha_i = dF/du_i (x, 0)``.  Transversality is the spanning
condition ``E(G) = T^ext f + span{1, alpha_1, ..., alpha_r}``, which by the
codimension certificate can be decided inside a finite jet space.
"""

from __future__ import annotations

from dataclasses import dataclass, field

from .groups import SignAction, invariance_residual
from .jets import FLOAT, Jet, default_names, embed, format_jet, format_monomial, jet_partial, restrict
from .local_algebra import CodimReport, check_invariant, codimension, span_test, DEFAULT_CAP


class UndecidableError(ValueError):
    """The base germ is not finitely determined within the jet cap."""


@dataclass(frozen=True)
class Unfolding:
    base: Jet
    alphas: tuple = ()
    params: tuple = ()
    full: Jet | None = None

    def __post_init__(self):
        alphas = tuple(self.alphas)
        params = tuple(self.params) or tuple(f"u{i + 1}" for i in range(len(alphas)))
        if len(params) != len(alphas):
            raise ValueError(f"{len(params)} parameter names for {len(alphas)} directions")
        for a in alphas:
            if a.n != self.base.n:
                raise ValueError("unfolding directions must live in the germ's variables")
        object.__setattr__(self, "alphas", alphas)
        object.__setattr__(self, "params", params)

    @property
    def r(self) -> int:
        return len(self.alphas)

    def drop(self, i: int) -> "Unfolding":
        keep = [j for j in range(self.r) if j != i]
        return Unfolding(self.base, [self.alphas[j] for j in keep], [self.params[j] for j in keep])

    def padded(self, extra: Jet, name: str | None = None) -> "Unfolding":
        name = name or f"u{self.r + 1}"
        return Unfolding(self.base, self.alphas + (extra,), self.params + (name,))

    def format(self, names=None, base_symbol: str | None = None) -> str:
        """``x^6 + u1*x^2 + u2*x^4``; with ``base_symbol`` the germ is abbreviated."""
        names = names or default_names(self.base.n)
        out = base_symbol if base_symbol is not None else format_jet(self.base, names)
        for u, a in zip(self.params, self.alphas):
            if len(a) == 1:
                (e, c), = a.terms.items()
                if c == 1:
                    out += f" + {u}*{format_monomial(e, names)}"
                    continue
            out += f" + {u}*({format_jet(a, names)})"
        return out


@dataclass(frozen=True)
class TransversalityReport:
    transversal: bool
    order_used: int
    missing: tuple = field(default=())
    minimal: bool = False
    codim: int | None = None

    def missing_strings(self, names=None) -> list[str]:
        return [format_monomial(e, names) for e in self.missing]


def alphas_of(full: Jet, action: SignAction, params=None) -> Unfolding:
    """Split ``F(x, u)`` into base and initial speeds; the last ``r`` variables are parameters."""
    n = action.n
    r = full.n - n
    if r < 0:
        raise ValueError(f"unfolding has {full.n} variables, fewer than the action's {n}")
    xs = list(range(n))
    base = restrict(full, xs)
    check_invariant(base, action)
    alphas = []
    for j in range(r):
        a = restrict(jet_partial(full, n + j), xs)
        res = invariance_residual(a, action)
        if not res.is_zero() and not (a.kind == FLOAT and res.max_abs_coeff() <= 1e-9 * max(a.max_abs_coeff(), 1.0)):
            bad = format_monomial(next(iter(res.terms)))
            raise ValueError(f"direction {j + 1} is not invariant: offending monomial {bad}")
        alphas.append(a)
    return Unfolding(base, alphas, params or (), full)


def _common_kind(base: Jet, alphas):
    if base.kind == FLOAT or any(a.kind == FLOAT for a in alphas):
        return base.to_float(), [a.to_float() for a in alphas]
    return base, list(alphas)


def is_transversal(U: Unfolding, action: SignAction, cap: int = DEFAULT_CAP,
                   codim: CodimReport | None = None) -> TransversalityReport:
    base, alphas = _common_kind(U.base, U.alphas)
    for a in alphas:
        check_invariant(a, action)
    rep = codim if codim is not None else codimension(base, action, cap=cap)
    if not rep.finite:
        raise UndecidableError("base germ has no certified finite codimension within the cap")
    N = rep.order_used
    one = Jet.constant(base.n, N, 1, base.kind)
    test = span_test(base, action, [one] + [a.with_order(N) for a in alphas], N)
    return TransversalityReport(test.spans, N, test.missing, test.spans and U.r == rep.value, rep.value)


def universal_unfolding(f: Jet, action: SignAction, cap: int = DEFAULT_CAP,
                        codim: CodimReport | None = None) -> Unfolding:
    """``f + sum u_i z_i`` with ``z_i`` the codimension complement monomials."""
    rep = codim if codim is not None else codimension(f, action, cap=cap)
    if not rep.finite:
        raise UndecidableError("germ has no certified finite codimension within the cap")
    q = rep.value
    order = max([f.order] + [sum(z) + 1 for z in rep.complement])
    alphas = [Jet.monomial(z, f.order, 1, f.kind) for z in rep.complement]
    terms = dict(embed(f.with_order(order), f.n + q, range(f.n)).terms)
    for j, z in enumerate(rep.complement):
        e = list(z) + [0] * q
        e[f.n + j] = 1
        terms[tuple(e)] = terms.get(tuple(e), 0) + (1 if f.kind != FLOAT else 1.0)
    full = Jet(f.n + q, order, terms, f.kind)
    return Unfolding(f, alphas, (), full)


@dataclass(frozen=True)
class EquivalenceVerdict:
    equivalent: bool | None  # None: not decided by the theorem
    reason: str


def unfoldings_equivalent(U: Unfolding, V: Unfolding, action: SignAction,
                          cap: int = DEFAULT_CAP) -> EquivalenceVerdict:
    """Decide equivalence of two unfoldings of the same germ without building the map.

    Two transversal unfoldings of one germ with the same parameter count are
    equivalent by the uniqueness theorem for versal unfoldings; this verdict
    is reported as such, not as a constructed diffeomorphism.
    """
    a, b = _common_kind(U.base, [V.base])
    if a.with_order(max(a.order, b[0].order)) != b[0].with_order(max(a.order, b[0].order)):
        return EquivalenceVerdict(None, "different base germs; compare normal forms first")
    if U.r != V.r:
        return EquivalenceVerdict(False, f"parameter counts differ ({U.r} vs {V.r})")
    tu = is_transversal(U, action, cap)
    tv = is_transversal(V, action, cap)
    if tu.transversal and tv.transversal:
        return EquivalenceVerdict(True, "both transversal with equal parameter count")
    return EquivalenceVerdict(None, "at least one unfolding is not transversal; equivalence not certified")
