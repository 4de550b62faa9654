"""Diagonal sign actions of finite groups on R^n.

Only subgroups of ``{+1,-1}^n`` acting by coordinate sign flips are handled.
A monomial ``x^e`` picks up the factor ``prod(g_i ** e_i)`` under ``g``, so
invariance and equivariance reduce to parity bookkeeping and every basis here
is a set of monomials.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from functools import cached_property
from typing import Sequence

from .jets import FLOAT, RATIONAL, Jet, monomials

MAX_VARIABLES = 24


class GroupError(ValueError):
    pass


def _char(exp, g) -> int:
    s = 1
    for e, gi in zip(exp, g):
        if gi < 0 and e % 2:
            s = -s
    return s


@dataclass(frozen=True)
class SignAction:
    """Group generated by sign vectors acting diagonally on ``n`` coordinates.

    With no generators this is the trivial action and the equivariant theory
    collapses to the classical one.
    """

    n: int
    generators: tuple = field(default=())

    def __post_init__(self):
        if self.n < 1:
            raise GroupError("n must be positive")
        gens = []
        for g in self.generators:
            g = tuple(int(s) for s in g)
            if len(g) != self.n or any(s not in (1, -1) for s in g):
                raise GroupError(f"generator {g} is not a sign vector of length {self.n}")
            gens.append(g)
        object.__setattr__(self, "generators", tuple(gens))

    @classmethod
    def trivial(cls, n):
        return cls(n, ())

    @classmethod
    def full(cls, n):
        """Independent sign flip of every coordinate (the group ``Z2^n``)."""
        gens = []
        for i in range(n):
            g = [1] * n
            g[i] = -1
            gens.append(tuple(g))
        return cls(n, tuple(gens))

    @classmethod
    def overall(cls, n):
        return cls(n, ((-1,) * n,))

    @classmethod
    def from_spec(cls, spec, n: int | None = None) -> "SignAction":
        """Build from ``"full"``/``"overall"``/``"trivial"`` or a JSON-like dict."""
        if isinstance(spec, SignAction):
            return spec
        if isinstance(spec, str):
            name = spec.strip().lower()
            if name.startswith("{"):
                return cls.from_spec(json.loads(name), n)
            if n is None:
                raise GroupError(f"named action {spec!r} needs the variable count")
            try:
                return {"full": cls.full, "overall": cls.overall, "trivial": cls.trivial}[name](n)
            except KeyError:
                raise GroupError(f"unknown action name {spec!r}") from None
        if isinstance(spec, dict):
            m = int(spec.get("n", n if n is not None else 0))
            if n is not None and m != n:
                raise GroupError(f"action declares n={m} but the germ has {n} variables")
            return cls(m, tuple(tuple(g) for g in spec.get("generators", [])))
        raise GroupError(f"cannot interpret action spec {spec!r}")

    def to_json(self) -> dict:
        return {"n": self.n, "generators": [list(g) for g in self.generators]}

    @cached_property
    def elements(self) -> tuple:
        return tuple(group_elements(self))

    @cached_property
    def fixed_coords(self) -> frozenset:
        """Coordinates left alone by every element; they span the fixed subspace."""
        return frozenset(i for i in range(self.n) if all(g[i] == 1 for g in self.generators))

    @property
    def order(self) -> int:
        return len(self.elements)

    def is_full(self) -> bool:
        """True when every coordinate can be flipped on its own (generators span GF(2)^n)."""
        rows = [sum(1 << i for i, s in enumerate(g) if s < 0) for g in self.generators]
        rank = 0
        for bit in range(self.n):
            piv = next((r for r in rows if r >> bit & 1), None)
            if piv is None:
                continue
            rows = [r ^ piv if r >> bit & 1 and r != piv else r for r in rows if r != piv]
            rank += 1
        return rank == self.n

    def monomial_invariant(self, exp) -> bool:
        return all(_char(exp, g) == 1 for g in self.generators)

    def monomial_equivariant(self, exp, i: int) -> bool:
        """Whether ``x^exp * e_i`` commutes with the action."""
        return all(_char(exp, g) == g[i] for g in self.generators)

    @cached_property
    def generator_degree(self) -> int:
        """Largest degree among minimal invariant monomials (the monomial Hilbert basis)."""
        top = max(2, self.n)
        inv = [e for e in monomials(self.n, 1, top) if self.monomial_invariant(e)]
        best = 1
        for e in inv:
            d = sum(e)
            reducible = any(
                0 < sum(q) < d and all(a <= b for a, b in zip(q, e)) for q in inv if sum(q) < d
            )
            if not reducible:
                best = max(best, d)
        return best


def group_elements(action: SignAction) -> list[tuple]:
    """Closure of the generators, identity first, then lexicographic with ``+1 < -1``."""
    if action.n > MAX_VARIABLES:
        raise GroupError(f"element enumeration capped at n <= {MAX_VARIABLES}")
    ident = (1,) * action.n
    seen = {ident}
    frontier = [ident]
    while frontier:
        nxt = []
        for a in frontier:
            for g in action.generators:
                b = tuple(x * y for x, y in zip(a, g))
                if b not in seen:
                    seen.add(b)
                    nxt.append(b)
        frontier = nxt
    return sorted(seen, key=lambda g: tuple(0 if s == 1 else 1 for s in g))


def invariant_monomial_basis(action: SignAction, lo: int, hi: int) -> list[tuple]:
    return [e for e in monomials(action.n, lo, hi) if action.monomial_invariant(e)]


@dataclass(frozen=True)
class VectorJet:
    """Vector field whose ``i``-th component is the coefficient of d/dx_i."""

    components: tuple

    def __post_init__(self):
        comps = tuple(self.components)
        if not comps:
            raise GroupError("empty vector field")
        c0 = comps[0]
        for c in comps:
            if (c.n, c.order, c.kind) != (c0.n, c0.order, c0.kind):
                raise GroupError("vector field components disagree on ambient data")
        if len(comps) != c0.n:
            raise GroupError("a vector field on R^n needs n components")
        object.__setattr__(self, "components", comps)

    @property
    def n(self):
        return self.components[0].n

    def is_equivariant(self, action: SignAction) -> bool:
        for i, comp in enumerate(self.components):
            for e, _ in comp:
                if not action.monomial_equivariant(e, i):
                    return False
        return True

    def dot_gradient(self, f: Jet) -> Jet:
        from .jets import jet_mul, jet_partial

        out = Jet.zero(f.n, f.order, f.kind)
        for i, comp in enumerate(self.components):
            out = out + jet_mul(comp, jet_partial(f, i))
        return out


def equivariant_fields(action: SignAction, lo: int, hi: int) -> list[tuple[int, tuple]]:
    """Equivariant monomial fields as ``(i, exponent)`` pairs, component-major."""
    mons = monomials(action.n, lo, hi)
    return [(i, e) for i in range(action.n) for e in mons if action.monomial_equivariant(e, i)]


def equivariant_vector_basis(action: SignAction, lo: int, hi: int, order: int | None = None,
                             kind: str = RATIONAL) -> list[VectorJet]:
    order = hi if order is None else order
    out = []
    for i, e in equivariant_fields(action, lo, hi):
        comps = [Jet.zero(action.n, order, kind) for _ in range(action.n)]
        comps[i] = Jet.monomial(e, order, 1, kind)
        out.append(VectorJet(tuple(comps)))
    return out


def act(f: Jet, g: Sequence[int]) -> Jet:
    """The jet ``x -> f(g.x)``."""
    return f.map_coeffs(lambda e, c: c * _char(e, g))


def reynolds_project(f: Jet, action: SignAction) -> Jet:
    """Group average ``(1/|G|) sum_g f(g.x)``.

    For sign groups the average of a monomial's character is 1 or 0, so the
    projection keeps exactly the invariant monomials.
    """
    if f.n != action.n:
        raise GroupError(f"jet has {f.n} variables, action acts on {action.n}")
    return Jet(f.n, f.order, {e: c for e, c in f if action.monomial_invariant(e)}, f.kind)


def invariance_residual(f: Jet, action: SignAction) -> Jet:
    """``f - reynolds_project(f)``: the non-invariant part."""
    if f.n != action.n:
        raise GroupError(f"jet has {f.n} variables, action acts on {action.n}")
    return Jet(f.n, f.order, {e: c for e, c in f if not action.monomial_invariant(e)}, f.kind)


def is_invariant(f: Jet, action: SignAction, tol: float = 0.0) -> bool:
    res = invariance_residual(f, action)
    if f.kind == FLOAT and tol > 0:
        scale = max(f.max_abs_coeff(), 1.0)
        return res.max_abs_coeff() <= tol * scale
    return res.is_zero()


__all__ = [
    "GroupError",
    "SignAction",
    "VectorJet",
    "act",
    "equivariant_fields",
    "equivariant_vector_basis",
    "group_elements",
    "invariance_residual",
    "invariant_monomial_basis",
    "is_invariant",
    "reynolds_project",
]
