"""Orbit tangent spaces, codimension and determinacy at jet level.

Everything is reduced to linear algebra over the invariant monomials of
degree ``<= N``: a tangent space becomes the row span of the jets
``jet_N(phi . grad f)`` for equivariant monomial fields ``phi``.

Certificates
------------
An inclusion ``M^k(G) in T`` for an ``E(G)``-module ``T`` is certified at jet
level ``N`` by checking every invariant monomial of degree ``k..N`` against
``jet_N(T)``.  This is sound by Nakayama's lemma as soon as
``N >= k + D - 1``, where ``D`` is the largest degree of a minimal invariant
monomial, because then ``M^{N+1}(G) in M(G) M^k(G)``.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Sequence

from .groups import SignAction, equivariant_fields, invariance_residual, invariant_monomial_basis
from .jets import FLOAT, RATIONAL, Jet, format_monomial, glex_key, jet_partial
from .linalg import DEFAULT_RANK_TOL, ExactRowSpace, FloatRowSpace

DEFAULT_CAP = 16
INFINITE = "infinite-suspected"
UNDETERMINED = "undetermined-at-cap"
INVARIANCE_TOL = 1e-9


class NotInvariantError(ValueError):
    pass


def complement_key(exp):
    """Preference order for complement monomials.

    Lowest degree first; within a degree the most balanced monomial (smallest
    largest exponent) wins, ties broken graded-lex.  For the corank-2 quartics
    this picks ``x^2*y^2`` as the degree-4 modulus direction, whatever the
    mixed coefficient is.
    """
    return (sum(exp), max(exp), glex_key(exp))


def check_invariant(f: Jet, action: SignAction, tol: float = INVARIANCE_TOL):
    if f.n != action.n:
        raise NotInvariantError(f"germ has {f.n} variables but the action acts on {action.n}")
    res = invariance_residual(f, action)
    if res.is_zero():
        return
    if f.kind == FLOAT and res.max_abs_coeff() <= tol * max(f.max_abs_coeff(), 1.0):
        return
    bad = next(iter(res.terms))
    raise NotInvariantError(f"germ is not invariant under the action: offending monomial {format_monomial(bad)}")


@dataclass(frozen=True)
class TangentSpan:
    n: int
    order: int
    action: SignAction
    basis_jets: tuple
    extended: bool

    def __len__(self):
        return len(self.basis_jets)


@dataclass(frozen=True)
class CodimReport:
    value: object  # int, or INFINITE
    order_used: int
    certified: bool
    complement: tuple = ()
    certificate_degree: int | None = None

    @property
    def finite(self) -> bool:
        return isinstance(self.value, int)

    def complement_strings(self, names=None) -> list[str]:
        return [format_monomial(e, names) for e in self.complement]


class _Columns:
    """Index of the invariant monomials of degree ``0..N``."""

    def __init__(self, action: SignAction, N: int):
        self.mons = invariant_monomial_basis(action, 0, N)
        self.index = {e: i for i, e in enumerate(self.mons)}
        self.N = N

    def row(self, jet_terms) -> dict:
        out = {}
        for e, c in jet_terms:
            if sum(e) > self.N:
                continue
            try:
                out[self.index[e]] = c
            except KeyError:
                raise NotInvariantError(f"non-invariant monomial {format_monomial(e)} in a tangent row") from None
        return out

    def unit(self, e) -> dict:
        return {self.index[e]: 1}


def _new_space(ncols, kind, tol):
    return ExactRowSpace(ncols) if kind == RATIONAL else FloatRowSpace(ncols, tol)


def _field_rows(f: Jet, fields, N: int):
    """Terms of ``jet_N(x^m * d_i f)`` for each field ``(i, m)``."""
    grads = [list(jet_partial(f.with_order(N), i)) for i in range(f.n)]
    out = []
    for i, m in fields:
        dm = sum(m)
        terms = []
        for e, c in grads[i]:
            if sum(e) + dm <= N:
                terms.append((tuple(a + b for a, b in zip(e, m)), c))
        if terms:
            out.append(terms)
    return out


def _extended_fields(action, N):
    return equivariant_fields(action, 0, N)


def _vanishing_fields(action, N):
    return equivariant_fields(action, 1, N)


def _second_order_fields(action: SignAction, N: int):
    """Monomial fields spanning ``M(G) * (equivariant fields vanishing at 0)``."""
    inv = [q for q in invariant_monomial_basis(action, 1, N)]
    out = []
    for i, p in equivariant_fields(action, 2, N):
        for q in inv:
            if sum(q) >= sum(p):
                break
            if all(a <= b for a, b in zip(q, p)):
                rest = tuple(b - a for a, b in zip(q, p))
                if sum(rest) >= 1 and action.monomial_equivariant(rest, i):
                    out.append((i, p))
                    break
    return out


def tangent_span(f: Jet, action: SignAction, k: int, extended: bool = True) -> TangentSpan:
    """Spanning jets of ``jet_k`` of the (extended) orbit tangent space."""
    check_invariant(f, action)
    fields = _extended_fields(action, k) if extended else _vanishing_fields(action, k)
    jets = []
    for terms in _field_rows(f, fields, k):
        j = Jet(f.n, k, terms, f.kind)
        if not j.is_zero():
            jets.append(j)
    return TangentSpan(f.n, k, action, tuple(jets), extended)


def _build_space(f, action, N, fields, tol, extra=()):
    cols = _Columns(action, N)
    space = _new_space(len(cols.mons), f.kind, tol)
    for terms in _field_rows(f, fields, N):
        space.add(cols.row(terms))
    for j in extra:
        space.add(cols.row(list(j.with_order(N))))
    return cols, space


def _certificate_degree(cols: _Columns, space, lo: int = 1):
    """Smallest ``k >= lo`` with every invariant monomial of degree ``k..N`` in the span."""
    by_degree: dict[int, list] = {}
    for e in cols.mons:
        by_degree.setdefault(sum(e), []).append(e)
    k = cols.N + 1
    for d in range(cols.N, lo - 1, -1):
        if all(space.contains(cols.unit(e)) for e in by_degree.get(d, [])):
            k = d
        else:
            break
    return k if k <= cols.N else None


def greedy_complement(cols: _Columns, space, lo: int = 1) -> list[tuple]:
    """Monomials (in :func:`complement_key` order) that extend the span, degree >= lo.

    ``space`` is modified in place.
    """
    chosen = []
    for e in sorted((e for e in cols.mons if sum(e) >= lo), key=complement_key):
        if space.add(cols.unit(e)):
            chosen.append(e)
    return chosen


def _copy_space(space):
    if isinstance(space, ExactRowSpace):
        new = ExactRowSpace(space.ncols)
        new._pivots = dict(space._pivots)
    else:
        new = FloatRowSpace(space.ncols, space.tol)
        new._basis = list(space._basis)
    return new


def codimension(f: Jet, action: SignAction, cap: int = DEFAULT_CAP, start: int = 2,
                tol: float = DEFAULT_RANK_TOL) -> CodimReport:
    """``dim M(G) / T^ext`` with its complement monomials.

    The jet level ``N`` is raised from ``start`` until the count agrees at two
    consecutive levels and ``M^k(G) in T^ext`` is certified.  Past ``cap`` the
    value is reported as :data:`INFINITE` (in-band, not an exception).
    """
    check_invariant(f, action)
    D = action.generator_degree
    prev = None
    last = None
    for N in range(max(start, 1), cap + 1):
        cols, space = _build_space(f, action, N, _extended_fields(action, N), tol)
        k = _certificate_degree(cols, space)
        comp = greedy_complement(cols, _copy_space(space))
        count = len(comp)
        last = (N, comp, k)
        if k is not None and N >= max(k, 1) + D - 1 and prev == count:
            return CodimReport(count, N, True, tuple(comp), k)
        prev = count
    N, comp, k = last
    return CodimReport(INFINITE, N, False, tuple(comp), None)


def determinacy_check(f: Jet, action: SignAction, k: int, N: int | None = None,
                      tol: float = DEFAULT_RANK_TOL) -> bool:
    """Sufficient test for ``k``-determinacy.

    Checks ``M^{k+1}(G) in M(G) . T_O`` (the equivariant form of
    ``M^{k+1} in M^2 J(f)``) with a Nakayama-sound jet level.
    """
    check_invariant(f, action)
    D = action.generator_degree
    N = k + D if N is None else N
    if N < k + D:
        raise ValueError(f"jet level {N} too low to certify {k}-determinacy (need >= {k + D})")
    cols, space = _build_space(f, action, N, _second_order_fields(action, N), tol)
    for e in cols.mons:
        if sum(e) >= k + 1 and not space.contains(cols.unit(e)):
            return False
    return True


def determinacy_order(f: Jet, action: SignAction, cap: int = DEFAULT_CAP, tol: float = DEFAULT_RANK_TOL):
    """Least ``k`` passing :func:`determinacy_check`, or :data:`UNDETERMINED`."""
    check_invariant(f, action)
    D = action.generator_degree
    k = 0
    while k + D <= cap:
        if determinacy_check(f, action, k, tol=tol):
            return k
        k += 1
    return UNDETERMINED


@dataclass(frozen=True)
class SpanTest:
    """Result of testing ``T^ext + span(extra)`` against all invariant jets of degree ``lo..N``."""

    spans: bool
    missing: tuple = field(default=())
    order_used: int = 0


def span_test(f: Jet, action: SignAction, extra: Sequence[Jet], N: int, lo: int = 0,
              tol: float = DEFAULT_RANK_TOL) -> SpanTest:
    cols, space = _build_space(f, action, N, _extended_fields(action, N), tol, extra)
    missing = greedy_complement(cols, space, lo)
    return SpanTest(not missing, tuple(missing), N)
