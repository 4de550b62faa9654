"""Truncated multivariate polynomials (jets).

A :class:`Jet` is the Taylor polynomial of a germ at the origin, cut off at a
fixed total degree.  Coefficients are either exact rationals
(:class:`fractions.Fraction`) or IEEE doubles; the two kinds never mix
implicitly.

Monomials are exponent tuples.  All listings use graded-lex order: total
degree ascending, then lexicographic with the first variable largest, so for
``(x, y)`` the degree-2 block reads ``x^2, x*y, y^2``.
"""

from __future__ import annotations

from fractions import Fraction
from itertools import combinations_with_replacement
from math import factorial, prod
from types import MappingProxyType
from typing import Iterable, Mapping, Sequence

RATIONAL = "rational"
FLOAT = "float"
KINDS = (RATIONAL, FLOAT)

Monomial = tuple


class JetError(ValueError):
    pass


class DimensionMismatchError(JetError):
    pass


class NotOriginPreservingError(JetError):
    pass


def degree(exp: Sequence[int]) -> int:
    return sum(exp)


def glex_key(exp: Sequence[int]):
    return (sum(exp), tuple(-e for e in exp))


def monomials(n: int, lo: int, hi: int) -> list[tuple[int, ...]]:
    """All exponent tuples in ``n`` variables with total degree in ``[lo, hi]``."""
    if n < 1:
        raise JetError("need at least one variable")
    out = []
    for d in range(max(lo, 0), hi + 1):
        block = []
        for combo in combinations_with_replacement(range(n), d):
            e = [0] * n
            for i in combo:
                e[i] += 1
            block.append(tuple(e))
        block.sort(key=glex_key)
        out.extend(block)
    return out


def _coerce(c, kind: str):
    if kind == RATIONAL:
        if isinstance(c, float):
            raise JetError("float coefficient in a rational jet; convert explicitly")
        return Fraction(c)
    if isinstance(c, Fraction):
        return float(c)
    return float(c)


class Jet:
    """Polynomial in ``n`` variables truncated above total degree ``order``.

    Instances are immutable and hashable.  Terms with zero coefficient and
    terms above the truncation order are dropped at construction.
    """

    __slots__ = ("n", "order", "kind", "_terms", "_hash")

    def __init__(self, n: int, order: int, terms: Mapping | Iterable = (), kind: str = RATIONAL):
        if n < 1:
            raise JetError("a jet needs n >= 1 variables")
        if order < 0:
            raise JetError("truncation order must be nonnegative")
        if kind not in KINDS:
            raise JetError(f"unknown coefficient kind {kind!r}")
        items = terms.items() if isinstance(terms, Mapping) else terms
        acc: dict[tuple[int, ...], object] = {}
        for exp, c in items:
            exp = tuple(int(e) for e in exp)
            if len(exp) != n or any(e < 0 for e in exp):
                raise JetError(f"bad exponent {exp} for n={n}")
            if sum(exp) > order:
                continue
            c = _coerce(c, kind)
            acc[exp] = acc.get(exp, 0) + c
        self.n = n
        self.order = order
        self.kind = kind
        self._terms = {e: c for e, c in sorted(acc.items(), key=lambda t: glex_key(t[0])) if c != 0}
        self._hash = None

    # construction helpers -------------------------------------------------
    @classmethod
    def zero(cls, n, order, kind=RATIONAL):
        return cls(n, order, {}, kind)

    @classmethod
    def constant(cls, n, order, c, kind=RATIONAL):
        return cls(n, order, {(0,) * n: c}, kind)

    @classmethod
    def monomial(cls, exp, order, c=1, kind=RATIONAL):
        exp = tuple(exp)
        return cls(len(exp), order, {exp: c}, kind)

    @classmethod
    def variable(cls, i, n, order, kind=RATIONAL):
        e = [0] * n
        e[i] = 1
        return cls(n, order, {tuple(e): 1}, kind)

    # mapping-like access ----------------------------------------------------
    @property
    def terms(self) -> Mapping[tuple[int, ...], object]:
        return MappingProxyType(self._terms)

    def __getitem__(self, exp):
        return self._terms.get(tuple(exp), 0)

    def __iter__(self):
        return iter(self._terms.items())

    def __len__(self):
        return len(self._terms)

    def __bool__(self):
        return bool(self._terms)

    def is_zero(self) -> bool:
        return not self._terms

    def __eq__(self, other):
        if not isinstance(other, Jet):
            return NotImplemented
        return (self.n, self.order, self.kind) == (other.n, other.order, other.kind) and self._terms == other._terms

    def __hash__(self):
        if self._hash is None:
            self._hash = hash((self.n, self.order, self.kind, frozenset(self._terms.items())))
        return self._hash

    def __repr__(self):
        return f"Jet({format_jet(self)!r}, n={self.n}, order={self.order}, kind={self.kind!r})"

    # structure ------------------------------------------------------------
    def lowest_degree(self):
        """Smallest degree carrying a nonzero term, or ``None`` for the zero jet."""
        return min((sum(e) for e in self._terms), default=None)

    def homogeneous_part(self, d: int) -> "Jet":
        return Jet(self.n, self.order, {e: c for e, c in self._terms.items() if sum(e) == d}, self.kind)

    def in_m_power(self, k: int) -> bool:
        """True when every term has degree >= k (membership in M^k)."""
        return all(sum(e) >= k for e in self._terms)

    def truncate(self, k: int) -> "Jet":
        return Jet(self.n, k, self._terms, self.kind)

    def with_order(self, k: int) -> "Jet":
        """Same polynomial, new truncation order (terms above ``k`` are dropped)."""
        return Jet(self.n, k, self._terms, self.kind)

    def max_abs_coeff(self) -> float:
        return max((abs(float(c)) for c in self._terms.values()), default=0.0)

    # conversions ------------------------------------------------------------
    def to_float(self) -> "Jet":
        """Round every coefficient to the nearest double."""
        if self.kind == FLOAT:
            return self
        return Jet(self.n, self.order, {e: float(c) for e, c in self._terms.items()}, FLOAT)

    def to_rational(self, max_denominator: int | None = None) -> "Jet":
        """Exact binary value of each double, or the best approximation with
        bounded denominator when ``max_denominator`` is given."""
        if self.kind == RATIONAL:
            return self
        conv = {}
        for e, c in self._terms.items():
            q = Fraction(c)
            if max_denominator is not None:
                q = q.limit_denominator(max_denominator)
            conv[e] = q
        return Jet(self.n, self.order, conv, RATIONAL)

    def map_coeffs(self, fn) -> "Jet":
        return Jet(self.n, self.order, {e: fn(e, c) for e, c in self._terms.items()}, self.kind)

    def __call__(self, *point):
        """Evaluate the polynomial at a point (length ``n``)."""
        if len(point) != self.n:
            raise DimensionMismatchError(f"expected {self.n} coordinates")
        return sum(c * prod(p ** k for p, k in zip(point, e)) for e, c in self._terms.items())

    # arithmetic sugar -------------------------------------------------------
    def __add__(self, other):
        if isinstance(other, Jet):
            return jet_add_scale(self, other, 1)
        return jet_add_scale(self, Jet.constant(self.n, self.order, other, self.kind), 1)

    __radd__ = __add__

    def __sub__(self, other):
        if isinstance(other, Jet):
            return jet_add_scale(self, other, -1)
        return jet_add_scale(self, Jet.constant(self.n, self.order, other, self.kind), -1)

    def __neg__(self):
        return self.map_coeffs(lambda e, c: -c)

    def __mul__(self, other):
        if isinstance(other, Jet):
            return jet_mul(self, other)
        s = _coerce(other, self.kind)
        return self.map_coeffs(lambda e, c: c * s)

    __rmul__ = __mul__


def _check_compatible(a: Jet, b: Jet):
    if a.n != b.n or a.order != b.order or a.kind != b.kind:
        raise DimensionMismatchError(
            f"incompatible jets: (n={a.n}, order={a.order}, {a.kind}) vs (n={b.n}, order={b.order}, {b.kind})"
        )


def jet_add_scale(a: Jet, b: Jet, s=1) -> Jet:
    """Return ``a + s*b``."""
    _check_compatible(a, b)
    s = _coerce(s, a.kind)
    terms = dict(a._terms)
    for e, c in b._terms.items():
        terms[e] = terms.get(e, 0) + s * c
    return Jet(a.n, a.order, terms, a.kind)


def jet_mul(a: Jet, b: Jet) -> Jet:
    _check_compatible(a, b)
    k = a.order
    terms: dict = {}
    for ea, ca in a._terms.items():
        da = sum(ea)
        for eb, cb in b._terms.items():
            if da + sum(eb) > k:
                continue
            e = tuple(x + y for x, y in zip(ea, eb))
            terms[e] = terms.get(e, 0) + ca * cb
    return Jet(a.n, k, terms, a.kind)


def jet_pow(a: Jet, p: int) -> Jet:
    out = Jet.constant(a.n, a.order, 1, a.kind)
    for _ in range(p):
        out = jet_mul(out, a)
    return out


def jet_compose(f: Jet, mapping: Sequence[Jet]) -> Jet:
    """Substitute ``x_i -> mapping[i]`` into ``f``.

    Every component of ``mapping`` must vanish at the origin; the result lives
    in the variables of the mapping and is truncated at each product, so the
    exact path stays exact.
    """
    if len(mapping) != f.n:
        raise DimensionMismatchError(f"f has {f.n} variables but the map has {len(mapping)} components")
    m0 = mapping[0]
    for comp in mapping:
        _check_compatible(comp, m0)
        if comp[(0,) * comp.n] != 0:
            raise NotOriginPreservingError("map component has a nonzero constant term")
    if f.kind != m0.kind or f.order != m0.order:
        raise DimensionMismatchError("f and the map must share order and coefficient kind")
    k = f.order
    # powers[i][p] = mapping[i]**p, built lazily
    powers = [[Jet.constant(m0.n, k, 1, f.kind)] for _ in range(f.n)]

    def power(i, p):
        row = powers[i]
        while len(row) <= p:
            row.append(jet_mul(row[-1], mapping[i]))
        return row[p]

    acc = Jet.zero(m0.n, k, f.kind)
    for e, c in f._terms.items():
        term = Jet.constant(m0.n, k, c, f.kind)
        for i, p in enumerate(e):
            if p:
                term = jet_mul(term, power(i, p))
                if term.is_zero():
                    break
        acc = jet_add_scale(acc, term, 1)
    return acc


def jet_partial(f: Jet, i: int) -> Jet:
    """Formal partial derivative in variable ``i`` (0-based).

    The result keeps the ambient truncation order of ``f``; only its terms of
    degree below ``f.order`` are meaningful as derivative data.
    """
    if not 0 <= i < f.n:
        raise JetError(f"variable index {i} out of range for n={f.n}")
    terms = {}
    for e, c in f._terms.items():
        if e[i]:
            d = list(e)
            d[i] -= 1
            terms[tuple(d)] = c * e[i]
    return Jet(f.n, f.order, terms, f.kind)


def identity_map(n: int, order: int, kind: str = RATIONAL) -> list[Jet]:
    return [Jet.variable(i, n, order, kind) for i in range(n)]


def embed(f: Jet, n_new: int, positions: Sequence[int]) -> Jet:
    """Re-express ``f`` in ``n_new`` variables, variable ``i`` going to ``positions[i]``."""
    terms = {}
    for e, c in f._terms.items():
        new = [0] * n_new
        for i, p in enumerate(positions):
            new[p] = e[i]
        terms[tuple(new)] = c
    return Jet(n_new, f.order, terms, f.kind)


def restrict(f: Jet, keep: Sequence[int]) -> Jet:
    """Set every variable not in ``keep`` to zero and drop it."""
    keep = list(keep)
    drop = [i for i in range(f.n) if i not in keep]
    terms = {}
    for e, c in f._terms.items():
        if any(e[i] for i in drop):
            continue
        terms[tuple(e[i] for i in keep)] = c
    return Jet(len(keep), f.order, terms, f.kind)


def taylor_coefficient_factor(exp) -> int:
    return prod(factorial(e) for e in exp)


# formatting ------------------------------------------------------------------

def default_names(n: int) -> list[str]:
    if n <= 3:
        return ["x", "y", "z"][:n]
    return [f"x{i + 1}" for i in range(n)]


def format_monomial(exp, names=None) -> str:
    names = names or default_names(len(exp))
    parts = []
    for name, p in zip(names, exp):
        if p == 1:
            parts.append(name)
        elif p > 1:
            parts.append(f"{name}^{p}")
    return "*".join(parts) if parts else "1"


def format_coeff(c) -> str:
    if isinstance(c, Fraction):
        return str(c.numerator) if c.denominator == 1 else f"{c.numerator}/{c.denominator}"
    return repr(float(c))


def format_jet(f: Jet, names=None) -> str:
    """Render as ``3*x^2*y^2 - x^4`` in graded-lex order; zero renders as ``0``."""
    if f.is_zero():
        return "0"
    names = names or default_names(f.n)
    out = []
    for e, c in f._terms.items():
        neg = c < 0
        mag = -c if neg else c
        mono = format_monomial(e, names)
        if mono == "1":
            body = format_coeff(mag)
        elif mag == 1:
            body = mono
        else:
            body = f"{format_coeff(mag)}*{mono}"
        if not out:
            out.append(f"-{body}" if neg else body)
        else:
            out.append(f" - {body}" if neg else f" + {body}")
    return "".join(out)
