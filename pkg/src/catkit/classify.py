"""Classification of germs even in every variable (full sign action).

Pipeline: Hessian corank -> splitting reduction onto the kernel variables ->
case analysis of the reduced germ (lowest even power in corank 1, the
quartic ``a x^4 + b x^2 y^2 + c y^4`` in corank 2) -> normal form, modulus,
codimension, determinacy order and universal unfolding.

Moduli conventions
------------------
Writing the quartic as a quadratic form ``a X^2 + b X Y + c Y^2`` in
``X = x^2, Y = y^2``, diagonal rescaling multiplies both roots of
``a r^2 - b r + c`` by the same positive factor, so their ratio is the
modulus.  This gives exact rational moduli whenever the discriminant is a
rational square.

* ``plus``:   ``s (x^2 + y^2)(x^2 + alpha y^2)``, alpha > 1 (alpha ~ 1/alpha).
* ``saddle``: ``s (x^2 - y^2)(x^2 + alpha y^2)``; alpha in (-1, 0) when the
  outer coefficients agree in sign, alpha > 0 otherwise with ``s = sign(a)``.
* ``quartic_beta``: ``s (x^4 + beta x^2 y^2 + y^4)``, |beta| < 2.
* ``x_minus``: ``x^4 - y^4`` (the saddle with alpha = 1).
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np

from .groups import SignAction
from .jets import FLOAT, RATIONAL, Jet, format_jet, jet_compose, jet_mul, restrict
from .linalg import ExactRowSpace
from .local_algebra import DEFAULT_CAP, check_invariant, codimension, determinacy_order
from .unfolding import Unfolding, universal_unfolding

ZERO_TOL = 1e-9

MORSE = "morse"
EVEN_POWER = "even_power"
PLUS = "plus_family"
SADDLE = "saddle_family"
QUARTIC_BETA = "quartic_beta"
X_MINUS = "x_minus"
BEYOND = "beyond_table"
FAMILIES = (MORSE, EVEN_POWER, PLUS, SADDLE, QUARTIC_BETA, X_MINUS, BEYOND)

# table rows: family -> (cod_z2, sigma) as functions of k
TABLE_ROWS = {
    MORSE: lambda k: (0, 2),
    EVEN_POWER: lambda k: (k - 1, 2 * k),
    PLUS: lambda k: (3, 4),
    SADDLE: lambda k: (3, 4),
    QUARTIC_BETA: lambda k: (3, 4),
    X_MINUS: lambda k: (3, 4),
}


class ClassificationError(ValueError):
    pass


@dataclass(frozen=True)
class CorankInfo:
    corank: int
    kernel: tuple  # variable indices, or () when the Hessian is not diagonal
    signature: tuple  # signs of the nondegenerate block, in variable order
    diagonal: bool
    hessian_diag: tuple = ()


@dataclass(frozen=True)
class ClassificationResult:
    corank: int
    quad_signature: tuple
    family: str
    sign: str | None = None
    k: int | None = None
    modulus: object = None
    modulus_name: str | None = None
    cod_z2: int | None = None
    sigma: object = None
    normal_form: Jet | None = None
    unfolding: Unfolding | None = None
    presentations: tuple = ()
    diagnostic: str = ""
    kernel: tuple = ()
    reduced: Jet | None = None

    @property
    def classified(self) -> bool:
        return self.family != BEYOND

    def modulus_float(self):
        return None if self.modulus is None else float(self.modulus)


# --- corank and splitting ----------------------------------------------------

def _quadratic_part(f: Jet):
    n = f.n
    lin = [f[tuple(1 if j == i else 0 for j in range(n))] for i in range(n)]
    H = [[0] * n for _ in range(n)]
    for e, c in f.homogeneous_part(2):
        idx = [i for i, p in enumerate(e) for _ in range(p)]
        i, j = idx
        if i == j:
            H[i][i] = 2 * c
        else:
            H[i][j] = H[j][i] = c
    return lin, H


def _is_zero(c, scale, kind, tol):
    return c == 0 if kind == RATIONAL else abs(c) <= tol * scale


def corank_and_kernel(f: Jet, action: SignAction | None = None, tol: float = ZERO_TOL) -> CorankInfo:
    """Corank of the Hessian at 0, kernel variables and the signs of the nondegenerate part."""
    lin, H = _quadratic_part(f)
    scale = max(f.max_abs_coeff(), 1.0) if f.kind == FLOAT else 1
    if any(not _is_zero(c, scale, f.kind, tol) for c in lin):
        raise ClassificationError("germ has a nonzero linear part (not a critical point)")
    n = f.n
    off = any(not _is_zero(H[i][j], scale, f.kind, tol) for i in range(n) for j in range(n) if i != j)
    if not off:
        diag = tuple(H[i][i] for i in range(n))
        kernel = tuple(i for i in range(n) if _is_zero(diag[i], scale, f.kind, tol))
        sig = tuple(1 if diag[i] > 0 else -1 for i in range(n) if i not in kernel)
        return CorankInfo(len(kernel), kernel, sig, True, diag)
    # general symmetric Hessian: exact rank when possible, inertia from eigenvalues
    Hf = np.array([[float(v) for v in row] for row in H])
    w = np.linalg.eigvalsh(Hf)
    if f.kind == RATIONAL:
        space = ExactRowSpace(n)
        for row in H:
            space.add({j: v for j, v in enumerate(row) if v})
        rank = space.rank
    else:
        rank = int(np.sum(np.abs(w) > tol * max(np.abs(w).max(), 1.0)))
    order = np.argsort(-np.abs(w))[:rank]
    sig = tuple(sorted((1 if w[i] > 0 else -1 for i in order), reverse=True))
    return CorankInfo(n - rank, (), sig, False, ())


def split_reduce(f: Jet, action: SignAction, k: int | None = None, tol: float = ZERO_TOL):
    """Reduced germ on the kernel variables and the quadratic signature.

    For a Hessian that is diagonal in coordinates flipped independently by the
    action, the critical manifold of the non-kernel directions is ``y = 0`` by
    symmetry, so the reduced germ is exactly ``f(x_kernel, 0)``.  The
    coordinate change realising this is available from :func:`splitting_map`.
    """
    info = corank_and_kernel(f, action, tol)
    if not info.diagonal:
        raise ClassificationError("splitting needs a Hessian diagonal in the symmetry-adapted coordinates")
    flipped = _independently_flipped(action)
    if any(i not in flipped for i in range(f.n) if i not in info.kernel):
        raise ClassificationError("splitting needs the non-kernel coordinates to be flipped independently")
    g = f if k is None else f.with_order(k)
    if not info.kernel:
        return Jet.zero(1, g.order, g.kind), info.signature
    reduced = restrict(g, info.kernel)
    return reduced, info.signature


def _independently_flipped(action: SignAction) -> set:
    """Coordinates ``i`` for which the group contains the single flip of ``x_i``."""
    out = set()
    elems = set(action.elements)
    for i in range(action.n):
        g = tuple(-1 if j == i else 1 for j in range(action.n))
        if g in elems:
            out.add(i)
    return out


def splitting_map(f: Jet, action: SignAction, k: int | None = None, tol: float = ZERO_TOL):
    """Equivariant coordinate change ``phi`` with ``f o phi = f(x, 0) + sum a_j y_j^2`` to order ``k``.

    Each non-kernel coordinate is rescaled as ``y_j -> y_j (1 + s_j)``; the
    corrections ``s_j`` are fixed degree by degree, which reproduces the
    series of ``y_j sqrt(1 + g_j / a_j)``.
    """
    info = corank_and_kernel(f, action, tol)
    g = f if k is None else f.with_order(k)
    reduced, _ = split_reduce(g, action, tol=tol)
    n, order, kind = g.n, g.order, g.kind
    ys = [i for i in range(n) if i not in info.kernel]
    a = {i: info.hessian_diag[i] / 2 for i in ys}
    target_terms = {}
    for e, c in reduced:
        full = [0] * n
        for pos, i in enumerate(info.kernel):
            full[i] = e[pos]
        target_terms[tuple(full)] = c
    for i in ys:
        e = tuple(2 if j == i else 0 for j in range(n))
        target_terms[e] = target_terms.get(e, 0) + a[i]
    target = Jet(n, order, target_terms, kind)
    phi = [Jet.variable(i, n, order, kind) for i in range(n)]
    scale = max(g.max_abs_coeff(), 1.0)
    for _ in range(order * n + 2):
        diff = jet_compose(g, phi) - target
        if kind == FLOAT:
            diff = Jet(n, order, {e: c for e, c in diff if abs(c) > 1e-13 * scale}, kind)
        if diff.is_zero():
            break
        d = diff.lowest_degree()
        for e, c in diff.homogeneous_part(d):
            j = next((i for i in ys if e[i] >= 2), None)
            if j is None:
                raise ClassificationError("residual term without a square of a split variable")
            m = list(e)
            m[j] -= 1
            # y_j -> y_j - c x^m / (2 a_j) cancels c x^e against a_j y_j^2
            corr = Jet.monomial(tuple(m), order, c / (2 * a[j]) if kind == RATIONAL else float(c) / (2 * float(a[j])), kind)
            phi[j] = phi[j] - corr
    return phi


# --- corank-2 analysis ---------------------------------------------------------

def _qsqrt(q: Fraction):
    """Exact square root of a nonnegative rational, or None."""
    if q < 0:
        return None
    num, den = q.numerator, q.denominator
    rn, rd = math.isqrt(num), math.isqrt(den)
    if rn * rn == num and rd * rd == den:
        return Fraction(rn, rd)
    return None


def _sqrt(x, exact: bool):
    if exact:
        r = _qsqrt(Fraction(x))
        if r is not None:
            return r
    return math.sqrt(float(x))


def _quartic_case(a, b, c, exact: bool, tol: float):
    """Family, sign, modulus and alternative presentations of ``a x^4 + b x^2 y^2 + c y^4``."""
    s = 1 if a > 0 else -1
    eps = 1 if a * c > 0 else -1
    disc = b * b - 4 * a * c
    scale = max(abs(a), abs(b), abs(c))
    disc_zero = disc == 0 if exact else abs(disc) <= tol * scale * scale
    root_ac = _sqrt(abs(a * c), exact)
    beta_n = s * b / root_ac
    if eps > 0 and disc_zero:
        return BEYOND, s, None, (), "quartic has |beta| = 2 (a squared binary form); infinite codimension"
    if eps > 0 and disc < 0:
        return QUARTIC_BETA, s, beta_n, (), ""
    if eps < 0 and (b == 0 if exact else abs(b) <= tol * scale):
        return X_MINUS, 1, None, (), ""
    # real roots of a r^2 - b r + c; their ratio is the modulus
    sd = _sqrt(disc, exact)
    r1 = (b + sd) / (2 * a)
    r2 = (b - sd) / (2 * a)
    if eps > 0:
        lo, hi = sorted((abs(r1), abs(r2)))
        ratio = lo / hi
        alt = ((QUARTIC_BETA, beta_n),)
        if beta_n > 0:
            return PLUS, s, 1 / ratio, alt, ""
        return SADDLE, s, -ratio, alt, ""
    pos, neg = (r1, r2) if r1 > 0 else (r2, r1)
    return SADDLE, s, pos / -neg, (), ""


def _normal_form(family, sign, modulus, k, kind):
    n = 1 if family == EVEN_POWER else 2
    order = max(2 * (k or 2), 4)
    if family == EVEN_POWER:
        return Jet(1, order, {(2 * k,): sign}, kind)
    one = 1 if kind == RATIONAL else 1.0
    if family == X_MINUS:
        return Jet(2, order, {(4, 0): one, (0, 4): -one}, kind)
    if family == QUARTIC_BETA:
        return Jet(2, order, {(4, 0): sign * one, (2, 2): sign * modulus, (0, 4): sign * one}, kind)
    first = Jet(n, order, {(2, 0): one, (0, 2): one if family == PLUS else -one}, kind)
    second = Jet(n, order, {(2, 0): one, (0, 2): modulus}, kind)
    prod = jet_mul(first, second)
    return prod if sign > 0 else -prod


def _as_kind(x, kind):
    if kind == FLOAT or isinstance(x, float):
        return float(x)
    return Fraction(x)


def classify_germ(f: Jet, action: SignAction, tol: float = ZERO_TOL, cap: int = DEFAULT_CAP) -> ClassificationResult:
    """Match an even germ against the corank <= 2 normal forms."""
    if not action.is_full():
        raise ClassificationError("classification needs every coordinate to be flipped independently (full sign action)")
    check_invariant(f, action)
    info = corank_and_kernel(f, action, tol)
    r = info.corank
    sig = info.signature
    if r == 0:
        nf = Jet(1, 2, {}, f.kind)
        return ClassificationResult(0, sig, MORSE, cod_z2=0, sigma=2, normal_form=nf,
                                    unfolding=Unfolding(nf), kernel=())
    if r >= 3:
        return ClassificationResult(r, sig, BEYOND, kernel=info.kernel,
                                    diagnostic=f"corank {r} >= 3: codimension >= 9")
    reduced, _ = split_reduce(f, action, tol=tol)
    exact = reduced.kind == RATIONAL
    base = dict(kernel=info.kernel, reduced=reduced)

    if r == 1:
        scale = reduced.max_abs_coeff()
        terms = [(e, c) for e, c in reduced if not _is_zero(c, scale, reduced.kind, tol)]
        if not terms:
            return ClassificationResult(1, sig, BEYOND, diagnostic=f"reduced germ vanishes to jet order {f.order}; "
                                        "raise the order", **base)
        (e, c) = terms[0]
        k = e[0] // 2
        s = 1 if c > 0 else -1
        family, sign, modulus, alts, diag = EVEN_POWER, s, None, (), ""
    else:
        j4 = reduced.homogeneous_part(4)
        a, b, c = j4[(4, 0)], j4[(2, 2)], j4[(0, 4)]
        scale = max(abs(a), abs(b), abs(c))
        if scale == 0:
            return ClassificationResult(2, sig, BEYOND, diagnostic="4-jet of the reduced germ vanishes", **base)
        if not exact:
            a, b, c = (0.0 if abs(v) <= tol * scale else float(v) for v in (a, b, c))
        if a == 0 or c == 0:
            return ClassificationResult(2, sig, BEYOND, diagnostic="x^4 or y^4 coefficient vanishes; codimension >= 9",
                                        **base)
        k = 2
        family, sign, modulus, alts, diag = _quartic_case(a, b, c, exact, tol)
        if family == BEYOND:
            return ClassificationResult(2, sig, BEYOND, sign="+" if sign > 0 else "-", diagnostic=diag, **base)

    kind = RATIONAL if exact and (modulus is None or isinstance(modulus, Fraction)) else FLOAT
    modulus = None if modulus is None else _as_kind(modulus, kind)
    nf = _normal_form(family, sign, modulus, k, kind)
    sub = SignAction.full(nf.n)
    rep = codimension(nf, sub, cap=cap)
    sigma = determinacy_order(nf, sub, cap=cap)
    unf = universal_unfolding(nf, sub, codim=rep) if rep.finite else None
    expected = TABLE_ROWS[family](k)
    if (rep.value, sigma) != expected:
        diag = (diag + "; " if diag else "") + f"computed (cod, sigma)={(rep.value, sigma)} differs from table {expected}"
    mod_name = {PLUS: "alpha", SADDLE: "alpha", QUARTIC_BETA: "beta"}.get(family)
    alts = tuple((fam, v if isinstance(v, Fraction) else float(v)) for fam, v in alts)
    return ClassificationResult(
        corank=r, quad_signature=sig, family=family, sign="+" if sign > 0 else "-",
        k=k if family == EVEN_POWER else None, modulus=modulus, modulus_name=mod_name,
        cod_z2=rep.value, sigma=sigma, normal_form=nf, unfolding=unf, presentations=alts,
        diagnostic=diag, **base)


def describe(res: ClassificationResult) -> str:
    if res.family == BEYOND:
        return f"beyond table ({res.diagnostic})"
    nf = format_jet(res.normal_form) if res.normal_form is not None else "?"
    return f"{res.family}: {nf}"
