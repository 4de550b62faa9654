import math
from fractions import Fraction

import pytest
from hypothesis import assume, given, strategies as st

from catkit.classify import (BEYOND, EVEN_POWER, MORSE, PLUS, QUARTIC_BETA, SADDLE, TABLE_ROWS, X_MINUS,
                             ClassificationError, classify_germ, corank_and_kernel, split_reduce, splitting_map)
from catkit.groups import SignAction
from catkit.jets import Jet, embed, jet_compose

from conftest import J
from oracles import quartic_from_roots

FULL1, FULL2, FULL3 = SignAction.full(1), SignAction.full(2), SignAction.full(3)
rationals = st.fractions(min_value=-3, max_value=3, max_denominator=7)
nonzero = st.fractions(min_value=Fraction(1, 3), max_value=3, max_denominator=7)


def random_equivariant_change(draw_vals, order=8):
    """x -> x (a + p x^2 + q y^2), y -> y (b + r x^2 + s y^2): equivariant, invertible at 0."""
    a, b, p, q, r, s = draw_vals
    x, y = Jet.variable(0, 2, order), Jet.variable(1, 2, order)
    one = Jet.constant(2, order, 1)
    return [x * (one * a + x * x * p + y * y * q), y * (one * b + x * x * r + y * y * s)]


def test_corank_examples():
    info = corank_and_kernel(J({(4, 0): 1, (0, 2): 1}), FULL2)
    assert info.corank == 1 and info.kernel == (0,) and list(info.signature) == [1]
    assert corank_and_kernel(J({(4, 0): 1, (2, 2): 3, (0, 4): 1}), FULL2).corank == 2
    assert corank_and_kernel(J({(2, 0): 1, (0, 2): 1}), FULL2).corank == 0


def test_linear_part_rejected():
    with pytest.raises(ClassificationError):
        classify_germ(Jet(1, 6, {(1,): 1, (2,): 1}), SignAction.trivial(1))


def test_split_reduce_matches_series_substitution():
    # y^2 + x^2 y^2 + x^4 = x^4 + (y sqrt(1 + x^2))^2: substitute y -> y (1 + x^2)^(-1/2) as a series
    f = J({(0, 2): 1, (2, 2): 1, (4, 0): 1})
    reduced, sig = split_reduce(f, FULL2)
    assert reduced == Jet(1, 8, {(4,): 1}) and list(sig) == [1]
    x, y = Jet.variable(0, 2, 8), Jet.variable(1, 2, 8)
    series = [Fraction(1), Fraction(-1, 2), Fraction(3, 8), Fraction(-5, 16)]  # (1+t)^(-1/2)
    inv_sqrt = sum((jet_pow2(x, k) * c for k, c in enumerate(series)), Jet.zero(2, 8))
    assert jet_compose(f, [x, y * inv_sqrt]) == J({(4, 0): 1, (0, 2): 1})
    assert jet_compose(f, splitting_map(f, FULL2)) == J({(4, 0): 1, (0, 2): 1})


def jet_pow2(x, k):
    out = Jet.constant(x.n, x.order, 1)
    for _ in range(k):
        out = out * x * x
    return out


def test_split_reduce_trivial_cases():
    f = Jet(3, 6, {(4, 0, 0): 1, (0, 2, 0): 1, (0, 0, 2): 1})
    reduced, sig = split_reduce(f, FULL3)
    assert reduced == Jet(1, 6, {(4,): 1}) and sorted(sig) == [1, 1]
    g = J({(4, 0): 1, (2, 2): 3, (0, 4): 1})
    reduced, sig = split_reduce(g, FULL2)
    assert reduced == g and len(sig) == 0


def test_butterfly_row():
    r = classify_germ(Jet(1, 8, {(6,): 1}), FULL1)
    assert (r.family, r.sign, r.k, r.cod_z2, r.sigma) == (EVEN_POWER, "+", 3, 2, 6)
    assert r.unfolding.format(base_symbol="f") == "f + u1*x^2 + u2*x^4"


@pytest.mark.parametrize("k", range(1, 6))
@pytest.mark.parametrize("sign", [1, -1])
def test_even_power_rows(k, sign):
    r = classify_germ(Jet(1, 12, {(2 * k,): sign * 3}), FULL1)
    if k == 1:
        assert r.family == MORSE and r.cod_z2 == 0
        return
    assert r.family == EVEN_POWER and r.k == k and r.sign == ("+" if sign > 0 else "-")
    assert (r.cod_z2, r.sigma) == TABLE_ROWS[EVEN_POWER](k)


def test_plus_family_example():
    r = classify_germ(J({(4, 0): 1, (2, 2): 4, (0, 4): 3}), FULL2)
    assert r.family == PLUS and r.modulus == 3 and r.sign == "+"
    assert (r.cod_z2, r.sigma) == (3, 4)
    assert r.unfolding.format(base_symbol="f") == "f + u1*x^2 + u2*y^2 + u3*x^2*y^2"
    # the normal form re-expands to (x^2 + y^2)(x^2 + 3 y^2)
    assert r.normal_form == J({(4, 0): 1, (2, 2): 4, (0, 4): 3}, order=r.normal_form.order)


def test_beta_three_reports_both_presentations():
    r = classify_germ(J({(4, 0): 1, (2, 2): 3, (0, 4): 1}), FULL2)
    assert r.family == PLUS and (r.cod_z2, r.sigma) == (3, 4)
    assert (QUARTIC_BETA, 3) in r.presentations
    # (1 + alpha) / sqrt(alpha) = 3
    assert (1 + float(r.modulus)) / math.sqrt(float(r.modulus)) == pytest.approx(3, abs=1e-12)


@pytest.mark.parametrize("beta", [Fraction(1), Fraction(-1), Fraction(1, 2), Fraction(0)])
def test_quartic_beta_inside_the_gap(beta):
    r = classify_germ(J({(4, 0): 1, (2, 2): beta, (0, 4): 1}), FULL2)
    assert r.family == QUARTIC_BETA and r.modulus == beta and (r.cod_z2, r.sigma) == (3, 4)


def test_x_minus_and_saddles():
    r = classify_germ(J({(4, 0): 1, (0, 4): -1}), FULL2)
    assert r.family == X_MINUS and (r.cod_z2, r.sigma) == (3, 4)
    r = classify_germ(J({(4, 0): 1, (2, 2): 2, (0, 4): -3}), FULL2)  # (x^2 - y^2)(x^2 + 3y^2)
    assert r.family == SADDLE and r.modulus == 3 and r.sign == "+"
    r = classify_germ(J({(4, 0): 1, (2, 2): Fraction(-3, 2), (0, 4): Fraction(1, 2)}), FULL2)
    assert r.family == SADDLE and r.modulus == Fraction(-1, 2)


@pytest.mark.parametrize("terms, why", [
    ({(4, 0): 1, (2, 2): 2, (0, 4): 1}, "beta = 2"),
    ({(4, 0): 1, (2, 2): 1}, "c = 0"),
    ({(6, 0): 1, (0, 6): 1}, "zero 4-jet"),
])
def test_beyond_table(terms, why):
    r = classify_germ(J(terms), FULL2)
    assert r.family == BEYOND and r.diagnostic, why


def test_corank_three_is_beyond_table():
    f = Jet(3, 6, {(4, 0, 0): 1, (0, 4, 0): 1, (0, 0, 4): 1})
    assert classify_germ(f, FULL3).family == BEYOND


def test_partial_action_rejected():
    with pytest.raises(ClassificationError):
        classify_germ(J({(4, 0): 1, (0, 4): 1, (1, 1): 1}), SignAction.overall(2))


@given(st.lists(nonzero, min_size=2, max_size=2), st.lists(rationals, min_size=4, max_size=4),
       st.sampled_from([Fraction(3), Fraction(5, 2), Fraction(-1, 2), Fraction(1, 2), Fraction(4, 3)]))
def test_label_and_modulus_invariant_under_coordinate_change(ab, pqrs, alpha):
    base = {PLUS: quartic_from_roots(alpha)} if alpha > 0 else {SADDLE: {(4, 0): 1, (2, 2): alpha - 1, (0, 4): -alpha}}
    (family, terms), = base.items()
    f = J(terms)
    ref = classify_germ(f, FULL2)
    g = jet_compose(f, random_equivariant_change(ab + pqrs))
    r = classify_germ(g, FULL2)
    assert (r.family, r.sign, r.modulus) == (ref.family, ref.sign, ref.modulus)


@given(st.fractions(min_value=Fraction(11, 10), max_value=6, max_denominator=20))
def test_alpha_and_inverse_alpha_identified(alpha):
    a = classify_germ(J(quartic_from_roots(alpha)), FULL2)
    b = classify_germ(J(quartic_from_roots(1 / alpha)), FULL2)
    assert a.family == b.family == PLUS
    assert a.modulus == b.modulus == alpha


@given(st.sampled_from([
    {(4, 0): 1, (2, 2): 4, (0, 4): 3}, {(4, 0): -2, (2, 2): 5, (0, 4): 7}, {(4, 0): 1, (2, 2): 1, (0, 4): 1},
    {(4, 0): 3, (2, 2): -1, (0, 4): 1}, {(4, 0): 1, (2, 2): 2, (0, 4): -3}, {(4, 0): 2, (0, 4): -5},
]))
def test_classification_idempotent_on_normal_forms(terms):
    r = classify_germ(J(terms), FULL2)
    again = classify_germ(r.normal_form, FULL2)
    assert (again.family, again.sign, again.modulus) == (r.family, r.sign, r.modulus)


@given(st.sampled_from([(1, [1]), (1, [-1]), (2, [1, -1])]), st.integers(2, 4))
def test_splitting_round_trip(shape, k):
    nk, sig = shape
    if nk == 1:
        reduced = Jet(1, 8, {(2 * k,): 1})
    else:
        assume(k == 2)
        reduced = J({(4, 0): 1, (2, 2): 4, (0, 4): 3})
    n = nk + len(sig)
    f = embed(reduced, n, range(nk))
    for j, s in enumerate(sig):
        e = [0] * n
        e[nk + j] = 2
        f = f + Jet.monomial(tuple(e), 8, s)
    # mix in terms that the splitting lemma has to remove
    e = [0] * n
    e[0], e[nk] = 2, 2
    f = f + Jet.monomial(tuple(e), 8, 1)
    r = classify_germ(f, SignAction.full(n))
    ref = classify_germ(reduced, SignAction.full(nk))
    assert (r.family, r.k, r.modulus, r.corank) == (ref.family, ref.k, ref.modulus, nk)


def test_float_path_moduli():
    alpha = 2.7
    f = Jet(2, 8, {(4, 0): 1.0, (2, 2): 1 + alpha, (0, 4): alpha}, "float")
    r = classify_germ(f, FULL2)
    assert r.family == PLUS and abs(r.modulus - alpha) < 1e-12
