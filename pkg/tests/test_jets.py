from fractions import Fraction

import pytest
from hypothesis import given

from catkit.jets import (FLOAT, DimensionMismatchError, Jet, JetError, NotOriginPreservingError, format_jet,
                         jet_compose, jet_mul, jet_partial, jet_pow, monomials, restrict)

from conftest import J, jets, points


def test_truncation_drops_high_terms():
    f = Jet(1, 3, {(2,): 1, (4,): 5})
    assert f.terms == {(2,): 1}
    assert jet_mul(f, f).is_zero()


def test_float_coefficients_rejected_on_exact_path():
    with pytest.raises(JetError):
        Jet(1, 4, {(2,): 0.5})


def test_glex_ordering_and_formatting():
    f = J({(0, 4): 1, (4, 0): 1, (2, 2): 3, (2, 0): -1})
    assert list(e for e, _ in f) == [(2, 0), (4, 0), (2, 2), (0, 4)]
    assert format_jet(f) == "-x^2 + x^4 + 3*x^2*y^2 + y^4"


def test_monomials_count():
    assert len(monomials(2, 0, 4)) == 15
    assert len(monomials(3, 2, 2)) == 6


@given(jets(), jets(), jets())
def test_ring_axioms(a, b, c):
    assert a + b == b + a
    assert (a + b) + c == a + (b + c)
    assert a * b == b * a
    assert a * (b + c) == a * b + a * c
    assert a - a == Jet.zero(2, 6)


@given(jets(max_deg=2), jets(max_deg=3), points())
def test_product_matches_pointwise_evaluation(a, b, p):
    assert (a * b)(*p) == a(*p) * b(*p)


@given(jets(max_deg=3), points())
def test_power_matches_evaluation(a, p):
    assert jet_pow(a, 2)(*p) == a(*p) ** 2


@given(jets(max_deg=3), jets(max_deg=3))
def test_leibniz_rule(a, b):
    for i in range(2):
        lhs = jet_partial(a * b, i)
        rhs = jet_partial(a, i) * b + a * jet_partial(b, i)
        assert lhs == rhs


@given(jets(max_deg=2, order=6), points())
def test_compose_matches_substitution(f, p):
    # phi(x, y) = (x + y^2, y - x*y), no truncation since deg f * 2 <= order
    x, y = Jet.variable(0, 2, 6), Jet.variable(1, 2, 6)
    phi = [x + y * y, y - x * y]
    px, py = p
    assert jet_compose(f, phi)(*p) == f(px + py * py, py - px * py)


def test_compose_identity_and_errors():
    f = J({(4, 0): 1, (2, 2): 3})
    x, y = Jet.variable(0, 2, 8), Jet.variable(1, 2, 8)
    assert jet_compose(f, [x, y]) == f
    with pytest.raises(NotOriginPreservingError):
        jet_compose(f, [x + 1, y])
    with pytest.raises(DimensionMismatchError):
        jet_compose(f, [x])


def test_compose_truncates_exactly():
    f = Jet(1, 4, {(2,): 1})
    x = Jet.variable(0, 1, 4)
    g = jet_compose(f, [x + x * x * x])
    assert g == Jet(1, 4, {(2,): 1, (4,): 2})


def test_partial_is_zero_based():
    f = J({(3, 1): 2})
    assert jet_partial(f, 0) == J({(2, 1): 6})
    assert jet_partial(f, 1) == J({(3, 0): 2})
    with pytest.raises(JetError):
        jet_partial(f, 2)


def test_restrict_sets_other_variables_to_zero():
    f = Jet(3, 6, {(4, 0, 0): 1, (0, 2, 0): 1, (2, 0, 2): Fraction(1, 2)})
    assert restrict(f, [0, 2]) == J({(4, 0): 1, (2, 2): Fraction(1, 2)}, order=6)


def test_float_round_trip():
    f = J({(4, 0): Fraction(1, 3), (0, 4): -2})
    g = f.to_float()
    assert g.kind == FLOAT
    assert g.to_rational(100) == f
