from fractions import Fraction

import pytest
from hypothesis import given, strategies as st

from catkit.groups import SignAction
from catkit.jets import Jet, embed
from catkit.local_algebra import NotInvariantError
from catkit.unfolding import (UndecidableError, Unfolding, alphas_of, is_transversal, unfoldings_equivalent,
                              universal_unfolding)

from conftest import J

FULL1, FULL2 = SignAction.full(1), SignAction.full(2)


def mono(e, order=8):
    return Jet.monomial(tuple(e), order)


def butterfly():
    return Unfolding(Jet(1, 8, {(6,): 1}), [mono((2,)), mono((4,))], ["u1", "u2"])


def test_butterfly_is_transversal_and_minimal():
    rep = is_transversal(butterfly(), FULL1)
    assert rep.transversal and rep.minimal and rep.codim == 2
    assert butterfly().format() == "x^6 + u1*x^2 + u2*x^4"


@pytest.mark.parametrize("drop, missing", [(0, "x^2"), (1, "x^4")])
def test_dropping_a_parameter_breaks_transversality(drop, missing):
    rep = is_transversal(butterfly().drop(drop), FULL1)
    assert not rep.transversal and not rep.minimal
    assert rep.missing_strings() == [missing]


def test_padding_keeps_transversality_but_not_minimality():
    rep = is_transversal(butterfly().padded(mono((6,))), FULL1)
    assert rep.transversal and not rep.minimal


def test_wrong_direction_reports_missing_monomial():
    U = Unfolding(Jet(1, 8, {(4,): 1}), [mono((4,))])
    rep = is_transversal(U, FULL1)
    assert not rep.transversal and rep.missing_strings() == ["x^2"]


def test_non_invariant_direction_rejected():
    with pytest.raises(NotInvariantError):
        is_transversal(Unfolding(Jet(1, 8, {(4,): 1}), [mono((1,))]), FULL1)


def test_infinite_codimension_is_undecidable():
    f = J({(4, 0): 1, (2, 2): 2, (0, 4): 1})
    with pytest.raises(UndecidableError):
        is_transversal(Unfolding(f, [mono((2, 0))]), FULL2)
    with pytest.raises(UndecidableError):
        universal_unfolding(f, FULL2)


@pytest.mark.parametrize("terms", [
    {(4, 0): 1, (0, 4): -1},
    {(4, 0): 1, (2, 2): 3, (0, 4): 1},
    {(4, 0): 1, (2, 2): 4, (0, 4): 3},
])
def test_universal_unfolding_of_corank_two_rows(terms):
    f = J(terms)
    U = universal_unfolding(f, FULL2)
    assert U.format(base_symbol="f") == "f + u1*x^2 + u2*y^2 + u3*x^2*y^2"
    rep = is_transversal(U, FULL2)
    assert rep.transversal and rep.minimal
    # the stored F(x, u) gives back the same germ and directions
    back = alphas_of(U.full, FULL2)
    assert back.base.with_order(f.order) == f and [a.with_order(8) for a in back.alphas] == list(U.alphas)


@given(st.lists(st.fractions(min_value=-3, max_value=3, max_denominator=5).filter(bool), min_size=2, max_size=2),
       st.fractions(min_value=-3, max_value=3, max_denominator=5))
def test_transversality_invariant_under_invertible_reparametrisation(scales, shear):
    # alpha -> A alpha with A invertible (triangular) keeps the span, hence transversality
    s1, s2 = scales
    a1, a2 = mono((2,)), mono((4,))
    U = Unfolding(Jet(1, 8, {(6,): 1}), [a1 * s1, a2 * s2 + a1 * shear])
    assert is_transversal(U, FULL1).transversal


@given(st.fractions(min_value=-3, max_value=3, max_denominator=5))
def test_adding_tangent_directions_does_not_help(c):
    # x * f'(x) = 6 x^6 lies in the tangent space, so it cannot replace x^4
    U = Unfolding(Jet(1, 8, {(6,): 1}), [mono((2,)), mono((6,)) * c])
    assert not is_transversal(U, FULL1).transversal


def test_equivalence_verdicts():
    U = butterfly()
    V = Unfolding(U.base, [mono((2,)) * 2, mono((4,)) + mono((2,))])
    assert unfoldings_equivalent(U, V, FULL1).equivalent is True
    assert unfoldings_equivalent(U, U.drop(0), FULL1).equivalent is False
    W = Unfolding(U.base, [mono((2,)), mono((6,))])
    assert unfoldings_equivalent(U, W, FULL1).equivalent is None


def test_float_unfolding():
    U = Unfolding(Jet(1, 8, {(6,): 1.0}, "float"), [Jet(1, 8, {(2,): 1.0, (4,): 1e-3}, "float"),
                                                     Jet(1, 8, {(4,): 0.5}, "float")])
    assert is_transversal(U, FULL1).transversal


def test_trivial_action_unfolding_of_cusp():
    f = Jet(1, 8, {(4,): 1})
    U = universal_unfolding(f, SignAction.trivial(1))
    assert U.format() == "x^4 + u1*x + u2*x^2"
