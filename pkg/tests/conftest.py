from fractions import Fraction

from hypothesis import settings, strategies as st

from catkit.jets import Jet, monomials

settings.register_profile("default", max_examples=60, deadline=None)
settings.load_profile("default")

small_rationals = st.fractions(min_value=-5, max_value=5, max_denominator=6)


@st.composite
def jets(draw, n=2, max_deg=3, order=6):
    """Rational jets whose degree is low enough that products are not truncated."""
    mons = monomials(n, 0, max_deg)
    coeffs = draw(st.lists(small_rationals, min_size=len(mons), max_size=len(mons)))
    keep = draw(st.lists(st.booleans(), min_size=len(mons), max_size=len(mons)))
    return Jet(n, order, {e: c for e, c, k in zip(mons, coeffs, keep) if k})


@st.composite
def points(draw, n=2):
    return tuple(draw(st.lists(small_rationals, min_size=n, max_size=n)))


def J(terms, n=2, order=8):
    return Jet(n, order, {tuple(e): Fraction(c) for e, c in terms.items()})


def pytest_terminal_summary(terminalreporter):
    try:
        from test_acceptance import RESULTS
    except ImportError:
        return
    if RESULTS:
        terminalreporter.section("acceptance criteria")
        for line in RESULTS:
            terminalreporter.write_line(line)
