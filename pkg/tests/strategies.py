"""Shared hypothesis strategies."""

from hypothesis import strategies as st

from clusterpump.f2poly import F2LaurentPoly

exponent = st.integers(-4, 4)
monomial = st.tuples(exponent, exponent, exponent, st.integers(0, 1))


@st.composite
def polys(draw, max_terms=6, with_s=True):
    terms = draw(st.lists(monomial, max_size=max_terms))
    if not with_s:
        terms = [(i, j, k, 0) for (i, j, k, _) in terms]
    return F2LaurentPoly(terms)


@st.composite
def x_polys(draw, max_degree=4):
    exps = draw(st.sets(st.integers(0, max_degree), min_size=1))
    return F2LaurentPoly.from_x_exponents(sorted(exps))
