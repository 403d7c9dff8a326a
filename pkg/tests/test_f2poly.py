import math

import pytest
from hypothesis import given, strategies as st

from clusterpump import f2poly
from clusterpump.f2poly import ONE, X, Y, Z, S, ZERO, F2LaurentPoly, ca_expand, commutation_poly, parse
from clusterpump.pauli import PauliOperator, commutes
from strategies import polys, x_polys


# -- ring axioms ---------------------------------------------------------------

@given(polys(), polys(), polys())
def test_addition_is_associative_and_commutative(a, b, c):
    assert (a + b) + c == a + (b + c)
    assert a + b == b + a


@given(polys())
def test_additive_identity_and_self_inverse(a):
    assert a + ZERO == a
    assert a + a == ZERO


@given(polys(), polys(), polys())
def test_multiplication_associative_commutative_distributive(a, b, c):
    assert (a * b) * c == a * (b * c)
    assert a * b == b * a
    assert a * (b + c) == a * b + a * c


@given(polys())
def test_multiplicative_identity(a):
    assert a * ONE == a


@given(polys())
def test_conj_is_an_involution(a):
    assert a.conj().conj() == a


@given(polys(), polys())
def test_conj_is_a_ring_homomorphism(a, b):
    assert (a * b).conj() == a.conj() * b.conj()
    assert (a + b).conj() == a.conj() + b.conj()


def test_marker_squares_to_one():
    assert S * S == ONE
    assert S.conj() == S


# -- commutation polynomial vs symplectic product ----------------------------------

def _box_index(polys_):
    sites = sorted({t for p in polys_ for t in p.terms})
    return {t: q for q, t in enumerate(sites)}


@given(polys(max_terms=5), polys(max_terms=5), st.tuples(st.integers(-3, 3), st.integers(-3, 3),
                                                          st.integers(-3, 3)))
def test_commutation_coefficient_matches_symplectic_product(a, b, shift):
    i, j, k = shift
    bt = b.shift(i, j, k)
    idx = _box_index([a, bt, ONE])
    n = len(idx)
    pa = PauliOperator.from_sites(n, [idx[t] for t in a.terms], [])
    pb = PauliOperator.from_sites(n, [], [idx[t] for t in bt.terms])
    coeff = commutation_poly(a, b).coeff(i, j, k)
    assert coeff == (0 if commutes(pa, pb) else 1)


def test_commutation_example_from_overlap():
    # X on {1, x} against Z on {1}: overlap at shift 0 and at shift x
    p = commutation_poly(ONE + X, ONE)
    assert p == ONE + X


# -- cellular automaton ----------------------------------------------------------

def test_sierpinski_rows_are_binomials_mod_two():
    f = parse("1 + x")
    cone = ca_expand(f, 15)
    for t in range(16):
        row = sorted(i for (i, j, _, _) in cone.terms if j == t)
        assert row == [i for i in range(t + 1) if math.comb(t, i) % 2]


def test_three_term_rule_squares_over_f2():
    f = parse("1 + x + x^2")
    cone = ca_expand(f, 3)
    row2 = sorted(i for (i, j, _, _) in cone.terms if j == 2)
    # (1 + x + x^2)^2 = 1 + x^2 + x^4 over F2
    assert row2 == [0, 2, 4]


def test_ca_expand_rejects_bad_input():
    with pytest.raises(ValueError):
        ca_expand(ONE + Y, 2)
    with pytest.raises(ValueError):
        ca_expand(ONE + X, -1)


@given(x_polys(), st.integers(0, 6))
def test_ca_expand_row_count(f, rows):
    cone = ca_expand(f, rows)
    assert {j for (_, j, _, _) in cone.terms} == set(range(rows + 1))


def test_periodic_wrap_of_cone():
    f = parse("1 + x")
    cone = ca_expand(f, 4, period_x=4)
    row4 = sorted(i for (i, j, _, _) in cone.terms if j == 4)
    # (1+x)^4 = 1 + x^4 = 1 + 1 = 0 on a ring of 4
    assert row4 == []


def test_fractal_symmetry_telescopes_against_cluster_stabilizers():
    # red-site stabilizers carry Z on blue sites (1 + f~ y~); against q F the
    # product telescopes to 1 + f^(rows+1) y^(rows+1), leaving only the two apex rows
    f = parse("1 + x")
    rows = 6
    sym = f2poly.symmetry_support(ONE, f, rows)
    p = commutation_poly(sym, (ONE + f * Y).conj())
    assert p == ONE + (f ** (rows + 1)) * F2LaurentPoly.monomial(0, rows + 1)


# -- text format -------------------------------------------------------------------

@given(polys())
def test_parse_format_round_trip(a):
    assert parse(str(a)) == a


def test_format_is_canonical():
    a = parse("s*x^-1 + y*x + 1")
    assert str(a) == "1 + x*y + x^-1*s"
    assert str(ZERO) == "0"
    assert parse("0") == ZERO


@pytest.mark.parametrize("bad", ["", "1 +", "x^", "q", "x^1.5", "2*x"])
def test_parse_rejects_malformed(bad):
    with pytest.raises(ValueError):
        parse(bad)


def test_repeated_terms_cancel():
    assert parse("x + x") == ZERO
    assert F2LaurentPoly([(1, 0, 0, 0), (1, 0, 0, 0), (0, 0, 0, 0)]) == ONE


def test_power():
    assert (ONE + X) ** 2 == ONE + X * X
    assert (ONE + X) ** 0 == ONE
    with pytest.raises(ValueError):
        X ** -1


def test_equality_with_integer_constants():
    assert ONE == 1
    assert ZERO == 0
    assert Z != 1
