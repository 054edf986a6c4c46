import itertools
from math import comb

import pytest
from hypothesis import given, strategies as st

from fsplit.dsl import parse_poly
from fsplit.poly import (MultiPoly, PolyRing, PrimeFieldElement, divmod_single, elimination, exact_divide,
                         frobenius_pow, is_prime, poly_arith, to_text)
from fsplit.errors import SignatureMismatch
from conftest import P, polys

R2 = PolyRing(("x", "y"), 2)
R3 = PolyRing(("x", "y"), 3)
R5 = PolyRing(("x", "y", "z"), 5)


def test_char2_cancellation():
    f = P("x + y", R2)
    assert poly_arith(f, f, "add").is_zero()


def test_square_of_variable():
    x = R3.var("x")
    assert poly_arith(x, x, "mul") == P("x^2", R3)


def test_freshman_dream_against_binomial_sum():
    x, y = R3.gens()
    expanded = MultiPoly(R3, {(i, 3 - i): comb(3, i) for i in range(4)})
    assert (x + y) ** 3 == expanded == x ** 3 + y ** 3


def test_frobenius_pow_examples():
    assert frobenius_pow(P("x + y", R2), 1) == P("x^2 + y^2", R2)
    assert frobenius_pow(P("2*x", R3), 1) == P("2*x^3", R3)
    f = P("x + y + 1", R2)
    squared = f
    for _ in range(2):
        squared = squared * squared
    assert frobenius_pow(f, 2) == squared == P("x^4 + y^4 + 1", R2)


def test_field_elements():
    a = PrimeFieldElement(3, 7)
    assert (a * a.inverse()).value == 1
    assert (a + PrimeFieldElement(4, 7)).value == 0
    with pytest.raises(ZeroDivisionError):
        PrimeFieldElement(0, 7).inverse()


def test_is_prime_small():
    assert [n for n in range(30) if is_prime(n)] == [2, 3, 5, 7, 11, 13, 17, 19, 23, 29]


def test_mixing_rings_rejected():
    with pytest.raises(SignatureMismatch):
        R2.var("x") + R3.var("x")


def test_division_with_remainder():
    f = P("x^3 + 2*x + 1", PolyRing(("x",), 5))
    g = P("x + 1", f.ring)
    q, r = divmod_single(f, g)
    assert q * g + r == f and r.degree() < 1
    assert exact_divide(g * g * f, g * f) == g
    with pytest.raises(ArithmeticError):
        exact_divide(f, g * g)


def test_elimination_order_puts_first_block_first():
    R = PolyRing(("t", "x", "y"), 3)
    lead, _ = P("t + x^5*y^5", R).leading_term(elimination(1))
    assert lead == (1, 0, 0)


def test_exponents_do_not_overflow():
    x = PolyRing(("x",), 2).var("x")
    big = frobenius_pow(x, 40)
    assert big.degree() == 2 ** 40


@given(polys(R3), polys(R3), polys(R3))
def test_ring_axioms(a, b, c):
    assert (a + b) + c == a + (b + c)
    assert (a * b) * c == a * (b * c)
    assert a * (b + c) == a * b + a * c
    assert a + b == b + a and a * b == b * a
    assert a - a == R3.zero()


@given(polys(R5, 3, 2), st.integers(1, 2))
def test_frobenius_pow_is_repeated_product(a, e):
    prod = R5.one()
    for _ in range(5 ** e):
        prod = prod * a
    assert frobenius_pow(a, e) == prod


@given(polys(R5, 5, 4))
def test_print_parse_roundtrip(f):
    assert parse_poly(to_text(f), R5) == f


@given(st.integers(-10**6, 10**6), st.integers(-10**6, 10**6))
def test_field_matches_integer_arithmetic(a, b):
    p = 7
    assert (PrimeFieldElement(a, p) * PrimeFieldElement(b, p)).value == (a * b) % p
    assert (PrimeFieldElement(a, p) - PrimeFieldElement(b, p)).value == (a - b) % p


def test_box_and_monomials_counts():
    assert len(list(R3.box(3))) == 9
    assert len(list(R3.monomials_up_to(2))) == 6
    assert sorted(R3.box(3)) == sorted(itertools.product(range(3), repeat=2))
