import itertools
import random

import pytest
from hypothesis import given, strategies as st

from fsplit.errors import SignatureMismatch
from fsplit.frobenius import (PeMap, bracket_power, check_e, compose, fpure_at, hom_generators, image_ideal,
                              in_hom_ideal, is_compatible, is_surjective, is_surjective_at, is_well_defined,
                              is_zero_map, pe_map, phi_eval, phi_on_basis, random_premultiplier, self_compose,
                              standard_generator, surjective_over)
from fsplit.groebner import Ideal, PresentedRing
from fsplit.linalg import solve
from fsplit.poly import MultiPoly, PolyRing
from conftest import P, polys


def phi_oracle(c, e, f):
    """Expand c*f term by term into base-q digits and keep the top-digit terms."""
    q = c.ring.p ** e
    prod = c * f
    out = {}
    for exp, coeff in prod.terms.items():
        digits = [divmod(a, q) for a in exp]
        if all(r == q - 1 for _, r in digits):
            key = tuple(d for d, _ in digits)
            out[key] = (out.get(key, 0) + coeff) % c.ring.p
    return MultiPoly(c.ring, out)


def node(p=3):
    S = PolyRing(("x", "y"), p)
    return S, PresentedRing(S, Ideal(S, [P("x*y", S)]))


def cusp(p):
    S = PolyRing(("x", "y"), p)
    return S, PresentedRing(S, Ideal(S, [P("y^2 - x^3", S)]))


def test_bracket_power_examples():
    S2 = PolyRing(("x", "y"), 2)
    assert bracket_power(Ideal(S2, [P("x", S2), P("y^2", S2)]), 2).equals(Ideal(S2, [P("x^4", S2), P("y^8", S2)]))
    S3 = PolyRing(("x", "y"), 3)
    assert bracket_power(Ideal(S3, [P("x*y", S3)]), 1).equals(Ideal(S3, [P("x^3*y^3", S3)]))
    assert bracket_power(Ideal(S2, [P("x + y", S2)]), 1).equals(Ideal(S2, [P("x^2 + y^2", S2)]))


def test_phi_eval_examples():
    T = PolyRing(("x",), 2)
    assert phi_eval(T.one(), 1, P("x", T)) == T.one()
    assert phi_eval(T.one(), 1, P("x^3", T)) == P("x", T)
    S = PolyRing(("x", "y"), 3)
    assert phi_eval(P("x^2*y^2", S), 1, S.one()) == S.one()


def test_well_defined_examples():
    S, R = node()
    assert is_well_defined(pe_map(R, 1, P("x^2*y^2", S)))
    assert not is_well_defined(pe_map(R, 1, S.one()))
    free = PresentedRing(S)
    assert is_well_defined(pe_map(free, 1, P("x + 2*y^5", S)))


def test_hom_generators_of_node_match_monomial_colon():
    S, R = node()
    gens = Ideal(S, list(hom_generators(R.ideal, 1)))
    assert gens.equals(Ideal(S, [P("x^2*y^2", S), P("x^3*y^3", S)]))


def test_image_ideal_examples():
    T = PolyRing(("x",), 2)
    assert image_ideal(pe_map(PresentedRing(T), 1, P("x", T)))[0].is_unit()
    for p in (2, 3, 5, 7):
        S, R = cusp(p)
        m = pe_map(R, 1, standard_generator(R.ideal, 1))
        J = image_ideal(m)[0]
        assert not (J + Ideal(S, [P("x", S), P("y", S)])).is_unit()
    S, R = node()
    zero = pe_map(R, 1, S.zero())
    assert image_ideal(zero)[0].equals(R.ideal)
    assert is_zero_map(zero)


def fedder_oracle(p):
    """Expand (y^2 - x^3)^(p-1) by the binomial theorem; look for a term outside (x^p, y^p)."""
    from math import comb
    for i in range(p):
        coeff = comb(p - 1, i) % p
        if coeff and 3 * i < p and 2 * (p - 1 - i) < p:
            return True
    return False


@pytest.mark.parametrize("p", [2, 3, 5, 7])
def test_cusp_fedder_against_expansion(p):
    S, R = cusp(p)
    M = Ideal(S, [P("x", S), P("y", S)])
    m = pe_map(R, 1, standard_generator(R.ideal, 1))
    assert is_surjective_at(m, M) is fedder_oracle(p) is False
    assert not fpure_at(R, M)


def test_node_surjective_at_origin():
    S, R = node()
    M = Ideal(S, [P("x", S), P("y", S)])
    assert is_surjective_at(pe_map(R, 1, P("x^2*y^2", S)), M)
    assert is_surjective_at(pe_map(PresentedRing(S), 1, S.one()), M)
    with pytest.raises(ValueError):
        is_surjective_at(pe_map(R, 1, S.one()), Ideal(S, [P("x - 1", S)]))


def test_compatibility_examples():
    S, R = node()
    m = pe_map(R, 1, P("x^2*y^2", S))
    assert is_compatible(m, R.ideal)
    assert is_compatible(m, Ideal(S, [P("x", S), P("y", S)]))
    T = PolyRing(("x",), 2)
    assert not is_compatible(pe_map(PresentedRing(T), 1, T.one()), Ideal(T, [P("x", T)]))


def test_compose_examples():
    S, R = node()
    m = pe_map(R, 1, P("x^2*y^2", S))
    mm = self_compose(m, 2)
    assert mm.e == 2 and mm.premult[0] == P("x^8*y^8", S)
    z = compose(pe_map(R, 1, S.zero()), m)
    assert z.premult[0].is_zero()


def test_map_validation():
    S, R = node()
    with pytest.raises(SignatureMismatch):
        PeMap(R, 1, (S.one(), S.one()))
    with pytest.raises(ValueError):
        PeMap(R, 0, (S.one(),))
    check_e(3, 4)
    with pytest.raises(ValueError):
        check_e(5, 3)


S2 = PolyRing(("x", "y"), 2)
S3 = PolyRing(("x", "y"), 3)


@given(polys(S3, 4, 5), polys(S3, 3, 2), polys(S3, 3, 4))
def test_phi_eval_matches_digit_oracle_and_linearity(c, g, f):
    assert phi_eval(c, 1, f) == phi_oracle(c, 1, f)
    assert phi_eval(c, 1, g.frobenius_pow(1) * f) == g * phi_eval(c, 1, f)


@given(polys(S2, 4, 6), st.integers(1, 2))
def test_phi_on_basis_matches_eval(c, e):
    table = phi_on_basis(c, e)
    for a in S2.box(2 ** e):
        assert table.get(a, S2.zero()) == phi_eval(c, e, S2.monomial(a))


@given(st.lists(polys(S2, 3, 2), min_size=4, max_size=4))
def test_generator_property_by_linear_solve(targets):
    # any assignment of images to the basis {x^a : a in [0,2)^2} comes from some premultiplier
    box = list(S2.box(2))
    unknowns = list(itertools.product(range(6), repeat=2))
    rows, rhs = [], []
    outputs = list(itertools.product(range(3), repeat=2))
    for a, t in zip(box, targets):
        for out in outputs:
            rows.append([1 if all((u + ai) == 2 * o + 1 for u, ai, o in zip(mono, a, out)) else 0
                         for mono in unknowns])
            rhs.append(t.terms.get(out, 0))
    x, _ = solve(rows, rhs, 2, len(unknowns))
    assert x is not None
    c = MultiPoly(S2, {m: v for m, v in zip(unknowns, x) if v})
    for a, t in zip(box, targets):
        assert phi_eval(c, 1, S2.monomial(a)) == t


@given(polys(S3, 3, 3), polys(S3, 3, 3), polys(S3, 3, 3), polys(S3, 3, 6))
def test_compose_is_associative_and_matches_evaluation(c1, c2, c3, f):
    R = PresentedRing(S3)
    m1, m2, m3 = (pe_map(R, 1, c) for c in (c1, c2, c3))
    left = compose(compose(m1, m2), m3).premult[0]
    right = compose(m1, compose(m2, m3)).premult[0]
    assert left == right
    assert compose(m1, m2)(f) == m1(m2(f))


def test_fedder_and_image_ideal_agree_on_random_maps():
    rng = random.Random(11)
    cases = []
    for p in (2, 3):
        S, R = node(p)
        cases.append((R, Ideal(S, [P("x", S), P("y", S)])))
        S, R = cusp(p)
        cases.append((R, Ideal(S, [P("x", S), P("y", S)])))
        T = PolyRing(("x", "y", "z"), p)
        cases.append((PresentedRing(T, Ideal(T, [P("x*y", T), P("x*z", T), P("y*z", T)])),
                      Ideal(T, [P("x", T), P("y", T), P("z", T)])))
    count = 0
    while count < 50:
        R, M = cases[count % len(cases)]
        m = pe_map(R, 1, random_premultiplier(R, 1, rng))
        assert is_well_defined(m)
        assert is_surjective_at(m, M) == surjective_over(m, [M])
        count += 1


@given(polys(S3, 3, 4), st.sampled_from(["x", "y", "x*y", "x + y", "x^2 - y"]))
def test_compatibility_routes_agree(c, j):
    m = pe_map(PresentedRing(S3), 1, c)
    J = Ideal(S3, [P(j, S3)])
    assert is_compatible(m, J, route="eval") == is_compatible(m, J, route="colon")


def test_global_surjectivity():
    T = PolyRing(("x",), 3)
    assert is_surjective(pe_map(PresentedRing(T), 1, P("x^2", T)))
    assert not is_surjective(pe_map(PresentedRing(T), 1, P("x^3", T)))
    assert in_hom_ideal(P("x^2*y^2", S3), Ideal(S3, [P("x*y", S3)]), 1)
