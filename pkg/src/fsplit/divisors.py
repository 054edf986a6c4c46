"""Divisors with Z_(p) coefficients on one-variable charts (products of k[t]).

Supports are declared: each component lists monic irreducible polynomials,
and multiplicities come from exact trial division.
"""
from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Dict, Optional, Tuple

from .errors import CoefficientError, UnresolvedSupport, VerificationError
from .extensions import FiniteExtension, extend_pe_map, induced_quotient_map, is_surjective_over
from .frobenius import PeMap, is_surjective_at, self_compose, standard_generator
from .groebner import Ideal
from .poly import MultiPoly, PolyRing, divmod_single, exact_divide

# ---------------------------------------------------------------- univariate helpers


def _require_univariate(f: MultiPoly):
    if f.ring.nvars != 1:
        raise VerificationError(f"{f} is not on a one-variable chart")


def derivative(f: MultiPoly) -> MultiPoly:
    _require_univariate(f)
    return MultiPoly(f.ring, {(e[0] - 1,): c * e[0] for e, c in f.terms.items() if e[0]})


def poly_gcd(a: MultiPoly, b: MultiPoly) -> MultiPoly:
    """Monic gcd of univariate polynomials."""
    while not b.is_zero():
        a, b = b, divmod_single(a, b)[1]
    return a.monic()


def is_squarefree(f: MultiPoly) -> bool:
    return poly_gcd(f, derivative(f)).is_constant()


def _monic_of_degree(ring: PolyRing, d: int):
    p = ring.p
    for coeffs in itertools.product(range(p), repeat=d):
        terms = {(d,): 1}
        for i, c in enumerate(coeffs):
            if c:
                terms[(i,)] = c
        yield MultiPoly(ring, terms)


def is_irreducible(f: MultiPoly) -> bool:
    """Brute-force search for a monic factor of degree at most deg(f) / 2."""
    _require_univariate(f)
    d = f.degree()
    if d < 1:
        return False
    for k in range(1, d // 2 + 1):
        for g in _monic_of_degree(f.ring, k):
            if divmod_single(f, g)[1].is_zero():
                return False
    return True


# ---------------------------------------------------------------- divisors


def _zp(x, p: int) -> Fraction:
    x = Fraction(x)
    if x.denominator % p == 0:
        raise CoefficientError(f"coefficient {x} has {p} in its denominator")
    return x


@dataclass(frozen=True)
class SupportList:
    """Candidate primes per component; each must be monic and irreducible."""

    primes: Tuple[Tuple[MultiPoly, ...], ...]

    def __post_init__(self):
        for comp in self.primes:
            if len(set(comp)) != len(comp):
                raise VerificationError("repeated support prime")
            for f in comp:
                _require_univariate(f)
                if f.leading_term()[1] != 1:
                    raise VerificationError(f"support prime {f} is not monic")
                if not is_irreducible(f):
                    raise VerificationError(f"support prime {f} is reducible")


@dataclass(frozen=True)
class CurveDivisor:
    """A finite sum coeff * [prime] @ component with Z_(p) coefficients.

    ``terms`` maps (component index, monic prime) to a nonzero Fraction.
    ``unresolved`` records cofactors that fell outside the declared support.
    """

    p: int
    terms: Tuple[Tuple[Tuple[int, MultiPoly], Fraction], ...] = ()
    unresolved: Tuple[Tuple[int, MultiPoly], ...] = field(default=(), compare=False)

    @classmethod
    def build(cls, p: int, mapping: Dict[Tuple[int, MultiPoly], Fraction], unresolved=()):
        items = []
        for key, v in mapping.items():
            v = _zp(v, p)
            if v:
                items.append((key, v))
        items.sort(key=lambda kv: (kv[0][0], kv[0][1].degree(), str(kv[0][1])))
        return cls(p, tuple(items), tuple(unresolved))

    def as_dict(self) -> Dict[Tuple[int, MultiPoly], Fraction]:
        return dict(self.terms)

    def coefficient(self, component: int, prime: MultiPoly) -> Fraction:
        return self.as_dict().get((component, prime), Fraction(0))

    def is_zero(self) -> bool:
        return not self.terms

    def __add__(self, other: "CurveDivisor") -> "CurveDivisor":
        if self.p != other.p:
            raise CoefficientError("divisors in different characteristics")
        acc = self.as_dict()
        for k, v in other.terms:
            acc[k] = acc.get(k, Fraction(0)) + v
        return CurveDivisor.build(self.p, acc, self.unresolved + other.unresolved)

    def scale(self, factor) -> "CurveDivisor":
        factor = _zp(factor, self.p)
        return CurveDivisor.build(self.p, {k: v * factor for k, v in self.terms}, self.unresolved)

    def to_text(self) -> str:
        """Sorted ``coeff * [prime] @ component`` terms with 1-based components."""
        if not self.terms:
            return "0"
        return " + ".join(f"{v} * [{f}] @ {j + 1}" for (j, f), v in self.terms)

    def __repr__(self):
        return self.to_text()


def divisor_of_element(g, support: SupportList, p: int = None, strict: bool = False) -> CurveDivisor:
    """Multiplicity of each support prime in g, by repeated exact division."""
    if isinstance(g, MultiPoly):
        g = (g,)
    if len(g) != len(support.primes):
        raise VerificationError("support must list primes for every component")
    p = p or g[0].ring.p
    acc: Dict[Tuple[int, MultiPoly], Fraction] = {}
    unresolved = []
    for j, (f, primes) in enumerate(zip(g, support.primes)):
        _require_univariate(f)
        if f.is_zero():
            raise VerificationError(f"divisor of zero on component {j + 1}")
        rest = f
        for pi in primes:
            n = 0
            while True:
                quo, rem = divmod_single(rest, pi)
                if not rem.is_zero():
                    break
                rest, n = quo, n + 1
            if n:
                acc[(j, pi)] = Fraction(n)
        if not rest.is_constant():
            if strict:
                raise UnresolvedSupport(f"{rest.monic()} on component {j + 1} is outside the support")
            unresolved.append((j, rest.monic()))
    return CurveDivisor.build(p, acc, unresolved)


def _require_curve_chart(ring):
    for comp in ring.components:
        if comp.ambient.nvars != 1 or not comp.ideal.is_zero():
            raise VerificationError(f"{comp} is not a one-variable polynomial chart")


def divisor_of_map(m: PeMap, support: SupportList, strict: bool = False) -> CurveDivisor:
    """(1/(q-1)) div(c) for a map on a product of polynomial rings in one variable."""
    _require_curve_chart(m.ring)
    return divisor_of_element(m.premult, support, m.p, strict).scale(Fraction(1, m.q - 1))


def power_formula_check(m: PeMap, d: int, support: SupportList) -> bool:
    """div of the d-fold composite's premultiplier equals (q^(d-1) + ... + 1) div(c)."""
    composite = self_compose(m, d)
    lhs = divisor_of_element(composite.premult, support, m.p)
    factor = sum(m.q ** i for i in range(d))
    rhs = divisor_of_element(m.premult, support, m.p).scale(factor)
    return lhs == rhs


@dataclass(frozen=True)
class PullbackReport:
    extended: PeMap
    delta_bar: CurveDivisor
    pullback: CurveDivisor
    conductor_divisor: CurveDivisor

    @property
    def holds(self) -> bool:
        return self.delta_bar == self.pullback + self.conductor_divisor


def pullback_plus_conductor_check(ext: FiniteExtension, m: PeMap, support: SupportList,
                                  conductor_element, generator: MultiPoly = None) -> PullbackReport:
    """Compare the divisor of the extended map with pullback plus conductor divisor.

    The source map is written as g * (generator) with g an exact quotient in the
    ambient ring; its divisor pulls back to div(image(g)) / (q - 1). The
    conductor divisor is div(conductor_element) on the normalization.
    """
    _require_curve_chart(ext.target)
    if generator is None:
        generator = standard_generator(ext.source.ideal, m.e)
        if generator is None:
            raise VerificationError("the defining ideal is not principal; declare a generator")
    try:
        g = exact_divide(m.premult[0], generator)
    except ArithmeticError:
        raise VerificationError(f"premultiplier is not a multiple of {generator}") from None
    conductor_element = ext.element(conductor_element)
    for j, (b, J) in enumerate(zip(conductor_element, ext.conductor or ())):
        if not Ideal(b.ring, [b]).equals(J):
            raise VerificationError(f"{b} does not generate the conductor on component {j + 1}")
    mbar = extend_pe_map(ext, m)
    delta_bar = divisor_of_map(mbar, support)
    pulled = divisor_of_element(ext.image(g), support, m.p).scale(Fraction(1, m.q - 1))
    B = divisor_of_element(conductor_element, support, m.p)
    return PullbackReport(mbar, delta_bar, pulled, B)


def _restricted_map(ambient: PolyRing, h: MultiPoly, m: PeMap, ext: FiniteExtension) -> PeMap:
    if m.ring.components[0].ambient != ambient or not m.ring.components[0].ideal.is_zero():
        raise VerificationError("the map must live on the ambient polynomial ring")
    quotient = induced_quotient_map(m, Ideal(ambient, [h]))
    if ext.source.ambient != ambient or not ext.source.ideal.equals(quotient.ring.ideal):
        raise VerificationError("the normalization does not start at ambient/(h)")
    return PeMap(ext.source, m.e, quotient.premult)


def f_different(ambient: PolyRing, h: MultiPoly, m: PeMap, ext: FiniteExtension,
                support: SupportList) -> CurveDivisor:
    """Restrict m to S = V(h), extend to the normalization of S, take the divisor."""
    mbar = extend_pe_map(ext, _restricted_map(ambient, h, m, ext))
    return divisor_of_map(mbar, support)


@dataclass(frozen=True)
class AdjunctionReport:
    hst: bool
    ambient_surjective: bool
    normalization_surjective: bool
    different: Optional[CurveDivisor]

    @property
    def agree(self) -> bool:
        return self.ambient_surjective == self.normalization_surjective

    @property
    def holds(self) -> bool:
        """The biconditional is only claimed when hst holds."""
        return self.agree or not self.hst

    @property
    def pathology(self) -> bool:
        return not self.hst and not self.agree


def inversion_of_adjunction_check(ambient: PolyRing, h: MultiPoly, m: PeMap, ext: FiniteExtension,
                                  support: Optional[SupportList], max_ideal: Ideal,
                                  hst: bool) -> AdjunctionReport:
    """Surjectivity of m at the point versus the extended map over it.

    The divisor is only computed when the normalization is a curve chart and a
    support is given.
    """
    if h not in max_ideal:
        raise VerificationError("the point does not lie on V(h)")
    restricted = _restricted_map(ambient, h, m, ext)
    mbar = extend_pe_map(ext, restricted)
    left = is_surjective_at(m, max_ideal)
    right = is_surjective_over(mbar, ext, max_ideal)
    different = None
    if support is not None:
        different = divisor_of_map(mbar, support)
    report = AdjunctionReport(hst, left, right, different)
    if not report.holds:
        raise AssertionError("inversion of adjunction fails although hst holds")
    return report


__all__ = [
    "AdjunctionReport", "CurveDivisor", "PullbackReport", "SupportList", "derivative",
    "divisor_of_element", "divisor_of_map", "f_different", "inversion_of_adjunction_check",
    "is_irreducible", "is_squarefree", "poly_gcd", "power_formula_check",
    "pullback_plus_conductor_check",
]
