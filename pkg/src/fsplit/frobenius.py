"""p^{-e}-linear maps on presented rings.

Every map Hom(F^e_* S, S) on S = F_p[x_1..x_n] has the form f -> Phi^e(c f)
where Phi^e is the generator that keeps the monomials whose exponents are all
congruent to q - 1 modulo q = p^e and sends x^(q b + q - 1) to x^b. A premultiplier
c descends to S/I exactly when c lies in (I^[q] : I).
"""
from __future__ import annotations

import random
from dataclasses import dataclass
from functools import lru_cache
from typing import Dict, Optional, Sequence, Tuple, Union

from . import config
from .errors import SignatureMismatch
from .groebner import Ideal, PresentedRing, ProductRing, colon
from .poly import Exponent, MultiPoly

Ring = Union[PresentedRing, ProductRing]


def bracket_power(I: Ideal, e: int) -> Ideal:
    """I^[q]: generated by the q-th powers of the generators of I, q = p^e."""
    if e < 1:
        raise ValueError("e must be positive")
    return _bracket_cached(I, e)


@lru_cache(maxsize=512)
def _bracket_cached(I: Ideal, e: int) -> Ideal:
    return Ideal(I.ring, [g.frobenius_pow(e) for g in I.generators])


def phi_eval(c: MultiPoly, e: int, f: MultiPoly) -> MultiPoly:
    """Phi^e(c * f) in the ambient polynomial ring."""
    if c.ring != f.ring:
        raise SignatureMismatch(f"{c.ring} vs {f.ring}")
    p = c.ring.p
    q = p ** e
    top = q - 1
    out: Dict[Exponent, int] = {}
    for e1, c1 in c.terms.items():
        for e2, c2 in f.terms.items():
            ok = True
            b = []
            for a1, a2 in zip(e1, e2):
                s = a1 + a2
                if s % q != top:
                    ok = False
                    break
                b.append(s // q)
            if ok:
                k = tuple(b)
                out[k] = (out.get(k, 0) + c1 * c2) % p
    return MultiPoly(c.ring, out)


def phi_on_basis(c: MultiPoly, e: int) -> Dict[Exponent, MultiPoly]:
    """Phi^e(c x^a) for every a in [0, q)^n, computed in one pass over c."""
    ring = c.ring
    q = ring.p ** e
    top = q - 1
    acc: Dict[Exponent, Dict[Exponent, int]] = {}
    for b, coeff in c.terms.items():
        a = tuple((top - x) % q for x in b)
        image = tuple((x + y) // q for x, y in zip(a, b))
        slot = acc.setdefault(a, {})
        slot[image] = (slot.get(image, 0) + coeff) % ring.p
    return {a: MultiPoly(ring, terms) for a, terms in acc.items()}


@dataclass(frozen=True)
class PeMap:
    """phi(f) = Phi^e(c f), one premultiplier c per component of ``ring``."""

    ring: Ring
    e: int
    premult: Tuple[MultiPoly, ...]

    def __post_init__(self):
        if self.e < 1:
            raise ValueError("e must be positive")
        comps = self.ring.components
        if len(self.premult) != len(comps):
            raise SignatureMismatch(f"{len(self.premult)} premultipliers for {len(comps)} components")
        for c, comp in zip(self.premult, comps):
            if c.ring != comp.ambient:
                raise SignatureMismatch(f"premultiplier in {c.ring}, component ambient {comp.ambient}")

    @property
    def p(self) -> int:
        return self.ring.p

    @property
    def q(self) -> int:
        return self.ring.p ** self.e

    @property
    def components(self):
        return self.ring.components

    def __call__(self, f):
        """Evaluate on an element (a polynomial, or a tuple for products)."""
        if isinstance(f, MultiPoly):
            f = (f,)
        out = tuple(comp.reduce(phi_eval(c, self.e, x))
                    for comp, c, x in zip(self.components, self.premult, f))
        return out[0] if len(out) == 1 else out


def pe_map(ring: Ring, e: int, c) -> PeMap:
    if isinstance(c, MultiPoly):
        c = (c,)
    return PeMap(ring, e, tuple(c))


def check_e(p: int, e: int):
    cap = config.current().frobenius.max_e(p)
    if e > cap:
        raise ValueError(f"e = {e} exceeds the configured bound {cap} for p = {p}")


def in_hom_ideal(c: MultiPoly, I: Ideal, e: int) -> bool:
    """c in (I^[q] : I), tested as c*g in I^[q] for each generator g of I."""
    Iq = bracket_power(I, e)
    return all((c * g) in Iq for g in I.generators)


def is_well_defined(m: PeMap) -> bool:
    return all(in_hom_ideal(c, comp.ideal, m.e) for c, comp in zip(m.premult, m.components))


@lru_cache(maxsize=256)
def hom_generators(I: Ideal, e: int) -> Tuple[MultiPoly, ...]:
    """Generators of (I^[q] : I), i.e. premultipliers of all maps on S/I."""
    return colon(bracket_power(I, e), I).groebner()


def image_ideal(m: PeMap) -> Tuple[Ideal, ...]:
    """Per component, the ideal phi(F^e_* R) plus the defining ideal (ambient representatives)."""
    out = []
    for c, comp in zip(m.premult, m.components):
        images = phi_on_basis(c, m.e).values()
        out.append(Ideal(comp.ambient, list(images) + list(comp.ideal.generators)))
    return tuple(out)


def is_surjective(m: PeMap) -> bool:
    """Global surjectivity: the image is the unit ideal on every component."""
    return all(J.is_unit() for J in image_ideal(m))


def _require_contains(big: Ideal, small: Ideal, what: str):
    if not big.contains_ideal(small):
        raise ValueError(f"{what} does not contain the defining ideal")


def is_surjective_at(m: PeMap, max_ideal: Ideal, component: int = 0) -> bool:
    """Fedder-style test: surjective at the maximal ideal iff c is not in m^[q]."""
    comp = m.components[component]
    _require_contains(max_ideal, comp.ideal, "maximal ideal")
    return m.premult[component] not in bracket_power(max_ideal, m.e)


def surjective_over(m: PeMap, ideals: Sequence[Ideal]) -> bool:
    """Surjective at every maximal ideal containing ``ideals[j]`` on component j.

    Equivalent to image_ideal + ideals[j] being the unit ideal on each component.
    """
    for J, M in zip(image_ideal(m), ideals):
        if not (J + M).is_unit():
            return False
    return True


def is_compatible(m: PeMap, J: Ideal, component: int = 0, route: str = "both") -> bool:
    """phi(J) in J, by direct evaluation and by c in (J^[q] : J); ``both`` cross-checks."""
    c = m.premult[component]
    comp = m.components[component]
    J = J + comp.ideal
    results = []
    if route in ("eval", "both"):
        ok = True
        for g in J.generators:
            for img in phi_on_basis(c * g, m.e).values():
                if img not in J:
                    ok = False
                    break
            if not ok:
                break
        results.append(ok)
    if route in ("colon", "both"):
        results.append(in_hom_ideal(c, J, m.e))
    if len(set(results)) != 1:
        raise AssertionError(f"compatibility routes disagree for {c} and {J}")
    return results[0]


def is_zero_map(m: PeMap) -> bool:
    return all(
        all(img in comp.ideal for img in phi_on_basis(c, m.e).values())
        for c, comp in zip(m.premult, m.components)
    )


def compose(m1: PeMap, m2: PeMap) -> PeMap:
    """m1 after m2: premultiplier c1^(p^e2) c2 with e = e1 + e2."""
    if m1.ring != m2.ring:
        raise SignatureMismatch("maps live on different rings")
    premult = tuple(c1.frobenius_pow(m2.e) * c2 for c1, c2 in zip(m1.premult, m2.premult))
    return PeMap(m1.ring, m1.e + m2.e, premult)


def self_compose(m: PeMap, d: int) -> PeMap:
    out = m
    for _ in range(d - 1):
        out = compose(m, out)
    return out


def fpure_at(ring: PresentedRing, max_ideal: Ideal) -> bool:
    """Fedder's criterion with e = 1: (I^[p] : I) is not inside m^[p]."""
    _require_contains(max_ideal, ring.ideal, "maximal ideal")
    mq = bracket_power(max_ideal, 1)
    return any(g not in mq for g in hom_generators(ring.ideal, 1))


def random_premultiplier(comp: PresentedRing, e: int, rng: random.Random, terms: int = 3,
                         degree: int = None) -> MultiPoly:
    """A random element of (I^[q] : I), reduced modulo I^[q]."""
    ring = comp.ambient
    p = ring.p
    q = p ** e
    degree = q if degree is None else degree
    monos = list(ring.monomials_up_to(degree))
    total = ring.zero()
    for g in hom_generators(comp.ideal, e):
        coeff = ring.const(rng.randrange(p))
        for _ in range(rng.randrange(terms + 1)):
            coeff = coeff + ring.monomial(rng.choice(monos), rng.randrange(1, p))
        total = total + coeff * g
    if comp.ideal.is_zero():
        return total
    return bracket_power(comp.ideal, e).reduce(total)


def standard_generator(I: Ideal, e: int) -> Optional[MultiPoly]:
    """f^(q-1) when I = (f) is principal and nonzero; None otherwise."""
    if len(I.generators) != 1:
        return None
    q = I.ring.p ** e
    return I.generators[0] ** (q - 1)
