"""Buchberger's algorithm and the ideal-theoretic subroutines built on it.

Bases are computed with the sugar selection strategy and the Gebauer-Moeller
installation of both Buchberger criteria. Every tie is broken by the monomial
order and then by insertion index, so results are reproducible.
"""
from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache
from typing import Dict, List, Optional, Sequence, Tuple

from . import config
from .errors import ResourceLimitExceeded, SignatureMismatch, VerificationError
from .poly import GREVLEX, Exponent, MonomialOrder, MultiPoly, PolyRing, elimination, exact_divide


def _divides(a: Exponent, b: Exponent) -> bool:
    return all(x <= y for x, y in zip(a, b))


def _lcm(a: Exponent, b: Exponent) -> Exponent:
    return tuple(max(x, y) for x, y in zip(a, b))


def _disjoint(a: Exponent, b: Exponent) -> bool:
    return all(not (x and y) for x, y in zip(a, b))


class _Elem:
    __slots__ = ("terms", "lm", "sugar")

    def __init__(self, terms, lm, sugar):
        self.terms = terms
        self.lm = lm
        self.sugar = sugar


def _reduce_terms(terms: Dict[Exponent, int], basis: Sequence[_Elem], key, p: int,
                  full: bool = True) -> Dict[Exponent, int]:
    """Normal form of ``terms`` modulo ``basis`` (whose leading coefficients are 1)."""
    rem = dict(terms)
    out: Dict[Exponent, int] = {}
    while rem:
        e = max(rem, key=key)
        c = rem[e]
        for g in basis:
            if _divides(g.lm, e):
                shift = tuple(a - b for a, b in zip(e, g.lm))
                for ge, gc in g.terms.items():
                    t = tuple(a + b for a, b in zip(ge, shift))
                    v = (rem.get(t, 0) - c * gc) % p
                    if v:
                        rem[t] = v
                    else:
                        rem.pop(t, None)
                break
        else:
            if not full:
                out.update(rem)
                return out
            out[e] = c
            del rem[e]
    return out


def _monic_terms(terms, lm, p):
    inv = pow(terms[lm], -1, p)
    return {e: c * inv % p for e, c in terms.items()}


def _spoly(f: _Elem, g: _Elem, p: int) -> Dict[Exponent, int]:
    lcm = _lcm(f.lm, g.lm)
    sf = tuple(a - b for a, b in zip(lcm, f.lm))
    sg = tuple(a - b for a, b in zip(lcm, g.lm))
    out: Dict[Exponent, int] = {}
    for e, c in f.terms.items():
        t = tuple(a + b for a, b in zip(e, sf))
        out[t] = (out.get(t, 0) + c) % p
    for e, c in g.terms.items():
        t = tuple(a + b for a, b in zip(e, sg))
        out[t] = (out.get(t, 0) - c) % p
    return {e: c for e, c in out.items() if c}


def buchberger(polys: Sequence[MultiPoly], order: MonomialOrder,
               cfg: config.GroebnerConfig = None) -> List[MultiPoly]:
    """Reduced Groebner basis of the ideal generated by ``polys``."""
    cfg = cfg or config.current().groebner
    polys = [f for f in polys if not f.is_zero()]
    if not polys:
        return []
    ring = polys[0].ring
    for f in polys:
        if f.ring != ring:
            raise SignatureMismatch(f"{f.ring} vs {ring}")
    p = ring.p
    key = order.key

    elems: List[_Elem] = []
    active: List[int] = []
    pairs: List[Tuple[int, int]] = []

    def sugar_of(pair):
        i, j = pair
        a, b = elems[i], elems[j]
        lcm = _lcm(a.lm, b.lm)
        d = sum(lcm)
        return max(a.sugar + d - sum(a.lm), b.sugar + d - sum(b.lm))

    def install(terms, sugar):
        lm = max(terms, key=key)
        terms = _monic_terms(terms, lm, p)
        if sum(lm) > cfg.max_degree:
            raise ResourceLimitExceeded(f"basis element of degree {sum(lm)} exceeds cap {cfg.max_degree}")
        h = len(elems)
        elems.append(_Elem(terms, lm, sugar))
        hl = lm
        # Gebauer-Moeller update
        cand = [(g, _lcm(elems[g].lm, hl)) for g in active]
        kept = []
        for idx, (g, l) in enumerate(cand):
            if _disjoint(elems[g].lm, hl):
                kept.append((g, l))
                continue
            others = [l2 for (_, l2) in cand[idx + 1:]] + [l2 for (_, l2) in kept]
            if not any(_divides(l2, l) for l2 in others):
                kept.append((g, l))
        new_pairs = [(g, h) for g, l in kept if not _disjoint(elems[g].lm, hl)]
        survivors = []
        for (i, j) in pairs:
            lij = _lcm(elems[i].lm, elems[j].lm)
            if (_divides(hl, lij) and _lcm(elems[i].lm, hl) != lij and _lcm(elems[j].lm, hl) != lij):
                continue
            survivors.append((i, j))
        pairs[:] = survivors + new_pairs
        active[:] = [g for g in active if not _divides(hl, elems[g].lm)] + [h]

    start = sorted(
        ((dict(f.terms), f.degree()) for f in polys),
        key=lambda t: (t[1], key(max(t[0], key=key))),
    )
    for terms, deg in start:
        r = _reduce_terms(terms, [elems[i] for i in active], key, p)
        if r:
            install(r, deg)

    processed = 0
    while pairs:
        best = min(range(len(pairs)),
                   key=lambda k: (sugar_of(pairs[k]),
                                  key(_lcm(elems[pairs[k][0]].lm, elems[pairs[k][1]].lm)),
                                  pairs[k]))
        i, j = pairs.pop(best)
        processed += 1
        if processed > cfg.max_pairs:
            raise ResourceLimitExceeded(f"more than {cfg.max_pairs} S-pairs")
        s = _spoly(elems[i], elems[j], p)
        sug = sugar_of((i, j))
        r = _reduce_terms(s, [elems[k] for k in active], key, p)
        if r:
            install(r, sug)

    # minimal, then reduced
    basis = [elems[i] for i in active]
    basis.sort(key=lambda g: key(g.lm))
    minimal: List[_Elem] = []
    for g in basis:
        if not any(_divides(h.lm, g.lm) for h in minimal):
            minimal.append(g)
    reduced = []
    for idx, g in enumerate(minimal):
        others = minimal[:idx] + minimal[idx + 1:]
        tail = dict(g.terms)
        c = tail.pop(g.lm)
        r = _reduce_terms(tail, others, key, p)
        r[g.lm] = c
        reduced.append(MultiPoly(ring, _monic_terms(r, g.lm, p), _clean=False))
    reduced.sort(key=lambda f: key(f.leading_term(order)[0]), reverse=True)
    if cfg.self_check and not is_groebner(reduced, order):
        raise AssertionError("Buchberger self-check failed")
    return reduced


def is_groebner(G: Sequence[MultiPoly], order: MonomialOrder) -> bool:
    """Check that every S-polynomial of G reduces to zero modulo G."""
    if not G:
        return True
    p = G[0].ring.p
    key = order.key
    elems = []
    for g in G:
        lm = max(g.terms, key=key)
        elems.append(_Elem(_monic_terms(g.terms, lm, p), lm, 0))
    for a in range(len(elems)):
        for b in range(a + 1, len(elems)):
            s = _spoly(elems[a], elems[b], p)
            if _reduce_terms(s, elems, key, p):
                return False
    return True


def normal_form(f: MultiPoly, G: Sequence[MultiPoly], order: MonomialOrder) -> MultiPoly:
    if not G or f.is_zero():
        return f
    key = order.key
    p = f.ring.p
    elems = []
    for g in G:
        lm = max(g.terms, key=key)
        elems.append(_Elem(_monic_terms(g.terms, lm, p), lm, 0))
    return MultiPoly(f.ring, _reduce_terms(f.terms, elems, key, p), _clean=False)


# ---------------------------------------------------------------- ideals


class Ideal:
    """An ideal of a polynomial ring, with lazily cached reduced Groebner bases.

    ``==`` compares generator lists; use :meth:`equals` for ideal equality.
    """

    def __init__(self, ring: PolyRing, generators: Sequence[MultiPoly] = ()):
        gens = []
        for g in generators:
            if isinstance(g, int):
                g = ring.const(g)
            if g.ring != ring:
                raise SignatureMismatch(f"generator in {g.ring}, ideal in {ring}")
            if not g.is_zero():
                gens.append(g)
        self.ring = ring
        self.generators = tuple(gens)
        self._gb: Dict[MonomialOrder, Tuple[MultiPoly, ...]] = {}

    @classmethod
    def unit(cls, ring: PolyRing) -> "Ideal":
        return cls(ring, [ring.one()])

    def groebner(self, order: MonomialOrder = None) -> Tuple[MultiPoly, ...]:
        order = order or self.ring.order
        gb = self._gb.get(order)
        if gb is None:
            gb = tuple(buchberger(self.generators, order))
            # publish only after the basis is complete
            self._gb[order] = gb
        return gb

    def reduce(self, f: MultiPoly, order: MonomialOrder = None) -> MultiPoly:
        order = order or self.ring.order
        return normal_form(f, self.groebner(order), order)

    def __contains__(self, f) -> bool:
        if isinstance(f, int):
            f = self.ring.const(f)
        return self.reduce(f).is_zero()

    def contains_ideal(self, other: "Ideal") -> bool:
        return all(g in self for g in other.generators)

    def equals(self, other: "Ideal") -> bool:
        return self.contains_ideal(other) and other.contains_ideal(self)

    def is_unit(self) -> bool:
        gb = self.groebner()
        return len(gb) == 1 and gb[0].is_constant()

    def is_zero(self) -> bool:
        return not self.generators

    def __add__(self, other: "Ideal") -> "Ideal":
        if other.ring != self.ring:
            raise SignatureMismatch(f"{self.ring} vs {other.ring}")
        return Ideal(self.ring, self.generators + other.generators)

    def __mul__(self, other: "Ideal") -> "Ideal":
        if other.ring != self.ring:
            raise SignatureMismatch(f"{self.ring} vs {other.ring}")
        return Ideal(self.ring, [a * b for a in self.generators for b in other.generators])

    def scaled(self, f: MultiPoly) -> "Ideal":
        return Ideal(self.ring, [f * g for g in self.generators])

    def __eq__(self, other):
        return isinstance(other, Ideal) and self.ring == other.ring and self.generators == other.generators

    def __hash__(self):
        return hash((self.ring, self.generators))

    def __repr__(self):
        return "(" + ", ".join(str(g) for g in self.generators) + ")"


def groebner_basis(I: Ideal, order: MonomialOrder = None) -> List[MultiPoly]:
    return list(I.groebner(order))


def ideal_member(f: MultiPoly, I: Ideal) -> bool:
    if f.ring != I.ring:
        raise SignatureMismatch(f"{f.ring} vs {I.ring}")
    return f in I


def _extended_ring(ring: PolyRing, front: Sequence[str]) -> PolyRing:
    names = list(front)
    taken = set(ring.variables)
    fresh = []
    for n in names:
        base = n
        k = 0
        while n in taken:
            k += 1
            n = f"{base}_{k}"
        taken.add(n)
        fresh.append(n)
    return PolyRing(tuple(fresh) + ring.variables, ring.p)


def eliminate(I: Ideal, keep: Sequence[str]) -> Ideal:
    """I intersected with F_p[keep], returned as an ideal of the same ring."""
    ring = I.ring
    keep = [v for v in ring.variables if v in set(keep)]
    drop = [v for v in ring.variables if v not in set(keep)]
    if not drop:
        return Ideal(ring, I.groebner())
    work = PolyRing(tuple(drop) + tuple(keep), ring.p)
    order = elimination(len(drop))
    gens = [g.embed(work) for g in I.generators]
    gb = buchberger(gens, order)
    back = [ring.index(v) for v in work.variables]
    kept = [g.embed(ring, back) for g in gb if not any(any(e[: len(drop)]) for e in g.terms)]
    return Ideal(ring, kept)


def intersect(I: Ideal, J: Ideal) -> Ideal:
    """I intersect J via t*I + (1 - t)*J and elimination of t."""
    if I.ring != J.ring:
        raise SignatureMismatch(f"{I.ring} vs {J.ring}")
    ring = I.ring
    if I.is_zero() or J.is_zero():
        return Ideal(ring)
    work = _extended_ring(ring, ["t"])
    t = work.gens()[0]
    pos = list(range(1, work.nvars))
    gens = [t * g.embed(work, pos) for g in I.generators]
    gens += [(work.one() - t) * g.embed(work, pos) for g in J.generators]
    gb = buchberger(gens, elimination(1))
    out = []
    for g in gb:
        if all(e[0] == 0 for e in g.terms):
            out.append(MultiPoly(ring, {e[1:]: c for e, c in g.terms.items()}, _clean=False))
    return Ideal(ring, out)


def colon(I: Ideal, J: Ideal) -> Ideal:
    """(I : J), computed generator by generator of J and intersected."""
    if I.ring != J.ring:
        raise SignatureMismatch(f"{I.ring} vs {J.ring}")
    ring = I.ring
    result: Optional[Ideal] = None
    for g in J.generators:
        if g.is_constant():
            part = Ideal(ring, I.groebner())
        else:
            inter = intersect(I, Ideal(ring, [g]))
            part = Ideal(ring, [exact_divide(h, g) for h in inter.groebner()])
        result = part if result is None else intersect(result, part)
    if result is None:  # J = (0)
        return Ideal.unit(ring)
    return Ideal(ring, result.groebner())


# ---------------------------------------------------------------- subalgebras


@lru_cache(maxsize=256)
def _tagged_basis(images: Tuple[MultiPoly, ...], ideal_gens: Tuple[MultiPoly, ...], target: PolyRing):
    m = len(images)
    tags = [f"_y{i}" for i in range(m)]
    work = PolyRing(target.variables + tuple(tags), target.p)
    n = target.nvars
    pos = list(range(n))
    gens = [g.embed(work, pos) for g in ideal_gens]
    for i, img in enumerate(images):
        gens.append(work.var(tags[i]) - img.embed(work, pos))
    order = elimination(n)
    return work, order, tuple(buchberger(gens, order))


def subalgebra_member(h: MultiPoly, images: Sequence[MultiPoly], target_ideal: Ideal = None,
                      source: PolyRing = None) -> Optional[MultiPoly]:
    """Find g with g(images) == h modulo target_ideal, or return None.

    Uses tag variables y_i - images[i] under an order eliminating the target
    variables; h is in the subalgebra iff its normal form involves tags only.
    """
    target = h.ring
    if target_ideal is None:
        target_ideal = Ideal(target)
    m = len(images)
    if source is None:
        source = PolyRing([f"t{i + 1}" for i in range(m)], target.p)
    if source.nvars != m:
        raise SignatureMismatch("one image per source variable required")
    if m == 0:
        r = target_ideal.reduce(h)
        return source.const(r.constant_term()) if r.is_constant() else None
    work, order, gb = _tagged_basis(tuple(images), target_ideal.generators, target)
    n = target.nvars
    nf = normal_form(h.embed(work, list(range(n))), gb, order)
    if any(any(e[:n]) for e in nf.terms):
        return None
    return MultiPoly(source, {e[n:]: c for e, c in nf.terms.items()}, _clean=False)


def kernel(images: Sequence[MultiPoly], target_ideal: Ideal, source: PolyRing) -> Ideal:
    """Kernel of source -> target/target_ideal sending variable i to images[i]."""
    target = target_ideal.ring
    if source.nvars == 0:
        return Ideal(source, [source.one()] if target_ideal.is_unit() else [])
    work, order, gb = _tagged_basis(tuple(images), target_ideal.generators, target)
    n = target.nvars
    out = [MultiPoly(source, {e[n:]: c for e, c in g.terms.items()}, _clean=False)
           for g in gb if not any(any(e[:n]) for e in g.terms)]
    return Ideal(source, out)


# ---------------------------------------------------------------- presented rings


class PresentedRing:
    """S/I for S a polynomial ring over F_p; elements are ambient representatives."""

    def __init__(self, ambient: PolyRing, ideal: Ideal = None, name: str = None):
        self.ambient = ambient
        self.ideal = ideal if ideal is not None else Ideal(ambient)
        if self.ideal.ring != ambient:
            raise SignatureMismatch("defining ideal lives in another ring")
        self.name = name

    @property
    def p(self) -> int:
        return self.ambient.p

    @property
    def components(self) -> Tuple["PresentedRing", ...]:
        return (self,)

    def reduce(self, f: MultiPoly) -> MultiPoly:
        return self.ideal.reduce(f)

    def eq(self, a: MultiPoly, b: MultiPoly) -> bool:
        return (a - b) in self.ideal

    def is_polynomial_ring(self) -> bool:
        return self.ideal.is_zero()

    def quotient(self, J: Ideal) -> "PresentedRing":
        return PresentedRing(self.ambient, self.ideal + J)

    def __eq__(self, other):
        return (isinstance(other, PresentedRing) and self.ambient == other.ambient
                and self.ideal == other.ideal)

    def __hash__(self):
        return hash((self.ambient, self.ideal))

    def __repr__(self):
        base = f"k[{','.join(self.ambient.variables)}]"
        if self.ideal.is_zero():
            return base
        return f"{base}/{self.ideal!r}"


class ProductRing:
    """A finite product of presented rings; elements are tuples, operations componentwise."""

    def __init__(self, components: Sequence[PresentedRing], name: str = None):
        components = tuple(components)
        if not components:
            raise ValueError("a product needs at least one component")
        ps = {c.p for c in components}
        if len(ps) != 1:
            raise SignatureMismatch(f"mixed characteristics {sorted(ps)}")
        self.components = components
        self.name = name

    @property
    def p(self) -> int:
        return self.components[0].p

    def reduce(self, elt: Sequence[MultiPoly]) -> Tuple[MultiPoly, ...]:
        return tuple(c.reduce(f) for c, f in zip(self.components, elt))

    def eq(self, a, b) -> bool:
        return all(c.eq(x, y) for c, x, y in zip(self.components, a, b))

    def __eq__(self, other):
        return isinstance(other, ProductRing) and self.components == other.components

    def __hash__(self):
        return hash(self.components)

    def __repr__(self):
        return " (+) ".join(repr(c) for c in self.components)


def components_of(ring) -> Tuple[PresentedRing, ...]:
    return ring.components


@dataclass(frozen=True)
class FlatProduct:
    """A product of presented rings rewritten as one quotient using idempotents."""

    ring: PolyRing
    ideal: Ideal
    positions: Tuple[Tuple[int, ...], ...]
    idempotents: Tuple[int, ...]

    def embed(self, elt: Sequence[MultiPoly]) -> MultiPoly:
        if len(self.positions) == 1:
            return elt[0].embed(self.ring, self.positions[0])
        total = self.ring.zero()
        for j, f in enumerate(elt):
            e = self.ring.monomial([1 if k == self.idempotents[j] else 0 for k in range(self.ring.nvars)])
            total = total + f.embed(self.ring, self.positions[j]) * e
        return total


@lru_cache(maxsize=128)
def flatten(product: ProductRing) -> FlatProduct:
    comps = product.components
    p = product.p
    if len(comps) == 1:
        c = comps[0]
        return FlatProduct(c.ambient, c.ideal, (tuple(range(c.ambient.nvars)),), ())
    names: List[str] = []
    positions = []
    for j, c in enumerate(comps):
        pos = []
        for v in c.ambient.variables:
            pos.append(len(names))
            names.append(f"{v}_{j + 1}")
        positions.append(tuple(pos))
    idem = []
    for j in range(len(comps)):
        idem.append(len(names))
        names.append(f"_e{j + 1}")
    ring = PolyRing(names, p)
    E = [ring.gens()[k] for k in idem]
    one = ring.one()
    gens = []
    for j, c in enumerate(comps):
        for g in c.ideal.generators:
            gens.append(g.embed(ring, positions[j]) * E[j])
        for k in positions[j]:
            gens.append(ring.gens()[k] * (one - E[j]))
        gens.append(E[j] * E[j] - E[j])
        for i in range(j + 1, len(comps)):
            gens.append(E[j] * E[i])
    total = ring.zero()
    for e in E:
        total = total + e
    gens.append(total - one)
    return FlatProduct(ring, Ideal(ring, gens), tuple(positions), tuple(idem))


def product_member(h: Sequence[MultiPoly], images: Sequence[Sequence[MultiPoly]],
                   product: ProductRing, source: PolyRing) -> Optional[MultiPoly]:
    """Preimage of the tuple h under the map source -> product.

    ``images[j][i]`` is the image of source variable i in component j.
    """
    flat = flatten(product)
    flat_images = []
    for i in range(source.nvars):
        flat_images.append(flat.embed([images[j][i] for j in range(len(product.components))]))
    return subalgebra_member(flat.embed(h), flat_images, flat.ideal, source)


def require(cond: bool, message: str):
    if not cond:
        raise VerificationError(message)


__all__ = [
    "GREVLEX", "Ideal", "PresentedRing", "ProductRing", "buchberger", "colon", "eliminate",
    "flatten", "groebner_basis", "ideal_member", "intersect", "is_groebner", "kernel",
    "normal_form", "product_member", "subalgebra_member",
]
