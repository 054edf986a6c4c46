"""Finite ring extensions declared by the user: verification, extension of maps, traces.

Targets are either a single presented ring or a product; target elements are
always handled as tuples with one entry per component.
"""
from __future__ import annotations

import warnings
from dataclasses import dataclass, field
from typing import Dict, List, Optional, Sequence, Tuple, Union

from . import config
from .errors import (BoundTooSmall, IncompatibleIdeal, NonUniqueExtension, NotExtendable,
                     SignatureMismatch, VerificationError)
from .frobenius import PeMap, is_compatible, phi_eval, phi_on_basis, surjective_over
from .groebner import Ideal, PresentedRing, ProductRing, product_member, require, subalgebra_member
from .linalg import row_reduce, solve
from .poly import MultiPoly, PolyRing, divmod_single, elimination

Element = Tuple[MultiPoly, ...]


class ConductorWarning(UserWarning):
    """The bounded sweep found conducting elements outside the declared conductor."""


class ModuleWarning(UserWarning):
    """Some target monomial could not be written over the declared module generators."""


@dataclass(frozen=True, eq=False)
class FiniteExtension:
    """A ring map source -> target with declared module generators and conductor.

    ``images[j][i]`` is the image of source variable i in target component j.
    ``conductor[j]`` is an ideal of the ambient ring of component j; the
    conductor of the product is the product of these.
    """

    source: PresentedRing
    target: Union[PresentedRing, ProductRing]
    images: Tuple[Tuple[MultiPoly, ...], ...]
    module_generators: Tuple[Element, ...] = ()
    conductor: Optional[Tuple[Ideal, ...]] = None
    is_normalization: bool = False
    name: Optional[str] = None

    def __post_init__(self):
        comps = self.target.components
        if len(self.images) != len(comps):
            raise SignatureMismatch(f"{len(self.images)} image lists for {len(comps)} components")
        for imgs, comp in zip(self.images, comps):
            if len(imgs) != self.source.ambient.nvars:
                raise SignatureMismatch("one image per source variable required")
            for f in imgs:
                if f.ring != comp.ambient:
                    raise SignatureMismatch(f"image {f} does not live in {comp.ambient}")
        for g in self.module_generators:
            self._check_element(g)
        if self.conductor is not None:
            if len(self.conductor) != len(comps):
                raise SignatureMismatch("one conductor ideal per component required")
            for J, comp in zip(self.conductor, comps):
                if J.ring != comp.ambient:
                    raise SignatureMismatch("conductor ideal lives in the wrong ring")

    @property
    def components(self) -> Tuple[PresentedRing, ...]:
        return self.target.components

    @property
    def p(self) -> int:
        return self.source.p

    def _check_element(self, h: Element):
        if len(h) != len(self.components):
            raise SignatureMismatch("target element has the wrong number of components")
        for f, comp in zip(h, self.components):
            if f.ring != comp.ambient:
                raise SignatureMismatch(f"{f} does not live in {comp.ambient}")

    def element(self, h) -> Element:
        if isinstance(h, MultiPoly):
            h = (h,)
        h = tuple(h)
        self._check_element(h)
        return h

    def image(self, f: MultiPoly) -> Element:
        """Image of a source polynomial, reduced on every component."""
        if f.ring != self.source.ambient:
            raise SignatureMismatch(f"{f} is not in {self.source.ambient}")
        return tuple(comp.reduce(f.map_to(comp.ambient, imgs))
                     for comp, imgs in zip(self.components, self.images))

    def one(self) -> Element:
        return tuple(c.ambient.one() for c in self.components)

    def unit_vector(self, j: int, f: MultiPoly) -> Element:
        return tuple(f if k == j else c.ambient.zero() for k, c in enumerate(self.components))

    def product_target(self) -> ProductRing:
        t = self.target
        return t if isinstance(t, ProductRing) else ProductRing([t])


def identity_extension(ring: PresentedRing) -> FiniteExtension:
    amb = ring.ambient
    return FiniteExtension(ring, ring, (amb.gens(),), ((amb.one(),),),
                           (Ideal.unit(amb),), True)


# ---------------------------------------------------------------- verification


def verify_ring_map(ext: FiniteExtension) -> bool:
    """Every source relation maps to zero on every component."""
    return all(all(f.is_zero() for f in ext.image(g)) for g in ext.source.ideal.generators)


def subring_member(ext: FiniteExtension, h) -> Optional[MultiPoly]:
    """A source polynomial mapping to h, or None if h is not in the image."""
    h = ext.element(h)
    comps = ext.components
    src = ext.source.ambient
    if len(comps) == 1:
        return subalgebra_member(h[0], ext.images[0], comps[0].ideal, src)
    return product_member(h, ext.images, ext.product_target(), src)


def _mul(a: Element, b: Element) -> Element:
    return tuple(x * y for x, y in zip(a, b))


def conductor_generators(ext: FiniteExtension) -> List[Element]:
    """The conductor as target elements, one tuple per generator of each component ideal."""
    if ext.conductor is None:
        raise VerificationError("no conductor declared")
    return [ext.unit_vector(j, g) for j, J in enumerate(ext.conductor) for g in J.generators]


def verify_conductor(ext: FiniteExtension) -> bool:
    """The declared conductor lies in the image of the source.

    Checks every product (conductor generator) * (module generator), and the same
    products with each target variable inserted.
    """
    gens = ext.module_generators or (ext.one(),)
    for c in conductor_generators(ext):
        for g in gens:
            cg = _mul(c, g)
            if subring_member(ext, cg) is None:
                return False
            for j, comp in enumerate(ext.components):
                for v in comp.ambient.gens():
                    if c[j].is_zero():
                        continue
                    moved = ext.unit_vector(j, cg[j] * v)
                    if subring_member(ext, moved) is None:
                        return False
    return True


def conductor_in_source(ext: FiniteExtension) -> Ideal:
    """The conductor contracted to the source, as an ideal of the source ambient ring."""
    gens = ext.module_generators or (ext.one(),)
    out = list(ext.source.ideal.generators)
    for c in conductor_generators(ext):
        for g in gens:
            pre = subring_member(ext, _mul(c, g))
            if pre is None:
                raise VerificationError(f"conductor element {_mul(c, g)} is not in the source")
            out.append(pre)
    return Ideal(ext.source.ambient, out)


def conductor_sweep(ext: FiniteExtension, degree: int = None) -> List[Tuple[int, MultiPoly]]:
    """Monomials of degree <= ``degree`` outside the declared conductor that still conduct.

    A nonempty answer means the candidate is not the largest conductor; a warning
    is issued. An empty answer does not certify maximality.
    """
    degree = config.current().extensions.sweep_degree if degree is None else degree
    gens = ext.module_generators or (ext.one(),)
    found = []
    for j, comp in enumerate(ext.components):
        J = ext.conductor[j] + comp.ideal
        for exp in comp.ambient.monomials_up_to(degree):
            mu = comp.ambient.monomial(exp)
            if mu in J:
                continue
            if all(subring_member(ext, _mul(ext.unit_vector(j, mu), g)) is not None for g in gens):
                found.append((j, mu))
    if found:
        warnings.warn(f"conductor candidate is not maximal: {found[:3]} also conduct", ConductorWarning)
    return found


def check_module_generators(ext: FiniteExtension, degree: int = None) -> List[Tuple[int, MultiPoly]]:
    """Bounded check that the declared generators span the target over the source.

    Each target monomial of degree <= ``degree`` is searched for as a combination
    sum_i image(s_i) * g_i with source polynomials s_i of degree <= ``degree``.
    Returns the monomials for which no such combination was found.
    """
    degree = config.current().extensions.module_check_degree if degree is None else degree
    gens = ext.module_generators
    if not gens:
        raise VerificationError("no module generators declared")
    if not any(all((f - 1).is_zero() for f in g) for g in gens):
        raise VerificationError("1 must be among the module generators")
    src = ext.source.ambient
    columns: Dict[Tuple[int, tuple], int] = {}
    vectors = []
    for s in src.monomials_up_to(degree):
        img = ext.image(src.monomial(s))
        for g in gens:
            prod = tuple(comp.reduce(x) for comp, x in zip(ext.components, _mul(img, g)))
            vec = {}
            for j, f in enumerate(prod):
                for e, c in f.terms.items():
                    key = (j, e)
                    if key not in columns:
                        columns[key] = len(columns)
                    vec[columns[key]] = c
            vectors.append(vec)
    targets = []
    for j, comp in enumerate(ext.components):
        for exp in comp.ambient.monomials_up_to(degree):
            mu = comp.reduce(comp.ambient.monomial(exp))
            if mu.is_zero():
                continue
            vec = {}
            for e, c in mu.terms.items():
                key = (j, e)
                if key not in columns:
                    columns[key] = len(columns)
                vec[columns[key]] = c
            targets.append((j, comp.ambient.monomial(exp), vec))
    p = ext.p
    n = len(columns)
    dense = [[v.get(k, 0) for k in range(n)] for v in vectors]
    base_rank = len(row_reduce([r[:] for r in dense], p, n)[1]) if dense else 0
    missing = []
    for j, mu, vec in targets:
        row = [vec.get(k, 0) for k in range(n)]
        if len(row_reduce([r[:] for r in dense] + [row], p, n)[1]) > base_rank:
            missing.append((j, mu))
    if missing:
        warnings.warn(f"module generators not confirmed for {missing[:3]}", ModuleWarning)
    return missing


# ---------------------------------------------------------------- extending maps


def default_degree_bound(ext: FiniteExtension, m: PeMap) -> int:
    c = m.premult[0]
    cdeg = c.degree() if not c.is_zero() else 0
    imdeg = max([f.degree() for imgs in ext.images for f in imgs if not f.is_zero()] or [1])
    return cdeg * max(imdeg, 1) + 2 * m.q


def _extend_component(ext: FiniteExtension, m: PeMap, j: int, bound: int) -> MultiPoly:
    comp = ext.components[j]
    amb = comp.ambient
    src = ext.source.ambient
    e, p, q = m.e, m.p, m.q
    imgs = ext.images[j]
    c = m.premult[0]
    on_basis = phi_on_basis(c, e)

    unknowns = list(amb.monomials_up_to(bound))
    monos = [amb.monomial(u) for u in unknowns]
    rows: Dict[tuple, Dict[int, int]] = {}
    rhs: Dict[tuple, int] = {}

    def add_equation(tag, col, poly):
        for exp, v in poly.terms.items():
            rows.setdefault((tag, exp), {})[col] = v

    for a in src.box(q):
        xa = comp.reduce(src.monomial(a).map_to(amb, imgs))
        target = on_basis.get(a)
        if target is not None:
            t = comp.reduce(target.map_to(amb, imgs))
            for exp, v in t.terms.items():
                rhs[(("eq", a), exp)] = v
                rows.setdefault((("eq", a), exp), {})
        if xa.is_zero():
            continue
        for col, mu in enumerate(monos):
            add_equation(("eq", a), col, comp.reduce(phi_eval(mu, e, xa)))
    # the extended premultiplier must itself descend to the target quotient
    for gi, g in enumerate(comp.ideal.generators):
        for b in amb.box(q):
            gb = g * amb.monomial(b)
            for col, mu in enumerate(monos):
                add_equation(("wd", gi, b), col, comp.reduce(phi_eval(mu, e, gb)))

    keys = sorted(rows, key=repr)
    ncols = len(monos)
    A = [[rows[k].get(col, 0) for col in range(ncols)] for k in keys]
    b = [rhs.get(k, 0) for k in keys]
    x, null = solve(A, b, p, ncols)
    if x is None:
        if ext.is_normalization:
            raise BoundTooSmall(f"no extension with premultiplier degree <= {bound} on component {j + 1}; "
                                "retry with a larger degree bound")
        raise NotExtendable(f"the map does not extend to component {j + 1}")
    sol = MultiPoly(amb, {u: v for u, v in zip(unknowns, x) if v})
    for v in null:
        diff = MultiPoly(amb, {u: w for u, w in zip(unknowns, v) if w})
        if any(not comp.reduce(img).is_zero() for img in phi_on_basis(diff, e).values()):
            raise NonUniqueExtension(f"several extensions on component {j + 1}, e.g. differing by {diff}")
    return sol


def extend_pe_map(ext: FiniteExtension, m: PeMap, degree_bound: int = None) -> PeMap:
    """Extend a map on the source to a map on the target agreeing with it on the source.

    Solves for target premultipliers c' with Phi(c' image(x^a)) == image(Phi(c x^a))
    for every source basis monomial x^a, exponents below q.
    """
    if m.ring != ext.source:
        raise SignatureMismatch("map does not live on the source of the extension")
    bound = default_degree_bound(ext, m) if degree_bound is None else degree_bound
    premult = tuple(_extend_component(ext, m, j, bound) for j in range(len(ext.components)))
    out = PeMap(ext.target, m.e, premult)
    if not restriction_holds(ext, m, out):
        raise AssertionError("extended map fails the restriction identity")
    return out


def restriction_holds(ext: FiniteExtension, m: PeMap, mbar: PeMap) -> bool:
    """mbar(image(x^a)) == image(m(x^a)) for every source basis monomial, by direct evaluation."""
    src = ext.source.ambient
    for a in src.box(m.q):
        xa = src.monomial(a)
        lhs = mbar(ext.image(xa))
        if isinstance(lhs, MultiPoly):
            lhs = (lhs,)
        rhs = ext.image(phi_eval(m.premult[0], m.e, xa))
        if any(not comp.reduce(u - v).is_zero() for comp, u, v in zip(ext.components, lhs, rhs)):
            return False
    return True


def induced_quotient_map(m: PeMap, J: Ideal, component: int = 0) -> PeMap:
    """The same premultiplier read on the quotient by J; J must be compatible."""
    if not is_compatible(m, J, component):
        raise IncompatibleIdeal(f"{J} is not compatible with the map")
    comp = m.components[component]
    quotient = PresentedRing(comp.ambient, Ideal(comp.ambient, comp.ideal.generators + J.generators))
    return PeMap(quotient, m.e, (m.premult[component],))


def is_surjective_over(mbar: PeMap, ext: FiniteExtension, max_ideal: Ideal) -> bool:
    """mbar is surjective at every maximal ideal of the target lying over ``max_ideal``."""
    lifted = []
    for comp, imgs in zip(ext.components, ext.images):
        gens = [g.map_to(comp.ambient, imgs) for g in max_ideal.generators]
        lifted.append(Ideal(comp.ambient, gens))
    return surjective_over(mbar, lifted)


# ---------------------------------------------------------------- traces


class MonogenicExtension:
    """base[t]/(g) with g monic in t; the target ambient ring lists t first."""

    def __init__(self, base: PresentedRing, minpoly: MultiPoly, var: str = None):
        amb = minpoly.ring
        var = var or amb.variables[0]
        if amb.variables != (var,) + base.ambient.variables:
            raise SignatureMismatch(f"minimal polynomial must live in k[{var}, base variables]")
        self.base = base
        self.var = var
        self.ambient = amb
        self.order = elimination(1)
        self.minpoly = minpoly
        lead, coeff = minpoly.leading_term(self.order)
        self.degree = lead[0]
        if self.degree < 1 or any(lead[1:]) or coeff != 1:
            raise VerificationError(f"{minpoly} is not monic in {var}")
        lifted = [g.embed(amb, list(range(1, amb.nvars))) for g in base.ideal.generators]
        self.target = PresentedRing(amb, Ideal(amb, [minpoly] + lifted))

    @property
    def p(self) -> int:
        return self.base.p

    def basis(self) -> List[MultiPoly]:
        t = self.ambient.var(self.var)
        return [t ** i for i in range(self.degree)]

    def _rem(self, f: MultiPoly) -> MultiPoly:
        return divmod_single(f, self.minpoly, self.order)[1]

    def lift(self, f: MultiPoly) -> MultiPoly:
        """A base element viewed in the extension."""
        return f.embed(self.ambient, list(range(1, self.ambient.nvars)))

    def trace_of(self, f: MultiPoly) -> MultiPoly:
        """Trace of multiplication by f in the basis 1, t, ..., t^(d-1)."""
        if f.ring != self.ambient:
            raise SignatureMismatch(f"{f} is not in {self.ambient}")
        base = self.base.ambient
        f = self._rem(f)
        t = self.ambient.var(self.var)
        acc = {}
        cur = f
        for i in range(self.degree):
            for exp, c in cur.terms.items():
                if exp[0] == i:
                    k = exp[1:]
                    acc[k] = (acc.get(k, 0) + c) % self.p
            cur = self._rem(cur * t)
        return self.base.reduce(MultiPoly(base, acc))

    def trace_ideal(self, generating_set: Sequence[MultiPoly] = None) -> Ideal:
        gens = self.basis() if generating_set is None else generating_set
        traces = [self.trace_of(g) for g in gens]
        return Ideal(self.base.ambient, traces + list(self.base.ideal.generators))

    def is_trace_surjective(self, generating_set: Sequence[MultiPoly] = None) -> bool:
        return self.trace_ideal(generating_set).is_unit()

    def is_trace_zero(self) -> bool:
        return all(self.trace_of(g).is_zero() for g in self.basis())

    def __repr__(self):
        return f"{self.base!r}[{self.var}]/({self.minpoly})"


class MonogenicProduct:
    """A finite product of monogenic extensions; the trace is taken componentwise."""

    def __init__(self, parts: Sequence[MonogenicExtension]):
        self.parts = tuple(parts)
        if not self.parts:
            raise ValueError("empty product")

    @property
    def p(self) -> int:
        return self.parts[0].p

    def basis(self) -> List[Element]:
        out = []
        for j, part in enumerate(self.parts):
            for b in part.basis():
                out.append(tuple(b if k == j else other.ambient.zero()
                                 for k, other in enumerate(self.parts)))
        return out

    def one(self) -> Element:
        return tuple(part.ambient.one() for part in self.parts)

    def trace_of(self, f: Sequence[MultiPoly]) -> Element:
        return tuple(part.trace_of(x) for part, x in zip(self.parts, f))

    def is_trace_surjective(self, generating_set=None) -> bool:
        if generating_set is None:
            return all(part.is_trace_surjective() for part in self.parts)
        for j, part in enumerate(self.parts):
            traces = [part.trace_of(g[j]) for g in generating_set]
            if not Ideal(part.base.ambient, traces + list(part.base.ideal.generators)).is_unit():
                return False
        return True

    def is_trace_zero(self) -> bool:
        return all(part.is_trace_zero() for part in self.parts)

    def __repr__(self):
        return " (+) ".join(repr(x) for x in self.parts)


TraceExtension = Union[MonogenicExtension, MonogenicProduct]


def as_elements(T: TraceExtension, f) -> Element:
    return (f,) if isinstance(f, MultiPoly) else tuple(f)


def trace_of(T: TraceExtension, f):
    return T.trace_of(f)


def is_trace_surjective(T: TraceExtension, generating_set=None) -> bool:
    return T.is_trace_surjective(generating_set)


def _lift_element(T: TraceExtension, g: Element) -> Element:
    parts = T.parts if isinstance(T, MonogenicProduct) else (T,)
    if len(g) != len(parts):
        raise SignatureMismatch("module generator and trace extension have different components")
    return tuple(part.lift(x) for part, x in zip(parts, g))


def trace_lands_in(T: TraceExtension, ext: FiniteExtension) -> bool:
    """Whether the trace of T lands in the image of ``ext``, whose target is the trace base.

    The trace is only base-linear, so it is evaluated on products of the
    module generators of ``ext`` with the basis of T; these span the trace
    image as a module over the source of ``ext``.
    """
    require(bool(ext.module_generators), "trace_lands_in needs declared module generators")
    for g in ext.module_generators:
        lifted = _lift_element(T, ext.element(g))
        for b in T.basis():
            b = as_elements(T, b)
            prod = tuple(x * y for x, y in zip(lifted, b))
            tr = T.trace_of(prod[0] if isinstance(T, MonogenicExtension) else prod)
            if subring_member(ext, as_elements(T, tr)) is None:
                return False
    return True


__all__ = [
    "FiniteExtension", "MonogenicExtension", "MonogenicProduct", "check_module_generators",
    "conductor_in_source", "conductor_sweep", "extend_pe_map", "identity_extension",
    "induced_quotient_map", "is_surjective_over", "is_trace_surjective", "restriction_holds",
    "subring_member", "trace_lands_in", "trace_of", "verify_conductor", "verify_ring_map",
]
