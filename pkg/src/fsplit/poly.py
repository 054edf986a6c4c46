"""Exact arithmetic over F_p and in multivariate polynomial rings over F_p."""
from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache
from typing import Dict, Iterable, Iterator, Mapping, Sequence, Tuple

from .errors import SignatureMismatch

Exponent = Tuple[int, ...]


@lru_cache(maxsize=None)
def is_prime(n: int) -> bool:
    if n < 2:
        return False
    if n % 2 == 0:
        return n == 2
    d = 3
    while d * d <= n:
        if n % d == 0:
            return False
        d += 2
    return True


@dataclass(frozen=True)
class PrimeFieldElement:
    value: int
    p: int

    def __post_init__(self):
        if not is_prime(self.p):
            raise ValueError(f"{self.p} is not prime")
        if not 0 <= self.value < self.p:
            object.__setattr__(self, "value", self.value % self.p)

    def _coerce(self, other):
        if isinstance(other, PrimeFieldElement):
            if other.p != self.p:
                raise SignatureMismatch(f"F_{self.p} vs F_{other.p}")
            return other.value
        if isinstance(other, int):
            return other % self.p
        return NotImplemented

    def __add__(self, other):
        o = self._coerce(other)
        return NotImplemented if o is NotImplemented else PrimeFieldElement((self.value + o) % self.p, self.p)

    __radd__ = __add__

    def __sub__(self, other):
        o = self._coerce(other)
        return NotImplemented if o is NotImplemented else PrimeFieldElement((self.value - o) % self.p, self.p)

    def __rsub__(self, other):
        o = self._coerce(other)
        return NotImplemented if o is NotImplemented else PrimeFieldElement((o - self.value) % self.p, self.p)

    def __mul__(self, other):
        o = self._coerce(other)
        return NotImplemented if o is NotImplemented else PrimeFieldElement(self.value * o % self.p, self.p)

    __rmul__ = __mul__

    def __neg__(self):
        return PrimeFieldElement(-self.value % self.p, self.p)

    def inverse(self) -> "PrimeFieldElement":
        if self.value == 0:
            raise ZeroDivisionError("0 has no inverse")
        return PrimeFieldElement(pow(self.value, -1, self.p), self.p)

    def __truediv__(self, other):
        o = self._coerce(other)
        if o is NotImplemented:
            return NotImplemented
        return self * PrimeFieldElement(o, self.p).inverse()

    def __pow__(self, n: int):
        if n < 0:
            return self.inverse() ** (-n)
        return PrimeFieldElement(pow(self.value, n, self.p), self.p)

    def __bool__(self):
        return self.value != 0

    def __int__(self):
        return self.value

    def __repr__(self):
        return f"{self.value} (mod {self.p})"


# ---------------------------------------------------------------- orders


def _grevlex_key(exp: Exponent):
    return (sum(exp), tuple(-e for e in reversed(exp)))


class MonomialOrder:
    """A monomial order given by a sort key; larger key means larger monomial.

    ``elimination(k)`` compares the first ``k`` variables by grevlex and
    breaks ties with grevlex on the remaining ones, so anything involving the
    first block dominates.
    """

    __slots__ = ("kind", "block")

    def __init__(self, kind: str, block: int = 0):
        if kind not in ("lex", "grevlex", "elim"):
            raise ValueError(f"unknown monomial order {kind!r}")
        self.kind = kind
        self.block = block

    def key(self, exp: Exponent):
        if self.kind == "lex":
            return exp
        if self.kind == "grevlex":
            return _grevlex_key(exp)
        k = self.block
        return (_grevlex_key(exp[:k]), _grevlex_key(exp[k:]))

    def __eq__(self, other):
        return isinstance(other, MonomialOrder) and (self.kind, self.block) == (other.kind, other.block)

    def __hash__(self):
        return hash((self.kind, self.block))

    def __repr__(self):
        if self.kind == "elim":
            return f"elimination({self.block})"
        return self.kind


LEX = MonomialOrder("lex")
GREVLEX = MonomialOrder("grevlex")


def elimination(k: int) -> MonomialOrder:
    return MonomialOrder("elim", k)


# ---------------------------------------------------------------- rings


class PolyRing:
    """The polynomial ring F_p[variables] with a default order used for printing."""

    __slots__ = ("variables", "p", "order", "_index")

    def __init__(self, variables: Sequence[str], p: int, order: MonomialOrder = GREVLEX):
        if p > 2 ** 31:
            raise ValueError("characteristic must be at most 2^31")
        if not is_prime(p):
            raise ValueError(f"characteristic {p} is not prime")
        variables = tuple(variables)
        if len(set(variables)) != len(variables):
            raise ValueError(f"repeated variable names in {variables}")
        self.variables = variables
        self.p = p
        self.order = order
        self._index = {v: i for i, v in enumerate(variables)}

    @property
    def nvars(self) -> int:
        return len(self.variables)

    def __eq__(self, other):
        return (
            isinstance(other, PolyRing)
            and self.variables == other.variables
            and self.p == other.p
            and self.order == other.order
        )

    def __hash__(self):
        return hash((self.variables, self.p, self.order))

    def __repr__(self):
        return f"F_{self.p}[{', '.join(self.variables)}]"

    def index(self, name: str) -> int:
        return self._index[name]

    def zero(self) -> "MultiPoly":
        return MultiPoly(self, {})

    def one(self) -> "MultiPoly":
        return self.const(1)

    def const(self, c: int) -> "MultiPoly":
        c %= self.p
        return MultiPoly(self, {(0,) * self.nvars: c} if c else {})

    def var(self, name: str) -> "MultiPoly":
        exp = [0] * self.nvars
        exp[self._index[name]] = 1
        return MultiPoly(self, {tuple(exp): 1})

    def gens(self) -> Tuple["MultiPoly", ...]:
        return tuple(self.var(v) for v in self.variables)

    def monomial(self, exp: Sequence[int], coeff: int = 1) -> "MultiPoly":
        coeff %= self.p
        return MultiPoly(self, {tuple(exp): coeff} if coeff else {})

    def with_order(self, order: MonomialOrder) -> "PolyRing":
        return PolyRing(self.variables, self.p, order)

    def monomials_up_to(self, degree: int) -> Iterator[Exponent]:
        """All exponent vectors of total degree <= degree, in a fixed order."""
        n = self.nvars

        def exact(i, left):
            if i == n - 1:
                yield (left,)
                return
            for d in range(left, -1, -1):
                for rest in exact(i + 1, left - d):
                    yield (d,) + rest

        if n == 0:
            yield ()
            return
        for total in range(degree + 1):
            yield from exact(0, total)

    def box(self, q: int) -> Iterator[Exponent]:
        """Exponent vectors with every entry in [0, q): the monomial basis of S over S^q."""

        def rec(i):
            if i == self.nvars:
                yield ()
                return
            for d in range(q):
                for rest in rec(i + 1):
                    yield (d,) + rest

        return rec(0)


class MultiPoly:
    """A polynomial over F_p; ``terms`` maps exponent tuples to nonzero residues.

    Instances are treated as immutable.
    """

    __slots__ = ("ring", "terms", "_hash")

    def __init__(self, ring: PolyRing, terms: Mapping[Exponent, int], _clean: bool = True):
        self.ring = ring
        if _clean:
            p = ring.p
            t = {}
            for e, c in terms.items():
                c %= p
                if c:
                    t[e] = c
            self.terms = t
        else:
            self.terms = dict(terms)
        self._hash = None

    # -- basic predicates
    def is_zero(self) -> bool:
        return not self.terms

    def __bool__(self):
        return bool(self.terms)

    def is_constant(self) -> bool:
        return not self.terms or (len(self.terms) == 1 and not any(next(iter(self.terms))))

    def constant_term(self) -> int:
        return self.terms.get((0,) * self.ring.nvars, 0)

    def degree(self) -> int:
        """Total degree; -1 for the zero polynomial."""
        return max((sum(e) for e in self.terms), default=-1)

    def degree_in(self, name: str) -> int:
        i = self.ring.index(name)
        return max((e[i] for e in self.terms), default=-1)

    def support_vars(self) -> set:
        out = set()
        for e in self.terms:
            for i, d in enumerate(e):
                if d:
                    out.add(self.ring.variables[i])
        return out

    def coeff(self, exp: Sequence[int]) -> PrimeFieldElement:
        return PrimeFieldElement(self.terms.get(tuple(exp), 0), self.ring.p)

    # -- equality
    def __eq__(self, other):
        if isinstance(other, int):
            return self == self.ring.const(other)
        if not isinstance(other, MultiPoly):
            return NotImplemented
        return self.ring == other.ring and self.terms == other.terms

    def __hash__(self):
        if self._hash is None:
            self._hash = hash((self.ring, frozenset(self.terms.items())))
        return self._hash

    # -- arithmetic
    def _check(self, other) -> "MultiPoly":
        if isinstance(other, int):
            return self.ring.const(other)
        if isinstance(other, PrimeFieldElement):
            if other.p != self.ring.p:
                raise SignatureMismatch(f"F_{other.p} scalar in {self.ring}")
            return self.ring.const(other.value)
        if not isinstance(other, MultiPoly):
            raise TypeError(f"cannot combine polynomial with {type(other).__name__}")
        if other.ring != self.ring:
            raise SignatureMismatch(f"{self.ring} vs {other.ring}")
        return other

    def __add__(self, other):
        other = self._check(other)
        p = self.ring.p
        t = dict(self.terms)
        for e, c in other.terms.items():
            v = (t.get(e, 0) + c) % p
            if v:
                t[e] = v
            else:
                t.pop(e, None)
        return MultiPoly(self.ring, t, _clean=False)

    __radd__ = __add__

    def __neg__(self):
        p = self.ring.p
        return MultiPoly(self.ring, {e: p - c for e, c in self.terms.items()}, _clean=False)

    def __sub__(self, other):
        return self + (-self._check(other))

    def __rsub__(self, other):
        return self._check(other) - self

    def __mul__(self, other):
        other = self._check(other)
        p = self.ring.p
        t: Dict[Exponent, int] = {}
        for e1, c1 in self.terms.items():
            for e2, c2 in other.terms.items():
                e = tuple(a + b for a, b in zip(e1, e2))
                t[e] = (t.get(e, 0) + c1 * c2) % p
        return MultiPoly(self.ring, t)

    __rmul__ = __mul__

    def scale(self, c: int) -> "MultiPoly":
        return MultiPoly(self.ring, {e: v * c for e, v in self.terms.items()})

    def mul_term(self, exp: Exponent, c: int) -> "MultiPoly":
        p = self.ring.p
        c %= p
        if not c:
            return self.ring.zero()
        return MultiPoly(
            self.ring,
            {tuple(a + b for a, b in zip(e, exp)): v * c % p for e, v in self.terms.items()},
            _clean=False,
        )

    def __pow__(self, n: int) -> "MultiPoly":
        if n < 0:
            raise ValueError("negative power")
        result = self.ring.one()
        base = self
        while n:
            if n & 1:
                result = result * base
            n >>= 1
            if n:
                base = base * base
        return result

    def frobenius_pow(self, e: int) -> "MultiPoly":
        """Return self^(p^e); coefficients in F_p are Frobenius-fixed."""
        if e < 1:
            raise ValueError("e must be positive")
        q = self.ring.p ** e
        return MultiPoly(
            self.ring, {tuple(q * a for a in exp): c for exp, c in self.terms.items()}, _clean=False
        )

    # -- order-dependent data
    def sorted_terms(self, order: MonomialOrder = None):
        order = order or self.ring.order
        return sorted(self.terms.items(), key=lambda t: order.key(t[0]), reverse=True)

    def leading_term(self, order: MonomialOrder = None) -> Tuple[Exponent, int]:
        if not self.terms:
            raise ValueError("zero polynomial has no leading term")
        order = order or self.ring.order
        e = max(self.terms, key=order.key)
        return e, self.terms[e]

    def monic(self, order: MonomialOrder = None) -> "MultiPoly":
        if not self.terms:
            return self
        _, c = self.leading_term(order)
        return self.scale(pow(c, -1, self.ring.p))

    # -- ring maps
    def substitute(self, images: Sequence) -> "MultiPoly":
        """Evaluate at ``images`` (one polynomial per variable, all in one target ring)."""
        if len(images) != self.ring.nvars:
            raise SignatureMismatch(f"{len(images)} images for {self.ring.nvars} variables")
        if not images:
            raise ValueError("use embed() for rings without variables")
        target = images[0].ring
        cache = [dict() for _ in images]

        def power(i, d):
            if d not in cache[i]:
                cache[i][d] = images[i] ** d
            return cache[i][d]

        acc: Dict[Exponent, int] = {}
        p = target.p
        for exp, c in self.terms.items():
            term = target.const(c)
            for i, d in enumerate(exp):
                if d:
                    term = term * power(i, d)
            for e, v in term.terms.items():
                acc[e] = (acc.get(e, 0) + v) % p
        return MultiPoly(target, acc)

    def map_to(self, target: PolyRing, images: Sequence["MultiPoly"]) -> "MultiPoly":
        """Substitute, allowing a source ring without variables."""
        if self.ring.nvars == 0:
            return target.const(self.constant_term())
        return self.substitute(images)

    def embed(self, target: PolyRing, positions: Sequence[int] = None) -> "MultiPoly":
        """Rename variables into ``target``: variable i goes to position positions[i].

        Defaults to matching by name.
        """
        if target.p != self.ring.p:
            raise SignatureMismatch(f"{self.ring} -> {target}")
        if positions is None:
            positions = [target.index(v) for v in self.ring.variables]
        n = target.nvars
        t = {}
        for exp, c in self.terms.items():
            new = [0] * n
            for i, d in enumerate(exp):
                if d:
                    new[positions[i]] += d
            t[tuple(new)] = c
        return MultiPoly(target, t, _clean=False)

    def __repr__(self):
        return to_text(self)

    __str__ = __repr__


def to_text(f: MultiPoly) -> str:
    """Canonical text: terms sorted by the ring's order, ``c*x^a*y^b`` joined by `` + ``."""
    if not f.terms:
        return "0"
    parts = []
    names = f.ring.variables
    for exp, c in f.sorted_terms():
        factors = []
        for name, d in zip(names, exp):
            if d == 1:
                factors.append(name)
            elif d > 1:
                factors.append(f"{name}^{d}")
        if not factors:
            parts.append(str(c))
        elif c == 1:
            parts.append("*".join(factors))
        else:
            parts.append("*".join([str(c)] + factors))
    return " + ".join(parts)


def poly_arith(a: MultiPoly, b: MultiPoly, op: str) -> MultiPoly:
    if a.ring != b.ring:
        raise SignatureMismatch(f"{a.ring} vs {b.ring}")
    if op == "add":
        return a + b
    if op == "sub":
        return a - b
    if op == "mul":
        return a * b
    raise ValueError(f"unknown operation {op!r}")


def frobenius_pow(a: MultiPoly, e: int) -> MultiPoly:
    return a.frobenius_pow(e)


def divmod_single(f: MultiPoly, g: MultiPoly, order: MonomialOrder = None) -> Tuple[MultiPoly, MultiPoly]:
    """Multivariate division of f by a single divisor g; returns (quotient, remainder)."""
    order = order or f.ring.order
    if g.is_zero():
        raise ZeroDivisionError("division by zero polynomial")
    ge, gc = g.leading_term(order)
    ginv = pow(gc, -1, f.ring.p)
    p = f.ring.p
    rem = dict(f.terms)
    quo: Dict[Exponent, int] = {}
    out: Dict[Exponent, int] = {}
    key = order.key
    while rem:
        e = max(rem, key=key)
        c = rem[e]
        if all(a >= b for a, b in zip(e, ge)):
            shift = tuple(a - b for a, b in zip(e, ge))
            m = c * ginv % p
            quo[shift] = (quo.get(shift, 0) + m) % p
            for ge2, gc2 in g.terms.items():
                t = tuple(a + b for a, b in zip(ge2, shift))
                v = (rem.get(t, 0) - m * gc2) % p
                if v:
                    rem[t] = v
                else:
                    rem.pop(t, None)
        else:
            out[e] = c
            del rem[e]
    return MultiPoly(f.ring, quo), MultiPoly(f.ring, out, _clean=False)


def exact_divide(f: MultiPoly, g: MultiPoly) -> MultiPoly:
    q, r = divmod_single(f, g)
    if not r.is_zero():
        raise ArithmeticError(f"{g} does not divide {f}")
    return q


def combine_terms(ring: PolyRing, pairs: Iterable[Tuple[Exponent, int]]) -> MultiPoly:
    acc: Dict[Exponent, int] = {}
    for e, c in pairs:
        acc[e] = acc.get(e, 0) + c
    return MultiPoly(ring, acc)
