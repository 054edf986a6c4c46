"""Scenario files (.fsl): lexer, recursive-descent parser and canonical printer.

The parser never raises on bad input. Problems become diagnostics with source
spans, and parsing resumes at the next declaration boundary.

Example::

    scenario "node" {
      p = 3;
      ring R = k[x, y] / (x*y);
      ring N = k[u] (+) k[v];
      map eta : R -> N {
        x -> (u, 0);
        y -> (0, v);
      }
      splitting phi on R : e = 1, c = x^2*y^2;
      expect phi well_defined true;
    }
"""
from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Dict, List, Optional, Tuple, Union

from .poly import MultiPoly, PolyRing, is_prime, to_text

MAX_DEPTH = 64
MAX_EXPONENT = 4096
MAX_TERMS = 20000


# ---------------------------------------------------------------- spans and diagnostics


@dataclass(frozen=True)
class SourceSpan:
    start: int  # byte offset into the UTF-8 encoding
    end: int
    line: int   # 1-based
    column: int  # 1-based, in characters

    def __str__(self):
        return f"{self.line}:{self.column}"


@dataclass(frozen=True)
class ParseDiagnostic:
    message: str
    span: SourceSpan
    severity: str = "error"

    def __str__(self):
        return f"{self.span}: {self.severity}: {self.message}"


# ---------------------------------------------------------------- lexer


@dataclass(frozen=True)
class Token:
    kind: str  # ident, int, string, sym, eof, bad
    text: str
    span: SourceSpan


_SYMBOLS = ("(+)", "->", "{", "}", "(", ")", "[", "]", ";", ",", ":", "=", "+", "-", "*", "^", "/", "@")


def tokenize(text: str) -> Tuple[List[Token], List[ParseDiagnostic]]:
    tokens: List[Token] = []
    diags: List[ParseDiagnostic] = []
    i, n = 0, len(text)
    line, col = 1, 1
    byte = 0

    def span_for(a: int, b: int, ln: int, cl: int, bstart: int) -> SourceSpan:
        return SourceSpan(bstart, bstart + len(text[a:b].encode("utf-8", "surrogatepass")), ln, cl)

    while i < n:
        ch = text[i]
        start, sline, scol, sbyte = i, line, col, byte
        if ch == "#":
            while i < n and text[i] != "\n":
                i += 1
        elif ch.isspace():
            i += 1
        elif ch.isdigit():
            while i < n and text[i].isdigit() and text[i].isascii():
                i += 1
            tokens.append(Token("int", text[start:i], span_for(start, i, sline, scol, sbyte)))
        elif ch.isascii() and (ch.isalpha() or ch == "_"):
            while i < n and text[i].isascii() and (text[i].isalnum() or text[i] in "_'"):
                i += 1
            tokens.append(Token("ident", text[start:i], span_for(start, i, sline, scol, sbyte)))
        elif ch == '"':
            i += 1
            while i < n and text[i] not in '"\n':
                i += 1
            if i < n and text[i] == '"':
                i += 1
                tokens.append(Token("string", text[start + 1:i - 1], span_for(start, i, sline, scol, sbyte)))
            else:
                diags.append(ParseDiagnostic("unterminated string", span_for(start, i, sline, scol, sbyte)))
                tokens.append(Token("bad", text[start:i], span_for(start, i, sline, scol, sbyte)))
        else:
            for sym in _SYMBOLS:
                if text.startswith(sym, i):
                    i += len(sym)
                    tokens.append(Token("sym", sym, span_for(start, i, sline, scol, sbyte)))
                    break
            else:
                i += 1
                sp = span_for(start, i, sline, scol, sbyte)
                diags.append(ParseDiagnostic(f"unexpected character {ch!r}", sp))
                tokens.append(Token("bad", ch, sp))
        # advance position bookkeeping over the consumed slice
        chunk = text[start:i]
        byte += len(chunk.encode("utf-8", "surrogatepass"))
        nl = chunk.count("\n")
        if nl:
            line += nl
            col = len(chunk) - chunk.rfind("\n")
        else:
            col += len(chunk)
    tokens.append(Token("eof", "", SourceSpan(byte, byte, line, col)))
    return tokens, diags


# ---------------------------------------------------------------- syntax tree

Poly = MultiPoly
Tuple_ = Tuple[MultiPoly, ...]


@dataclass(frozen=True)
class RingComponent:
    variables: Tuple[str, ...]
    relations: Tuple[MultiPoly, ...]


@dataclass(frozen=True)
class RingDecl:
    name: str
    components: Tuple[RingComponent, ...]
    span: Optional[SourceSpan] = field(default=None, compare=False)


@dataclass(frozen=True)
class MapDecl:
    name: str
    source: str
    target: str
    images: Tuple[Tuple[str, Tuple_], ...]  # in source variable order
    span: Optional[SourceSpan] = field(default=None, compare=False)


@dataclass(frozen=True)
class ModGensDecl:
    ext: str
    elements: Tuple[Tuple_, ...]
    span: Optional[SourceSpan] = field(default=None, compare=False)


@dataclass(frozen=True)
class ConductorDecl:
    ext: str
    ideals: Tuple[Tuple[MultiPoly, ...], ...]  # one generator list per component
    span: Optional[SourceSpan] = field(default=None, compare=False)


@dataclass(frozen=True)
class NormalizationDecl:
    ext: str
    span: Optional[SourceSpan] = field(default=None, compare=False)


@dataclass(frozen=True)
class IdealDecl:
    name: str
    ring: str
    generators: Tuple[MultiPoly, ...]
    span: Optional[SourceSpan] = field(default=None, compare=False)


@dataclass(frozen=True)
class ElementDecl:
    name: str
    ring: str
    value: Tuple_
    span: Optional[SourceSpan] = field(default=None, compare=False)


@dataclass(frozen=True)
class SplittingDecl:
    name: str
    ring: str
    e: int
    premult: Tuple_
    span: Optional[SourceSpan] = field(default=None, compare=False)


@dataclass(frozen=True)
class TracePart:
    base: RingComponent
    var: str
    minpoly: MultiPoly  # in k[var, base variables]


@dataclass(frozen=True)
class TraceDecl:
    name: str
    parts: Tuple[TracePart, ...]
    span: Optional[SourceSpan] = field(default=None, compare=False)


@dataclass(frozen=True)
class SupportDecl:
    name: str
    ring: str
    primes: Tuple[Tuple[MultiPoly, ...], ...]
    span: Optional[SourceSpan] = field(default=None, compare=False)


@dataclass(frozen=True)
class DivisorDecl:
    name: str
    ring: str
    terms: Tuple[Tuple[Fraction, MultiPoly, int], ...]  # (coeff, prime, 1-based component)
    span: Optional[SourceSpan] = field(default=None, compare=False)


@dataclass(frozen=True)
class PairDecl:
    prime: Tuple[MultiPoly, ...]
    component: int  # 1-based
    prime_above: Tuple[MultiPoly, ...]
    trace: str
    base_images: Optional[Tuple[MultiPoly, ...]] = None
    top_images: Optional[Tuple[MultiPoly, ...]] = None
    child: Optional[str] = None


@dataclass(frozen=True)
class TreeDecl:
    name: str
    ext: str
    contraction: Tuple[MultiPoly, ...]
    pairs: Tuple[PairDecl, ...]
    span: Optional[SourceSpan] = field(default=None, compare=False)


@dataclass(frozen=True)
class ExpectDecl:
    subject: str
    kind: str
    args: Tuple[Union[str, int], ...]
    expected: bool
    span: Optional[SourceSpan] = field(default=None, compare=False)

    def label(self) -> str:
        args = f"({', '.join(str(a) for a in self.args)})" if self.args else ""
        return f"{self.subject} {self.kind}{args}"


Item = Union[RingDecl, MapDecl, ModGensDecl, ConductorDecl, NormalizationDecl, IdealDecl, ElementDecl,
             SplittingDecl, TraceDecl, SupportDecl, DivisorDecl, TreeDecl, ExpectDecl]


@dataclass(frozen=True)
class Scenario:
    name: str
    p: int
    items: Tuple[Item, ...]

    def of_type(self, cls) -> List:
        return [it for it in self.items if isinstance(it, cls)]

    @property
    def expectations(self) -> List[ExpectDecl]:
        return self.of_type(ExpectDecl)


@dataclass
class ParseResult:
    scenario: Optional[Scenario]
    diagnostics: List[ParseDiagnostic]

    @property
    def ok(self) -> bool:
        return self.scenario is not None and not any(d.severity == "error" for d in self.diagnostics)


class ScenarioSyntaxError(ValueError):
    def __init__(self, diagnostics: List[ParseDiagnostic]):
        self.diagnostics = diagnostics
        super().__init__("; ".join(str(d) for d in diagnostics[:5]))


# verdict kinds: subject kind and argument kinds
VERDICTS: Dict[str, Tuple[str, Tuple[str, ...]]] = {
    "well_defined": ("splitting", ()),
    "surjective": ("splitting", ()),
    "surjective_at": ("splitting", ("ideal",)),
    "compatible": ("splitting", ("ideal",)),
    "zero_map": ("splitting", ()),
    "local_lift": ("splitting", ("ideal", "ideal")),
    "divisor_is": ("splitting", ("support", "divisor")),
    "power_formula": ("splitting", ("support", "int")),
    "f_different_is": ("splitting", ("map", "support", "divisor")),
    "iofa": ("splitting", ("map", "tree", "ideal")),
    "fpure_at": ("ring", ("ideal",)),
    "ring_map": ("map", ()),
    "conductor": ("map", ()),
    "conductor_maximal": ("map", ()),
    "module_generators": ("map", ()),
    "in_image": ("map", ("element",)),
    "extends": ("map", ("splitting",)),
    "extension_is": ("map", ("splitting", "element")),
    "extension_divisor_is": ("map", ("splitting", "support", "divisor")),
    "extended_power_formula": ("map", ("splitting", "support", "int")),
    "pullback_identity": ("map", ("splitting", "support", "element")),
    "phibar_surjective_at": ("map", ("splitting", "ideal")),
    "trace_surjective": ("trace", ()),
    "trace_zero": ("trace", ()),
    "trace_lands_in": ("trace", ("map",)),
    "tree_valid": ("tree", ()),
    "hst": ("tree", ()),
    "hst_strict": ("tree", ()),
    "main_theorem": ("tree", ("splitting", "ideal")),
    "main_theorem_trials": ("tree", ("ideal", "int")),
    "gorenstein_criterion": ("tree", ("element", "ideal")),
}

# verdicts whose expected `false` may be a documented failure of the conclusion
PATHOLOGY_KINDS = frozenset({"main_theorem", "iofa", "gorenstein_criterion"})


# ---------------------------------------------------------------- parser


class _Abort(Exception):
    pass


class _Parser:
    def __init__(self, text: str):
        self.tokens, self.diags = tokenize(text)
        self.pos = 0
        self.p: Optional[int] = None
        self.depth = 0
        self.symbols: Dict[str, str] = {}
        self.rings: Dict[str, Tuple[PolyRing, ...]] = {}
        self.ring_decls: Dict[str, RingDecl] = {}
        self.maps: Dict[str, MapDecl] = {}
        self.traces: Dict[str, TraceDecl] = {}
        self.trees: Dict[str, TreeDecl] = {}

    # -- token helpers
    @property
    def tok(self) -> Token:
        return self.tokens[self.pos]

    def error(self, message: str, tok: Token = None):
        tok = tok or self.tok
        self.diags.append(ParseDiagnostic(message, tok.span))
        raise _Abort()

    def advance(self) -> Token:
        t = self.tok
        if t.kind != "eof":
            self.pos += 1
        return t

    def at(self, text: str) -> bool:
        return self.tok.kind in ("sym", "ident") and self.tok.text == text

    def expect(self, text: str) -> Token:
        if not self.at(text):
            found = self.tok.text or "end of input"
            self.error(f"expected {text!r}, found {found!r}")
        return self.advance()

    def ident(self, what: str = "identifier") -> str:
        if self.tok.kind != "ident":
            found = self.tok.text or "end of input"
            self.error(f"expected {what}, found {found!r}")
        return self.advance().text

    def integer(self) -> int:
        if self.tok.kind != "int":
            self.error(f"expected integer, found {self.tok.text or 'end of input'!r}")
        return int(self.advance().text)

    def _starts_item(self, start: int) -> bool:
        """A declaration keyword opening a fresh line, past the failed item's first token."""
        t = self.tok
        if self.pos <= start or t.kind != "ident":
            return False
        if self.tokens[self.pos - 1].span.line == t.span.line:
            return False
        nxt = self.tokens[self.pos + 1] if self.pos + 1 < len(self.tokens) else t
        if t.text == "p":
            return nxt.text == "="
        return t.text in self.ITEMS and nxt.kind == "ident"

    def sync(self, start: int = -1):
        """Skip to the end of the current declaration."""
        depth = 0
        while self.tok.kind != "eof":
            t = self.tok
            if self._starts_item(start):
                return
            if t.kind == "sym" and t.text == "{":
                depth += 1
            elif t.kind == "sym" and t.text == "}":
                if depth == 0:
                    return
                depth -= 1
                if depth == 0:
                    self.advance()
                    return
            elif t.kind == "sym" and t.text == ";" and depth == 0:
                self.advance()
                return
            self.advance()

    # -- names
    def declare(self, name: str, kind: str, tok: Token):
        if name in self.symbols:
            self.error(f"{name!r} is already declared", tok)
        self.symbols[name] = kind

    def lookup(self, kind: str, tok: Token = None) -> str:
        tok = tok or self.tok
        name = self.ident(f"{kind} name")
        have = self.symbols.get(name)
        if have is None:
            self.error(f"unknown identifier {name!r}", tok)
        if have != kind:
            self.error(f"{name!r} is a {have}, expected a {kind}", tok)
        return name

    def need_p(self, tok: Token) -> int:
        if self.p is None:
            self.error("characteristic must be declared before this item", tok)
        return self.p

    # -- polynomials
    def poly(self, ring: PolyRing) -> MultiPoly:
        self.depth += 1
        try:
            if self.depth > MAX_DEPTH:
                self.error("expression nested too deeply")
            return self._sum(ring)
        finally:
            self.depth -= 1

    def _check_size(self, f: MultiPoly, tok: Token) -> MultiPoly:
        if len(f.terms) > MAX_TERMS:
            self.error("polynomial too large", tok)
        return f

    def _sum(self, ring: PolyRing) -> MultiPoly:
        tok = self.tok
        acc = self._product(ring)
        while self.at("+") or self.at("-"):
            op = self.advance().text
            rhs = self._product(ring)
            acc = acc + rhs if op == "+" else acc - rhs
        return self._check_size(acc, tok)

    def _product(self, ring: PolyRing) -> MultiPoly:
        tok = self.tok
        acc = self._unary(ring)
        while self.at("*"):
            self.advance()
            rhs = self._unary(ring)
            if len(acc.terms) * len(rhs.terms) > MAX_TERMS * 10:
                self.error("polynomial too large", tok)
            acc = acc * rhs
        return self._check_size(acc, tok)

    def _unary(self, ring: PolyRing) -> MultiPoly:
        if self.at("-"):
            self.advance()
            self.depth += 1
            try:
                if self.depth > MAX_DEPTH:
                    self.error("expression nested too deeply")
                return -self._unary(ring)
            finally:
                self.depth -= 1
        return self._power(ring)

    def _power(self, ring: PolyRing) -> MultiPoly:
        tok = self.tok
        base = self._atom(ring)
        if self.at("^"):
            self.advance()
            etok = self.tok
            n = self.integer()
            if n > MAX_EXPONENT:
                self.error(f"exponent {n} exceeds {MAX_EXPONENT}", etok)
            if len(base.terms) > 1 and n > 1:
                # rough size guard for multinomial expansions
                est = 1
                for _ in range(min(ring.nvars, 8)):
                    est = est * (n + 1)
                    if est > MAX_TERMS * 10:
                        break
                if est > MAX_TERMS * 10 and len(base.terms) > 1:
                    self.error("power expansion too large", tok)
            base = base ** n
        return base

    def _atom(self, ring: PolyRing) -> MultiPoly:
        tok = self.tok
        if tok.kind == "int":
            return ring.const(int(self.advance().text))
        if tok.kind == "ident":
            name = self.advance().text
            if name not in ring.variables:
                self.error(f"unknown identifier {name!r} (not a variable of {ring})", tok)
            return ring.var(name)
        if self.at("("):
            self.advance()
            f = self.poly(ring)
            self.expect(")")
            return f
        self.error(f"expected a polynomial, found {tok.text or 'end of input'!r}")

    def poly_list(self, ring: PolyRing, close: str = ")") -> Tuple[MultiPoly, ...]:
        """Comma-separated polynomials up to (not including) ``close``."""
        out = []
        if self.at(close):
            return ()
        out.append(self.poly(ring))
        while self.at(","):
            self.advance()
            out.append(self.poly(ring))
        return tuple(out)

    def paren_list(self, rings: Tuple[PolyRing, ...]) -> Tuple[MultiPoly, ...]:
        """``(f1, ..., fk)`` with one polynomial per ring."""
        self.expect("(")
        out = []
        for i, r in enumerate(rings):
            if i:
                self.expect(",")
            out.append(self.poly(r))
        self.expect(")")
        return tuple(out)

    def tuple_poly(self, rings: Tuple[PolyRing, ...]) -> Tuple[MultiPoly, ...]:
        if len(rings) == 1:
            return (self.poly(rings[0]),)
        return self.paren_list(rings)

    # -- rings
    def ring_component(self) -> RingComponent:
        tok = self.tok
        if self.ident("'k'") != "k":
            self.error("ring expressions start with k[", tok)
        return self._component_tail(tok)

    def _component_tail(self, tok: Token) -> RingComponent:
        self.expect("[")
        names = []
        if not self.at("]"):
            names.append(self.ident("variable name"))
            while self.at(","):
                self.advance()
                names.append(self.ident("variable name"))
        self.expect("]")
        if len(set(names)) != len(names):
            self.error("repeated variable name", tok)
        ring = PolyRing(names, self.need_p(tok))
        rels: Tuple[MultiPoly, ...] = ()
        if self.at("/") and self.tokens[self.pos + 1].text == "(":
            self.advance()
            self.expect("(")
            rels = self.poly_list(ring)
            self.expect(")")
        return RingComponent(tuple(names), rels)

    def ring_decl(self, start: Token) -> RingDecl:
        ntok = self.tok
        name = self.ident("ring name")
        self.expect("=")
        comps = [self.ring_component()]
        while self.at("(+)"):
            self.advance()
            comps.append(self.ring_component())
        self.expect(";")
        self.declare(name, "ring", ntok)
        self.rings[name] = tuple(PolyRing(c.variables, self.p) for c in comps)
        decl = RingDecl(name, tuple(comps), start.span)
        self.ring_decls[name] = decl
        return decl

    def single(self, ring: str, tok: Token) -> PolyRing:
        rings = self.rings[ring]
        if len(rings) != 1:
            self.error(f"{ring!r} must have a single component here", tok)
        return rings[0]

    # -- items
    def map_decl(self, start: Token) -> MapDecl:
        ntok = self.tok
        name = self.ident("map name")
        self.expect(":")
        src = self.lookup("ring")
        self.expect("->")
        dst = self.lookup("ring")
        source_ring = self.single(src, ntok)
        target_rings = self.rings[dst]
        self.expect("{")
        images: Dict[str, Tuple_] = {}
        while not self.at("}"):
            vtok = self.tok
            var = self.ident("source variable")
            if var not in source_ring.variables:
                self.error(f"{var!r} is not a variable of {src}", vtok)
            if var in images:
                self.error(f"{var!r} mapped twice", vtok)
            self.expect("->")
            images[var] = self.tuple_poly(target_rings)
            self.expect(";")
        self.expect("}")
        missing = [v for v in source_ring.variables if v not in images]
        if missing:
            self.error(f"map {name!r} gives no image for {', '.join(missing)}", ntok)
        self.declare(name, "map", ntok)
        decl = MapDecl(name, src, dst, tuple((v, images[v]) for v in source_ring.variables), start.span)
        self.maps[name] = decl
        return decl

    def modgens_decl(self, start: Token) -> ModGensDecl:
        ext = self.lookup("map")
        rings = self.rings[self.maps[ext].target]
        self.expect("=")
        self.expect("[")
        elems = []
        if not self.at("]"):
            elems.append(self.tuple_poly(rings))
            while self.at(","):
                self.advance()
                elems.append(self.tuple_poly(rings))
        self.expect("]")
        self.expect(";")
        return ModGensDecl(ext, tuple(elems), start.span)

    def ideal_group(self, ring: PolyRing) -> Tuple[MultiPoly, ...]:
        self.expect("(")
        gens = self.poly_list(ring)
        self.expect(")")
        return gens

    def conductor_decl(self, start: Token) -> ConductorDecl:
        ext = self.lookup("map")
        rings = self.rings[self.maps[ext].target]
        self.expect("=")
        ideals = []
        for i, r in enumerate(rings):
            if i:
                self.expect("(+)")
            ideals.append(self.ideal_group(r))
        self.expect(";")
        return ConductorDecl(ext, tuple(ideals), start.span)

    def normalization_decl(self, start: Token) -> NormalizationDecl:
        ext = self.lookup("map")
        self.expect(";")
        return NormalizationDecl(ext, start.span)

    def ideal_decl(self, start: Token) -> IdealDecl:
        ntok = self.tok
        name = self.ident("ideal name")
        self.expect("in")
        ring = self.lookup("ring")
        r = self.single(ring, ntok)
        self.expect("=")
        gens = self.ideal_group(r)
        self.expect(";")
        self.declare(name, "ideal", ntok)
        return IdealDecl(name, ring, gens, start.span)

    def element_decl(self, start: Token) -> ElementDecl:
        ntok = self.tok
        name = self.ident("element name")
        self.expect("on")
        ring = self.lookup("ring")
        self.expect("=")
        value = self.tuple_poly(self.rings[ring])
        self.expect(";")
        self.declare(name, "element", ntok)
        return ElementDecl(name, ring, value, start.span)

    def splitting_decl(self, start: Token) -> SplittingDecl:
        ntok = self.tok
        name = self.ident("map name")
        self.expect("on")
        ring = self.lookup("ring")
        self.expect(":")
        self.expect("e")
        self.expect("=")
        etok = self.tok
        e = self.integer()
        if e < 1:
            self.error("e must be positive", etok)
        self.expect(",")
        self.expect("c")
        self.expect("=")
        c = self.tuple_poly(self.rings[ring])
        self.expect(";")
        self.declare(name, "splitting", ntok)
        return SplittingDecl(name, ring, e, c, start.span)

    def trace_part(self) -> TracePart:
        tok = self.tok
        base = self.ring_component()
        self.expect("[")
        vtok = self.tok
        var = self.ident("extension variable")
        if var in base.variables:
            self.error(f"{var!r} is already a base variable", vtok)
        self.expect("]")
        self.expect("/")
        self.expect("(")
        ring = PolyRing((var,) + base.variables, self.p)
        g = self.poly(ring)
        self.expect(")")
        return TracePart(base, var, g)

    def trace_decl(self, start: Token) -> TraceDecl:
        ntok = self.tok
        name = self.ident("trace name")
        self.expect("=")
        parts = [self.trace_part()]
        while self.at("(+)"):
            self.advance()
            parts.append(self.trace_part())
        self.expect(";")
        self.declare(name, "trace", ntok)
        decl = TraceDecl(name, tuple(parts), start.span)
        self.traces[name] = decl
        return decl

    def support_decl(self, start: Token) -> SupportDecl:
        ntok = self.tok
        name = self.ident("support name")
        self.expect("on")
        ring = self.lookup("ring")
        self.expect("=")
        rings = self.rings[ring]
        primes = []
        for i, r in enumerate(rings):
            if i:
                self.expect("(+)")
            self.expect("[")
            primes.append(self.poly_list(r, "]"))
            self.expect("]")
        self.expect(";")
        self.declare(name, "support", ntok)
        return SupportDecl(name, ring, tuple(primes), start.span)

    def _rational(self) -> Fraction:
        sign = 1
        if self.at("-"):
            self.advance()
            sign = -1
        num = self.integer()
        den = 1
        if self.at("/"):
            self.advance()
            dtok = self.tok
            den = self.integer()
            if den == 0:
                self.error("zero denominator", dtok)
        return Fraction(sign * num, den)

    def divisor_decl(self, start: Token) -> DivisorDecl:
        ntok = self.tok
        name = self.ident("divisor name")
        self.expect("on")
        ring = self.lookup("ring")
        self.expect("=")
        rings = self.rings[ring]
        terms = []
        if self.tok.kind == "int" and self.tok.text == "0" and self.tokens[self.pos + 1].text == ";":
            self.advance()
        else:
            while True:
                coeff = self._rational()
                self.expect("*")
                self.expect("[")
                # the prime is parsed once its component is known
                rest = self.pos
                depth = 0
                while not (self.at("]") and depth == 0):
                    if self.tok.kind == "eof":
                        self.error("unterminated divisor term")
                    if self.at("("):
                        depth += 1
                    elif self.at(")"):
                        depth -= 1
                    self.advance()
                close = self.pos
                self.advance()
                self.expect("@")
                ctok = self.tok
                comp = self.integer()
                if not 1 <= comp <= len(rings):
                    self.error(f"component {comp} out of range", ctok)
                after = self.pos
                self.pos = rest
                prime = self.poly(rings[comp - 1])
                if self.pos != close:
                    self.error("malformed divisor prime")
                self.pos = after
                terms.append((coeff, prime, comp))
                if not self.at("+"):
                    break
                self.advance()
        self.expect(";")
        self.declare(name, "divisor", ntok)
        return DivisorDecl(name, ring, tuple(terms), start.span)

    def tree_decl(self, start: Token) -> TreeDecl:
        ntok = self.tok
        name = self.ident("tree name")
        self.expect("=")
        ext = self.lookup("map")
        mdecl = self.maps[ext]
        src = self.single(mdecl.source, ntok)
        targets = self.rings[mdecl.target]
        self.expect("{")
        self.expect("contraction")
        self.expect("=")
        contraction = self.ideal_group(src)
        self.expect(";")
        pairs = []
        while not self.at("}"):
            self.expect("pair")
            prime = self.ideal_group(src)
            self.expect(":")
            ctok = self.tok
            comp = self.integer()
            if not 1 <= comp <= len(targets):
                self.error(f"component {comp} out of range", ctok)
            above = self.ideal_group(targets[comp - 1])
            self.expect("trace")
            trace = self.lookup("trace")
            tdecl = self.traces[trace]
            base_images = top_images = None
            child = None
            if self.at("base"):
                self.advance()
                if len(tdecl.parts) != 1:
                    self.error("base images need a single trace component")
                part = tdecl.parts[0]
                base_ring = PolyRing(part.base.variables, self.p)
                base_images = self.paren_list(tuple(base_ring for _ in src.variables))
            if self.at("top"):
                self.advance()
                if len(tdecl.parts) != 1:
                    self.error("top images need a single trace component")
                part = tdecl.parts[0]
                top_ring = PolyRing((part.var,) + part.base.variables, self.p)
                top_images = self.paren_list(tuple(top_ring for _ in targets[comp - 1].variables))
            if self.at("child"):
                self.advance()
                child = self.lookup("tree")
            self.expect(";")
            pairs.append(PairDecl(prime, comp, above, trace, base_images, top_images, child))
        self.expect("}")
        self.declare(name, "tree", ntok)
        decl = TreeDecl(name, ext, contraction, tuple(pairs), start.span)
        self.trees[name] = decl
        return decl

    def expect_decl(self, start: Token) -> ExpectDecl:
        stok = self.tok
        subject = self.ident("subject name")
        if subject not in self.symbols:
            self.error(f"unknown identifier {subject!r}", stok)
        ktok = self.tok
        kind = self.ident("verdict kind")
        if kind not in VERDICTS:
            self.error(f"unknown verdict kind {kind!r}", ktok)
        subject_kind, arg_kinds = VERDICTS[kind]
        if self.symbols[subject] != subject_kind:
            self.error(f"{kind} applies to a {subject_kind}, {subject!r} is a {self.symbols[subject]}", stok)
        args: List[Union[str, int]] = []
        if self.at("("):
            self.advance()
            while not self.at(")"):
                if args:
                    self.expect(",")
                atok = self.tok
                if atok.kind == "int":
                    args.append(int(self.advance().text))
                else:
                    args.append(self.ident("argument"))
                i = len(args) - 1
                if i >= len(arg_kinds):
                    self.error(f"{kind} takes {len(arg_kinds)} arguments", atok)
                want = arg_kinds[i]
                if want == "int":
                    if not isinstance(args[i], int):
                        self.error("expected an integer argument", atok)
                elif isinstance(args[i], int) or self.symbols.get(args[i]) != want:
                    self.error(f"argument {i + 1} of {kind} must be a declared {want}", atok)
            self.expect(")")
        if len(args) != len(arg_kinds):
            self.error(f"{kind} takes {len(arg_kinds)} arguments", ktok)
        vtok = self.tok
        word = self.ident("true or false")
        if word not in ("true", "false"):
            self.error("expected true or false", vtok)
        self.expect(";")
        return ExpectDecl(subject, kind, tuple(args), word == "true", start.span)

    def p_decl(self, start: Token):
        self.expect("=")
        vtok = self.tok
        p = self.integer()
        self.expect(";")
        if p > 2 ** 31 or not is_prime(p):
            self.error(f"characteristic {p} is not a prime at most 2^31", vtok)
        if self.p is not None and self.p != p:
            self.error(f"characteristic mismatch: {p} after {self.p}", vtok)
        if self.p is None and self.symbols:
            self.error("characteristic must come before declarations", vtok)
        self.p = p

    ITEMS = {
        "ring": ring_decl, "map": map_decl, "modgens": modgens_decl, "conductor": conductor_decl,
        "normalization": normalization_decl, "ideal": ideal_decl, "element": element_decl,
        "splitting": splitting_decl, "trace": trace_decl, "support": support_decl,
        "divisor": divisor_decl, "tree": tree_decl, "expect": expect_decl,
    }

    def item(self) -> Optional[Item]:
        start = self.tok
        if start.kind == "ident" and start.text == "p":
            self.advance()
            self.p_decl(start)
            return None
        if start.kind != "ident" or start.text not in self.ITEMS:
            self.error(f"expected a declaration, found {start.text or 'end of input'!r}")
        self.advance()
        if start.text != "expect":
            self.need_p(start)
        return self.ITEMS[start.text](self, start)

    def scenario(self) -> Optional[Scenario]:
        name = None
        try:
            self.expect("scenario")
            if self.tok.kind != "string":
                self.error("expected scenario name in double quotes")
            name = self.advance().text
            self.expect("{")
        except _Abort:
            return None
        items: List[Item] = []
        while not self.at("}") and self.tok.kind != "eof":
            before = self.pos
            try:
                it = self.item()
                if it is not None:
                    items.append(it)
            except _Abort:
                self.sync(before)
                if self.pos == before:
                    self.advance()
        try:
            self.expect("}")
            if self.tok.kind != "eof":
                self.error("unexpected text after the scenario")
        except _Abort:
            pass
        if self.p is None:
            self.diags.append(ParseDiagnostic("no characteristic declared", self.tok.span))
            return None
        return Scenario(name, self.p, tuple(items))


def parse_scenario(text: str) -> ParseResult:
    parser = _Parser(text)
    scenario = parser.scenario()
    return ParseResult(scenario, parser.diags)


def parse_poly(text: str, ring: PolyRing) -> MultiPoly:
    """A single polynomial literal over ``ring``; raises ScenarioSyntaxError."""
    parser = _Parser(text)
    parser.p = ring.p
    try:
        f = parser.poly(ring)
        if parser.tok.kind != "eof":
            parser.error(f"unexpected {parser.tok.text!r} after the polynomial")
    except _Abort:
        raise ScenarioSyntaxError(parser.diags) from None
    if parser.diags:
        raise ScenarioSyntaxError(parser.diags)
    return f


def parse_or_raise(text: str) -> Scenario:
    res = parse_scenario(text)
    if not res.ok:
        raise ScenarioSyntaxError(res.diagnostics)
    return res.scenario


# ---------------------------------------------------------------- printer


def _tuple_text(values: Tuple[MultiPoly, ...], bare_single: bool = True) -> str:
    if len(values) == 1 and bare_single:
        return to_text(values[0])
    return "(" + ", ".join(to_text(v) for v in values) + ")"


def _group(gens: Tuple[MultiPoly, ...]) -> str:
    return "(" + ", ".join(to_text(g) for g in gens) + ")"


def _component_text(c: RingComponent) -> str:
    out = f"k[{', '.join(c.variables)}]"
    if c.relations:
        out += " / " + _group(c.relations)
    return out


def _fraction_text(x: Fraction) -> str:
    return str(x.numerator) if x.denominator == 1 else f"{x.numerator}/{x.denominator}"


def _item_lines(it: Item) -> List[str]:
    if isinstance(it, RingDecl):
        return [f"ring {it.name} = " + " (+) ".join(_component_text(c) for c in it.components) + ";"]
    if isinstance(it, MapDecl):
        lines = [f"map {it.name} : {it.source} -> {it.target} {{"]
        lines += [f"  {v} -> {_tuple_text(img)};" for v, img in it.images]
        return lines + ["}"]
    if isinstance(it, ModGensDecl):
        return [f"modgens {it.ext} = [" + ", ".join(_tuple_text(g) for g in it.elements) + "];"]
    if isinstance(it, ConductorDecl):
        return [f"conductor {it.ext} = " + " (+) ".join(_group(g) for g in it.ideals) + ";"]
    if isinstance(it, NormalizationDecl):
        return [f"normalization {it.ext};"]
    if isinstance(it, IdealDecl):
        return [f"ideal {it.name} in {it.ring} = {_group(it.generators)};"]
    if isinstance(it, ElementDecl):
        return [f"element {it.name} on {it.ring} = {_tuple_text(it.value)};"]
    if isinstance(it, SplittingDecl):
        return [f"splitting {it.name} on {it.ring} : e = {it.e}, c = {_tuple_text(it.premult)};"]
    if isinstance(it, TraceDecl):
        parts = [f"{_component_text(pt.base)}[{pt.var}] / ({to_text(pt.minpoly)})" for pt in it.parts]
        return [f"trace {it.name} = " + " (+) ".join(parts) + ";"]
    if isinstance(it, SupportDecl):
        groups = ["[" + ", ".join(to_text(f) for f in g) + "]" for g in it.primes]
        return [f"support {it.name} on {it.ring} = " + " (+) ".join(groups) + ";"]
    if isinstance(it, DivisorDecl):
        if not it.terms:
            return [f"divisor {it.name} on {it.ring} = 0;"]
        terms = [f"{_fraction_text(c)} * [{to_text(f)}] @ {j}" for c, f, j in it.terms]
        return [f"divisor {it.name} on {it.ring} = " + " + ".join(terms) + ";"]
    if isinstance(it, TreeDecl):
        lines = [f"tree {it.name} = {it.ext} {{", f"  contraction = {_group(it.contraction)};"]
        for pr in it.pairs:
            s = f"  pair {_group(pr.prime)} : {pr.component} {_group(pr.prime_above)} trace {pr.trace}"
            if pr.base_images is not None:
                s += f" base {_tuple_text(pr.base_images, False)}"
            if pr.top_images is not None:
                s += f" top {_tuple_text(pr.top_images, False)}"
            if pr.child is not None:
                s += f" child {pr.child}"
            lines.append(s + ";")
        return lines + ["}"]
    if isinstance(it, ExpectDecl):
        args = f"({', '.join(str(a) for a in it.args)})" if it.args else ""
        return [f"expect {it.subject} {it.kind}{args} {'true' if it.expected else 'false'};"]
    raise TypeError(f"cannot print {type(it).__name__}")


def print_scenario(s: Scenario) -> str:
    lines = [f'scenario "{s.name}" {{', f"  p = {s.p};"]
    for it in s.items:
        lines += ["  " + ln for ln in _item_lines(it)]
    lines.append("}")
    return "\n".join(lines) + "\n"


__all__ = [
    "ParseDiagnostic", "ParseResult", "Scenario", "ScenarioSyntaxError", "SourceSpan", "VERDICTS",
    "parse_or_raise", "parse_poly", "parse_scenario", "print_scenario", "tokenize",
]
