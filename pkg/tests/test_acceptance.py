"""Acceptance criteria 1-10, each with an exact check and a runtime budget.

Run with ``pytest tests/test_acceptance.py -s`` (or directly with python3) to
see one PASS/FAIL line per criterion.
"""
import random
import sys
import time
from math import comb
from pathlib import Path

import pytest
import sympy

sys.path.insert(0, str(Path(__file__).parent))

from conftest import P, corpus_context  # noqa: E402
from fsplit import config, frobenius, groebner  # noqa: E402
from fsplit.cli import corpus_files  # noqa: E402
from fsplit.divisors import (SupportList, divisor_of_element, f_different, inversion_of_adjunction_check,  # noqa: E402
                             power_formula_check, pullback_plus_conductor_check)
from fsplit.dsl import parse_or_raise, parse_scenario, print_scenario  # noqa: E402
from fsplit.errors import NotExtendable  # noqa: E402
from fsplit.extensions import (MonogenicExtension, extend_pe_map, induced_quotient_map,  # noqa: E402
                               is_surjective_over, restriction_holds)
from fsplit.frobenius import (PeMap, fpure_at, hom_generators, is_surjective_at, is_well_defined, pe_map,  # noqa: E402
                              random_premultiplier, self_compose, standard_generator, surjective_over)
from fsplit.groebner import Ideal, PresentedRing, colon, intersect  # noqa: E402
from fsplit.hst import check_hst, main_theorem_instance, main_theorem_trials, replay, verify_tree  # noqa: E402
from fsplit.poly import MultiPoly, PolyRing  # noqa: E402
from fsplit.runner import RunOptions, run_scenario  # noqa: E402

PRIMES = (2, 3, 5, 7)
CRITERIA = {}


def criterion(number, title, budget):
    def register(fn):
        CRITERIA[number] = (title, budget, fn)
        return fn
    return register


def plane(p, relation):
    S = PolyRing(("x", "y"), p)
    return S, PresentedRing(S, Ideal(S, [P(relation, S)])), Ideal(S, [P("x", S), P("y", S)])


# ---------------------------------------------------------------- 1


def expand_outside_bracket(factors, power, p):
    """Expand (sum of monomials)^power over Z, reduce mod p, look for a term outside (x^p, y^p).

    ``factors`` lists (coefficient, (a, b)) terms of a bivariate polynomial.
    """
    acc = {(0, 0): 1}
    for _ in range(power):
        nxt = {}
        for (a, b), c in acc.items():
            for d, (i, j) in factors:
                key = (a + i, b + j)
                nxt[key] = nxt.get(key, 0) + c * d
        acc = nxt
    return any(c % p and a < p and b < p for (a, b), c in acc.items())


@criterion(1, "Fedder verdicts for node and cusp at p in {2,3,5,7}", 1.0)
def check_fedder():
    for p in PRIMES:
        node_oracle = expand_outside_bracket([(1, (1, 1))], p - 1, p)
        cusp_oracle = expand_outside_bracket([(1, (0, 2)), (-1, (3, 0))], p - 1, p)
        # binomial form of the same expansion
        assert cusp_oracle == any(comb(p - 1, i) % p and 3 * i < p and 2 * (p - 1 - i) < p for i in range(p))
        assert node_oracle is True and cusp_oracle is False
        for relation, oracle in (("x*y", node_oracle), ("y^2 - x^3", cusp_oracle)):
            S, R, M = plane(p, relation)
            assert fpure_at(R, M) is oracle
            assert is_surjective_at(pe_map(R, 1, standard_generator(R.ideal, 1)), M) is oracle


# ---------------------------------------------------------------- 2


def phi_digits(c, f):
    """The canonical map on a one-variable ring: keep the terms of c*f with exponent = p-1 mod p."""
    p = c.ring.p
    out = {}
    for (a,), v in (c * f).terms.items():
        if a % p == p - 1:
            out[(a // p,)] = (out.get((a // p,), 0) + v) % p
    return MultiPoly(c.ring, out)


@criterion(2, "extension of maps along F_3[x^2] in F_3[x]", 1.0)
def check_extension_example():
    ctx = corpus_context("extend-fail")
    ext = ctx.extensions["eta"]
    Sring = ext.source.ambient
    assert ctx.p == 3 and ext.image(P("s", Sring)) == (P("x^2", ext.target.ambient),)
    s4 = P("s^2", Sring)  # x^4
    bad, good = ctx.splittings["phi"], ctx.splittings["good"]
    assert phi_digits(bad.premult[0], s4).constant_term() != 0
    with pytest.raises(NotExtendable):
        extend_pe_map(ext, bad)
    assert phi_digits(good.premult[0], s4).constant_term() == 0
    mbar = extend_pe_map(ext, good)
    assert restriction_holds(ext, good, mbar)
    x = ext.target.ambient.var("x")
    for k in range(3):
        assert mbar(x ** (2 * k)) == ext.image(good(Sring.monomial((k,))))[0]


# ---------------------------------------------------------------- 3


@criterion(3, "trace of k[x^2] in k[x]: surjective for odd p, zero for p = 2", 1.0)
def check_traces():
    for p in PRIMES:
        B = PolyRing(("s",), p)
        T = PolyRing(("t", "s"), p)
        ext = MonogenicExtension(PresentedRing(B), P("t^2 - s", T))
        # multiplication matrices on the basis {1, t}: identity and [[0, s], [1, 0]]
        assert ext.trace_of(T.one()) == B.const(2 % p)
        assert ext.trace_of(T.var("t")).is_zero()
        if p == 2:
            assert ext.is_trace_zero() and not ext.is_trace_surjective()
        else:
            assert ext.is_trace_surjective() and not ext.is_trace_zero()


# ---------------------------------------------------------------- 4

TRIAL_TREES = [("node", "H", "m"), ("axes3", "H", "m"), ("twobranch-trace", "HA", "ma"),
               ("twobranch-trace", "HB", "mb")]


@criterion(4, "no hst tree has phibar surjective with phi not surjective (100 trials each)", 60.0)
def check_main_theorem_trials():
    for stem, tree_name, ideal in TRIAL_TREES:
        for p in (2, 3):
            ctx = corpus_context(stem, p, drop=("expect", "splitting"))
            tree = ctx.trees[tree_name]
            verify_tree(tree)
            assert check_hst(tree).value, (stem, tree_name, p)
            rng = random.Random(f"acceptance:{stem}:{tree_name}:{p}")
            summary = main_theorem_trials(tree, ctx.ideals[ideal], 1, 100, rng)
            assert summary.trials == 100
            assert summary.violations == 0, summary.examples


# ---------------------------------------------------------------- 5


@criterion(5, "char2-surface: hst false with inseparable witness, pathology exhibited", 30.0)
def check_pathology():
    ctx = corpus_context("char2-surface")
    tree = ctx.trees["H"]
    verify_tree(tree)
    verdict = check_hst(tree)
    assert verdict.value is False
    assert [w.trace_surjective for w in verdict.witness] == [False]
    assert tree.pairs[0].trace.is_trace_zero()
    assert replay(tree, verdict)
    rep = main_theorem_instance(tree, ctx.splittings["phi"], ctx.ideals["m"], verdict)
    assert rep.phibar_surjective and not rep.phi_surjective and rep.pathology
    report = run_scenario(parse_or_raise(corpus_files()["char2-surface"]), corpus_files()["char2-surface"])
    exhibits = {r.label for r in report.results if r.status == "pathology-exhibit"}
    assert any("main_theorem" in label for label in exhibits)
    assert report.exit_code == 0


# ---------------------------------------------------------------- 6


@criterion(6, "divisor coefficients 1 (node) and 2 (cusp), pullback identity with twists", 5.0)
def check_divisor_coefficients():
    ctx = corpus_context("node")
    ext, S, b = ctx.extensions["eta"], ctx.supports["S"], ctx.elements["b"]
    U, V = (c.ambient for c in ext.target.components)
    for name in ("phi", "psi"):
        rep = pullback_plus_conductor_check(ext, ctx.splittings[name], S, b)
        assert rep.holds
        if name == "phi":
            assert rep.delta_bar.coefficient(0, U.var("u")) == 1
            assert rep.delta_bar.coefficient(1, V.var("v")) == 1
            assert len(rep.delta_bar.terms) == 2
        else:
            assert rep.pullback.coefficient(0, U.var("u")) == 1
    for p in PRIMES:
        c = corpus_context(f"cusp-p{p}")
        ext, S, b = c.extensions["eta"], c.supports["S"], c.elements["b"]
        t = ext.target.ambient.var("t")
        rep = pullback_plus_conductor_check(ext, c.splittings["phi"], S, b)
        assert rep.holds and rep.delta_bar.coefficient(0, t) == 2 and len(rep.delta_bar.terms) == 1
        twisted = pullback_plus_conductor_check(ext, c.splittings["twist"], S, b)
        assert twisted.holds and not twisted.pullback.is_zero()


# ---------------------------------------------------------------- 7


def factor_support(elements, target):
    """Every monic irreducible factor of the given elements, found by an independent factorizer."""
    primes = []
    for j, comp in enumerate(target.components):
        ring = comp.ambient
        var = sympy.Symbol(ring.variables[0])
        found = []
        for f in elements:
            g = f[j]
            if g.is_zero() or g.is_constant():
                continue
            expr = sum(int(c) * var ** e[0] for e, c in g.terms.items())
            _, factors = sympy.Poly(expr, var, modulus=ring.p).factor_list()
            for fac, _mult in factors:
                coeffs = [int(c) % ring.p for c in fac.all_coeffs()]
                inv = pow(coeffs[0], -1, ring.p)
                n = len(coeffs) - 1
                mono = MultiPoly(ring, {(n - i,): c * inv % ring.p for i, c in enumerate(coeffs) if c})
                if mono not in found:
                    found.append(mono)
        primes.append(tuple(found))
    return SupportList(tuple(primes))


def is_curve_chart(ring):
    return all(c.ambient.nvars == 1 and c.ideal.is_zero() for c in ring.components)


def corpus_curve_maps():
    """(name, extended map) for every corpus splitting that reaches a one-variable normalization."""
    out = []
    for stem in sorted(corpus_files()):
        ctx = corpus_context(stem)
        for ext_name, ext in ctx.extensions.items():
            if not is_curve_chart(ext.target):
                continue
            for name, m in ctx.splittings.items():
                comp = m.ring.components[0]
                if comp.ambient != ext.source.ambient:
                    continue
                if comp.ideal.equals(ext.source.ideal):
                    m = PeMap(ext.source, m.e, m.premult)
                elif comp.ideal.is_zero() and len(ext.source.ideal.generators) == 1:
                    quotient = induced_quotient_map(m, ext.source.ideal)
                    m = PeMap(ext.source, m.e, quotient.premult)
                else:
                    continue
                try:
                    out.append((f"{stem}/{ext_name}/{name}", extend_pe_map(ext, m)))
                except NotExtendable:
                    continue
    return out


@criterion(7, "power formula for d = 2, 3 on every corpus curve map", 5.0)
def check_power_formula():
    maps = corpus_curve_maps()
    stems = {name.split("/")[0] for name, _ in maps}
    assert {"node", "cusp-p2", "cusp-p3", "cusp-p5", "cusp-p7", "axes3", "tacnode",
            "iofa-smooth", "iofa-cusp", "extend-fail"} <= stems
    for name, mbar in maps:
        if all(c.is_zero() for c in mbar.premult):
            continue
        support = factor_support([mbar.premult], mbar.ring)
        base = divisor_of_element(mbar.premult, support, strict=True)
        for d in (2, 3):
            composite = self_compose(mbar, d).premult
            factor = sum(mbar.q ** i for i in range(d))
            assert divisor_of_element(composite, support, strict=True) == base.scale(factor), (name, d)
            assert power_formula_check(mbar, d, support), (name, d)


# ---------------------------------------------------------------- 8


def gorenstein_sides(ctx, tree_name, element, ideal):
    tree = ctx.trees[tree_name]
    ext, M, b = tree.extension, ctx.ideals[ideal], ctx.elements[element]
    for bj, J in zip(b, ext.conductor):
        assert Ideal(bj.ring, [bj]).equals(J)
    ring_side = fpure_at(ext.source, M)
    # the same verdict through image ideals of the hom generators
    images = any(surjective_over(pe_map(ext.source, 1, c), [M]) for c in hom_generators(ext.source.ideal, 1))
    assert images == ring_side
    pair_side = is_surjective_over(PeMap(ext.target, 1, tuple(bj ** (ctx.p - 1) for bj in b)), ext, M)
    return check_hst(tree).value, ring_side, pair_side


@criterion(8, "F-pure(X) iff F-pure(normalization, conductor) on hst Gorenstein entries", 10.0)
def check_gorenstein():
    cases = [(f"cusp-p{p}", None) for p in PRIMES]
    cases += [(stem, p) for stem in ("node", "tacnode") for p in PRIMES]
    seen = set()
    for stem, p in cases:
        ctx = corpus_context(stem, p, drop=("expect", "splitting"))
        hst, ring_side, pair_side = gorenstein_sides(ctx, "H", "b", "m")
        assert hst, (stem, p)
        assert ring_side == pair_side, (stem, p)
        seen.add((stem.split("-")[0], ring_side))
    assert ("node", True) in seen and ("cusp", False) in seen
    ctx = corpus_context("char2-surface")
    hst, ring_side, pair_side = gorenstein_sides(ctx, "H", "b", "m")
    assert (hst, ring_side, pair_side) == (False, False, True)


# ---------------------------------------------------------------- 9


@criterion(9, "inversion of adjunction on iofa-smooth and iofa-cusp", 10.0)
def check_iofa():
    for stem in ("iofa-smooth", "iofa-cusp"):
        ctx = corpus_context(stem)
        tree = ctx.trees["H"]
        ext = tree.extension
        A = ext.source.ambient
        (h,) = ext.source.ideal.generators
        support = next(iter(ctx.supports.values()))
        hst = check_hst(tree).value
        assert hst
        for name, m in ctx.splittings.items():
            rep = inversion_of_adjunction_check(A, h, m, ext, support, ctx.ideals["m"], hst)
            assert rep.agree and rep.holds, (stem, name)
        report = run_scenario(parse_or_raise(corpus_files()[stem]), corpus_files()[stem])
        assert report.exit_code == 0 and all(r.status == "pass" for r in report.results)
    ctx = corpus_context("iofa-smooth")
    ext = ctx.extensions["eta"]
    A = ext.source.ambient
    std = ctx.splittings["std"]
    assert std.premult[0] == standard_generator(Ideal(A, [P("y", A)]), 1)
    assert f_different(A, P("y", A), std, ext, ctx.supports["P"]).is_zero()


# ---------------------------------------------------------------- 10


def monomial_colon_oracle(I_exps, J_exps, ring):
    expected = None
    for j in J_exps:
        part = Ideal(ring, [ring.monomial(tuple(max(a - b, 0) for a, b in zip(e, j))) for e in I_exps])
        expected = part if expected is None else intersect(expected, part)
    return expected


def fuzz_inputs(n, rng):
    texts = list(corpus_files().values())
    soup = list('scenario"{}()[];,=+-*^/@#:> \nkpxyuv0123456789') + ["(+)", "->", "ring", "map", "tree"]
    for i in range(n):
        if i % 2:
            yield "".join(rng.choice(soup) for _ in range(rng.randint(0, 200)))
            continue
        t = list(rng.choice(texts))
        for _ in range(rng.randint(1, 6)):
            k = rng.randrange(len(t))
            op = rng.randrange(3)
            if op == 0:
                del t[k]
            elif op == 1:
                t.insert(k, rng.choice('{}();,=[]^*+-@"x0 \n'))
            else:
                t[k] = rng.choice("abc;)(")
        yield "".join(t)


@criterion(10, "self-checked Groebner bases, colon and Fedder oracles, DSL round-trip and fuzz", 60.0)
def check_infrastructure():
    checked = []
    original = groebner.is_groebner

    def counting(G, order):
        ok = original(G, order)
        checked.append(ok)
        return ok

    for cached in (frobenius._bracket_cached, frobenius.hom_generators, groebner._tagged_basis):
        cached.cache_clear()
    groebner.is_groebner = counting
    try:
        with config.using(groebner=config.GroebnerConfig(self_check=True)):
            for stem, text in sorted(corpus_files().items()):
                report = run_scenario(parse_or_raise(text), text, RunOptions(trials=20))
                assert report.exit_code == 0, (stem, report.lines())

            rng = random.Random(10)
            R = PolyRing(("x", "y", "z"), 2)
            for _ in range(200):
                I_exps = [tuple(rng.randint(0, 4) for _ in range(3)) for _ in range(rng.randint(1, 3))]
                J_exps = [tuple(rng.randint(0, 4) for _ in range(3)) for _ in range(rng.randint(1, 2))]
                I = Ideal(R, [R.monomial(e) for e in I_exps])
                J = Ideal(R, [R.monomial(e) for e in J_exps])
                assert colon(I, J).equals(monomial_colon_oracle(I_exps, J_exps, R))

            cases = []
            for p in (2, 3):
                for relation in ("x*y", "y^2 - x^3"):
                    _, ring, M = plane(p, relation)
                    cases.append((ring, M))
                T = PolyRing(("x", "y", "z"), p)
                cases.append((PresentedRing(T, Ideal(T, [P("x*y", T), P("x*z", T), P("y*z", T)])),
                              Ideal(T, [P("x", T), P("y", T), P("z", T)])))
            for k in range(50):
                ring, M = cases[k % len(cases)]
                m = pe_map(ring, 1, random_premultiplier(ring, 1, rng))
                assert is_well_defined(m)
                assert is_surjective_at(m, M) == surjective_over(m, [M])
    finally:
        groebner.is_groebner = original
    assert checked and all(checked)

    for stem, text in corpus_files().items():
        first = parse_or_raise(text)
        printed = print_scenario(first)
        assert parse_or_raise(printed) == first, stem
        assert print_scenario(parse_or_raise(printed)) == printed, stem
    count = 0
    for text in fuzz_inputs(500, random.Random(2024)):
        res = parse_scenario(text)
        size = len(text.encode("utf-8"))
        for d in res.diagnostics:
            assert 0 <= d.span.start <= d.span.end <= size
        if res.ok:
            printed = print_scenario(res.scenario)
            assert parse_or_raise(printed) == res.scenario
        count += 1
    assert count == 500


# ---------------------------------------------------------------- harness


def run_criterion(number):
    title, budget, fn = CRITERIA[number]
    start = time.perf_counter()
    error = None
    try:
        fn()
    except Exception as exc:  # reported, then re-raised by the caller
        error = exc
    seconds = time.perf_counter() - start
    ok = error is None and seconds < budget
    why = "" if error is None else f" [{type(error).__name__}: {error}]"
    if error is None and not ok:
        why = " [over budget]"
    line = f"criterion {number:2d}: {'PASS' if ok else 'FAIL'} {seconds:7.2f}s / {budget:g}s  {title}{why}"
    return ok, seconds, budget, error, line


@pytest.mark.acceptance
@pytest.mark.parametrize("number", sorted(CRITERIA))
def test_criterion(number, capsys):
    ok, seconds, budget, error, line = run_criterion(number)
    with capsys.disabled():
        print("\n" + line)
    if error is not None:
        raise error
    assert seconds < budget, line


if __name__ == "__main__":
    results = [run_criterion(n) for n in sorted(CRITERIA)]
    for r in results:
        print(r[-1])
    raise SystemExit(0 if all(r[0] for r in results) else 1)
