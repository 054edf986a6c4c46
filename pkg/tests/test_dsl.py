import random

import pytest
from hypothesis import given, strategies as st

from fsplit.cli import corpus_files
from fsplit.dsl import (ExpectDecl, MapDecl, RingDecl, ScenarioSyntaxError, SplittingDecl, parse_or_raise,
                        parse_scenario, print_scenario, tokenize)
from fsplit.poly import to_text


@pytest.mark.parametrize("stem", sorted(corpus_files()))
def test_corpus_roundtrip(stem):
    text = corpus_files()[stem]
    first = parse_or_raise(text)
    printed = print_scenario(first)
    second = parse_or_raise(printed)
    assert second == first
    assert print_scenario(second) == printed


def test_node_shape():
    s = parse_or_raise(corpus_files()["node"])
    rings = s.of_type(RingDecl)
    assert [len(r.components) for r in rings] == [1, 2]
    assert len(s.of_type(MapDecl)) == 1
    assert len(s.of_type(SplittingDecl)) == 2
    assert all(isinstance(e, ExpectDecl) for e in s.expectations)


def test_coefficients_reduced_not_factored():
    s = parse_or_raise('scenario "r" { p = 2; ring R = k[x] / (x^2 + 1); }')
    rel = s.of_type(RingDecl)[0].components[0].relations[0]
    assert to_text(rel) == "x^2 + 1"
    s = parse_or_raise('scenario "r" { p = 3; ring R = k[x] / (4*x^2 - 7); }')
    assert to_text(s.of_type(RingDecl)[0].components[0].relations[0]) == "x^2 + 2"


def test_malformed_map_recovers():
    text = ('scenario "bad" {\n  p = 3;\n  ring R = k[x];\n  map f : R -> {\n'
            '  ring Q = k[y];\n  ideal m in Q = (y, z);\n}\n')
    res = parse_scenario(text)
    assert not res.ok
    first, second = res.diagnostics[:2]
    assert (first.span.line, first.span.column) == (4, 16)
    assert text.encode()[first.span.start:first.span.end] == b"{"
    assert second.span.line == 6 and "'z'" in second.message


def test_semantic_diagnostics():
    cases = {
        'scenario "a" { ring R = k[x]; }': "characteristic",
        'scenario "a" { p = 4; }': "not a prime",
        'scenario "a" { p = 3; p = 5; }': "mismatch",
        'scenario "a" { p = 3; ring R = k[x]; ring R = k[y]; }': "already declared",
        'scenario "a" { p = 3; ideal m in R = (x); }': "unknown identifier",
        'scenario "a" { p = 3; ring R = k[x]; expect R surjective true; }': "applies to a splitting",
        'scenario "a" { p = 3; ring R = k[x]; ring N = k[t]; map f : R -> N { } }': "x",
        'scenario "a" { p = 3; ring R = k[x]; splitting s on R : e = 1, c = x^99999; }': "exponent",
    }
    for text, needle in cases.items():
        res = parse_scenario(text)
        assert not res.ok, text
        assert any(needle in d.message for d in res.diagnostics), (text, res.diagnostics)


def test_parse_or_raise():
    with pytest.raises(ScenarioSyntaxError):
        parse_or_raise('scenario "a" { p = 3; ring }')


def test_deep_nesting_is_a_diagnostic():
    text = 'scenario "a" { p = 3; ring R = k[x] / (' + "(" * 500 + "x" + ")" * 500 + "); }"
    res = parse_scenario(text)
    assert not res.ok


# -- randomized scenarios

VARS = ["x", "y", "z"]


@st.composite
def poly_text(draw, names):
    terms = []
    for _ in range(draw(st.integers(1, 3))):
        c = draw(st.integers(-9, 9))
        mono = "*".join(f"{v}^{draw(st.integers(1, 4))}" for v in names if draw(st.booleans()))
        terms.append(f"{c}*{mono}" if mono else str(c))
    return " + ".join(terms).replace("+ -", "- ")


@st.composite
def scenario_text(draw):
    p = draw(st.sampled_from([2, 3, 5, 7]))
    n = draw(st.integers(1, 3))
    names = VARS[:n]
    lines = [f"p = {p};"]
    rels = draw(st.lists(poly_text(names), max_size=2))
    ring = f"k[{', '.join(names)}]" + (f" / ({', '.join(rels)})" if rels else "")
    lines.append(f"ring R = {ring};")
    lines.append("ring N = k[u] (+) k[v];")
    lines.append("map f : R -> N { " + " ".join(
        f"{v} -> ({draw(poly_text(['u']))}, {draw(poly_text(['v']))});" for v in names) + " }")
    lines.append(f"ideal m in R = ({', '.join(draw(st.lists(poly_text(names), min_size=1, max_size=3)))});")
    lines.append(f"element b on N = ({draw(poly_text(['u']))}, {draw(poly_text(['v']))});")
    lines.append(f"splitting s on R : e = {draw(st.integers(1, 2))}, c = {draw(poly_text(names))};")
    lines.append("support S on N = [u] (+) [v];")
    lines.append(f"divisor D on N = {draw(st.integers(-3, 3))} * [u] @ 1 + 1/{draw(st.sampled_from([11, 13]))} * [v] @ 2;")
    lines.append(f"expect s surjective_at(m) {draw(st.sampled_from(['true', 'false']))};")
    lines.append("expect f in_image(b) false;")
    draw(st.randoms()).shuffle(lines[5:])
    return 'scenario "gen" {\n' + "\n".join(lines) + "\n}\n"


@given(scenario_text())
def test_random_scenarios_roundtrip(text):
    s = parse_or_raise(text)
    printed = print_scenario(s)
    assert parse_or_raise(printed) == s
    assert print_scenario(parse_or_raise(printed)) == printed


def check_total(text):
    res = parse_scenario(text)
    size = len(text.encode("utf-8"))
    for d in res.diagnostics:
        assert 0 <= d.span.start <= d.span.end <= size
        assert d.span.line >= 1 and d.span.column >= 1
    if res.ok:
        print_scenario(res.scenario)


@given(st.binary(max_size=300))
def test_fuzz_random_bytes(data):
    check_total(data.decode("utf-8", errors="replace"))


@given(st.text(alphabet=st.sampled_from(list('scenario"{}()[];,=+-*^/@#:> \nkpxyuv0123456789(+)->')), max_size=200))
def test_fuzz_token_soup(text):
    check_total(text)


def test_fuzz_mutated_corpus():
    rng = random.Random(5)
    texts = list(corpus_files().values())
    for _ in range(300):
        t = list(rng.choice(texts))
        for _ in range(rng.randint(1, 6)):
            i = rng.randrange(len(t))
            op = rng.randrange(3)
            if op == 0:
                del t[i]
            elif op == 1:
                t.insert(i, rng.choice('{}();,=[]^*+-@"x0 \n'))
            else:
                t[i] = rng.choice("abc;)(")
        check_total("".join(t))


def test_tokenize_spans_are_bytes():
    toks, diags = tokenize('scenario "é" { p = 3; }')
    assert not diags
    brace = next(t for t in toks if t.text == "{")
    assert brace.span.start == len('scenario "é" '.encode())
    assert brace.span.column == len('scenario "é" ') + 1
