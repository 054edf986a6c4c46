import os
import re

from hypothesis import HealthCheck, settings, strategies as st

from fsplit.cli import corpus_files
from fsplit.dsl import parse_or_raise, parse_poly
from fsplit.poly import MultiPoly, PolyRing
from fsplit.runner import Context

settings.register_profile("default", max_examples=60, deadline=None,
                          suppress_health_check=[HealthCheck.too_slow])
settings.register_profile("ci", max_examples=200, deadline=None)
settings.load_profile(os.environ.get("HYPOTHESIS_PROFILE", "default"))


def P(text, ring):
    return parse_poly(text, ring)


def ring(names, p):
    return PolyRing(tuple(names.split()) if isinstance(names, str) else tuple(names), p)


def polys(R: PolyRing, max_terms=4, max_deg=3):
    """Random polynomials over R with small support."""
    exps = st.tuples(*[st.integers(0, max_deg)] * R.nvars)
    return st.dictionaries(exps, st.integers(0, R.p - 1), max_size=max_terms).map(
        lambda d: MultiPoly(R, d))


def corpus_context(stem, p=None, drop=("expect",)):
    """A corpus scenario, optionally in another characteristic with some items removed."""
    text = corpus_files()[stem]
    if p is not None:
        text = re.sub(r"\bp = \d+;", f"p = {p};", text)
    for kw in drop:
        text = re.sub(rf"^\s*{kw}\b.*$", "", text, flags=re.M)
    return Context(parse_or_raise(text))
