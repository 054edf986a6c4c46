"""Evaluate the expectations of a parsed scenario and assemble a run report."""
from __future__ import annotations

import hashlib
import random
import time
import warnings
from dataclasses import dataclass, field
from typing import Any, Callable, Dict, List, Optional

from . import __version__
from .divisors import (CurveDivisor, SupportList, divisor_of_map, f_different, inversion_of_adjunction_check,
                       power_formula_check, pullback_plus_conductor_check)
from .dsl import (PATHOLOGY_KINDS, ConductorDecl, DivisorDecl, ElementDecl, ExpectDecl, IdealDecl, MapDecl,
                  ModGensDecl, NormalizationDecl, RingDecl, Scenario, SplittingDecl, SupportDecl, TraceDecl,
                  TreeDecl)
from .errors import FsplitError, NotExtendable, VerificationError
from .extensions import (FiniteExtension, MonogenicExtension, MonogenicProduct, check_module_generators,
                         conductor_sweep, extend_pe_map, is_surjective_over, subring_member, trace_lands_in,
                         verify_conductor, verify_ring_map)
from .frobenius import (PeMap, check_e, fpure_at, is_compatible, is_surjective, is_surjective_at,
                        is_well_defined, is_zero_map)
from .groebner import Ideal, PresentedRing, ProductRing
from .hst import (ComponentPair, NormalizationTree, check_hst, check_local_lift, main_theorem_instance,
                  main_theorem_trials, replay, verify_tree)
from .poly import PolyRing, to_text

SCHEMA_VERSION = 1


@dataclass(frozen=True)
class RunOptions:
    seed: int = 0
    trials: int = 100
    strict_hst: bool = False


# ---------------------------------------------------------------- building objects


class Context:
    """Live objects for every declaration of a scenario."""

    def __init__(self, scenario: Scenario):
        self.scenario = scenario
        p = self.p = scenario.p
        self.rings: Dict[str, Any] = {}
        self.ideals: Dict[str, Ideal] = {}
        self.elements: Dict[str, tuple] = {}
        self.splittings: Dict[str, PeMap] = {}
        self.traces: Dict[str, Any] = {}
        self.supports: Dict[str, SupportList] = {}
        self.divisors: Dict[str, CurveDivisor] = {}
        self.extensions: Dict[str, FiniteExtension] = {}
        self.trees: Dict[str, NormalizationTree] = {}
        self.tree_notes: Dict[str, List[str]] = {}

        maps: Dict[str, MapDecl] = {}
        modgens: Dict[str, tuple] = {}
        conductors: Dict[str, tuple] = {}
        normal = set()
        try:
            for it in scenario.items:
                if isinstance(it, RingDecl):
                    comps = [PresentedRing(PolyRing(c.variables, p), Ideal(PolyRing(c.variables, p), c.relations))
                             for c in it.components]
                    self.rings[it.name] = comps[0] if len(comps) == 1 else ProductRing(comps, it.name)
                elif isinstance(it, IdealDecl):
                    self.ideals[it.name] = Ideal(self.rings[it.ring].components[0].ambient, it.generators)
                elif isinstance(it, ElementDecl):
                    self.elements[it.name] = tuple(it.value)
                elif isinstance(it, SplittingDecl):
                    check_e(p, it.e)
                    self.splittings[it.name] = PeMap(self.rings[it.ring], it.e, tuple(it.premult))
                elif isinstance(it, TraceDecl):
                    parts = []
                    for part in it.parts:
                        base_ring = PolyRing(part.base.variables, p)
                        base = PresentedRing(base_ring, Ideal(base_ring, part.base.relations))
                        parts.append(MonogenicExtension(base, part.minpoly, part.var))
                    self.traces[it.name] = parts[0] if len(parts) == 1 else MonogenicProduct(parts)
                elif isinstance(it, SupportDecl):
                    self.supports[it.name] = SupportList(tuple(tuple(g) for g in it.primes))
                elif isinstance(it, DivisorDecl):
                    self.divisors[it.name] = CurveDivisor.build(
                        p, {(j - 1, f): c for c, f, j in it.terms})
                elif isinstance(it, MapDecl):
                    maps[it.name] = it
                elif isinstance(it, ModGensDecl):
                    modgens[it.ext] = it.elements
                elif isinstance(it, ConductorDecl):
                    conductors[it.ext] = it.ideals
                elif isinstance(it, NormalizationDecl):
                    normal.add(it.ext)
            for name, md in maps.items():
                target = self.rings[md.target]
                ncomp = len(target.components)
                images = tuple(tuple(img[j] for _, img in md.images) for j in range(ncomp))
                cond = None
                if name in conductors:
                    cond = tuple(Ideal(c.ambient, gens) for c, gens in zip(target.components, conductors[name]))
                self.extensions[name] = FiniteExtension(
                    self.rings[md.source], target, images, tuple(modgens.get(name, ())), cond,
                    name in normal, name)
            for it in scenario.of_type(TreeDecl):
                self.trees[it.name] = self._tree(it)
        except FsplitError as exc:
            if isinstance(exc, VerificationError):
                raise
            raise VerificationError(f"invalid scenario data: {exc}") from exc

    def _tree(self, decl: TreeDecl) -> NormalizationTree:
        ext = self.extensions[decl.ext]
        src = ext.source.ambient
        pairs = []
        for pd in decl.pairs:
            comp = ext.components[pd.component - 1]
            pairs.append(ComponentPair(
                Ideal(src, pd.prime), pd.component - 1, Ideal(comp.ambient, pd.prime_above),
                self.traces[pd.trace], pd.base_images, pd.top_images,
                self.trees[pd.child] if pd.child else None))
        return NormalizationTree(ext, Ideal(src, decl.contraction), tuple(pairs), decl.name)

    def verified_tree(self, name: str) -> NormalizationTree:
        if name not in self.tree_notes:
            with warnings.catch_warnings():
                warnings.simplefilter("ignore")
                self.tree_notes[name] = verify_tree(self.trees[name])
        return self.trees[name]


# ---------------------------------------------------------------- evaluation


@dataclass
class Outcome:
    actual: bool
    details: Dict[str, Any] = field(default_factory=dict)
    pathology: bool = False


def _txt(values) -> List[str]:
    return [to_text(v) for v in values]


def _single_generator(ext: FiniteExtension):
    gens = ext.source.ideal.generators
    if len(gens) != 1:
        raise VerificationError("the source must be a hypersurface ambient/(h)")
    return gens[0]


def _ambient_map(ctx: Context, m: PeMap, ext: FiniteExtension):
    amb = ext.source.ambient
    if m.ring.components[0].ambient != amb:
        raise VerificationError("the map and the normalization live over different ambient rings")
    return amb, _single_generator(ext)


def _eval(ctx: Context, ex: ExpectDecl, opts: RunOptions) -> Outcome:
    k, a = ex.kind, ex.args
    s = ex.subject
    if k == "well_defined":
        return Outcome(is_well_defined(ctx.splittings[s]))
    if k == "surjective":
        return Outcome(is_surjective(ctx.splittings[s]))
    if k == "surjective_at":
        return Outcome(is_surjective_at(ctx.splittings[s], ctx.ideals[a[0]]))
    if k == "compatible":
        return Outcome(is_compatible(ctx.splittings[s], ctx.ideals[a[0]]))
    if k == "zero_map":
        return Outcome(is_zero_map(ctx.splittings[s]))
    if k == "local_lift":
        rep = check_local_lift(ctx.splittings[s], ctx.ideals[a[0]], ctx.ideals[a[1]])
        return Outcome(rep.holds, {"totalSurjective": rep.total_surjective,
                                   "quotientSurjective": rep.quotient_surjective})
    if k == "divisor_is":
        d = divisor_of_map(ctx.splittings[s], ctx.supports[a[0]])
        return Outcome(d == ctx.divisors[a[1]], {"divisor": d.to_text()})
    if k == "power_formula":
        return Outcome(power_formula_check(ctx.splittings[s], a[1], ctx.supports[a[0]]))
    if k == "f_different_is":
        m, ext = ctx.splittings[s], ctx.extensions[a[0]]
        amb, h = _ambient_map(ctx, m, ext)
        d = f_different(amb, h, m, ext, ctx.supports[a[1]])
        return Outcome(d == ctx.divisors[a[2]], {"fDifferent": d.to_text()})
    if k == "iofa":
        m, ext = ctx.splittings[s], ctx.extensions[a[0]]
        tree = ctx.verified_tree(a[1])
        hst = check_hst(tree).value
        amb, h = _ambient_map(ctx, m, ext)
        rep = inversion_of_adjunction_check(amb, h, m, ext, None, ctx.ideals[a[2]], hst)
        return Outcome(rep.agree, {"hst": hst, "ambientSurjective": rep.ambient_surjective,
                                   "normalizationSurjective": rep.normalization_surjective},
                       rep.pathology)
    if k == "fpure_at":
        ring = ctx.rings[s]
        return Outcome(fpure_at(ring, ctx.ideals[a[0]]))
    if k == "ring_map":
        return Outcome(verify_ring_map(ctx.extensions[s]))
    if k == "conductor":
        return Outcome(verify_conductor(ctx.extensions[s]))
    if k == "conductor_maximal":
        with warnings.catch_warnings():
            warnings.simplefilter("ignore")
            found = conductor_sweep(ctx.extensions[s])
        return Outcome(not found, {"extra": [f"{to_text(f)} @ {j + 1}" for j, f in found]})
    if k == "module_generators":
        with warnings.catch_warnings():
            warnings.simplefilter("ignore")
            missing = check_module_generators(ctx.extensions[s])
        return Outcome(not missing, {"unconfirmed": [f"{to_text(f)} @ {j + 1}" for j, f in missing]})
    if k == "in_image":
        pre = subring_member(ctx.extensions[s], ctx.elements[a[0]])
        return Outcome(pre is not None, {"preimage": None if pre is None else to_text(pre)})
    if k == "extends":
        try:
            mbar = extend_pe_map(ctx.extensions[s], ctx.splittings[a[0]])
        except NotExtendable as exc:
            return Outcome(False, {"error": str(exc)})
        return Outcome(True, {"premultiplier": _txt(mbar.premult)})
    if k == "extension_is":
        ext = ctx.extensions[s]
        mbar = extend_pe_map(ext, ctx.splittings[a[0]])
        want = ctx.elements[a[1]]
        same = all(c.eq(x, y) for c, x, y in zip(ext.components, mbar.premult, want))
        return Outcome(same, {"premultiplier": _txt(mbar.premult)})
    if k == "extension_divisor_is":
        mbar = extend_pe_map(ctx.extensions[s], ctx.splittings[a[0]])
        d = divisor_of_map(mbar, ctx.supports[a[1]])
        return Outcome(d == ctx.divisors[a[2]], {"premultiplier": _txt(mbar.premult), "divisor": d.to_text()})
    if k == "extended_power_formula":
        mbar = extend_pe_map(ctx.extensions[s], ctx.splittings[a[0]])
        return Outcome(power_formula_check(mbar, a[2], ctx.supports[a[1]]))
    if k == "pullback_identity":
        rep = pullback_plus_conductor_check(ctx.extensions[s], ctx.splittings[a[0]], ctx.supports[a[1]],
                                            ctx.elements[a[2]])
        return Outcome(rep.holds, {"extended": rep.delta_bar.to_text(), "pullback": rep.pullback.to_text(),
                                   "conductor": rep.conductor_divisor.to_text()})
    if k == "phibar_surjective_at":
        ext = ctx.extensions[s]
        mbar = extend_pe_map(ext, ctx.splittings[a[0]])
        return Outcome(is_surjective_over(mbar, ext, ctx.ideals[a[1]]), {"premultiplier": _txt(mbar.premult)})
    if k == "trace_surjective":
        return Outcome(ctx.traces[s].is_trace_surjective())
    if k == "trace_zero":
        return Outcome(ctx.traces[s].is_trace_zero())
    if k == "trace_lands_in":
        return Outcome(trace_lands_in(ctx.traces[s], ctx.extensions[a[0]]))
    if k == "tree_valid":
        try:
            ctx.verified_tree(s)
        except VerificationError as exc:
            return Outcome(False, {"error": str(exc)})
        return Outcome(True, {"notes": ctx.tree_notes[s]})
    if k in ("hst", "hst_strict"):
        tree = ctx.verified_tree(s)
        verdict = check_hst(tree, strict=(k == "hst_strict") or opts.strict_hst)
        if not replay(tree, verdict):
            raise AssertionError("hst witness does not replay")
        return Outcome(verdict.value, {"witness": verdict.to_json(), "notes": ctx.tree_notes[s]})
    if k == "main_theorem":
        tree = ctx.verified_tree(s)
        rep = main_theorem_instance(tree, ctx.splittings[a[0]], ctx.ideals[a[1]])
        return Outcome(not (rep.phibar_surjective and not rep.phi_surjective), rep.to_json(), rep.pathology)
    if k == "main_theorem_trials":
        tree = ctx.verified_tree(s)
        rng = random.Random(f"{opts.seed}:{ctx.scenario.name}:{s}:{a[1]}")
        summary = main_theorem_trials(tree, ctx.ideals[a[0]], a[1], opts.trials, rng)
        return Outcome(summary.violations == 0, summary.to_json())
    if k == "gorenstein_criterion":
        tree = ctx.verified_tree(s)
        return _gorenstein(ctx, tree, ctx.elements[a[0]], ctx.ideals[a[1]])
    raise VerificationError(f"unknown verdict kind {k}")


def _gorenstein(ctx: Context, tree: NormalizationTree, b: tuple, max_ideal: Ideal) -> Outcome:
    """F-purity of R against F-purity of the pair (normalization, conductor divisor).

    The left side uses the colon generators of R; the right side uses the map
    with premultiplier b^(p-1) on each normalization component.
    """
    ext = tree.extension
    for j, (bj, J) in enumerate(zip(b, ext.conductor)):
        if not Ideal(bj.ring, [bj]).equals(J):
            raise VerificationError(f"{to_text(bj)} does not generate the conductor on component {j + 1}")
    left = fpure_at(ext.source, max_ideal)
    pair_map = PeMap(ext.target, 1, tuple(bj ** (ctx.p - 1) for bj in b))
    right = is_surjective_over(pair_map, ext, max_ideal)
    hst = check_hst(tree).value
    return Outcome(left == right, {"hst": hst, "ringFpure": left, "pairFpure": right},
                   pathology=(not hst and left != right))


# ---------------------------------------------------------------- reports


@dataclass
class ExpectationResult:
    label: str
    expected: bool
    actual: Optional[bool]
    status: str  # pass, fail, pathology-exhibit, error
    details: Dict[str, Any]
    seconds: float

    def to_json(self):
        return {"label": self.label, "expected": self.expected, "actual": self.actual,
                "status": self.status, "details": self.details, "seconds": round(self.seconds, 6)}


@dataclass
class RunReport:
    scenario: str
    input_hash: str
    options: RunOptions
    results: List[ExpectationResult] = field(default_factory=list)
    error: Optional[str] = None
    tool_version: str = __version__

    @property
    def exit_code(self) -> int:
        if self.error is not None or any(r.status == "error" for r in self.results):
            return 3
        if any(r.status == "fail" for r in self.results):
            return 1
        return 0

    def to_json(self, timings: bool = True) -> Dict[str, Any]:
        results = [r.to_json() for r in self.results]
        if not timings:
            for r in results:
                r.pop("seconds")
        counts = {}
        for r in self.results:
            counts[r.status] = counts.get(r.status, 0) + 1
        return {
            "schemaVersion": SCHEMA_VERSION,
            "scenario": self.scenario,
            "toolVersion": self.tool_version,
            "inputHash": self.input_hash,
            "options": {"seed": self.options.seed, "trials": self.options.trials,
                        "strictHst": self.options.strict_hst},
            "error": self.error,
            "expectations": results,
            "summary": counts,
            "exitCode": self.exit_code,
        }

    def lines(self) -> List[str]:
        out = [f"scenario {self.scenario}"]
        if self.error:
            out.append(f"  ERROR {self.error}")
        for r in self.results:
            tag = {"pass": "PASS", "fail": "FAIL", "pathology-exhibit": "EXHIBIT", "error": "ERROR"}[r.status]
            extra = f"  [{r.details['error']}]" if r.status == "error" else ""
            out.append(f"  {tag:8s} {r.label} -> {str(r.actual).lower()} "
                       f"(expected {str(r.expected).lower()}){extra}")
        return out


def input_hash(text: str) -> str:
    return "sha256:" + hashlib.sha256(text.encode("utf-8")).hexdigest()


def run_scenario(scenario: Scenario, text: str = "", opts: RunOptions = RunOptions()) -> RunReport:
    report = RunReport(scenario.name, input_hash(text), opts)
    try:
        ctx = Context(scenario)
    except VerificationError as exc:
        report.error = str(exc)
        return report
    for ex in scenario.expectations:
        t0 = time.perf_counter()
        try:
            out = _eval(ctx, ex, opts)
            if out.actual == ex.expected:
                status = "pathology-exhibit" if (out.pathology and ex.kind in PATHOLOGY_KINDS) else "pass"
            else:
                status = "fail"
            res = ExpectationResult(ex.label(), ex.expected, out.actual, status, out.details,
                                    time.perf_counter() - t0)
        except AssertionError as exc:
            res = ExpectationResult(ex.label(), ex.expected, False, "fail", {"violation": str(exc)},
                                    time.perf_counter() - t0)
        except FsplitError as exc:
            res = ExpectationResult(ex.label(), ex.expected, None, "error",
                                    {"error": f"{type(exc).__name__}: {exc}"}, time.perf_counter() - t0)
        report.results.append(res)
    return report


__all__ = ["Context", "RunOptions", "RunReport", "input_hash", "run_scenario"]
