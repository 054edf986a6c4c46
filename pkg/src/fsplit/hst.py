"""Hereditary surjective trace over user-declared normalization trees.

A tree node holds a normalization of R, the conductor contracted to R, and a
list of component pairs (p in R, q in one normalization component, a trace
extension between the normalizations of R/p and R^N/q, optional child tree for
R/p). Everything declared is verified before any verdict is produced.
"""
from __future__ import annotations

import random
from dataclasses import dataclass, field
from typing import List, Optional, Sequence, Tuple

from .divisors import is_squarefree
from .errors import VerificationError
from .extensions import (FiniteExtension, TraceExtension, check_module_generators, conductor_in_source,
                         conductor_sweep, extend_pe_map, induced_quotient_map, is_surjective_over,
                         subring_member, verify_conductor, verify_ring_map)
from .frobenius import (PeMap, image_ideal, is_compatible, is_surjective_at, is_well_defined,
                        random_premultiplier)
from .groebner import Ideal, PresentedRing, kernel, require, subalgebra_member
from .poly import MultiPoly


@dataclass(eq=False)
class ComponentPair:
    """prime: in the ambient of R; component: index into the normalization;
    prime_above: in that component's ambient ring.

    ``base_images`` sends the variables of R into the trace base and
    ``top_images`` sends the variables of the component into the trace target;
    both are optional but, when present, tie the trace extension to the pair.
    """

    prime: Ideal
    component: int
    prime_above: Ideal
    trace: TraceExtension
    base_images: Optional[Tuple[MultiPoly, ...]] = None
    top_images: Optional[Tuple[MultiPoly, ...]] = None
    child: Optional["NormalizationTree"] = None


@dataclass(eq=False)
class NormalizationTree:
    extension: FiniteExtension
    contraction: Ideal
    pairs: Tuple[ComponentPair, ...] = ()
    name: Optional[str] = None

    @property
    def ring(self) -> PresentedRing:
        return self.extension.source

    def is_normal(self) -> bool:
        return (self.contraction + self.ring.ideal).is_unit()


@dataclass(frozen=True)
class PairResult:
    index: int
    trace_surjective: bool
    child: Optional["HstVerdict"]

    @property
    def ok(self) -> bool:
        return self.trace_surjective and (self.child is None or self.child.value)

    def to_json(self):
        return {"pair": self.index + 1, "traceSurjective": self.trace_surjective,
                "child": None if self.child is None else self.child.to_json()}


@dataclass(frozen=True)
class HstVerdict:
    value: bool
    witness: Tuple[PairResult, ...]
    strict: bool = False
    vacuous: bool = False

    def to_json(self):
        return {"value": self.value, "strict": self.strict, "vacuous": self.vacuous,
                "witness": [w.to_json() for w in self.witness]}


# ---------------------------------------------------------------- verification


def probe_prime(P: Ideal, degree: int = 2) -> bool:
    """Zero-divisor probe: no product of two monomials outside P lands in P."""
    if P.is_unit():
        return False
    ring = P.ring
    outside = [ring.monomial(e) for e in ring.monomials_up_to(degree)]
    outside = [m for m in outside if m not in P]
    for i, a in enumerate(outside):
        for b in outside[i:]:
            if (a * b) in P:
                return False
    return True


def _onto(images: Sequence[MultiPoly], target: PresentedRing, source) -> bool:
    return all(subalgebra_member(v, list(images), target.ideal, source) is not None
               for v in target.ambient.gens())


def verify_pair(tree: NormalizationTree, pair: ComponentPair) -> List[str]:
    ext = tree.extension
    R = tree.ring
    S = R.ambient
    notes = []
    require(0 <= pair.component < len(ext.components), "pair names a missing component")
    comp = ext.components[pair.component]
    P = pair.prime + R.ideal
    Q = pair.prime_above + comp.ideal
    require(P.contains_ideal(tree.contraction), f"{pair.prime} does not contain the conductor")
    require(Q.contains_ideal(ext.conductor[pair.component]),
            f"{pair.prime_above} does not contain the conductor on component {pair.component + 1}")
    contracted = kernel(ext.images[pair.component], Q, S) + R.ideal
    require(contracted.equals(P), f"{pair.prime_above} does not contract to {pair.prime}")

    T = pair.trace
    base = T.base if hasattr(T, "base") else None
    prime_certified = False
    if pair.base_images is not None:
        require(base is not None, "base images need a monogenic trace extension")
        require(len(pair.base_images) == S.nvars, "one base image per variable of the ring")
        ker = kernel(pair.base_images, base.ideal, S) + R.ideal
        require(ker.equals(P), f"the map to the trace base does not have kernel {pair.prime}")
        prime_certified = base.is_polynomial_ring()
        if pair.child is None:
            require(_onto(pair.base_images, base, S),
                    "quotient declared normal but it does not map onto the trace base")
    if not prime_certified:
        require(probe_prime(P), f"{pair.prime} failed the primality probe")
        notes.append(f"primality of {pair.prime} checked by probe only")
    require(probe_prime(Q), f"{pair.prime_above} failed the primality probe")
    if pair.top_images is not None:
        require(base is not None, "top images need a monogenic trace extension")
        require(len(pair.top_images) == comp.ambient.nvars, "one top image per component variable")
        ker = kernel(pair.top_images, T.target.ideal, comp.ambient) + comp.ideal
        require(ker.equals(Q), f"the map to the trace target does not have kernel {pair.prime_above}")
        if pair.base_images is not None:
            # R -> component -> trace target equals R -> base -> trace target
            for i, x in enumerate(S.gens()):
                up = ext.images[pair.component][i].map_to(T.ambient, pair.top_images)
                across = T.lift(pair.base_images[i])
                require((up - across) in T.target.ideal, "trace square does not commute")
    if pair.child is not None:
        child_ring = pair.child.ring
        require(child_ring.ambient == S and child_ring.ideal.equals(P),
                f"child tree is not a tree for the quotient by {pair.prime}")
    return notes


def verify_tree(tree: NormalizationTree, sweep: bool = True) -> List[str]:
    """Verify all declared data; raise VerificationError on failure, return notes."""
    ext = tree.extension
    require(ext.is_normalization, "tree extension must be flagged as a normalization")
    require(verify_ring_map(ext), "normalization map does not respect the relations")
    require(ext.conductor is not None, "normalization has no declared conductor")
    require(verify_conductor(ext), "declared conductor is not contained in the ring")
    notes = []
    if ext.module_generators:
        missing = check_module_generators(ext)
        if missing:
            notes.append(f"module generators unconfirmed for {len(missing)} monomials")
    if sweep and conductor_sweep(ext):
        notes.append("conductor candidate is not maximal")
    contraction = conductor_in_source(ext)
    require((tree.contraction + tree.ring.ideal).equals(contraction),
            f"declared contraction {tree.contraction} differs from the computed one")
    if tree.is_normal():
        return notes
    require(len(tree.pairs) > 0, "a non-normal ring needs at least one component pair")
    for pair in tree.pairs:
        notes += verify_pair(tree, pair)
        if pair.child is not None:
            notes += verify_tree(pair.child, sweep)
    return notes


# ---------------------------------------------------------------- verdicts


def check_hst(tree: NormalizationTree, strict: bool = False) -> HstVerdict:
    """Existential search over component pairs; ``strict`` demands every pair."""
    if tree.is_normal():
        return HstVerdict(True, (), strict, vacuous=True)
    results = []
    for idx, pair in enumerate(tree.pairs):
        child = check_hst(pair.child, strict) if pair.child is not None else None
        res = PairResult(idx, pair.trace.is_trace_surjective(), child)
        results.append(res)
        if res.ok and not strict:
            return HstVerdict(True, (res,), strict)
    if strict:
        return HstVerdict(all(r.ok for r in results), tuple(results), strict)
    return HstVerdict(False, tuple(results), strict)


def replay(tree: NormalizationTree, verdict: HstVerdict) -> bool:
    """Recheck the pairs named in the witness and confirm they give the same verdict."""
    if verdict.vacuous:
        return tree.is_normal() and verdict.value
    for res in verdict.witness:
        pair = tree.pairs[res.index]
        if pair.trace.is_trace_surjective() != res.trace_surjective:
            return False
        if (res.child is None) != (pair.child is None):
            return False
        if res.child is not None and not replay(pair.child, res.child):
            return False
    if verdict.value and not verdict.strict:
        return len(verdict.witness) == 1 and verdict.witness[0].ok
    # refutations and strict verdicts must cover every pair
    if [r.index for r in verdict.witness] != list(range(len(tree.pairs))):
        return False
    return verdict.value == all(r.ok for r in verdict.witness)


# ---------------------------------------------------------------- harnesses


@dataclass(frozen=True)
class LocalLiftReport:
    total_surjective: bool
    quotient_surjective: bool

    @property
    def holds(self) -> bool:
        return self.total_surjective or not self.quotient_surjective


def check_local_lift(m: PeMap, J: Ideal, max_ideal: Ideal) -> LocalLiftReport:
    """Surjectivity of m at the point (Fedder) and of its restriction to R/J (image ideal)."""
    if not max_ideal.contains_ideal(J):
        raise VerificationError("the compatible ideal must lie inside the maximal ideal")
    quotient = induced_quotient_map(m, J)
    total = is_surjective_at(m, max_ideal)
    q_image = image_ideal(quotient)[0]
    quot = not max_ideal.contains_ideal(q_image)
    report = LocalLiftReport(total, quot)
    if not report.holds:
        raise AssertionError("restriction is surjective but the map is not")
    return report


@dataclass(frozen=True)
class MainTheoremReport:
    hst: HstVerdict
    extended: PeMap
    phibar_surjective: bool
    phi_surjective: bool

    @property
    def violation(self) -> bool:
        return self.hst.value and self.phibar_surjective and not self.phi_surjective

    @property
    def pathology(self) -> bool:
        """The conclusion fails on a tree without hereditary surjective trace."""
        return not self.hst.value and self.phibar_surjective and not self.phi_surjective

    def to_json(self):
        return {"hst": self.hst.value, "phibarSurjective": self.phibar_surjective,
                "phiSurjective": self.phi_surjective, "pathology": self.pathology,
                "extendedPremultiplier": [str(c) for c in self.extended.premult]}


def main_theorem_instance(tree: NormalizationTree, m: PeMap, max_ideal: Ideal,
                          verdict: HstVerdict = None) -> MainTheoremReport:
    require(is_well_defined(m), "map is not well defined on the ring")
    verdict = verdict or check_hst(tree)
    mbar = extend_pe_map(tree.extension, m)
    report = MainTheoremReport(verdict, mbar, is_surjective_over(mbar, tree.extension, max_ideal),
                               is_surjective_at(m, max_ideal))
    if report.violation:
        raise AssertionError(f"main theorem violated by premultiplier {m.premult[0]}")
    return report


def conductor_is_radical(ext: FiniteExtension) -> bool:
    """On one-variable charts: every conductor component is generated by a squarefree polynomial."""
    for J, comp in zip(ext.conductor, ext.components):
        if comp.ambient.nvars != 1:
            raise VerificationError("radicality check needs one-variable charts")
        gb = J.groebner()
        if len(gb) != 1:
            continue  # zero or unit
        if not is_squarefree(gb[0]):
            return False
    return True


@dataclass
class TrialSummary:
    trials: int = 0
    phibar_surjective: int = 0
    phi_surjective: int = 0
    violations: int = 0
    radical_failures: int = 0
    examples: List[str] = field(default_factory=list)

    def to_json(self):
        return {"trials": self.trials, "phibarSurjective": self.phibar_surjective,
                "phiSurjective": self.phi_surjective, "violations": self.violations,
                "radicalFailures": self.radical_failures}


def main_theorem_trials(tree: NormalizationTree, max_ideal: Ideal, e: int, trials: int,
                        rng: random.Random) -> TrialSummary:
    """Randomized well-defined premultipliers on the root ring, counted by outcome."""
    verdict = check_hst(tree)
    curve = all(c.ambient.nvars == 1 for c in tree.extension.components)
    out = TrialSummary()
    for _ in range(trials):
        c = random_premultiplier(tree.ring, e, rng)
        m = PeMap(tree.ring, e, (c,))
        mbar = extend_pe_map(tree.extension, m)
        over = is_surjective_over(mbar, tree.extension, max_ideal)
        at = is_surjective_at(m, max_ideal)
        out.trials += 1
        out.phibar_surjective += over
        out.phi_surjective += at
        if verdict.value and over and not at:
            out.violations += 1
            out.examples.append(str(c))
        if over and curve and not conductor_is_radical(tree.extension):
            out.radical_failures += 1
    return out


__all__ = [
    "ComponentPair", "HstVerdict", "LocalLiftReport", "MainTheoremReport", "NormalizationTree",
    "PairResult", "TrialSummary", "check_hst", "check_local_lift", "conductor_is_radical",
    "main_theorem_instance", "main_theorem_trials", "probe_prime", "replay", "verify_tree",
]
