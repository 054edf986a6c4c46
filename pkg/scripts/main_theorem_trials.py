"""Randomized check: extended map surjective but original map not, on hst trees.

Each corpus tree is rebuilt in every requested characteristic and sampled
with random well-defined premultipliers.
"""
import argparse
import random
import re

from fsplit.cli import corpus_files
from fsplit.dsl import TreeDecl, parse_or_raise
from fsplit.hst import check_hst, main_theorem_trials, verify_tree
from fsplit.runner import Context

TREES = {"node": ("H", "m"), "axes3": ("H", "m"), "twobranch-trace": ("HA", "ma")}


def tree_context(stem: str, p: int) -> Context:
    """The corpus scenario with its characteristic replaced and splittings dropped."""
    text = re.sub(r"\bp = \d+;", f"p = {p};", corpus_files()[stem])
    text = re.sub(r"^\s*(splitting|expect)\b.*$", "", text, flags=re.M)
    return Context(parse_or_raise(text))


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--trials", type=int, default=100)
    ap.add_argument("--seed", type=int, default=0)
    ap.add_argument("--primes", type=int, nargs="+", default=[2, 3])
    args = ap.parse_args()
    total = 0
    for stem, (tree_name, ideal) in TREES.items():
        for p in args.primes:
            ctx = tree_context(stem, p)
            tree = ctx.trees[tree_name]
            verify_tree(tree)
            rng = random.Random(f"{args.seed}:{stem}:{p}")
            s = main_theorem_trials(tree, ctx.ideals[ideal], 1, args.trials, rng)
            total += s.violations
            print(f"{stem:16s} p={p} hst={check_hst(tree).value} {s.to_json()}")
    print(f"violations: {total}")
    return 1 if total else 0


if __name__ == "__main__":
    raise SystemExit(main())
