"""Run every built-in scenario and print a one-line summary per file."""
import argparse
import json
import sys
import time

from fsplit.cli import cmd_check, corpus_files
from fsplit.runner import RunOptions


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--seed", type=int, default=0)
    ap.add_argument("--trials", type=int, default=100)
    ap.add_argument("--json", help="write all reports to this file")
    args = ap.parse_args()
    opts = RunOptions(seed=args.seed, trials=args.trials)
    reports, worst = {}, 0
    for stem, text in corpus_files().items():
        t0 = time.perf_counter()
        code, report, _ = cmd_check(text, opts, stem)
        dt = time.perf_counter() - t0
        counts = report.to_json()["summary"] if report else {}
        print(f"{stem:18s} exit={code} {dt:6.2f}s {counts}")
        reports[stem] = report.to_json() if report else None
        worst = max(worst, code)
    if args.json:
        with open(args.json, "w") as fh:
            json.dump(reports, fh, indent=2, sort_keys=True)
    return worst


if __name__ == "__main__":
    sys.exit(main())
