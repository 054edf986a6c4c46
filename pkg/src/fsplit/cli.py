"""Command-line driver: ``fsplit check``, ``fsplit corpus`` and ``fsplit print``."""
from __future__ import annotations

import argparse
import json
import sys
from importlib import resources
from pathlib import Path
from typing import Dict, List, Optional, Tuple

from .dsl import parse_scenario, print_scenario
from .runner import RunOptions, RunReport, run_scenario

EXIT_OK, EXIT_FAIL, EXIT_PARSE, EXIT_VERIFY = 0, 1, 2, 3


def corpus_files() -> Dict[str, str]:
    """Embedded corpus: file stem -> text."""
    root = resources.files("fsplit") / "corpus"
    out = {}
    for entry in sorted(root.iterdir(), key=lambda e: e.name):
        if entry.name.endswith(".fsl"):
            out[entry.name[:-4]] = entry.read_text(encoding="utf-8")
    return out


def _scenario_name(text: str) -> Optional[str]:
    res = parse_scenario(text)
    return res.scenario.name if res.scenario is not None else None


def corpus_listing() -> List[Tuple[str, str]]:
    return [(stem, _scenario_name(text) or "?") for stem, text in corpus_files().items()]


def resolve(target: str) -> Tuple[str, str]:
    """A path on disk, or a corpus entry by file stem or scenario name."""
    path = Path(target)
    if path.is_file():
        return str(path), path.read_text(encoding="utf-8")
    files = corpus_files()
    if target in files:
        return f"corpus:{target}", files[target]
    for stem, text in files.items():
        if _scenario_name(text) == target:
            return f"corpus:{stem}", text
    raise FileNotFoundError(f"no such file or corpus entry: {target}")


def cmd_check(text: str, opts: RunOptions = RunOptions(), source: str = "<input>") -> Tuple[int, Optional[RunReport], List[str]]:
    """Parse and run a scenario; returns exit code, report and printable lines."""
    res = parse_scenario(text)
    if not res.ok:
        return EXIT_PARSE, None, [f"{source}:{d}" for d in res.diagnostics]
    report = run_scenario(res.scenario, text, opts)
    return report.exit_code, report, report.lines()


def _build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="fsplit", description="Frobenius splittings and normalization checks")
    sub = ap.add_subparsers(dest="command", required=True)
    chk = sub.add_parser("check", help="run the expectations of a scenario file or corpus entry")
    chk.add_argument("target")
    chk.add_argument("--json", metavar="OUT", help="write the JSON report here ('-' for stdout)")
    chk.add_argument("--seed", type=int, default=0)
    chk.add_argument("--trials", type=int, default=100)
    chk.add_argument("--strict-hst", action="store_true", help="require every component pair in hst verdicts")
    sub.add_parser("corpus", help="list built-in scenarios")
    pr = sub.add_parser("print", help="print a scenario in canonical form")
    pr.add_argument("target")
    return ap


def main(argv: Optional[List[str]] = None) -> int:
    args = _build_parser().parse_args(argv)
    if args.command == "corpus":
        for stem, name in corpus_listing():
            print(f"{stem}\t{name}")
        return EXIT_OK
    try:
        source, text = resolve(args.target)
    except (FileNotFoundError, UnicodeDecodeError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_PARSE
    if args.command == "print":
        res = parse_scenario(text)
        if not res.ok:
            for d in res.diagnostics:
                print(f"{source}:{d}", file=sys.stderr)
            return EXIT_PARSE
        sys.stdout.write(print_scenario(res.scenario))
        return EXIT_OK
    if args.trials < 0:
        print("error: --trials must be nonnegative", file=sys.stderr)
        return EXIT_PARSE
    opts = RunOptions(seed=args.seed, trials=args.trials, strict_hst=args.strict_hst)
    code, report, lines = cmd_check(text, opts, source)
    stream = sys.stdout if report is not None else sys.stderr
    for line in lines:
        print(line, file=stream)
    if report is not None and args.json:
        payload = json.dumps(report.to_json(), indent=2, sort_keys=True) + "\n"
        if args.json == "-":
            sys.stdout.write(payload)
        else:
            Path(args.json).write_text(payload, encoding="utf-8")
    return code


if __name__ == "__main__":
    sys.exit(main())
