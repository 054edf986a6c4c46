import json
import subprocess
import sys
from pathlib import Path

import pytest

from fsplit.cli import cmd_check, corpus_files, corpus_listing, main, resolve
from fsplit.runner import RunOptions

ROOT = Path(__file__).resolve().parents[1]


def run(*args):
    return main(list(args))


def test_node_exit_zero(capsys):
    assert run("check", str(ROOT / "corpus" / "node.fsl")) == 0
    out = capsys.readouterr().out
    assert "FAIL" not in out and "PASS" in out


def test_char2_exhibits_pathologies(tmp_path):
    out = tmp_path / "r.json"
    assert run("check", "char2-surface", "--json", str(out)) == 0
    report = json.loads(out.read_text())
    statuses = {e["label"]: e["status"] for e in report["expectations"]}
    assert statuses["H hst"] == "pass"
    exhibits = [k for k, v in statuses.items() if v == "pathology-exhibit"]
    assert "H main_theorem(phi, m)" in exhibits and "f iofa(eta, H, m)" in exhibits


def test_extend_fail_reports_not_extendable(tmp_path):
    out = tmp_path / "r.json"
    assert run("check", str(ROOT / "corpus" / "extend-fail.fsl"), "--json", str(out)) == 0
    report = json.loads(out.read_text())
    entry = next(e for e in report["expectations"] if e["label"] == "eta extends(phi)")
    assert entry["actual"] is False and "extend" in entry["details"]["error"]


def test_report_schema_and_determinism():
    text = corpus_files()["node"]
    _, a, _ = cmd_check(text, RunOptions(seed=4, trials=20))
    _, b, _ = cmd_check(text, RunOptions(seed=4, trials=20))
    ja, jb = a.to_json(timings=False), b.to_json(timings=False)
    assert ja == jb
    assert ja["schemaVersion"] == 1 and ja["inputHash"].startswith("sha256:")
    assert len(ja["expectations"]) == len(text.split("expect ")) - 1
    json.dumps(a.to_json())


def test_exit_codes(tmp_path):
    bad = tmp_path / "bad.fsl"
    bad.write_text('scenario "x" { p = 3; ring R = ; }')
    assert run("check", str(bad)) == 2
    failing = tmp_path / "fail.fsl"
    failing.write_text('scenario "x" { p = 3; ring R = k[x]; splitting s on R : e = 1, c = x^2; '
                       'expect s surjective false; }')
    assert run("check", str(failing)) == 1
    text = corpus_files()["node"].replace("contraction = (x, y);", "contraction = (x);")
    broken = tmp_path / "broken.fsl"
    broken.write_text(text)
    assert run("check", str(broken)) == 3
    assert run("check", "no-such-thing") == 2


def test_corpus_listing(capsys):
    assert run("corpus") == 0
    out = capsys.readouterr().out
    for name in ["node", "cusp-p2", "cusp-p7", "axes3", "char2-surface", "extend-fail", "twobranch-trace",
                 "wild-A'", "iofa-smooth", "iofa-cusp"]:
        assert name in out
    assert dict(corpus_listing())["wild-Aprime"] == "wild-A'"
    assert resolve("wild-A'")[0] == "corpus:wild-Aprime"


def test_print_is_canonical(capsys, tmp_path):
    messy = tmp_path / "m.fsl"
    messy.write_text('scenario "m" {p=3;ring R=k[x,y]/(y*x+ 4*x^2);}')
    assert run("print", str(messy)) == 0
    assert capsys.readouterr().out == 'scenario "m" {\n  p = 3;\n  ring R = k[x, y] / (x^2 + x*y);\n}\n'


def test_shipped_corpus_matches_embedded():
    for stem, text in corpus_files().items():
        assert (ROOT / "corpus" / f"{stem}.fsl").read_text() == text


def test_module_entry_point():
    proc = subprocess.run([sys.executable, "-m", "fsplit", "check", "cusp-p3", "--json", "-"],
                          capture_output=True, text=True, cwd=ROOT)
    assert proc.returncode == 0
    payload = proc.stdout[proc.stdout.index("{"):]
    assert json.loads(payload)["scenario"] == "cusp-p3"
