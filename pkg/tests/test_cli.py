"""CLI contract: verbs, exit codes, diagnostics stream, byte-identity."""
import pathlib
import subprocess
import sys

import pytest

from minifun import parse_module, print_module
from minifun.engine import parse_script, run_script

CORPUS = pathlib.Path(__file__).parent / "corpus"


def run_cli(*args, stdin=None):
    return subprocess.run(
        [sys.executable, "-m", "minifun.cli", *args],
        capture_output=True,
        text=True,
        input=stdin,
        timeout=60,
    )


def test_script_produces_snoclist(tmp_path):
    r = run_cli("script", str(CORPUS / "snoclist.trafo"), "-i", str(CORPUS / "conslist.mf"))
    assert r.returncode == 0, r.stderr
    assert "data SnocList a = Lin | Snoc (SnocList a) a;" in r.stdout


def test_script_output_matches_library_bytes():
    r = run_cli("script", str(CORPUS / "block.trafo"), "-i", str(CORPUS / "imp.mf"))
    m = parse_module((CORPUS / "imp.mf").read_text())
    s = parse_script((CORPUS / "block.trafo").read_text())
    expected = print_module(run_script(m, s).module)
    assert r.returncode == 0
    assert r.stdout == expected


def test_apply_refusal_exit_one():
    r = run_cli("apply", "eliminate Maybe", "-i", str(CORPUS / "trans.mf"))
    assert r.returncode == 1
    assert r.stderr.startswith("StillReferenced:")
    assert r.stdout == ""


def test_passthrough_echoes_input():
    src = (CORPUS / "trans.mf").read_text()
    r = run_cli("apply", "eliminate Maybe", "-i", "-", "--passthrough", stdin=src)
    assert r.returncode == 1
    assert r.stdout == src


def test_check_ok():
    r = run_cli("check", "-i", str(CORPUS / "imp.mf"))
    assert r.returncode == 0
    assert "OK" in r.stderr


def test_check_bad_module_exit_two(tmp_path):
    bad = tmp_path / "bad.mf"
    bad.write_text("data T = |;")
    r = run_cli("check", "-i", str(bad))
    assert r.returncode == 2
    assert "SyntaxError" in r.stderr


def test_usage_error_exit_two():
    r = run_cli("apply")
    assert r.returncode == 2


def test_fmt_canonicalizes(tmp_path):
    messy = tmp_path / "messy.mf"
    messy.write_text("data   T  =  K   Int ;   f :: T ->Int; f (K x)=x;")
    r = run_cli("fmt", "-i", str(messy))
    assert r.returncode == 0
    assert "data T = K Int;" in r.stdout


def test_ops_listing():
    r = run_cli("ops", "--focus", "cons:Prog.Prog/2-3", "-i", str(CORPUS / "imp.mf"))
    assert r.returncode == 0
    lines = r.stdout.strip().splitlines()
    assert any(line.startswith("group ") for line in lines)
    assert any(line.startswith("compound-fold ") for line in lines)


def test_eval_expression():
    r = run_cli("eval", "-e", "hd sample", "-i", str(CORPUS / "conslist.mf"))
    assert r.returncode == 0
    assert r.stdout.strip() == "1"


def test_eval_bottom_exit_one():
    r = run_cli("eval", "-e", "undefined", "-i", str(CORPUS / "conslist.mf"))
    assert r.returncode == 1
    assert "HitBottom" in r.stderr


def test_stdin_module():
    r = run_cli("fmt", "-i", "-", stdin="data A = K;")
    assert r.returncode == 0
    assert r.stdout == "data A = K;\n"


def test_output_file(tmp_path):
    out = tmp_path / "out.mf"
    r = run_cli("apply", "rename-type ConsList L", "-i", str(CORPUS / "conslist.mf"), "-o", str(out))
    assert r.returncode == 0
    assert "data L a" in out.read_text()
