from __future__ import annotations

import json
import subprocess
import sys

import pytest
from conftest import FIXTURES

from koszulkit.cli import fuzz_one, main
from koszulkit.io import load


def run(capsys, *argv):
    code = main([str(a) for a in argv])
    out, err = capsys.readouterr()
    return code, out, err


def fx(name):
    return FIXTURES / f"{name}.kz"


def test_koszul_agreement(capsys):
    code, out, _ = run(capsys, "koszul", fx("sym_q2"), "--degree", 6)
    assert code == 0
    assert "KOSZUL up to 6; methods agree" in out


def test_not_koszul_exit_code(capsys):
    code, out, _ = run(capsys, "koszul", fx("non_koszul_xy"), "--json")
    assert code == 2
    rep = json.loads(out)
    assert rep["verdicts"] == {"distributive": False, "tor": False}


def test_check_quadratic(capsys):
    code, out, _ = run(capsys, "check-quadratic", fx("quiver_square"), "--json")
    assert code == 0
    assert json.loads(out)["tables"]["dims"] == [4, 4, 1, 0, 0]


def test_dualize_writes_loadable_file(capsys, tmp_path):
    target = tmp_path / "dual.kz"
    code, out, _ = run(capsys, "dualize", fx("sym_q3"), "--degree", 4, "-o", target)
    assert code == 0
    B = load(target)
    assert B.V.dim == 3 and B.relation_dim == 6


def test_nonhomog_check_negative_control(capsys):
    code, out, _ = run(capsys, "nonhomog-check", fx("fake_jacobi"), "--json")
    assert code == 2
    rep = json.loads(out)
    assert rep["verdicts"]["(j)"] is False
    assert "(j)" in rep["witnesses"]


def test_nonhomog_check_consistent(capsys):
    code, out, _ = run(capsys, "nonhomog-check", fx("sl2"))
    assert code == 0 and "self-consistent" in out


def test_cdg_dual_refuses_then_forces(capsys):
    code, out, _ = run(capsys, "cdg-dual", fx("fake_jacobi"))
    assert code == 2 and "precondition failed" in out
    code, out, _ = run(capsys, "cdg-dual", fx("fake_jacobi"), "--force", "--json")
    assert code == 2
    assert json.loads(out)["verdicts"]["d2_curvature"] is False


def test_cdg_dual_output_round_trips(capsys, tmp_path):
    target = tmp_path / "weyl.kz"
    code, _, _ = run(capsys, "cdg-dual", fx("weyl1"), "-o", target)
    assert code == 0
    code, out, _ = run(capsys, "pbw", target, "--degree", 4, "--json")
    assert code == 0
    assert json.loads(out)["tables"]["filtration_dims"] == [1, 3, 6, 10, 15]


def test_pbw_dims(capsys):
    code, out, _ = run(capsys, "pbw", fx("weyl1"), "--degree", 6)
    assert code == 0
    assert "1, 3, 6, 10, 15, 21, 28" in out


@pytest.mark.parametrize("which", ["first", "second", "dual"])
def test_koszul_complexes(capsys, which):
    code, out, _ = run(capsys, "complexes", fx("sym_q2"), "--which", which, "--budget", 3)
    assert code == 0


def test_complexes_on_non_koszul_ring(capsys):
    code, out, _ = run(capsys, "complexes", fx("non_koszul_xy"), "--which", "first", "--budget", 4)
    assert code == 2


@pytest.mark.parametrize("which", ["resolution", "nonhomog"])
def test_twisted_complexes(capsys, which):
    code, out, _ = run(capsys, "complexes", fx("lie2"), "--which", which, "--budget", 3, "--json")
    assert code == 0
    assert json.loads(out)["verdicts"]["exact"] is True


def test_nonhomog_complex_on_curved_ring(capsys):
    code, out, _ = run(capsys, "complexes", fx("weyl1"), "--which", "nonhomog")
    assert code == 2 and "precondition failed" in out


def test_frobenius(capsys):
    code, _, _ = run(capsys, "frobenius", fx("sym_q3"), "--top", 3, "--dual")
    assert code == 0
    code, _, _ = run(capsys, "frobenius", fx("sym_q3"), "--top", 3)
    assert code == 2


def test_convert(capsys):
    code, out, _ = run(capsys, "convert", fx("lie2"), "--budget", 3, "--json")
    assert code == 0
    rep = json.loads(out)
    assert rep["verdicts"]["opposite_iso"] is True


@pytest.mark.parametrize("argv", [
    ["koszul", "missing.kz"],
    ["koszul", str(FIXTURES / "sym_q2.kz"), "--method", "guess"],
    ["koszul", str(FIXTURES / "sym_q2.kz"), "--field", "fp:4"],
    ["koszul", str(FIXTURES / "sym_q2.kz"), "--degree", "-1"],
    ["fuzz", "--threads", "0"],
    ["nonhomog-check", str(FIXTURES / "sym_q2.kz")],
    ["no-such-command"],
])
def test_user_errors_exit_one(capsys, argv):
    code = main(argv)
    _, err = capsys.readouterr()
    assert code == 1
    assert err.startswith("koszulkit: error:")


def test_malformed_file(capsys, tmp_path):
    bad = tmp_path / "bad.kz"
    bad.write_text('{"format_version": 1, "kind": "quadratic", "oops": 1}')
    code, _, err = run(capsys, "koszul", bad)
    assert code == 1 and "oops" in err


def test_threads_env_validation(capsys, monkeypatch):
    monkeypatch.setenv("KOSZULKIT_THREADS", "many")
    assert main(["fuzz", "--count", "1"]) == 1


def test_fuzz_small(capsys):
    code, out, _ = run(capsys, "fuzz", "--count", 10, "--json")
    assert code == 0
    rep = json.loads(out)
    assert rep["verdicts"]["disagreements"] == 0
    assert len(rep["tables"]["cases"]) == 10


def test_fuzz_cases_depend_only_on_seed_and_index():
    assert fuzz_one(3, 7, "fp:5", 3) == fuzz_one(3, 7, "fp:5", 3)


def test_console_script_and_module_entry():
    out = subprocess.run([sys.executable, "-m", "koszulkit.cli", "--version"], capture_output=True, text=True, check=False)
    assert out.returncode == 0 and out.stdout.startswith("koszulkit")
