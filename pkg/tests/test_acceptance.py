"""Acceptance criteria, one test each; a PASS/FAIL line per criterion is printed at the end of the run."""
from __future__ import annotations

import json
import os
import subprocess
import sys
import time
from contextlib import contextmanager

import oracles
from conftest import FIXTURES

from koszulkit.cdg import build_cdg_dual
from koszulkit.cli import main
from koszulkit.corpus import corpus, exterior, get, symmetric
from koszulkit.linalg import Field
from koszulkit.nonhomog import verify_self_consistency
from koszulkit.pbw import extract_nonhomog, pbw_reconstruct, roundtrip_duality
from koszulkit.quadratic import (
    build_quadratic_slice,
    check_koszul_distributive,
    check_koszul_tor,
    double_dual_roundtrip,
    quadratic_dual,
    relation_intersections,
    tor_table,
)
from koszulkit.twisted import (
    bimodule_resolution,
    build_two_sided,
    chevalley_eilenberg,
    conversion_bimodule,
    frobenius_check,
    nonhomog_koszul_complex,
)

QQ = Field.parse("q")
RESULTS: dict = {}

# wall-clock budgets in seconds
BUDGET = {1: 1.0, 2: 30.0, 3: 30.0, 4: 60.0, 5: 60.0, 6: 60.0, 7: 30.0, 8: 60.0, 9: 120.0, 10: 600.0, 11: 600.0}
TITLES = {
    1: "quadratic duality round trip on the corpus (budget per entry)",
    2: "Sym/Lambda duality and Koszulity of Sym(Q^3)",
    3: "diagonal Tor law for Lambda(Q^2)",
    4: "PBW for the Weyl algebra A_1",
    5: "PBW for U(sl2) and the fat-point algebroid",
    6: "negative control: fake Jacobi",
    7: "Chevalley-Eilenberg complex of sl2",
    8: "bimodule resolution of the diagonal",
    9: "Frobenius check and conversion bimodule",
    10: "fuzz agreement of the Koszulity checkers",
    11: "determinism across runs and thread counts",
}


@contextmanager
def criterion(k: int):
    start = time.perf_counter()
    ok = False
    try:
        yield
        ok = True
    finally:
        elapsed = time.perf_counter() - start
        budget = BUDGET[k]
        if k == 1:
            elapsed = max(RESULTS.get("per_entry", [0.0]))
        within = elapsed <= budget
        verdict = "PASS" if ok and within else "FAIL"
        line = f"criterion {k:2d} {verdict}: {TITLES[k]} ({elapsed:.2f} s, budget {budget:.0f} s)"
        RESULTS[k] = line
        print(line)
    assert within, f"criterion {k} exceeded its budget: {elapsed:.2f} s > {budget} s"


def test_criterion_01_double_dual():
    times = []
    RESULTS["per_entry"] = times
    with criterion(1):
        for e in corpus():
            t = time.perf_counter()
            rt = double_dual_roundtrip(e.quadratic)
            times.append(time.perf_counter() - t)
            assert rt.iso.is_isomorphism, e.name
            assert rt.pulled_back == e.quadratic.rel, e.name


def test_criterion_02_sym_lambda():
    with criterion(2):
        Q = symmetric(QQ, 3)
        B = build_quadratic_slice(quadratic_dual(Q), 6)
        assert B.dims() == [oracles.squarefree(3, n) for n in range(7)]
        assert B.dims()[4:] == [0, 0, 0]
        dist = check_koszul_distributive(Q, 6)
        tor = check_koszul_tor(Q, 6)
        assert dist.ok and tor.ok


def test_criterion_03_diagonal_tor():
    with criterion(3):
        Q = exterior(QQ, 2)
        table = tor_table(Q, 5)
        assert all(v == 0 for (i, j), v in table.items() if i != j)
        assert [table[(n, n)] for n in range(6)] == [oracles.monomials(2, n) for n in range(6)]
        assert [relation_intersections(Q, n).dim for n in range(2, 6)] == [table[(n, n)] for n in range(2, 6)]


def test_criterion_04_weyl_pbw():
    with criterion(4):
        P = get("weyl1").nonhomog
        res = pbw_reconstruct(build_cdg_dual(P, 6), 6)
        assert res.filtration_dims == [(n + 1) * (n + 2) // 2 for n in range(7)]
        assert res.filtration_dims == oracles.weyl_rewriting().filtered_dims(6)
        assert res.slice.dims() == res.filtration_dims
        assert all(res.t_injective[n] for n in range(1, 7)) and res.ok
        # generators x = e_0, d = e_1; d (x) x - x (x) d in row-major coordinates
        _, h = extract_nonhomog(res, P).extended([0, -1, 1, 0])
        assert h == [QQ(-1)]


def test_criterion_05_enveloping_and_fat_point():
    with criterion(5):
        res = pbw_reconstruct(build_cdg_dual(get("sl2").nonhomog, 5), 5)
        assert res.ok
        assert res.filtration_dims == oracles.cumulative([oracles.monomials(3, n) for n in range(6)])
        assert res.filtration_dims == oracles.enveloping_rewriting(3, oracles.SL2).filtered_dims(5)
        rt = roundtrip_duality(get("fat_point").nonhomog, 4)
        assert rt.equal and rt.pbw.ok
        assert rt.pbw.filtration_dims == oracles.fat_point_rewriting(2).filtered_dims(4)


def test_criterion_06_negative_control(capsys):
    with criterion(6):
        P = get("fake_jacobi").nonhomog
        rep = verify_self_consistency(P)
        assert rep.first_failure() == "j"
        assert rep.witnesses["j"]["lhs"] != rep.witnesses["j"]["rhs"]
        C = build_cdg_dual(P, 3, force=True)
        axioms = C.check_axioms()
        res = pbw_reconstruct(C, 3, force=True)
        deficit = [n for n in range(1, 4) if not res.gr_iso[n]]
        assert not axioms.ok or deficit
        assert not axioms.results["d2_curvature"] and deficit == [3]
        code = main(["nonhomog-check", str(FIXTURES / "fake_jacobi.kz")])
        capsys.readouterr()
        assert code == 2


def test_criterion_07_chevalley_eilenberg():
    with criterion(7):
        C = build_cdg_dual(get("sl2").nonhomog, 4)
        K = chevalley_eilenberg(C)
        assert not K.square_zero_failures()
        assert [K.homology_dim(n, 0) for n in range(4)] == oracles.ce_cohomology(3, oracles.SL2) == [1, 0, 0, 1]
        W = nonhomog_koszul_complex(build_two_sided(get("sl2").nonhomog, 4, 4), 4)
        assert W.exact, W.nonzero


def test_criterion_08_bimodule_resolution():
    with criterion(8):
        for name in ("weyl1", "lie2"):
            W = bimodule_resolution(build_two_sided(get(name).nonhomog, 4, 4), 4)
            assert W.exact, (name, W.nonzero)
            assert not W.complex.square_zero_failures()


def test_criterion_09_frobenius_and_conversion():
    with criterion(9):
        S = build_quadratic_slice(quadratic_dual(symmetric(QQ, 3)), 4)
        assert frobenius_check(S, 3).ok
        D = build_two_sided(get("lie2").nonhomog, 3, 3, opposite=True)
        r = conversion_bimodule(D, 3)
        assert r.acyclic_below_top and r.coherent
        assert r.left_iso and all(r.left_iso.values())
        assert r.right_iso and all(r.right_iso.values())
        # abelian2 has h = 0 and graded-commutative B
        D0 = build_two_sided(get("abelian2").nonhomog, 3, 3, opposite=True)
        assert conversion_bimodule(D0, 3).opposite_iso is True
        assert r.opposite_iso is True


def test_criterion_10_fuzz(capsys):
    with criterion(10):
        code = main(["fuzz", "--count", "200", "--degree", "4", "--field", "fp:5", "--seed", "0",
                     "--threads", "4", "--json"])
        rep = json.loads(capsys.readouterr().out)
        assert code == 0
        cases = rep["tables"]["cases"]
        assert len(cases) == 200
        assert all(c["dim"] <= 3 and c["base"] in (1, 2) for c in cases)
        assert rep["verdicts"]["disagreements"] == 0
        assert all(c["distributive"] == c["tor"] == c["first"] == c["second"] for c in cases)


DRIVER = """
import sys, glob, io, contextlib
from koszulkit.cli import main
cmds = [["check-quadratic", "--degree", "3"], ["koszul", "--degree", "4"], ["nonhomog-check"],
        ["cdg-dual", "--degree", "3"], ["pbw", "--degree", "2"], ["complexes", "--which", "first", "--budget", "3"],
        ["frobenius", "--top", "2", "--dual"]]
for path in sorted(glob.glob(sys.argv[1] + "/*.kz")):
    for c in cmds:
        for fmt in ([], ["--json"]):
            out, err = io.StringIO(), io.StringIO()
            with contextlib.redirect_stdout(out), contextlib.redirect_stderr(err):
                code = main(c[:1] + [path] + c[1:] + fmt)
            sys.stdout.write(f"== {path} {' '.join(c + fmt)} -> {code}\\n{out.getvalue()}{err.getvalue()}")
code = main(["fuzz", "--count", "40", "--json"])
"""


def test_criterion_11_determinism():
    with criterion(11):
        outputs = []
        for threads in ("1", "4"):
            for _ in range(3):
                env = dict(os.environ, KOSZULKIT_THREADS=threads)
                r = subprocess.run([sys.executable, "-c", DRIVER, str(FIXTURES)], capture_output=True, env=env, check=False)
                assert r.returncode == 0, r.stderr.decode()
                outputs.append(r.stdout)
        assert len(outputs[0]) > 0
        assert all(o == outputs[0] for o in outputs)
