import json
import shutil
import subprocess
import sys

import pytest

from adbundle import config, formats
from adbundle.cli import main
from adbundle.grp import cyclic_group
from adbundle.hopf import trivial_bundle_hopf
from adbundle.numfield import base_rationals
from adbundle.suite import run_suite

from conftest import CORPUS, FIXTURES

FIELDS = CORPUS / "fields"


def run(argv, capsys):
    code = main([str(a) for a in argv])
    out, err = capsys.readouterr()
    return code, out, err


def test_grp_and_field_info(capsys):
    code, out, _ = run(["grp", "classes", CORPUS / "groups" / "s3.json"], capsys)
    assert code == 0 and "order 6, 3 classes" in out and "(1 2 3)" in out
    code, out, _ = run(["field", "info", FIELDS / "s3.json"], capsys)
    assert code == 0 and "degree 6" in out and "class sizes [1, 3, 2]" in out


def test_hopf_commands(tmp_path, capsys):
    dump = tmp_path / "z2.json"
    code, _, _ = run(["hopf", "trivial", CORPUS / "groups" / "z2.json", "-o", dump], capsys)
    assert code == 0
    doc = json.loads(dump.read_text())
    assert doc["basis_labels"] == ["d[0]", "d[1]"]
    assert list(doc) == ["basis_labels", "base", "unit", "mult", "comult", "counit", "antipode"]
    assert run(["hopf", "verify", dump], capsys)[0] == 0
    code, out, _ = run(["hopf", "cartier", 3, FIELDS / "q_omega.json"], capsys)
    assert code == 0 and json.loads(out)["n"] == 3


def test_corrupted_dump_exit_one(capsys):
    code, out, _ = run(["hopf", "verify", FIXTURES / "mutated_corpus" / "dumps" / "corrupted.json"],
                       capsys)
    assert code == 1 and "FAIL" in out


def test_adjoint_commands(capsys):
    code, out, _ = run(["adjoint", "build", FIELDS / "s3.json"], capsys)
    assert code == 0 and "3 points, dim 6" in out
    code, out, _ = run(["adjoint", "fiber", FIELDS / "q_zeta7.json"], capsys)
    assert code == 0 and "order 6" in out and "True" in out
    code, out, _ = run(["adjoint", "tower", FIELDS / "s3.json", "--mid", "level:1"], capsys)
    assert code == 0 and "(3, 2, 6)" in out and "pullback splitting: True" in out
    code, out, _ = run(["adjoint", "verify", FIELDS / "q_i.json", "--no-timings"], capsys)
    assert code == 0 and "0 failing cases" in out


def test_profinite_commands(capsys):
    code, out, _ = run(["profinite", "zhat", 4], capsys)
    assert code == 0 and "Z/24" in out
    code, out, _ = run(["profinite", "shift", 2, 3], capsys)
    assert code == 0 and "0 solutions" in out
    code, out, _ = run(["profinite", "tower", FIELDS / "s3.json", "--subfields",
                        "level:0;gen:0,1,0,0,0,0;gen:0,0,1,0,0,0"], capsys)
    assert code == 0 and "joins minimal: True" in out
    code, out, _ = run(["profinite", "trivial", CORPUS / "algebras" / "kkk.json"], capsys)
    assert code == 0 and "sections: 3" in out


def test_input_errors_exit_two(tmp_path, capsys):
    bad = tmp_path / "bad.json"
    bad.write_text("{")
    assert run(["field", "info", bad], capsys)[0] == 2
    assert run(["dump", "nonsense"], capsys)[0] == 2
    assert run(["field", "info", tmp_path / "missing.json"], capsys)[0] == 2
    red = tmp_path / "red.json"
    red.write_text(json.dumps({"tower": [{"label": "x", "minpoly": ["-1", "0", "1"]}]}))
    code, _, err = run(["field", "info", red], capsys)
    assert code == 2 and "reducible" in err


def test_bounds_flags(capsys):
    saved = config.DEFAULTS.degree_bound
    try:
        code, _, err = run(["--degree-bound", "4", "field", "info", FIELDS / "s3.json"], capsys)
        assert code == 2 and "bound" in err
    finally:
        config.DEFAULTS.degree_bound = saved


def test_env_override(monkeypatch):
    monkeypatch.setenv("ADBUNDLE_ORDER_BOUND", "77")
    assert config.Bounds.from_env().order_bound == 77


def test_dump_selectors(tmp_path, capsys):
    code, out, _ = run(["dump", "rationals"], capsys)
    assert code == 0 and json.loads(out)["degree"] == 1
    code, out, _ = run(["dump", f"trivial:{CORPUS / 'groups' / 'z2.json'}"], capsys)
    assert out == formats.dumps(formats.hopf_dump(trivial_bundle_hopf(cyclic_group(2),
                                                                         base_rationals())))


def test_q_i_adjoint_is_trivial_bundle_up_to_permutation(capsys):
    # the adjoint bundle of Q(i)/Q and Maps(Z/2, Q) have identical dumps once
    # the basis is permuted from (class indicator) to (point indicator)
    code, out, _ = run(["dump", f"adjoint:{FIELDS / 'q_i.json'}"], capsys)
    ad = json.loads(out)
    triv = formats.hopf_dump(trivial_bundle_hopf(cyclic_group(2), base_rationals()))
    perm = [p["rep"] for p in ad["points"]]
    h = ad["hopf"]
    assert perm == [0, 1]
    for key in ("mult", "comult", "counit", "antipode", "unit"):
        assert h[key] == triv[key], key


def test_suite_on_corpus_and_golden(capsys):
    code, out, _ = run(["suite", "run", CORPUS, "--no-timings"], capsys)
    assert code == 0, out
    assert "PASS  s3_kummer3 :: golden" in out and "PASS  cartier_3 :: golden" in out


def test_suite_golden_dir_override(tmp_path):
    g = tmp_path / "golden"
    shutil.copytree(CORPUS / "golden", g)
    (g / "cartier_3.json").write_text("{}\n")
    rep = run_suite(CORPUS, golden_dir=g)
    assert rep.exit_code == 1 and rep.failed_cases() == ["cartier_3"]


def test_mutated_fixture_fails_exactly_one_case():
    rep = run_suite(FIXTURES / "mutated_corpus")
    assert rep.exit_code == 1
    assert rep.failed_cases() == ["corrupted_hopf"]


def test_empty_directory_passes_with_warning(tmp_path):
    rep = run_suite(tmp_path)
    assert rep.exit_code == 0 and rep.results == [] and rep.warnings


def test_parse_error_in_corpus(tmp_path):
    shutil.copy(FIXTURES / "mutated_corpus" / "cartier_2.json", tmp_path)
    (tmp_path / "broken.json").write_text("[1, 2")
    rep = run_suite(tmp_path)
    assert rep.exit_code == 2
    assert any("broken" in e for e in rep.input_errors)
    assert all(r.ok for r in rep.results if r.case == "cartier_2")


def test_console_script_exit_code():
    exe = shutil.which("adbundle")
    cmd = [exe] if exe else [sys.executable, "-m", "adbundle.cli"]
    p = subprocess.run(cmd + ["suite", "run", str(FIXTURES / "mutated_corpus")],
                       capture_output=True, text=True)
    assert p.returncode == 1
    assert "FAIL  corrupted_hopf :: hopf_axioms" in p.stdout


@pytest.mark.parametrize("jobs", [1, 3])
def test_report_independent_of_jobs(jobs):
    base = run_suite(FIXTURES / "mutated_corpus").text(timings=False)
    assert run_suite(FIXTURES / "mutated_corpus", jobs=jobs).text(timings=False) == base
