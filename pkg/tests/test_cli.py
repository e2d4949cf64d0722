import json
import os

import pytest

from cayleyauto import cli, decision as dec, fa
from cayleyauto.presentations import GraphAutomaticPresentation, GroupWord, zn


@pytest.fixture
def zn1_path(tmp_path):
    path = str(tmp_path / "zn1.json")
    assert cli.main(["build", "zn", "-n", "1", "--out", path]) == 0
    return path


@pytest.fixture
def heis_path(tmp_path):
    path = str(tmp_path / "heis.json")
    assert cli.main(["build", "heisenberg", "--no-check", "--out", path]) == 0
    return path


def test_build_writes_loadable_presentation(tmp_path, capsys):
    zn1_path = str(tmp_path / "zn1.json")
    assert cli.main(["build", "zn", "-n", "1", "--out", zn1_path]) == 0
    out = capsys.readouterr().out
    assert "wrote" in out and "1 generators" in out
    P = GraphAutomaticPresentation.load(zn1_path)
    Q = zn(1)
    assert fa.language_equal(P.domain, Q.domain)
    for name in Q.generators:
        assert fa.language_equal(P.relation(name).dfa, Q.relation(name).dfa)


def test_build_is_deterministic(tmp_path):
    p1, p2 = str(tmp_path / "a.json"), str(tmp_path / "b.json")
    assert cli.main(["build", "abelian", "-n", "1", "--torsion", "2",
                     "--out", p1]) == 0
    assert cli.main(["build", "abelian", "-n", "1", "--torsion", "2",
                     "--out", p2]) == 0
    assert open(p1).read() == open(p2).read()


def test_build_rejects_invalid_parameters(tmp_path):
    out = str(tmp_path / "x.json")
    assert cli.main(["build", "zn", "-n", "0", "--out", out]) == 2
    assert not os.path.exists(out)
    assert cli.main(["build", "nope", "--out", out]) == 3
    assert cli.main(["build", "zn"]) == 3  # missing --out


def test_build_respects_max_states(tmp_path):
    out = str(tmp_path / "x.json")
    assert cli.main(["--max-states", "2", "build", "zn", "-n", "1",
                     "--out", out]) == 2


def test_eval_prints_representative(zn1_path, capsys):
    assert cli.main(["eval", zn1_path, "e1 e1 e1^-1"]) == 0
    got = capsys.readouterr().out.strip()
    lib = dec.canonical_rep(zn(1), GroupWord.parse("e1 e1 e1^-1"))
    assert got == " ".join(lib.names())


def test_equal_exit_codes(zn1_path, capsys):
    assert cli.main(["equal", zn1_path, "e1 e1^-1", ""]) == 0
    assert capsys.readouterr().out.strip() == "true"
    assert cli.main(["equal", zn1_path, "e1", "e1^-1"]) == 1
    assert capsys.readouterr().out.strip() == "false"


def test_relator_exit_codes(heis_path, capsys):
    assert cli.main(["relator", heis_path, "A C A^-1 C^-1 B^-1"]) == 0
    assert capsys.readouterr().out.strip() == "true"
    assert cli.main(["relator", heis_path, "A C A^-1 C^-1"]) == 1


def test_ball_sizes_and_listing(heis_path, zn1_path, capsys):
    assert cli.main(["ball", heis_path, "-r", "2"]) == 0
    assert capsys.readouterr().out.strip() == "sizes: 1 7 29"
    assert cli.main(["ball", zn1_path, "-r", "2", "--list"]) == 0
    lines = capsys.readouterr().out.splitlines()
    assert lines[0] == "sizes: 1 3 5"
    assert len(lines) == 6  # header plus five representatives


def test_conj_exit_codes(heis_path, capsys):
    assert cli.main(["conj", heis_path, "A", "A B"]) == 0
    assert capsys.readouterr().out.startswith("conjugate, witness:")
    assert cli.main(["conj", heis_path, "B", "B B"]) == 1
    assert capsys.readouterr().out.strip() == "not conjugate"


def test_check_command(zn1_path, capsys):
    assert cli.main(["check", zn1_path]) == 0
    out = capsys.readouterr().out
    assert "identity in domain: True" in out
    assert out.strip().endswith("ok")


def test_fo_decide_and_compile(zn1_path, tmp_path, capsys):
    assert cli.main(["fo", zn1_path, "A u (E v (Ee1(u,v)))"]) == 0
    assert capsys.readouterr().out.strip() == "true"
    assert cli.main(["fo", zn1_path, "E u (Ee1(u,u))"]) == 1
    out = str(tmp_path / "rel.txt")
    assert cli.main(["fo", zn1_path, "Ee1(u,v) | Ee1(v,u)",
                     "--compile", out, "--vars", "u,v"]) == 0
    text = open(out).read()
    assert text.startswith("relation 2 ")


def test_fo_formula_file_and_errors(zn1_path, tmp_path):
    f = tmp_path / "phi.txt"
    f.write_text("A u (E v (Ee1(u,v)))\n")
    assert cli.main(["fo", zn1_path, "--formula-file", str(f)]) == 0
    # parse error
    assert cli.main(["fo", zn1_path, "E u ("]) == 3
    # free variables cannot be decided
    assert cli.main(["fo", zn1_path, "Ee1(u,v)"]) == 3
    # no formula given
    assert cli.main(["fo", zn1_path]) == 3


def test_fo_on_structure(tmp_path, capsys):
    path = str(tmp_path / "pres.json")
    assert cli.main(["build", "fa-abelian", "-n", "1", "--out", path]) == 0
    capsys.readouterr()
    assert cli.main(["fo", path, "E z (A x (Mult(x,z,x)))"]) == 0


def test_export_writes_dot_files(zn1_path, tmp_path, capsys):
    outdir = str(tmp_path / "dots")
    assert cli.main(["export", zn1_path, "--dot", outdir]) == 0
    files = sorted(os.listdir(outdir))
    assert "domain.dot" in files and "e1.dot" in files
    assert any(f.startswith("left_") for f in files)
    first = {f: open(os.path.join(outdir, f)).read() for f in files}
    assert cli.main(["export", zn1_path, "--dot", outdir]) == 0
    again = {f: open(os.path.join(outdir, f)).read() for f in files}
    assert first == again


def test_missing_or_corrupt_files(tmp_path):
    assert cli.main(["eval", str(tmp_path / "missing.json"), "e1"]) == 2
    bad = tmp_path / "bad.json"
    bad.write_text("{not json")
    assert cli.main(["eval", str(bad), "e1"]) == 2
    notpres = tmp_path / "notpres.json"
    notpres.write_text(json.dumps({"hello": 1}))
    assert cli.main(["eval", str(notpres), "e1"]) == 2


def test_usage_errors(capsys):
    assert cli.main([]) == 3
    assert cli.main(["ball"]) == 3
    assert cli.main(["frobnicate"]) == 3


def test_build_check_catches_broken_presentation(tmp_path, zn1_path):
    # corrupt a stored relation so the default build-time check fails when
    # the file is used to extend a generator
    doc = json.load(open(zn1_path))
    out = str(tmp_path / "ext.json")
    assert cli.main(["build", "extend-gen", "--pres", zn1_path,
                     "--name", "g", "--word", "e1 e1", "--out", out]) == 0
    P = GraphAutomaticPresentation.load(out)
    assert set(P.generators) == {"e1", "g"}
