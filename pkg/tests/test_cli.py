import json
import os

import pytest

from scatter import dp2
from scatter.cli import EXIT_CHECK, EXIT_CONFIG, EXIT_OK, main

GOLDEN = os.path.join(os.path.dirname(os.path.abspath(__file__)), "golden")


def _run(args, capsys):
    code = main(args)
    out = capsys.readouterr()
    return code, out.out, out.err


@pytest.mark.parametrize(
    "surface,order,golden",
    [("ks-basic", 4, "ks-basic-order4.json"), ("dP5", 3, "dP5-order3.json")],
)
def test_consistent_golden(surface, order, golden, tmp_path, capsys):
    out = tmp_path / "d.json"
    code, _, _ = _run(["consistent", "--surface", surface, "--order", str(order), "--out", str(out)], capsys)
    assert code == EXIT_OK
    with open(os.path.join(GOLDEN, golden)) as fh:
        assert out.read_text() == fh.read()


def test_ks_golden_has_three_outgoing_walls():
    with open(os.path.join(GOLDEN, "ks-basic-order4.json")) as fh:
        doc = json.load(fh)
    kinds = [r["kind"] for r in doc["rays"]]
    assert kinds.count("outgoing") == 3 and kinds.count("incoming") == 2


@pytest.mark.parametrize("surface,order", [("dP5", 3), ("dP4", 5)])
def test_threads_byte_identical(surface, order, tmp_path, capsys):
    a, b = tmp_path / "a.json", tmp_path / "b.json"
    main(["consistent", "--surface", surface, "--order", str(order), "--out", str(a)])
    main(["consistent", "--surface", surface, "--order", str(order), "--threads", "4", "--out", str(b)])
    assert a.read_bytes() == b.read_bytes()


@pytest.mark.parametrize(
    "args",
    [
        ["consistent", "--surface", "nowhere", "--order", "3"],
        ["consistent", "--surface", "dP5", "--order", "0"],
        ["consistent", "--surface", "dP5", "--order", "3", "--threads", "0"],
        ["theta", "--surface", "dP5", "--pairs", "1,9"],
        ["verify", "--orbits", "/no/such/file.json"],
        ["no-such-command"],
    ],
)
def test_config_errors(args, capsys):
    code, _, _ = _run(args, capsys)
    assert code == EXIT_CONFIG


def test_cache_dir(tmp_path, monkeypatch, capsys):
    monkeypatch.setenv("SCATTER_CACHE_DIR", str(tmp_path / "cache"))
    a, b = tmp_path / "a.json", tmp_path / "b.json"
    assert main(["consistent", "--surface", "dP4", "--order", "5", "--out", str(a)]) == EXIT_OK
    assert (tmp_path / "cache" / "dP4-order5.json").exists()
    assert main(["consistent", "--surface", "dP4", "--order", "5", "--out", str(b)]) == EXIT_OK
    assert a.read_bytes() == b.read_bytes()
    assert main(["theta", "--surface", "dP4", "--out", str(tmp_path / "t.json")]) == EXIT_OK


def test_theta_and_latex(tmp_path, capsys):
    out, tex = tmp_path / "r.json", tmp_path / "r.tex"
    code, _, _ = _run(["theta", "--surface", "dP5", "--out", str(out), "--latex", str(tex)], capsys)
    assert code == EXIT_OK
    doc = json.loads(out.read_text())
    assert [r["lhs"] for r in doc["relations"]] == [
        ["theta1", "theta3"], ["theta2", "theta4"], ["theta3", "theta5"], ["theta4", "theta1"], ["theta5", "theta2"],
    ]
    text = tex.read_text()
    assert "\\vartheta_{1} \\vartheta_{3} = z^{H-E1-E2}\\vartheta_{2} + z^{2H-E1-E2-E3-E4}" in text
    assert text.count("\\\\") == 6


def test_theta_single_pair(capsys):
    code, out, _ = _run(["theta", "--surface", "dP4", "--pairs", "2,4"], capsys)
    assert code == EXIT_OK
    (rel,) = json.loads(out)["relations"]
    assert rel["lhs"] == ["theta2", "theta4"]


def test_dp2_family_and_jacobian(tmp_path, capsys):
    fam = tmp_path / "family.json"
    code, _, _ = _run(["dp2-family", "--check-b-values", "--out", str(fam)], capsys)
    assert code == EXIT_OK
    doc = json.loads(fam.read_text())
    assert doc["bValues"]["values"]["B3(C)"] == 6561
    assert doc["family"]["differences"] == [{"monomial": "B1E8^2", "derived": "1", "printed": "-1"}]
    code, out, _ = _run(["jacobian", "--family", str(fam), "--potential", "tC+tL"], capsys)
    assert code == EXIT_OK
    assert json.loads(out)["dimension"] == 10


def test_jacobian_torus_and_ideal(capsys):
    code, out, _ = _run(["jacobian", "--torus", "x + y + 1/(x*y)", "--vars", "x,y"], capsys)
    assert json.loads(out)["dimension"] == 3
    code, out, _ = _run(["jacobian", "--ideal", "x^2;y^2", "--vars", "x,y"], capsys)
    assert json.loads(out)["dimension"] == 4


def test_verify_all_pass(capsys):
    code, out, _ = _run(["verify"], capsys)
    assert code == EXIT_OK
    assert out.count("PASS") == 4


def test_verify_b_values(capsys):
    code, out, _ = _run(["verify", "--only", "b-values"], capsys)
    assert code == EXIT_OK
    vals = json.loads(out.split(": ", 1)[1])
    assert sorted(vals.values()) == [27, 27, 81, 81, 459, 459, 6561, 6561]


def _fixture():
    return json.loads((dp2.resources.files("scatter.data") / "dp2_orbits.json").read_text())


def test_verify_tampered_orbits(tmp_path, capsys):
    doc = _fixture()
    doc["N"]["L"]["1"][0][0] += 1
    path = tmp_path / "bad.json"
    path.write_text(json.dumps(doc))
    code, out, _ = _run(["verify", "--orbits", str(path)], capsys)
    assert code == EXIT_CHECK
    assert "FAIL b-values" in out
    # the override does not leak into later runs
    assert dp2.b_values()["B1(L)"] == 27


def test_verify_tampered_family(tmp_path, capsys):
    doc = _fixture()
    doc["familyDeviations"] = []
    path = tmp_path / "bad.json"
    path.write_text(json.dumps(doc))
    code, out, _ = _run(["verify", "--only", "family", "--orbits", str(path)], capsys)
    assert code == EXIT_CHECK
    assert "FAIL family" in out


def test_fixtures_list(capsys):
    code, out, _ = _run(["fixtures", "list"], capsys)
    assert code == EXIT_OK
    assert {"ks-basic", "dP5", "dP2"} <= set(out.split())
