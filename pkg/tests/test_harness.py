import csv
import json
import math
from importlib import resources

import jsonschema
import pytest

from steklov.errors import ConvergenceError, DomainError
from steklov.fem2d.mesh import DomainSpec
from steklov.harness import cli
from steklov.harness import report as rep
from steklov.harness.verify import load_spec, observed_order, richardson, verify

DISK = {
    "name": "small_disk",
    "geometry": {"type": "disk", "R": 1.0},
    "ambient": {"model": "euclidean", "curvature": 0.0},
    "comparison": {"kappa": 0.0, "K": 0.0},
    "mesh": {"h": 0.2},
}


def write(path, obj):
    path.write_text(json.dumps(obj) if not isinstance(obj, str) else obj)
    return path


@pytest.fixture(scope="module")
def small_report():
    return verify(DomainSpec.from_dict(DISK), refinements=2)


def report_schema():
    root = resources.files("steklov.harness").joinpath("schemas", "report.schema.json")
    return json.loads(root.read_text())


def test_richardson():
    est, err = richardson([1.04, 1.01, 1.0025])
    assert est == pytest.approx(1.0, abs=1e-12)
    assert err >= abs(1.0025 - 1.01) / 3 - 1e-15
    assert math.isnan(richardson([1.0])[1])
    assert observed_order([1.04, 1.01, 1.0025]) == pytest.approx(2.0)


def test_load_spec_validates(tmp_path):
    spec = load_spec(write(tmp_path / "d.json", DISK))
    assert spec.geometry["R"] == 1.0 and spec.name == "small_disk"
    bad = dict(DISK, geometry={"type": "disk"})
    with pytest.raises(DomainError):
        load_spec(write(tmp_path / "bad.json", bad))
    with pytest.raises(DomainError):
        load_spec(write(tmp_path / "broken.json", "{not json"))
    with pytest.raises(DomainError):
        load_spec(write(tmp_path / "pos.json", dict(DISK, ambient={"model": "euclidean", "curvature": 1.0})))


def test_bundled_specs_validate():
    from conftest import corpus_paths

    paths = corpus_paths()
    assert len(paths) >= 10
    for p in paths:
        load_spec(p)


def test_report_json_roundtrip_and_schema(small_report, tmp_path):
    out = rep.emit_report(small_report, tmp_path / "r.json")
    d = json.loads(open(out).read())
    jsonschema.validate(d, report_schema())
    assert d["schema_version"] == "1"
    assert d == rep.report_to_dict(small_report)
    assert list(d)[:3] == ["schema_version", "name", "spec"]
    assert d["sigma1_fem"] == float(f"{small_report.sigma1_fem:.12g}")


def test_non_finite_become_null(small_report):
    d = rep.report_to_dict(small_report)
    assert d["observed_order"] is None  # two levels: no order estimate


def test_csv_header_and_row(small_report, tmp_path):
    out = rep.emit_report(small_report, tmp_path / "r.csv", "csv")
    rows = list(csv.reader(open(out)))
    assert tuple(rows[0]) == rep.CSV_HEADER
    assert rows[1][0] == "small_disk" and rows[1][-2] == "true"
    assert float(rows[1][1]) == pytest.approx(small_report.sigma1_fem, rel=1e-11)
    with pytest.raises(ValueError):
        rep.emit_report(small_report, tmp_path / "x", "xml")


def test_unwritable_path(small_report, tmp_path):
    with pytest.raises(OSError):
        rep.emit_report(small_report, tmp_path / "missing" / "r.json")


def test_verify_is_deterministic(tmp_path):
    spec = write(tmp_path / "d.json", DISK)
    a, b = tmp_path / "a.json", tmp_path / "b.json"
    assert cli.main(["verify", "--spec", str(spec), "--out", str(a), "--refinements", "2"]) == 0
    assert cli.main(["verify", "--spec", str(spec), "--out", str(b), "--refinements", "2", "--deterministic"]) == 0
    assert a.read_bytes() == b.read_bytes()


def test_parallel_assembly_agrees(tmp_path):
    spec = DomainSpec.from_dict(DISK)
    a = verify(spec, refinements=1)
    b = verify(spec, refinements=1, parallel=True)
    assert b.sigma1_fem == pytest.approx(a.sigma1_fem, rel=1e-12)


def test_cli_ball(capsys):
    assert cli.main(["ball", "--n", "2", "--kappa", "0", "--radius", "2"]) == 0
    out = capsys.readouterr().out.strip().splitlines()
    d = json.loads(out[-1])
    assert d["sigma1_ball"] == pytest.approx(0.5, rel=1e-10)
    assert cli.main(["ball", "--n", "2", "--kappa", "-1", "--radius", "1"]) == 0
    d = json.loads(capsys.readouterr().out.strip().splitlines()[-1])
    assert d["sigma1_ball"] == pytest.approx(0.850918, abs=1e-6)
    assert cli.main(["ball", "--n", "3", "--kappa", "0", "--radius", "1"]) == 0
    d = json.loads(capsys.readouterr().out.strip().splitlines()[-1])
    assert d["sigma1_via_GH"] == pytest.approx(1.0, rel=1e-9)
    assert cli.main(["ball", "--n", "2", "--kappa", "1", "--radius", "1"]) == 2
    assert cli.main(["ball", "--n", "1", "--kappa", "0", "--radius", "1"]) == 2


def test_cli_bound(capsys):
    cases = [("2", "-1", "-1", "7", 1.0), ("2", "0", "-1", "1", math.sinh(1) ** 2), ("4", "0", "-1", "1", math.sinh(1) ** 6)]
    for n, k, K, d, expected in cases:
        assert cli.main(["bound", "--n", n, "--kappa", k, "--K", K, "--d", d]) == 0
        got = json.loads(capsys.readouterr().out.strip().splitlines()[-1])["C"]
        assert got == pytest.approx(expected, rel=1e-11)
    assert cli.main(["bound", "--n", "2", "--kappa", "-1", "--K", "0", "--d", "1"]) == 2


def test_cli_argparse_errors_exit_2():
    with pytest.raises(SystemExit) as info:
        cli.main(["ball", "--n", "two"])
    assert info.value.code == 2


def test_cli_verify_invalid_spec(tmp_path):
    bad = write(tmp_path / "bad.json", dict(DISK, geometry={"type": "annulus", "r_in": 2.0, "r_out": 1.0}))
    assert cli.main(["verify", "--spec", str(bad), "--out", str(tmp_path / "o.json")]) == 2
    assert cli.main(["verify", "--spec", str(tmp_path / "nope.json"), "--out", str(tmp_path / "o.json")]) == 2


def test_cli_verify_violation_still_writes(tmp_path, monkeypatch, small_report):
    import dataclasses

    failing = dataclasses.replace(small_report, passed=False)
    monkeypatch.setattr(cli, "verify", lambda spec, **kw: failing)
    out = tmp_path / "o.json"
    assert cli.main(["verify", "--spec", str(write(tmp_path / "d.json", DISK)), "--out", str(out)]) == 1
    assert json.loads(out.read_text())["pass"] is False


def test_cli_verify_solver_failure(tmp_path, monkeypatch):
    def boom(spec, **kw):
        raise ConvergenceError("no luck", residual=1.0)

    monkeypatch.setattr(cli, "verify", boom)
    assert cli.main(["verify", "--spec", str(write(tmp_path / "d.json", DISK)), "--out", str(tmp_path / "o.json")]) == 3


def test_cli_corpus_empty_dir(tmp_path):
    assert cli.main(["corpus", "--dir", str(tmp_path), "--csv", str(tmp_path / "c.csv")]) == 2


def test_cli_corpus_isolates_bad_rows(tmp_path):
    d = tmp_path / "corpus"
    d.mkdir()
    write(d / "a_disk.json", DISK)
    write(d / "b_ellipse.json", dict(DISK, name="b_ellipse", geometry={"type": "ellipse", "a": 1.2, "b": 0.8}))
    write(d / "c_corrupt.json", '{"geometry": {"type": "disk", "R": ')
    out = tmp_path / "c.csv"
    assert cli.main(["corpus", "--dir", str(d), "--csv", str(out), "--refinements", "2"]) == 1
    rows = list(csv.DictReader(open(out)))
    assert [r["name"] for r in rows] == ["small_disk", "b_ellipse", "c_corrupt"]
    assert rows[0]["pass"] == "true" and rows[1]["pass"] == "true"
    assert rows[2]["pass"] == "false" and "DomainError" in rows[2]["error"]


def test_cli_corpus_parallel_matches_serial(tmp_path):
    d = tmp_path / "corpus"
    d.mkdir()
    write(d / "a_disk.json", DISK)
    write(d / "b_ellipse.json", dict(DISK, name="b_ellipse", geometry={"type": "ellipse", "a": 1.2, "b": 0.8}))
    s, p = tmp_path / "s.csv", tmp_path / "p.csv"
    assert cli.main(["corpus", "--dir", str(d), "--csv", str(s), "--refinements", "1"]) == 0
    assert cli.main(["corpus", "--dir", str(d), "--csv", str(p), "--refinements", "1", "--parallel", "--workers", "2"]) == 0
    assert s.read_text() == p.read_text()


def test_cli_mesh_svg(tmp_path):
    spec = write(tmp_path / "d.json", DISK)
    out = tmp_path / "m.svg"
    assert cli.main(["mesh", "--spec", str(spec), "--svg", str(out)]) == 0
    text = out.read_text()
    assert text.startswith("<svg") and text.count("<polygon") > 10
    assert cli.main(["mesh", "--spec", str(spec), "--svg", str(out), "--eigenfunction", "1"]) == 0
    assert "rgb(" in out.read_text()


def test_verify_examples(corpus_reports):
    disk = corpus_reports["euc_disk"]
    assert disk.passed and disk.ratio == pytest.approx(1.0, abs=1e-2)
    ell = corpus_reports["euc_ellipse"]
    assert ell.passed and ell.sigma1_fem < ell.sigma1_star
    assert ell.sigma1_star == pytest.approx(1.0, rel=1e-3)
    mix = corpus_reports["mix_disk"]
    assert mix.passed and mix.diameter == pytest.approx(2.0, abs=1e-3)
    assert mix.constant_C == pytest.approx((math.sinh(mix.diameter) / mix.diameter) ** 2, rel=1e-12)


def test_verify_chain_examples(corpus_reports):
    disk = corpus_reports["euc_disk"].chain
    for q in (disk.q41, disk.q42, disk.q43):
        assert q == pytest.approx(1.0, rel=1e-3)
    ell = corpus_reports["euc_ellipse"]
    assert ell.chain.q41 <= ell.chain.q42 <= ell.chain.q43
    hyp = corpus_reports["mix_disk"].chain
    assert hyp.q42 <= hyp.q43 * (1 + 1e-3)


def test_annulus_ratio_is_recorded(corpus_reports):
    ann = corpus_reports["euc_annulus"]
    assert ann.passed and 0 < ann.ratio < 1
