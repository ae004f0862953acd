import json

import numpy as np
import pytest

from kahler_bochner.cli import main
from kahler_bochner.report import RunReport


def run(argv, capsys):
    code = main([str(a) for a in argv])
    out, err = capsys.readouterr()
    return code, (json.loads(out) if out.strip() else None), err


# ---------------------------------------------------------------------------
# compute


def test_compute_flat(capsys):
    code, report, _ = run(["compute", "--chart", "flat", "--point", "0,0,0,0"], capsys)
    assert code == 0
    assert report["results"]["bochner_norm"] == 0.0
    assert report["schema_version"] == 1


def test_compute_fubini_study(capsys):
    code, report, _ = run(["compute", "--chart", "fubini-study", "--point", "0.1,0.2,-0.1,0.05"], capsys)
    res = report["results"]
    assert code == 0
    assert res["bochner_norm"] / res["curvature_norm"] <= 1e-6
    assert np.array(res["R"]).shape == (4, 4, 4, 4)
    assert set(res) >= {"g", "J", "R", "S", "tau", "B", "trace_identity_residual"}


def test_compute_wrong_point_count(capsys):
    code, report, err = run(["compute", "--chart", "flat", "--point", "0,0"], capsys)
    assert code == 2 and report is None
    assert "4 coordinates" in err


def test_compute_outside_domain(capsys):
    code, _, err = run(["compute", "--chart", "complex-hyperbolic", "--point", "1,0,0,0"], capsys)
    assert code == 3
    assert "domain" in err


def test_compute_unknown_chart(capsys):
    code, _, _ = run(["compute", "--chart", "torus", "--point", "0,0,0,0"], capsys)
    assert code == 2


def test_compute_chart_file_and_numeric_backend(capsys, data_dir):
    code, exact, _ = run(["compute", "--chart-file", data_dir / "random_poly.spec", "--point", "0.1,0,0,0.1"], capsys)
    assert code == 0
    code, numeric, _ = run(
        ["compute", "--chart", "random-poly", "--seed", 11, "--backend", "numeric", "--point", "0.1,0,0,0.1"], capsys
    )
    assert code == 0
    R1, R2 = np.array(exact["results"]["R"]), np.array(numeric["results"]["R"])
    assert np.abs(R1 - R2).max() <= 1e-4 * np.abs(R1).max()


def test_compute_writes_output_file(capsys, tmp_path):
    target = tmp_path / "out.json"
    code, report, _ = run(["compute", "--chart", "flat", "--point", "0,0,0,0", "--output", target], capsys)
    assert code == 0 and report is None
    assert json.loads(target.read_text())["command"] == "compute"


# ---------------------------------------------------------------------------
# check


def test_check_random_corpus(capsys):
    code, report, _ = run(["check", "--random", "--trials", 50, "--seed", 7, "--n", 2], capsys)
    assert code == 0
    worst = report["results"]["max_residuals"]
    assert worst["trace_identity"]["max"] <= 1e-8
    assert report["results"]["samples"] == 50


def test_check_flat_chart(capsys):
    code, report, _ = run(["check", "--chart", "flat"], capsys)
    assert code == 0
    assert all(v["max"] == 0.0 for v in report["results"]["max_residuals"].values())


def test_check_fubini_study_chart(capsys):
    code, _, _ = run(["check", "--chart", "fubini-study"], capsys)
    assert code == 0


def test_check_empty_corpus(capsys):
    code, _, _ = run(["check", "--random", "--trials", 0], capsys)
    assert code == 2


def test_check_parallel_matches_serial(capsys):
    _, serial, _ = run(["check", "--random", "--trials", 8, "--seed", 3], capsys)
    _, parallel, _ = run(["check", "--random", "--trials", 8, "--seed", 3, "--workers", 4], capsys)
    assert serial["results"] == parallel["results"]


def test_check_breach_exits_one(capsys, monkeypatch):
    import kahler_bochner.cli as cli

    monkeypatch.setitem(cli.SUITE_TOL, "idempotence", 1e-300)
    code, report, err = run(["check", "--random", "--trials", 3, "--seed", 1], capsys)
    assert code == 1
    assert report["status"] == "breach"
    assert "seed=" in err


# ---------------------------------------------------------------------------
# certify and constancy


@pytest.mark.parametrize(
    "name, code, verdict",
    [
        ("identity.map", 0, "Homothety"),
        ("j_map.map", 0, "Homothety"),
        ("stretch.map", 4, "NotPreserving"),
        ("flat.map", 5, "BochnerFlat"),
    ],
)
def test_certify_fixtures(capsys, data_dir, name, code, verdict):
    got, report, _ = run(["certify", data_dir / name], capsys)
    assert got == code
    assert report["results"]["report"]["verdict"] == verdict
    if verdict == "Homothety":
        assert report["results"]["report"]["mu"] == pytest.approx(1.0, abs=1e-9)


def test_certify_parse_error(capsys, tmp_path):
    bad = tmp_path / "bad.map"
    bad.write_text("chart product-cp1-cp1\npoint-p 0,0,0,0\npoint-q 0,0,0\nF\n" + "1 0 0 0\n" * 4)
    code, _, err = run(["certify", bad], capsys)
    assert code == 2
    assert "line 3" in err


def test_certify_singular_map(capsys, tmp_path):
    bad = tmp_path / "singular.map"
    bad.write_text("chart product-cp1-cp1\npoint-p 0,0,0,0\npoint-q 0,0,0,0\nF\n" + "0 0 0 0\n" * 4)
    code, _, _ = run(["certify", bad], capsys)
    assert code == 2


def test_certify_missing_file(capsys, tmp_path):
    code, _, _ = run(["certify", tmp_path / "nope.map"], capsys)
    assert code == 2


def test_constancy_swap(capsys, data_dir):
    code, report, _ = run(["constancy", data_dir / "swap_diagonal.map"], capsys)
    assert code == 0
    assert report["results"]["mu"] == pytest.approx([1.0, 1.0, 1.0], abs=1e-8)
    assert report["results"]["constant"] is True


def test_constancy_two_identity_blocks(capsys, data_dir):
    code, _, _ = run(["constancy", data_dir / "two_identity.map"], capsys)
    assert code == 0


def test_constancy_single_block(capsys, data_dir):
    code, _, _ = run(["constancy", data_dir / "identity.map"], capsys)
    assert code == 2


def test_constancy_reports_failing_block(capsys, data_dir, tmp_path):
    mixed = tmp_path / "mixed.map"
    mixed.write_text((data_dir / "identity.map").read_text() + "\n" + (data_dir / "flat.map").read_text())
    code, report, err = run(["constancy", mixed], capsys)
    assert code == 5
    assert report["results"]["failed_index"] == 1
    assert "BochnerFlat" in err


# ---------------------------------------------------------------------------
# reports


def test_output_is_deterministic_except_timestamp(capsys, data_dir):
    _, a, _ = run(["certify", data_dir / "j_map.map"], capsys)
    _, b, _ = run(["certify", data_dir / "j_map.map"], capsys)
    a.pop("timestamp"), b.pop("timestamp")
    assert json.dumps(a, sort_keys=True) == json.dumps(b, sort_keys=True)


def test_report_round_trip(capsys):
    main(["compute", "--chart", "product-cp1-cp1", "--point", "0.1,0.2,0.3,0.4"])
    text = capsys.readouterr().out
    report = RunReport.from_json(text)
    assert report.to_json() == text.strip()
    # doubles survive serialization bit for bit
    from kahler_bochner.bochner_core import bochner_at
    from kahler_bochner.kaehler_geometry import catalog_chart

    _, B = bochner_at(catalog_chart("product-cp1-cp1"), np.array([0.1, 0.2, 0.3, 0.4]))
    assert np.array_equal(np.array(report.results["B"]), B.B)


def test_report_nonfinite_becomes_null():
    r = RunReport("x", {}, {"v": float("inf"), "w": np.float64(1.5)}, "ok", 0)
    assert json.loads(r.to_json())["results"] == {"v": None, "w": 1.5}


def test_usage_errors(capsys):
    with pytest.raises(SystemExit) as info:
        main(["check"])
    assert info.value.code == 2
    with pytest.raises(SystemExit):
        main(["check", "--random", "--chart", "flat"])


@pytest.mark.parametrize(
    "argv",
    [
        ["compute", "--chart", "fubini-study", "--point", "0.1,0.2,-0.1,0.05"],
        ["check", "--random", "--trials", 3],
        ["certify", "DATA/identity.map"],
        ["certify", "DATA/stretch.map"],
        ["constancy", "DATA/swap_diagonal.map"],
    ],
)
def test_reports_match_schema(capsys, data_dir, argv):
    jsonschema = pytest.importorskip("jsonschema")
    schema = json.loads((data_dir.parents[1] / "schema" / "report.json").read_text())
    argv = [str(a).replace("DATA", str(data_dir)) for a in argv]
    _, report, _ = run(argv, capsys)
    jsonschema.validate(report, schema)
