import csv
import json

import numpy as np
import pytest

from probemetrics.cli import main, run_bounds, run_scatter, RunConfig
from probemetrics.errors import InvalidConfig


def read_rows(path):
    with open(path) as fh:
        assert fh.readline().rstrip("\n") == "# probe-metrics v1"
        return list(csv.DictReader(fh))


def test_scatter_csv_schema_and_summary(tmp_path, capsys):
    out = tmp_path / "scatter.csv"
    rc = main(["scatter", "--dims", "2x2", "--n", "200", "--seed", "42",
               "--spectrum", "sigma-z", "--out", str(out)])
    assert rc == 0
    summary = json.loads(capsys.readouterr().out)
    assert summary["count"] == 200
    assert summary["orderingViolations"] == 0
    rows = read_rows(out)
    assert len(rows) == 200
    assert set(rows[0]) == {"stateId", "familyTag", "lqu", "avsk", "variance",
                            "purityA", "purityB", "witnessEntangled"}
    for row in rows:
        assert float(row["avsk"]) >= float(row["lqu"]) - 1e-9
        assert float(row["avsk"]) <= 1.0 + 1e-9


def test_scatter_deterministic(tmp_path):
    a, b = tmp_path / "a.csv", tmp_path / "b.csv"
    main(["scatter", "--n", "100", "--seed", "7", "--out", str(a)])
    main(["scatter", "--n", "100", "--seed", "7", "--out", str(b)])
    assert a.read_bytes() == b.read_bytes()


def test_scatter_separable_mode_caps(tmp_path):
    out = tmp_path / "sep.csv"
    rc = main(["scatter", "--n", "300", "--seed", "3", "--separable", "3", "--out", str(out)])
    assert rc == 0
    for row in read_rows(out):
        assert float(row["avsk"]) <= 2 / 3 + 1e-9
        assert float(row["lqu"]) <= 0.5 + 1e-6
        assert row["witnessEntangled"] == "false"


def test_scatter_single_isotropic_state(tmp_path):
    out = tmp_path / "iso.csv"
    rc = main(["scatter", "--n", "1", "--seed", "1", "--family", "isotropic",
               "--param", "0.5", "--with-variance", "--out", str(out)])
    assert rc == 0
    row = read_rows(out)[0]
    expect = (2 - np.sqrt(3)) / 3
    assert abs(float(row["avsk"]) - expect) < 1e-8
    assert abs(float(row["lqu"]) - expect) < 1e-8


def test_state_json(capsys):
    rc = main(["state", "--family", "isotropic", "--param", "0.5",
               "--measure", "all", "--format", "json"])
    assert rc == 0
    data = json.loads(capsys.readouterr().out)
    expect = (2 - np.sqrt(3)) / 3
    assert abs(data["avsk"] - expect) < 1e-8
    assert abs(data["lqu"] - expect) < 1e-8
    assert data["variance"] < 1e-8
    assert data["familyTag"] == "isotropic"


def test_boundary_pure_schmidt_relation(tmp_path):
    out = tmp_path / "pure.csv"
    rc = main(["boundary", "--family", "pure-schmidt", "--steps", "40", "--out", str(out)])
    assert rc == 0
    rows = read_rows(out)
    assert len(rows) == 40
    for row in rows:
        lqu, avsk = float(row["lqu"]), float(row["avsk"])
        assert abs(avsk - (2 / 3) * (1 + lqu / 2)) < 1e-8


def test_boundary_isotropic_saturates(tmp_path):
    out = tmp_path / "iso.csv"
    main(["boundary", "--family", "isotropic", "--steps", "30", "--out", str(out)])
    for row in read_rows(out):
        assert abs(float(row["avsk"]) - float(row["lqu"])) < 1e-8


def test_boundary_pqc_constant(tmp_path):
    out = tmp_path / "pqc.csv"
    main(["boundary", "--family", "family_pqc", "--steps", "30", "--out", str(out)])
    for row in read_rows(out):
        assert abs(float(row["avsk"]) - 2 / 3) < 1e-9


def test_bounds_roundtrip(tmp_path):
    scatter = tmp_path / "s.csv"
    out = tmp_path / "b.csv"
    main(["scatter", "--n", "50", "--seed", "11", "--with-variance", "--out", str(scatter)])
    rc = main(["bounds", "--in", str(scatter), "--out", str(out)])
    assert rc == 0
    for row in read_rows(out):
        lo, hi, lqu = float(row["lquLower"]), float(row["lquUpper"]), float(row["lqu"])
        assert lo - 1e-6 <= lqu <= hi + 1e-6


def test_bounds_requires_variance(tmp_path):
    scatter = tmp_path / "s.csv"
    main(["scatter", "--n", "5", "--seed", "11", "--out", str(scatter)])
    rc = main(["bounds", "--in", str(scatter), "--out", str(tmp_path / "b.csv")])
    assert rc == 2


def test_bounds_missing_file_is_io_error(tmp_path):
    rc = main(["bounds", "--in", str(tmp_path / "none.csv"), "--out", str(tmp_path / "b.csv")])
    assert rc == 3


def test_invalid_dims_exit_code():
    rc = main(["scatter", "--dims", "1x2", "--n", "5", "--out", "/tmp/_unused.csv"])
    assert rc == 2
    rc = main(["scatter", "--dims", "3x2", "--n", "5", "--spectrum", "sigma-z",
               "--out", "/tmp/_unused.csv"])
    assert rc == 2


def test_explicit_spectrum_length_check():
    with pytest.raises(InvalidConfig):
        RunConfig(command="scatter", dim_a=2, dim_b=2, explicit_spectrum=(1.0, 0.0, -1.0))


def test_verify_suite_filter_and_fault_injection(capsys):
    rc = main(["verify", "--suite", "linalg", "--seed", "5"])
    assert rc == 0
    text = capsys.readouterr().out
    assert "linalg.sqrtm_squares_back" in text
    assert "measures." not in text

    rc = main(["verify", "--suite", "measures", "--seed", "5", "--inject-fault", "negate-prefactor"])
    assert rc == 1
    text = capsys.readouterr().out
    assert "FAIL measures.ordering_avsk_ge_lqu" in text


def test_verify_json_format(capsys):
    rc = main(["verify", "--suite", "linalg", "--format", "json"])
    assert rc == 0
    records = json.loads(capsys.readouterr().out)
    assert all(r["passed"] for r in records)


def test_scatter_workers_match_serial(tmp_path):
    a, b = tmp_path / "a.csv", tmp_path / "b.csv"
    main(["scatter", "--n", "64", "--seed", "13", "--out", str(a)])
    main(["scatter", "--n", "64", "--seed", "13", "--workers", "2", "--out", str(b)])
    assert a.read_bytes() == b.read_bytes()
