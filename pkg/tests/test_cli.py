import json

import numpy as np
import pytest

from cantor_hfun.cli import EXIT_ERROR, EXIT_OK, EXIT_TOLERANCE, main


def test_steps_csv(capsys):
    assert main(["steps", "--level", "3", "--n", "16"]) == EXIT_OK
    lines = capsys.readouterr().out.splitlines()
    assert lines[0] == "level,mode,k,r_lo,r_hi,omega"
    assert len(lines) == 8
    assert lines[1].endswith("0.230817224613")


def test_steps_level_zero_has_no_rows(tmp_path, capsys):
    meta = tmp_path / "m.json"
    assert main(["steps", "--level", "0", "--metadata", str(meta)]) == EXIT_OK
    assert capsys.readouterr().out.strip() == "level,mode,k,r_lo,r_hi,omega"
    data = json.loads(meta.read_text())
    assert data["zero_threshold"] == 1.0 and data["one_threshold"] == 2.0


def test_curve_files(tmp_path):
    out, meta = tmp_path / "c.csv", tmp_path / "c.json"
    rc = main(["curve", "--level", "1", "--basepoint", "center", "--n", "16",
               "-o", str(out), "--metadata", str(meta)])
    assert rc == EXIT_OK
    rows = out.read_text().splitlines()
    assert rows[0] == "r,h,segment_type,slit_index"
    h = np.array([float(x.split(",")[1]) for x in rows[1:]])
    assert np.all(np.diff(h) >= -1e-6)
    data = json.loads(meta.read_text())
    assert data["continuity_error"] <= 1e-4 and data["warnings"] == []


def test_validate_passes_and_catches_tampering(capsys):
    assert main(["validate", "--level", "1", "--n", "16"]) == EXIT_OK
    out = capsys.readouterr().out
    assert "FAIL" not in out and "PASS slit-fit" in out
    assert main(["validate", "--level", "1", "--n", "16", "--tamper-radius", "1e-6"]) == EXIT_TOLERANCE
    assert "FAIL slit-fit" in capsys.readouterr().out


def test_premap_snapshot_roundtrip(tmp_path, capsys):
    snap = tmp_path / "s.json"
    assert main(["premap", "--level", "2", "--n", "16", "--snapshot", str(snap)]) == EXIT_OK
    assert json.loads(snap.read_text())["key"] == {"level": 2, "n": 16, "eps": 1e-14}
    capsys.readouterr()
    assert main(["steps", "--level", "2", "--n", "16", "--snapshot", str(snap)]) == EXIT_OK
    assert "0.377250" in capsys.readouterr().out
    assert main(["steps", "--level", "2", "--n", "32", "--snapshot", str(snap)]) == EXIT_ERROR
    err = json.loads(capsys.readouterr().err)
    assert err["error"] == "SnapshotError"


def test_premap_requires_snapshot(capsys):
    assert main(["premap", "--level", "1"]) == EXIT_ERROR
    assert json.loads(capsys.readouterr().err)["error"] == "ValueError"


def test_errors_are_json(capsys):
    assert main(["steps", "--level", "20"]) == EXIT_ERROR
    assert json.loads(capsys.readouterr().err)["error"] == "CapacityError"
    assert main(["curve", "--basepoint", "middle"]) == EXIT_ERROR
    assert main(["curve", "--eps", "0"]) == EXIT_ERROR


def test_center_needs_two_slits(capsys):
    assert main(["curve", "--level", "0", "--basepoint", "center"]) == EXIT_ERROR
    assert json.loads(capsys.readouterr().err)["error"] == "GeometryError"


def test_asymptotics(tmp_path, capsys):
    meta = tmp_path / "a.json"
    assert main(["asymptotics", "--levels", "1", "2", "--n", "16", "--metadata", str(meta)]) == EXIT_OK
    rows = capsys.readouterr().out.splitlines()
    assert rows[0] == "level,mode,C,beta,E" and len(rows) == 3
    data = json.loads(meta.read_text())
    assert abs(data["fits"]["1"]["beta"] - 0.5) < 1e-4
    assert data["growth_fit"]["levels"] == [0, 1, 2]
    assert data["growth_fit_reference"]["A"] == pytest.approx(0.900613, abs=5e-4)


def test_hidden_oracle(capsys):
    assert main(["oracle", "--level", "1", "--n", "16"]) == EXIT_OK
    data = json.loads(capsys.readouterr().out)
    assert np.allclose(data["sigma_pipeline"], data["sigma_oracle"], atol=1e-8)


def test_help_hides_oracle(capsys):
    with pytest.raises(SystemExit):
        main(["--help"])
    assert "oracle" not in capsys.readouterr().out
