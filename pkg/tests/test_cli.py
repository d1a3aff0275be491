import json
import math
import subprocess
import sys

import pytest

from orthoforge import cli
from orthoforge.errors import ConvergenceError
from orthoforge.hexagon_trig import bavard_bound
from orthoforge.metric import boundary_component_lengths, surface_from_json, total_boundary_length
from orthoforge.spectrum import enumerate_orthogeodesics, orthosystole_report, spectrum_from_csv


def run(capsys, *argv):
    code = cli.run(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


def run_json(capsys, *argv):
    code, out, err = run(capsys, *argv)
    assert code == 0, err
    return json.loads(out)


def construct(capsys, tmp_path, *argv, name="s.json"):
    path = tmp_path / name
    code, _, err = run(capsys, "construct", *argv, "--out", str(path))
    assert code == 0, err
    return path


def test_bounds_example(capsys):
    rep = run_json(capsys, "bounds", "--signature", "1,1", "--total-length", "7.9017474")
    assert rep["bavard_bound"] == pytest.approx(1.3169579, abs=1e-7)
    assert rep["collar_width"] > 0
    assert "theorem_b_lower_bound" not in rep
    rep = run_json(capsys, "bounds", "--signature", "4,2", "--total-length", "12")
    assert rep["theorem_b_lower_bound"] > 0


def test_construct_and_spectrum_pipeline(capsys, tmp_path):
    path = construct(capsys, tmp_path, "--family", "equal", "--signature", "2,1", "--total-length", "12")
    rep = run_json(capsys, "spectrum", "--in", str(path))
    assert rep["osys"] == pytest.approx(bavard_bound(2, 1, 12.0), abs=1e-10)
    assert rep["osys"] == pytest.approx(2.3589108, abs=1e-7)
    assert rep["okiss"] == 9


def test_surface_file_round_trips_exactly(capsys, tmp_path):
    path = construct(capsys, tmp_path, "--family", "pants", "--params", "3,4,5")
    X = surface_from_json(json.loads(path.read_text()))
    assert boundary_component_lengths(X) == pytest.approx([3.0, 4.0, 5.0], abs=1e-9)
    path2 = construct(capsys, tmp_path, "--family", "pants", "--params", "3,4,5", name="t.json")
    assert path.read_text() == path2.read_text()


@pytest.mark.parametrize("argv,count", [
    (("--family", "bicolored", "--params", "2", "--boundary-length", "6"), 2),
    (("--family", "symmetric", "--params", "3,1", "--boundary-length", "6"), 3),
])
def test_construct_equal_boundary_families(capsys, tmp_path, argv, count):
    X = surface_from_json(json.loads(construct(capsys, tmp_path, *argv).read_text()))
    comp = boundary_component_lengths(X)
    assert len(comp) == count
    assert comp == pytest.approx([6.0] * count, abs=1e-9)


def test_spectrum_csv_round_trip(capsys, tmp_path):
    path = construct(capsys, tmp_path, "--family", "pants", "--params", "2,3,4")
    csv_path = tmp_path / "spec.csv"
    rep = run_json(capsys, "spectrum", "--in", str(path), "--cutoff", "6", "--csv", str(csv_path))
    X = surface_from_json(json.loads(path.read_text()))
    direct = enumerate_orthogeodesics(X, 6.0)
    back = spectrum_from_csv(csv_path.read_text())
    assert len(back) == rep["classes"] == len(direct.classes)
    assert [c.length for c in back] == pytest.approx([c.length for c in direct.classes], rel=1e-11)
    assert rep["lengths"] == pytest.approx([c.length for c in direct.classes], rel=1e-11)


def test_maximize_total_is_deterministic(capsys, tmp_path):
    path = construct(capsys, tmp_path, "--family", "equal", "--signature", "1,1", "--total-length", "3")
    argv = ("maximize", "--in", str(path), "--total-length", "6", "--starts", "3", "--seed", "7")
    code1, out1, _ = run(capsys, *argv)
    code2, out2, _ = run(capsys, *argv)
    assert code1 == code2 == 0
    assert out1 == out2
    rep = json.loads(out1)
    cert = rep["certificate"]
    assert set(cert) == {"osys", "okiss", "bound", "equal_lengths", "iterations"}
    assert cert["okiss"] == 3 and cert["equal_lengths"]
    assert cert["osys"] == pytest.approx(cert["bound"], abs=1e-9)
    X = surface_from_json(rep["surface"])
    assert total_boundary_length(X) == pytest.approx(6.0, abs=1e-10)


def test_maximize_fixed_boundaries_writes_surface(capsys, tmp_path):
    path = construct(capsys, tmp_path, "--family", "bicolored", "--params", "1", "--boundary-length", "4")
    out = tmp_path / "best.json"
    rep = run_json(capsys, "maximize", "--in", str(path), "--boundary-lengths", "6,6", "--starts", "2",
                   "--out", str(out))
    X = surface_from_json(json.loads(out.read_text()))
    assert boundary_component_lengths(X) == pytest.approx([6.0, 6.0], abs=1e-10)
    assert rep["certificate"]["okiss"] >= 2


def test_verify(capsys, tmp_path):
    path = construct(capsys, tmp_path, "--family", "equal", "--signature", "1,2", "--total-length", "8")
    rep = run_json(capsys, "verify", "--in", str(path))
    assert rep["okiss_maximal"] and rep["is_equal_lengths"] and rep["orthosystoles_fill"]
    assert rep["okiss"] >= rep["okiss_lower_bound"] == 2
    assert rep["total_length"] == pytest.approx(8.0)


def test_enumerate_with_formula(capsys):
    rep = run_json(capsys, "enumerate", "--signature", "1,1", "--compare-formula")
    assert rep["classes"] == 1
    cmp = rep["comparison"]
    assert cmp["enumerated"] == 1
    assert cmp["formula_value"] == "1/6"
    assert cmp["agree"] is False


def test_usage_errors(capsys):
    code, out, err = run(capsys, "bounds", "--signature", "1,1")
    assert code == 1 and out == ""
    body = json.loads(err)
    assert body["exit_code"] == 1 and body["error"] == "usage"
    assert run(capsys, "frobnicate")[0] == 1
    assert run(capsys, "bounds", "--signature", "a,b", "--total-length", "1")[0] == 1
    assert run(capsys, "spectrum", "--in", "/nonexistent/file.json")[0] == 1
    assert run(capsys, "--threads", "0", "bounds", "--signature", "1,1", "--total-length", "1")[0] == 1


def test_domain_error(capsys):
    code, _, err = run(capsys, "bounds", "--signature", "0,2", "--total-length", "1")
    assert code == 2
    assert json.loads(err)["exit_code"] == 2
    assert run(capsys, "construct", "--family", "pants", "--params", "1,-1,1")[0] == 2


def test_cap_error(capsys):
    code, _, err = run(capsys, "enumerate", "--signature", "3,1")
    assert code == 3
    body = json.loads(err)
    assert body["required"] == 10


def test_convergence_error(capsys, tmp_path, monkeypatch):
    path = construct(capsys, tmp_path, "--family", "equal", "--signature", "1,1", "--total-length", "3")

    def stuck(*args, **kwargs):
        raise ConvergenceError("no start converged")

    monkeypatch.setattr(cli, "multistart_total_constraint", stuck)
    code, _, err = run(capsys, "maximize", "--in", str(path), "--total-length", "6")
    assert code == 4
    assert json.loads(err)["error"] == "ConvergenceError"


def test_threads_env(capsys, tmp_path, monkeypatch):
    path = construct(capsys, tmp_path, "--family", "equal", "--signature", "2,1", "--total-length", "9")
    base = run(capsys, "spectrum", "--in", str(path), "--cutoff", "4")[1]
    monkeypatch.setenv("ORTHOFORGE_THREADS", "3")
    assert run(capsys, "spectrum", "--in", str(path), "--cutoff", "4")[1] == base
    assert run(capsys, "--threads", "2", "spectrum", "--in", str(path), "--cutoff", "4")[1] == base
    monkeypatch.setenv("ORTHOFORGE_THREADS", "many")
    assert run(capsys, "spectrum", "--in", str(path))[0] == 2


def test_numbers_have_twelve_digits(capsys):
    rep = run_json(capsys, "bounds", "--signature", "2,1", "--total-length", "12")
    assert rep["bavard_bound"] == float(f"{bavard_bound(2, 1, 12.0):.12g}")


def test_module_entry_point():
    proc = subprocess.run([sys.executable, "-m", "orthoforge", "bounds", "--signature", "1,1", "--total-length",
                           str(6 * math.acosh(2.0))], capture_output=True, text=True)
    assert proc.returncode == 0
    assert json.loads(proc.stdout)["bavard_bound"] == pytest.approx(math.acosh(2.0), abs=1e-11)
