import json
import math
import subprocess
import sys

import pytest

from membrane_bounds.catalog import J01
from membrane_bounds.cli import main

PI2 = math.pi**2


def run(capsys, *argv):
    code = main(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


def run_json(capsys, *argv):
    code, out, err = run(capsys, *argv)
    assert code == 0, err
    return json.loads(out)


def by_theorem(bounds):
    return {b["theorem"]: b["value"] for b in bounds}


class TestConvert:
    def test_matrix_example(self, capsys):
        d = run_json(capsys, "convert", "--matrix", "3,0,0.3333333333333333")
        assert d["mu"]["re"] == pytest.approx(-0.5, abs=1e-15)
        assert d["mu"]["im"] == 0
        assert d["summary"]["K"] == pytest.approx(3, abs=1e-12)
        assert d["summary"]["Q"] == pytest.approx(3, abs=1e-12)

    def test_mu_zero(self, capsys):
        d = run_json(capsys, "convert", "--mu", "0,0")
        assert d["matrix"] == {"a11": 1.0, "a12": 0.0, "a22": 1.0}
        assert d["summary"]["K"] == 1

    @pytest.mark.parametrize("argv", [
        ["--matrix", "1,0,2"],
        ["--matrix", "1,0"],
        ["--matrix", "a,b,c"],
        ["--mu", "1,0"],
    ])
    def test_invalid_input_exits_2(self, capsys, argv):
        code, out, err = run(capsys, "convert", *argv)
        assert code == 2 and out == ""
        assert err.count("\n") == 1


class TestBound:
    def test_triangle_affine(self, capsys):
        d = run_json(capsys, "bound", "--entry", "triangle_affine", "--param", "a=2", "--param", "b=1")
        assert by_theorem(d["bounds"])["infty_regular"] == pytest.approx(5 * PI2 / 3, rel=1e-15)

    def test_cardioid(self, capsys):
        d = run_json(capsys, "bound", "--entry", "cardioid_power")
        assert by_theorem(d["bounds"])["infty_regular"] == pytest.approx(J01**2 / 2, rel=1e-15)

    def test_measure_preserving_rfk(self, capsys):
        d = run_json(capsys, "bound", "--entry", "square_diag_stretch", "--param", "a=2")
        assert by_theorem(d["bounds"])["measure_preserving_RFK"] == pytest.approx(math.pi * J01**2, rel=1e-14)

    def test_beta(self, capsys):
        d = run_json(capsys, "bound", "--entry", "triangle_affine", "--beta", "2")
        b = [x for x in d["bounds"] if x["theorem"] == "beta_regular"][0]
        assert b["inputs"]["jac_beta_norm"] == pytest.approx(3 / math.sqrt(2), rel=1e-8)

    @pytest.mark.parametrize("argv", [
        ["--entry", "nope"],
        ["--entry", "triangle_affine", "--param", "a"],
        ["--entry", "triangle_affine", "--param", "a=x"],
        ["--entry", "triangle_affine", "--param", "a=1", "--param", "b=1"],
        ["--entry", "cardioid_power", "--beta", "1"],
    ])
    def test_usage_errors(self, capsys, argv):
        code, _, _ = run(capsys, "bound", *argv)
        assert code == 2


class TestValidate:
    def test_triangle_affine_passes(self, capsys):
        d = run_json(capsys, "validate", "--entry", "triangle_affine", "--param", "a=2",
                     "--param", "b=1", "--levels", "4", "--target-h", "0.1")
        assert d["pass"] is True
        assert d["fem_lambda1"] == pytest.approx(5 * PI2 / 3, rel=0.01)
        assert d["weighted_reduction"]["agree"] is True
        assert len(d["margins"]) == len(d["bounds"])

    @pytest.mark.slow
    def test_diag_stretch(self, capsys):
        d = run_json(capsys, "validate", "--entry", "square_diag_stretch", "--param", "a=2",
                     "--levels", "4", "--target-h", "0.1")
        assert d["pass"] is True
        assert d["fem_lambda1"] == pytest.approx(4.25 * PI2, rel=0.01)

    @pytest.mark.slow
    def test_cardioid(self, capsys):
        d = run_json(capsys, "validate", "--entry", "cardioid_power", "--levels", "4",
                     "--target-h", "0.05")
        assert d["pass"] is True
        assert d["fem_lambda1"] >= J01**2 / 2

    def test_csv_and_dump_mesh(self, capsys, tmp_path):
        mesh = tmp_path / "m.txt"
        code, out, _ = run(capsys, "validate", "--entry", "square_diag_stretch", "--levels", "2",
                           "--target-h", "0.25", "--format", "csv", "--dump-mesh", str(mesh))
        assert code == 0
        lines = out.splitlines()
        assert lines[0] == "h_max,lambda1" and len(lines) == 3
        text = mesh.read_text().splitlines()
        assert text[0].startswith("v ") and text[-1].startswith("t ")

    @pytest.mark.parametrize("argv", [["--levels", "1"], ["--target-h", "0"], ["--target-h", "-1"]])
    def test_bad_settings(self, capsys, argv):
        code, _, _ = run(capsys, "validate", "--entry", "triangle_affine", *argv)
        assert code == 2

    def test_target_at_diameter_exits_2(self, capsys):
        code, _, err = run(capsys, "validate", "--entry", "triangle_affine", "--levels", "2",
                           "--target-h", "100")
        assert code == 2 and "diameter" in err

    def test_solver_failure_exits_3(self, capsys, monkeypatch):
        import membrane_bounds.cli as cli
        from membrane_bounds.errors import ConvergenceError

        def boom(*args, **kwargs):
            raise ConvergenceError("inverse iteration did not converge")

        monkeypatch.setattr(cli, "lambda1_estimate", boom)
        code, out, err = run(capsys, "validate", "--entry", "triangle_affine")
        assert code == 3 and out == ""
        assert "did not converge" in err


class TestCatalog:
    def test_listing(self, capsys):
        d = run_json(capsys, "catalog")
        assert d["count"] == 6 and len(d["entries"]) == 6

    def test_verify(self, capsys):
        d = run_json(capsys, "catalog", "--verify")
        for item in d["entries"]:
            v = item["verification"]
            assert v["passed"] and max(v["residuals"].values()) <= 1e-6

    def test_injected_fault_exits_4(self, capsys):
        code, out, err = run(capsys, "catalog", "--verify", "--inject-fault")
        assert code == 4 and out == ""
        assert "triangle_affine" in err


def test_output_file(capsys, tmp_path):
    target = tmp_path / "out.json"
    code, out, _ = run(capsys, "--output", str(target), "convert", "--mu", "0.5,0")
    assert code == 0 and out == ""
    assert json.loads(target.read_text())["summary"]["Q"] == pytest.approx(3)


def test_thread_env_validation(capsys, monkeypatch):
    monkeypatch.setenv("MEMBRANE_BOUNDS_THREADS", "zero")
    code, _, _ = run(capsys, "convert", "--mu", "0,0")
    assert code == 2
    monkeypatch.setenv("MEMBRANE_BOUNDS_THREADS", "1")
    assert run(capsys, "convert", "--mu", "0,0")[0] == 0


def test_sorted_keys(capsys):
    code, out, _ = run(capsys, "bound", "--entry", "cardioid_power")
    d = json.loads(out)
    assert list(d) == sorted(d)
    assert out == json.dumps(d, sort_keys=True, indent=2) + "\n"


def test_byte_identical_across_processes():
    argv = [sys.executable, "-m", "membrane_bounds", "validate", "--entry", "triangle_affine",
            "--levels", "2", "--target-h", "0.2"]
    a = subprocess.run(argv, capture_output=True, check=True).stdout
    b = subprocess.run(argv, capture_output=True, check=True).stdout
    assert a == b and a


def test_argparse_usage_exit_code():
    r = subprocess.run([sys.executable, "-m", "membrane_bounds", "frobnicate"], capture_output=True)
    assert r.returncode == 2
