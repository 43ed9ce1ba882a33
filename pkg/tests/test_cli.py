import csv
import json
import shutil
import subprocess
from pathlib import Path

import numpy as np
import pytest

from resolvex.cli import EXIT_CONFIG, EXIT_NONCONVERGED, EXIT_OK, main

CONFIGS = Path(__file__).resolve().parents[1] / "configs"
TIMING_COLUMNS = {"elapsed_ms"}


def read_rows(path):
    with open(path, newline="") as fh:
        return list(csv.DictReader(fh))


def stable_csv(path):
    """CSV rows with every timing column removed."""
    rows = read_rows(path)
    drop = {c for c in rows[0] if c in TIMING_COLUMNS or c.endswith("_time_s")}
    return [{k: v for k, v in r.items() if k not in drop} for r in rows]


def run(argv, capsys=None):
    code = main([str(a) for a in argv])
    err = capsys.readouterr().err if capsys is not None else ""
    return code, err


def write_doc(tmp_path, doc, name="cfg.json"):
    p = tmp_path / name
    p.write_text(json.dumps(doc))
    return p


class TestSolve:
    def test_two_affine(self, tmp_path):
        out = tmp_path / "out"
        code, _ = run(["solve", "--config", CONFIGS / "two_affine.json", "--output-dir", out])
        assert code == EXIT_OK
        doc = json.loads((CONFIGS / "two_affine.json").read_text())
        trace = read_rows(out / "trace.csv")
        assert float(trace[-1]["residual"]) <= doc["solver"]["stop_tol"]
        x = np.loadtxt(out / "solution.csv", delimiter=",")
        M, b = np.array([[2.0, 1.0], [-1.0, 1.0]]), np.array([1.0, 0.0])
        # x + M x + b + 0.5 (x - c) = q
        lhs = np.eye(2) * 1.5 + M
        ref = np.linalg.solve(lhs, np.array([3.0, 1.0]) - b + 0.5 * np.array([0.0, 2.0]))
        np.testing.assert_allclose(x, ref, rtol=1e-9)
        report = json.loads((out / "report.json").read_text())
        assert report["converged"] is True

    def test_flag_overrides_json(self, tmp_path):
        out = tmp_path / "out"
        code, _ = run(["solve", "--config", CONFIGS / "two_affine.json", "--output-dir", out,
                       "--max-iters", 3, "--method", "SRYU"])
        assert code == EXIT_NONCONVERGED
        assert len(read_rows(out / "trace.csv")) == 3
        assert json.loads((out / "report.json").read_text())["method"] == "SRYU"

    def test_missing_config(self, tmp_path, capsys):
        out = tmp_path / "out"
        code, err = run(["solve", "--config", tmp_path / "nope.json", "--output-dir", out],
                        capsys)
        assert code == EXIT_CONFIG and err.startswith("resolvex: config:")
        assert not out.exists()

    def test_invalid_json(self, tmp_path, capsys):
        p = tmp_path / "bad.json"
        p.write_text("{not json")
        code, err = run(["solve", "--config", p, "--output-dir", tmp_path / "o"], capsys)
        assert code == EXIT_CONFIG and "config" in err

    @pytest.mark.parametrize("patch", [
        {"solver": {"gamma": -1.0}},
        {"solver": {"lambda": 3.0}},
        {"problem": {"operators": [{"type": "mystery"}], "q": [1.0]}},
        {"problem": {"operators": [{"type": "zero"}, {"type": "zero"}], "q": [1.0],
                     "omega": -1}},
        {"method": "SPD"},
    ])
    def test_invalid_values(self, tmp_path, capsys, patch):
        doc = json.loads((CONFIGS / "two_affine.json").read_text())
        for key, val in patch.items():
            doc[key] = {**doc[key], **val} if isinstance(val, dict) and key in doc else val
        out = tmp_path / "out"
        code, err = run(["solve", "--config", write_doc(tmp_path, doc), "--output-dir", out],
                        capsys)
        assert code == EXIT_CONFIG, err
        assert err.startswith("resolvex: config:") and not out.exists()

    def test_unknown_flag(self, tmp_path):
        assert main(["solve", "--bogus"]) == EXIT_CONFIG

    def test_nonconvergence_message(self, tmp_path, capsys):
        code, err = run(["solve", "--config", CONFIGS / "two_affine.json", "--output-dir",
                         tmp_path / "o", "--max-iters", 2], capsys)
        assert code == EXIT_NONCONVERGED and err.startswith("resolvex: nonconvergence:")


class TestBenchMatrix:
    def test_full_size(self, tmp_path):
        out = tmp_path / "out"
        code, _ = run(["bench-matrix", "--n", 25, "--seeds", 20, "--output-dir", out])
        assert code == EXIT_OK
        rows = read_rows(out / "bench_matrix.csv")
        assert len(rows) == 20
        for r in rows:
            for m in ("sryu", "aamr", "dykstra"):
                assert r[f"{m}_converged"] == "True" and float(r[f"{m}_residual"]) <= 1e-5
        assert len(list(out.glob("solution_seed*.csv"))) == 20

    def test_rerun_is_byte_identical_without_timing(self, tmp_path):
        argv = ["bench-matrix", "--n", 6, "--seeds", 3]
        assert run(argv + ["--output-dir", tmp_path / "a"])[0] == EXIT_OK
        assert run(argv + ["--output-dir", tmp_path / "b"])[0] == EXIT_OK
        assert stable_csv(tmp_path / "a" / "bench_matrix.csv") == \
            stable_csv(tmp_path / "b" / "bench_matrix.csv")
        for s in range(3):
            name = f"solution_seed{s}.csv"
            assert (tmp_path / "a" / name).read_bytes() == (tmp_path / "b" / name).read_bytes()

    def test_jobs_from_environment(self, tmp_path, monkeypatch):
        monkeypatch.setenv("RESOLVEX_JOBS", "2")
        argv = ["bench-matrix", "--n", 5, "--seeds", 2]
        assert run(argv + ["--output-dir", tmp_path / "par"])[0] == EXIT_OK
        monkeypatch.setenv("RESOLVEX_JOBS", "1")
        assert run(argv + ["--output-dir", tmp_path / "ser"])[0] == EXIT_OK
        assert stable_csv(tmp_path / "par" / "bench_matrix.csv") == \
            stable_csv(tmp_path / "ser" / "bench_matrix.csv")

    def test_bad_jobs(self, tmp_path, monkeypatch):
        monkeypatch.setenv("RESOLVEX_JOBS", "many")
        code, _ = run(["bench-matrix", "--n", 5, "--seeds", 1, "--output-dir", tmp_path / "o"])
        assert code == EXIT_CONFIG and not (tmp_path / "o").exists()

    @pytest.mark.parametrize("flags", [["--n", 4], ["--beta", 1.0], ["--aamr-kappa", 1.0],
                                       ["--lambda", 0.0], ["--seeds", 0]])
    def test_invalid(self, tmp_path, flags):
        code, _ = run(["bench-matrix", *flags, "--output-dir", tmp_path / "o"])
        assert code == EXIT_CONFIG and not (tmp_path / "o").exists()

    def test_iteration_cap(self, tmp_path):
        code, _ = run(["bench-matrix", "--n", 8, "--seeds", 1, "--max-iters", 3,
                       "--output-dir", tmp_path / "o"])
        assert code == EXIT_NONCONVERGED
        assert len(read_rows(tmp_path / "o" / "bench_matrix.csv")) == 1

    def test_json_config_and_override(self, tmp_path):
        cfg = write_doc(tmp_path, {"n": 5, "seeds": 2, "beta": 0.9, "lambda": 0.8})
        out = tmp_path / "o"
        assert run(["bench-matrix", "--config", cfg, "--seeds", 1, "--output-dir", out])[0] == 0
        rows = read_rows(out / "bench_matrix.csv")
        assert len(rows) == 1 and rows[0]["beta"] == "0.9" and rows[0]["lambda"] == "0.8"


class TestOtherCommands:
    def test_bench_rof(self, tmp_path):
        out = tmp_path / "o"
        code, _ = run(["bench-rof", "--n", 16, "--iters", 50, "--output-dir", out])
        assert code == EXIT_OK
        for name in ("trace.csv", "denoised.csv", "clean.pgm", "noisy.pgm", "denoised.pgm",
                     "report.json"):
            assert (out / name).exists(), name
        assert len(read_rows(out / "trace.csv")) == 50
        rep = json.loads((out / "report.json").read_text())
        assert rep["method"] == "SPD"

    def test_bench_rof_tseng_sigma_check(self, tmp_path):
        code, _ = run(["bench-rof", "--n", 8, "--method", "stseng", "--sigma", 1, 1,
                       "--theta", 2, "--output-dir", tmp_path / "o"])
        assert code == EXIT_CONFIG

    def test_bench_pde(self, tmp_path):
        out = tmp_path / "o"
        code, _ = run(["bench-pde", "--nx", 21, "--iters", 3000, "--output-dir", out])
        assert code == EXIT_OK
        rep = json.loads((out / "report.json").read_text())
        assert rep["error_v"] == pytest.approx(rep["discretization_error"], rel=1e-6)
        assert np.loadtxt(out / "v.csv", delimiter=",").shape == (19, 19)

    def test_bench_pde_invalid(self, tmp_path):
        assert run(["bench-pde", "--nx", 2, "--output-dir", tmp_path / "o"])[0] == EXIT_CONFIG

    def test_demo_fp(self, tmp_path):
        out = tmp_path / "o"
        assert run(["demo-fp", "--n", 2, "--output-dir", out])[0] == EXIT_OK
        theta = read_rows(out / "theta.csv")
        assert float(theta[-1]["theta"]) == pytest.approx(0.5, abs=1e-8)

    def test_sweep(self, tmp_path):
        out = tmp_path / "o"
        code, _ = run(["sweep", "--n", 5, "--seeds", 2, "--betas", "0.9,0.99",
                       "--lambdas", "0.8,0.9", "--output-dir", out])
        assert code == EXIT_OK
        assert len(read_rows(out / "sweep.csv")) == 8
        assert len(read_rows(out / "sweep_summary.csv")) == 4

    def test_sweep_bad_list(self, tmp_path):
        code, _ = run(["sweep", "--betas", "0.9,x", "--output-dir", tmp_path / "o"])
        assert code == EXIT_CONFIG


@pytest.mark.skipif(shutil.which("resolvex") is None, reason="console script not installed")
def test_console_script(tmp_path):
    res = subprocess.run(["resolvex", "solve", "--config", str(CONFIGS / "two_affine.json"),
                          "--output-dir", str(tmp_path / "o")], capture_output=True, text=True)
    assert res.returncode == 0, res.stderr
    res = subprocess.run(["resolvex", "solve", "--config", str(tmp_path / "missing.json")],
                         capture_output=True, text=True, cwd=tmp_path)
    assert res.returncode == 2 and "resolvex: config:" in res.stderr
