"""Driver behavior: JSON I/O, exit codes, determinism."""

import json
import time

import numpy as np
import pytest

from schurpos import serialization as ser
from schurpos.cli import main
from schurpos.forms import chern_forms, max_coeff_diff, schur_form, wedge


def run(capsys, *argv):
    code = main(list(argv))
    captured = capsys.readouterr()
    return code, captured.out, captured.err


def run_json(capsys, *argv):
    code, out, err = run(capsys, *argv)
    return code, (json.loads(out) if out.strip() else None), err


class TestGen:
    def test_trace_map(self, capsys, tmp_path):
        path = tmp_path / "trace.json"
        code, out, _ = run(capsys, "gen", "trace", "--rank", "3",
                           "--output", str(path))
        assert code == 0
        h = ser.block_map_from_json(json.loads(path.read_text()))
        assert np.array_equal(h.block(0, 0), np.eye(3))
        assert np.max(np.abs(h.block(0, 1))) == 0.0

    def test_curvature_symmetry(self, capsys):
        code, obj, _ = run_json(capsys, "gen", "curvature", "--rank", "3",
                                "--dim", "3", "--terms", "4", "--eps", "0.1",
                                "--seed", "7")
        assert code == 0
        ser.curvature_from_json(obj)  # validates Hermitian pair symmetry

    def test_choi_generates(self, capsys):
        code, obj, _ = run_json(capsys, "gen", "choi")
        assert code == 0
        h = ser.block_map_from_json(obj)
        assert np.array_equal(sum(h.block(i, i) for i in range(3)),
                              2.0 * np.eye(3))

    def test_deterministic_output(self, capsys, tmp_path):
        p1, p2 = tmp_path / "a.json", tmp_path / "b.json"
        for p in (p1, p2):
            assert main(["gen", "kraus", "--rank", "3", "--seed", "11",
                         "--output", str(p)]) == 0
        assert p1.read_bytes() == p2.read_bytes()


class TestScale:
    def test_trace_map_fixed_point(self, capsys, tmp_path):
        path = tmp_path / "trace.json"
        main(["gen", "trace", "--rank", "3", "--output", str(path)])
        code, obj, _ = run_json(capsys, "scale", "--input", str(path))
        assert code == 0
        assert obj["converged"] is True
        assert obj["iterations"] <= 1
        assert obj["residual"] < 1e-14

    def test_random_kraus(self, capsys, tmp_path):
        path = tmp_path / "k.json"
        main(["gen", "kraus", "--rank", "3", "--eps", "0.2", "--seed", "3",
              "--output", str(path)])
        code, obj, _ = run_json(capsys, "scale", "--input", str(path))
        assert code == 0
        assert obj["residual"] < 1e-10

    def test_identity_map_certificate_failure(self, capsys, tmp_path):
        path = tmp_path / "id.json"
        blocks = np.zeros((2, 2, 2, 2), dtype=complex)
        for i in range(2):
            for j in range(2):
                blocks[i, j, i, j] = 1.0
        obj = {"r": 2, "w": 2,
               "blocks": [[ser.matrix_to_json(blocks[i, j]) for j in range(2)]
                          for i in range(2)]}
        path.write_text(json.dumps(obj))
        code, _, err = run(capsys, "scale", "--input", str(path))
        assert code == 2
        assert "positivity" in err

    def test_missing_input(self, capsys):
        code, _, err = run(capsys, "scale", "--input", "/nonexistent.json")
        assert code == 2

    def test_non_convergence_exit_code(self, capsys, tmp_path):
        path = tmp_path / "k.json"
        main(["gen", "kraus", "--rank", "3", "--eps", "0.2", "--seed", "4",
              "--output", str(path)])
        code, obj, _ = run_json(capsys, "scale", "--input", str(path),
                                "--max-iter", "1")
        assert code == 3
        assert obj["converged"] is False  # report still emitted
        assert obj["residual"] > 1e-10

    def test_report_deterministic_modulo_timestamp(self, capsys, tmp_path):
        path = tmp_path / "k.json"
        main(["gen", "kraus", "--rank", "2", "--eps", "0.2", "--seed", "8",
              "--output", str(path)])
        _, obj1, _ = run_json(capsys, "scale", "--input", str(path))
        _, obj2, _ = run_json(capsys, "scale", "--input", str(path))
        obj1.pop("timestamp")
        obj2.pop("timestamp")
        assert obj1 == obj2


class TestPhi:
    def test_trace_map_all_methods(self, capsys, tmp_path):
        path = tmp_path / "trace.json"
        main(["gen", "trace", "--rank", "3", "--output", str(path)])
        code, obj, _ = run_json(capsys, "phi", "--input", str(path),
                                "--method", "all")
        assert code == 0
        assert {r["method"] for r in obj["reports"]} == {"direct", "dual",
                                                         "integral_r3"}
        for rep in obj["reports"]:
            assert abs(rep["value"] - 1.0) < 1e-12
        assert obj["max_spread"] < 1e-12

    def test_normalized_random_agreement(self, capsys, tmp_path):
        raw, scaled = tmp_path / "raw.json", tmp_path / "scaled.json"
        main(["gen", "kraus", "--rank", "3", "--eps", "0.2", "--seed", "5",
              "--output", str(raw)])
        main(["scale", "--input", str(raw), "--output", str(scaled)])
        report = json.loads(scaled.read_text())
        hpath = tmp_path / "normalized.json"
        hpath.write_text(json.dumps(report["scaled"]))
        code, obj, _ = run_json(capsys, "phi", "--input", str(hpath),
                                "--method", "all")
        assert code == 0
        assert obj["max_spread"] < 1e-9
        values = [r["value"] for r in obj["reports"]]
        assert min(values) > 0.0

    def test_unnormalized_integral_is_precondition_error(self, capsys, tmp_path):
        path = tmp_path / "k.json"
        main(["gen", "kraus", "--rank", "3", "--eps", "0.2", "--seed", "6",
              "--output", str(path)])
        code, _, err = run(capsys, "phi", "--input", str(path),
                           "--method", "integral")
        assert code == 2
        assert "sinkhorn" in err or "stochastic" in err


class TestSchur:
    def test_partition_210_matches_expansion(self, capsys, tmp_path):
        path = tmp_path / "curv.json"
        main(["gen", "curvature", "--rank", "3", "--dim", "3", "--terms", "3",
              "--eps", "0.2", "--seed", "9", "--output", str(path)])
        code, obj, _ = run_json(capsys, "schur", "--input", str(path),
                                "--partition", "2,1,0", "--samples", "400")
        assert code == 0
        tensor = ser.curvature_from_json(json.loads(path.read_text()))
        cs = chern_forms(tensor)
        want = wedge(cs[1], cs[2]) - cs[3]
        got = ser.form_from_json(obj["schur_form"])
        assert max_coeff_diff(got, want) < 1e-12
        assert obj["weak_positivity"]["min_coeff"] > 0.0

    def test_partition_100_is_c1(self, capsys, tmp_path):
        path = tmp_path / "curv.json"
        main(["gen", "curvature", "--rank", "3", "--dim", "3", "--terms", "2",
              "--eps", "0.3", "--seed", "10", "--output", str(path)])
        code, obj, _ = run_json(capsys, "schur", "--input", str(path),
                                "--partition", "1,0,0", "--samples", "400")
        assert code == 0
        tensor = ser.curvature_from_json(json.loads(path.read_text()))
        got = ser.form_from_json(obj["schur_form"])
        assert max_coeff_diff(got, chern_forms(tensor)[1]) < 1e-13
        assert obj["weak_positivity"]["min_coeff"] > 0.0

    def test_top_partition_positive(self, capsys, tmp_path):
        path = tmp_path / "curv.json"
        main(["gen", "curvature", "--rank", "3", "--dim", "3", "--terms", "3",
              "--eps", "0.2", "--seed", "11", "--output", str(path)])
        code, obj, _ = run_json(capsys, "schur", "--input", str(path),
                                "--partition", "3,0,0", "--samples", "10")
        assert code == 0
        assert obj["weak_positivity"]["min_coeff"] > 0.0

    def test_invalid_partition(self, capsys, tmp_path):
        path = tmp_path / "curv.json"
        main(["gen", "curvature", "--rank", "3", "--dim", "3", "--terms", "1",
              "--eps", "0.2", "--seed", "12", "--output", str(path)])
        code, _, err = run(capsys, "schur", "--input", str(path),
                           "--partition", "1,2,0")
        assert code == 2


class TestVerify:
    def test_smoke_run(self, capsys):
        start = time.monotonic()
        code, obj, err = run_json(capsys, "verify", "--trials", "1")
        elapsed = time.monotonic() - start
        assert code == 0
        assert obj["all_passed"] is True
        assert len(obj["criteria"]) == 11
        assert elapsed < 10.0
        assert err.count("[PASS]") == 11

    def test_corrupted_fixture_fails_cleanly(self, capsys, tmp_path):
        path = tmp_path / "bad.json"
        path.write_text('{"r": 2, "w": 2, "blocks": "nonsense"}')
        code, _, err = run(capsys, "phi", "--input", str(path))
        assert code == 2
