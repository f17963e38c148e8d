import csv
import json

import numpy as np
import pytest

from graphfilt import cli
from graphfilt.errors import DivergenceError, InstabilityError


def run(argv):
    return cli.main(argv)


def write_signal(path, values):
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["node_id", "value"])
        for i, v in enumerate(values):
            writer.writerow([i, repr(float(v))])


def read_signal(path):
    with open(path) as fh:
        rows = list(csv.reader(fh))[1:]
    return np.array([float(r[1]) for r in rows])


@pytest.fixture
def er_graph_file(tmp_path):
    path = tmp_path / "g.json"
    assert run(["gen-graph", "--er", "--n", "24", "--p", "0.3", "--seed", "7",
                "-o", str(path)]) == 0
    return path


class TestGenGraph:
    def test_er_deterministic_bytes(self, tmp_path):
        p1, p2 = tmp_path / "a.json", tmp_path / "b.json"
        args = ["gen-graph", "--er", "--n", "30", "--p", "0.2", "--seed", "3"]
        assert run(args + ["-o", str(p1)]) == 0
        assert run(args + ["-o", str(p2)]) == 0
        assert p1.read_bytes() == p2.read_bytes()

    def test_knn_out_degree(self, tmp_path):
        coords = tmp_path / "c.csv"
        rng = np.random.default_rng(0)
        with open(coords, "w", newline="") as fh:
            writer = csv.writer(fh)
            writer.writerow(["id", "x", "y"])
            for i, (x, y) in enumerate(rng.random((16, 2))):
                writer.writerow([i, x, y])
        out = tmp_path / "g.json"
        assert run(["gen-graph", "--knn", "4", "--coords", str(coords),
                    "-o", str(out)]) == 0
        payload = json.loads(out.read_text())
        assert payload["directed"]
        degree = [0] * payload["n"]
        for i, _, _ in payload["edges"]:
            degree[i] += 1
        assert all(d == 4 for d in degree)

    def test_malformed_csv_exits_with_parse_code(self, tmp_path, capsys):
        bad = tmp_path / "bad.csv"
        bad.write_text("src,dst,weight\n0,x,1.0\n")
        code = run(["gen-graph", "--edges", str(bad), "--directed",
                    "-o", str(tmp_path / "g.json")])
        assert code == cli.EXIT_PARSE
        assert "line 2" in capsys.readouterr().err


class TestDesign:
    def test_fir_filter_file(self, tmp_path):
        out = tmp_path / "f.json"
        report = tmp_path / "r.json"
        code = run(["design", "--method", "fir", "--grid", "uniform-real",
                    "--grid-size", "40", "--response", "lowpass:1.0",
                    "--k", "6", "-o", str(out), "--report", str(report)])
        assert code == 0
        payload = json.loads(out.read_text())
        assert payload["type"] == "fir" and len(payload["g"]) == 7
        assert "rnmse" in json.loads(report.read_text())

    def test_iterative_budget_search(self, tmp_path):
        out = tmp_path / "f.json"
        report = tmp_path / "r.json"
        code = run(["design", "--method", "iterative", "--grid", "uniform-real",
                    "--grid-size", "50", "--response", "lowpass:1.0",
                    "--budget", "5", "-o", str(out), "--report", str(report)])
        assert code == 0
        payload = json.loads(out.read_text())
        assert payload["type"] == "arma" and payload["a"][0] == 1.0
        rep = json.loads(report.read_text())
        assert rep["ar_order"] + rep["ma_order"] == 5
        assert rep["error_history"]

    def test_symmetry_violation_exit_code(self, tmp_path):
        resp = tmp_path / "h.csv"
        with open(resp, "w", newline="") as fh:
            writer = csv.writer(fh)
            writer.writerow(["re", "im"])
            for _ in range(10):
                writer.writerow([1.0, 0.5])  # imaginary part on real grid
        code = run(["design", "--method", "prony-ls", "--grid", "uniform-real",
                    "--grid-size", "10", "--response", f"file:{resp}",
                    "--p", "1", "--q", "1", "-o", str(tmp_path / "f.json")])
        assert code == cli.EXIT_SYMMETRY

    def test_allpass_response(self, tmp_path):
        out = tmp_path / "f.json"
        code = run(["design", "--method", "prony-ls", "--grid", "complex-disc",
                    "--grid-size", "20", "--response", "allpass",
                    "--p", "0", "--q", "0", "-o", str(out)])
        assert code == 0
        assert json.loads(out.read_text())["b"] == [1.0]


class TestApply:
    def test_identity_arma_round_trip(self, tmp_path, er_graph_file):
        filt = tmp_path / "f.json"
        filt.write_text('{"type": "arma", "a": [1.0], "b": [1.0]}')
        x = np.linspace(-1, 1, 24)
        xin = tmp_path / "x.csv"
        write_signal(xin, x)
        out = tmp_path / "y.csv"
        code = run(["apply", "--filter", str(filt), "--graph", str(er_graph_file),
                    "--shift", "laplacian", "--input", str(xin),
                    "--solver", "direct", "-o", str(out)])
        assert code == 0
        assert np.allclose(read_signal(out), x)

    def test_cg_trace_and_direct_agreement(self, tmp_path, er_graph_file):
        filt = tmp_path / "f.json"
        filt.write_text('{"type": "arma", "a": [1.0, 0.3], "b": [0.5, 0.2]}')
        x = np.sin(np.arange(24))
        xin = tmp_path / "x.csv"
        write_signal(xin, x)
        direct_out = tmp_path / "yd.csv"
        cg_out = tmp_path / "yc.csv"
        trace = tmp_path / "t.csv"
        assert run(["apply", "--filter", str(filt), "--graph", str(er_graph_file),
                    "--input", str(xin), "--solver", "direct",
                    "-o", str(direct_out)]) == 0
        assert run(["apply", "--filter", str(filt), "--graph", str(er_graph_file),
                    "--input", str(xin), "--solver", "cg", "--cg-eps", "1e-10",
                    "--cg-max-iter", "300", "--trace", str(trace),
                    "-o", str(cg_out)]) == 0
        yd, yc = read_signal(direct_out), read_signal(cg_out)
        assert np.linalg.norm(yc - yd) <= 1e-6 * np.linalg.norm(yd)
        with open(trace) as fh:
            rows = list(csv.reader(fh))
        assert rows[0] == ["iter", "residual_norm"]
        assert len(rows) > 2

    def test_fir_filter_apply(self, tmp_path, er_graph_file):
        filt = tmp_path / "f.json"
        filt.write_text('{"type": "fir", "g": [1.0, 0.0]}')
        x = np.arange(24.0)
        xin = tmp_path / "x.csv"
        write_signal(xin, x)
        out = tmp_path / "y.csv"
        assert run(["apply", "--filter", str(filt), "--graph", str(er_graph_file),
                    "--input", str(xin), "-o", str(out)]) == 0
        assert np.allclose(read_signal(out), x)

    def test_dimension_mismatch_exit_code(self, tmp_path, er_graph_file):
        filt = tmp_path / "f.json"
        filt.write_text('{"type": "arma", "a": [1.0], "b": [1.0]}')
        xin = tmp_path / "x.csv"
        write_signal(xin, np.ones(5))
        code = run(["apply", "--filter", str(filt), "--graph", str(er_graph_file),
                    "--input", str(xin), "-o", str(tmp_path / "y.csv")])
        assert code == cli.EXIT_DIMENSION


class TestErrorCodeMapping:
    def test_instability_maps_to_dedicated_code(self, tmp_path, monkeypatch):
        def boom(*args, **kwargs):
            raise InstabilityError("unstable")

        monkeypatch.setattr(cli, "run_method", boom)
        code = run(["design", "--method", "prony-ls", "--grid", "uniform-real",
                    "--grid-size", "10", "--response", "allpass",
                    "--p", "1", "--q", "1", "-o", str(tmp_path / "f.json")])
        assert code == cli.EXIT_INSTABILITY

    def test_divergence_maps_to_dedicated_code(self, tmp_path, er_graph_file,
                                               monkeypatch):
        def boom(*args, **kwargs):
            raise DivergenceError("diverged")

        monkeypatch.setattr(cli, "arma_apply_cg", boom)
        filt = tmp_path / "f.json"
        filt.write_text('{"type": "arma", "a": [1.0], "b": [1.0]}')
        xin = tmp_path / "x.csv"
        write_signal(xin, np.ones(24))
        code = run(["apply", "--filter", str(filt), "--graph", str(er_graph_file),
                    "--input", str(xin), "--solver", "cg",
                    "-o", str(tmp_path / "y.csv")])
        assert code == cli.EXIT_DIVERGENCE


class TestConfigFile:
    def test_config_supplies_defaults_and_flags_override(self, tmp_path):
        cfg = tmp_path / "cfg.json"
        cfg.write_text('{"p": 0.3, "seed": 7}')
        from_config = tmp_path / "a.json"
        explicit = tmp_path / "b.json"
        assert run(["gen-graph", "--config", str(cfg), "--er", "--n", "24",
                    "-o", str(from_config)]) == 0
        assert run(["gen-graph", "--er", "--n", "24", "--p", "0.3", "--seed", "7",
                    "-o", str(explicit)]) == 0
        assert from_config.read_bytes() == explicit.read_bytes()
        override = tmp_path / "c.json"
        assert run(["gen-graph", "--config", str(cfg), "--er", "--n", "24",
                    "--seed", "8", "-o", str(override)]) == 0
        assert override.read_bytes() != explicit.read_bytes()

    def test_unknown_config_key_rejected(self, tmp_path, capsys):
        cfg = tmp_path / "cfg.json"
        cfg.write_text('{"nonsense": 1}')
        code = run(["gen-graph", "--config", str(cfg), "--er", "--n", "10",
                    "--p", "0.5", "-o", str(tmp_path / "g.json")])
        assert code == cli.EXIT_PARSE
        assert "nonsense" in capsys.readouterr().err


class TestExperimentCommand:
    def test_universal_smoke(self, tmp_path):
        out = tmp_path / "report.csv"
        code = run(["experiment", "universal", "--grid", "uniform-real",
                    "--grid-size", "30", "--k-min", "2", "--k-max", "4",
                    "-o", str(out)])
        assert code == 0
        with open(out) as fh:
            rows = list(csv.reader(fh))
        assert rows[0] == ["experiment", "K", "P", "Q", "method",
                           "rnmse_mean", "rnmse_std", "seed"]
        assert len(rows) > 4

    def test_interpolation_smoke(self, tmp_path):
        out = tmp_path / "report.csv"
        assert run(["experiment", "interpolation", "--trials", "2",
                    "-o", str(out)]) == 0
        assert out.exists()

    def test_prediction_smoke(self, tmp_path):
        out = tmp_path / "report.csv"
        assert run(["experiment", "prediction", "--trials", "1",
                    "--k-min", "3", "--k-max", "3", "-o", str(out)]) == 0
        assert out.exists()

    def test_compression_smoke(self, tmp_path):
        out = tmp_path / "report.csv"
        assert run(["experiment", "compression", "--trials", "1",
                    "--k-min", "4", "--k-max", "4", "-o", str(out)]) == 0
        assert out.exists()
