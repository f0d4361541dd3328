"""
End-to-end tests of the command-line entry point (main.py): outputs,
manifests and the exit-code contract (0 ok, 1 numerical, 2 usage/parse).
"""

import csv
import json

import pytest

from app.fit import write_fitted_cohort
from main import main


def read_rows(path):
    with open(path, newline="") as fh:
        return list(csv.DictReader(fh))


@pytest.fixture
def cohort_csv(tmp_path, small_cohort):
    path = str(tmp_path / "cohort.csv")
    write_fitted_cohort(path, small_cohort)
    return path


# ============================================================================
# FIT / SYNTH
# ============================================================================

class TestFitCommand:

    def test_synth_then_fit(self, tmp_path, capsys):
        subjects = str(tmp_path / "subjects.jsonl")
        cohort = str(tmp_path / "cohort.csv")
        assert main(["synth", "--n-per-class", "3", "--n-samples", "50", "--seed", "4", "--output", subjects]) == 0
        assert main(["fit", "--input", subjects, "--output", cohort]) == 0

        rows = read_rows(cohort)
        assert len(rows) == 6
        assert list(rows[0]) == ["id", "label", "x", "y"]
        assert read_rows(cohort + ".exclusions.csv") == []

        manifest = json.loads(open(cohort + ".manifest.json").read())
        assert manifest["command"] == "fit"
        assert manifest["inputs"] == {"input": subjects}
        assert "fitted 6 subjects" in capsys.readouterr().out

    def test_rerun_is_byte_identical(self, tmp_path):
        subjects = str(tmp_path / "subjects.jsonl")
        main(["synth", "--n-per-class", "2", "--n-samples", "40", "--seed", "1", "--output", subjects])
        a, b = str(tmp_path / "a.csv"), str(tmp_path / "b.csv")
        assert main(["fit", "--input", subjects, "--output", a]) == 0
        assert main(["fit", "--input", subjects, "--output", b]) == 0
        assert open(a, "rb").read() == open(b, "rb").read()

    def test_malformed_line(self, tmp_path, capsys):
        path = tmp_path / "subjects.jsonl"
        good = [json.dumps({"id": f"s{i}", "label": "a", "samples": [0.1, 0.4]}) for i in range(16)]
        path.write_text("\n".join(good + ["not json"]) + "\n")
        assert main(["fit", "--input", str(path), "--output", str(tmp_path / "out.csv")]) == 2
        assert ":17:" in capsys.readouterr().err

    def test_clamp_and_exclusions(self, tmp_path):
        path = tmp_path / "subjects.jsonl"
        path.write_text(
            json.dumps({"id": "a", "label": "x", "samples": [-0.4, -0.1, 0.2, 0.3, 0.05]}) + "\n"
            + json.dumps({"id": "b", "label": "y", "samples": [5.0, 6.0, 7.0]}) + "\n"
        )
        out = str(tmp_path / "cohort.csv")
        assert main(["fit", "--input", str(path), "--clamp", "-0.5", "0.5", "--output", out]) == 0
        assert [r["id"] for r in read_rows(out)] == ["a"]
        assert [r["id"] for r in read_rows(out + ".exclusions.csv")] == ["b"]

    def test_clamp_needs_two_bounds(self, tmp_path):
        with pytest.raises(SystemExit) as info:
            main(["fit", "--input", "x.jsonl", "--clamp", "0.5", "--output", str(tmp_path / "o.csv")])
        assert info.value.code == 2


# ============================================================================
# GEOMETRY COMMANDS
# ============================================================================

class TestGeometryCommands:

    def test_geodesic_equal_endpoints(self, tmp_path, capsys):
        out = str(tmp_path / "g.csv")
        assert main(["geodesic", "2", "3", "2", "3", "--output", out]) == 0
        rows = read_rows(out)
        assert len(rows) == 1
        assert [float(rows[0][c]) for c in ("t", "x", "y", "u", "v")] == [0.0, 2.0, 3.0, 0.0, 0.0]
        assert float(capsys.readouterr().out.strip()) == 0.0

    def test_geodesic_on_diagonal(self, tmp_path):
        out = str(tmp_path / "g.csv")
        assert main(["geodesic", "1", "1", "4", "4", "--output", out]) == 0
        rows = read_rows(out)
        assert len(rows) == 101
        assert all(abs(float(r["x"]) - float(r["y"])) <= 1e-9 for r in rows)
        assert float(rows[-1]["x"]) == pytest.approx(4.0, abs=1e-5)

    def test_geodesic_swap_isometry(self, tmp_path, capsys):
        main(["geodesic", "1.5", "4", "6", "2", "--output", str(tmp_path / "a.csv")])
        d1 = float(capsys.readouterr().out.strip())
        main(["geodesic", "4", "1.5", "2", "6", "--output", str(tmp_path / "b.csv")])
        d2 = float(capsys.readouterr().out.strip())
        assert d1 == pytest.approx(d2, abs=1e-5)

    def test_geodesic_non_convergence_exit_code(self, tmp_path, capsys):
        code = main(["geodesic", "1", "1", "20", "0.3", "--shooting-max-iterations", "1",
                     "--output", str(tmp_path / "g.csv")])
        assert code == 1
        assert "residual" in capsys.readouterr().err

    def test_geodesic_invalid_point(self, tmp_path):
        assert main(["geodesic", "0", "1", "2", "2", "--output", str(tmp_path / "g.csv")]) == 2

    def test_ball(self, tmp_path):
        out = str(tmp_path / "ball.csv")
        assert main(["ball", "2", "2", "--radius", "0.5", "--directions", "16", "--output", out]) == 0
        rows = read_rows(out)
        assert len(rows) == 16
        assert list(rows[0]) == ["theta", "x", "y", "truncated"]
        assert all(r["truncated"] == "0" for r in rows)

    def test_curvature_grid(self, tmp_path):
        out = str(tmp_path / "k.csv")
        assert main(["curvature-grid", "0.5", "5", "0.5", "5", "--n", "2", "--output", out]) == 0
        rows = read_rows(out)
        assert len(rows) == 4
        assert all(float(r["K"]) < 0 for r in rows)

    def test_curvature_grid_invalid_range(self, tmp_path, capsys):
        assert main(["curvature-grid", "5", "0.5", "0.5", "5", "--output", str(tmp_path / "k.csv")]) == 2
        assert "xmin" in capsys.readouterr().err


# ============================================================================
# LEARNING COMMANDS
# ============================================================================

class TestLearningCommands:

    def test_classify(self, tmp_path, cohort_csv):
        out = str(tmp_path / "cv.json")
        args = ["classify", "--cohort", cohort_csv, "--model", "knn", "--geometry", "euclidean",
                "--k", "3", "--seed", "0", "--output", out]
        assert main(args) == 0
        first = open(out).read()
        report = json.loads(first)
        assert len(report["per_fold_accuracy"]) == 5
        assert report["geometry"] == "euclidean"

        assert main(args) == 0
        assert open(out).read() == first
        assert json.loads(open(out + ".manifest.json").read())["seed"] == 0

    def test_classify_k_too_large(self, tmp_path, cohort_csv, capsys):
        code = main(["classify", "--cohort", cohort_csv, "--geometry", "euclidean", "--k", "17",
                     "--seed", "0", "--output", str(tmp_path / "cv.json")])
        assert code == 2
        assert "smallest training fold" in capsys.readouterr().err

    def test_classify_even_k(self, tmp_path, cohort_csv):
        code = main(["classify", "--cohort", cohort_csv, "--k", "4", "--seed", "0",
                     "--output", str(tmp_path / "cv.json")])
        assert code == 2

    def test_skm_ignores_even_k(self, tmp_path, cohort_csv):
        out = str(tmp_path / "cv.json")
        code = main(["classify", "--cohort", cohort_csv, "--model", "skm", "--geometry", "euclidean",
                     "--k", "4", "--seed", "0", "--output", out])
        assert code == 0
        report = json.loads(open(out).read())
        assert report["model"] == "skm"
        assert report["k"] is None

    def test_classify_requires_seed(self, tmp_path, cohort_csv):
        with pytest.raises(SystemExit) as info:
            main(["classify", "--cohort", cohort_csv, "--output", str(tmp_path / "cv.json")])
        assert info.value.code == 2

    def test_cluster_single_cluster(self, tmp_path, cohort_csv):
        out = str(tmp_path / "cl.json")
        assert main(["cluster", "--cohort", cohort_csv, "--geometry", "euclidean", "--n-clusters", "1",
                     "--n-init", "2", "--seed", "3", "--output", out]) == 0
        result = json.loads(open(out).read())
        assert result["accuracy"] == pytest.approx(0.5)
        assert set(result["assignments"]) == {0}
        assert len(result["ids"]) == 20

    def test_missing_cohort_file(self, tmp_path, capsys):
        code = main(["cluster", "--cohort", str(tmp_path / "missing.csv"), "--seed", "1",
                     "--output", str(tmp_path / "cl.json")])
        assert code == 2
        assert "missing.csv" in capsys.readouterr().err

    def test_experiment(self, tmp_path, cohort_csv):
        out_json, out_md = str(tmp_path / "exp.json"), str(tmp_path / "exp.md")
        code = main(["experiment", "--cohort", cohort_csv, "--seed", "2", "--k", "3", "--ks", "1", "3",
                     "--output-json", out_json, "--output-md", out_md, "--max-workers", "2"])
        assert code == 0
        report = json.loads(open(out_json).read())
        assert set(report["classification"]) == {"knn/riemannian", "knn/euclidean", "skm/riemannian", "skm/euclidean"}
        assert "Classification accuracy" in open(out_md).read()
