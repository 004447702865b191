import csv
import io

import pytest

from multibloom import load_csv, load_structure, save_structure
from multibloom.analysis import TIMING_FIELDS
from multibloom.cli import main


def run(capsys, *argv):
    code = main(list(argv))
    captured = capsys.readouterr()
    return code, captured.out, captured.err


@pytest.fixture
def uniform_csv(tmp_path, capsys):
    path = tmp_path / "uni.csv"
    code, _, _ = run(
        capsys, "gen", "--dist", "uniform", "--items", "40", "--labels", "200",
        "--p", "0.4", "--seed", "7", "--out", str(path),
    )
    assert code == 0
    return path


class TestGen:
    def test_uniform_is_deterministic(self, tmp_path, capsys):
        first = tmp_path / "a.csv"
        second = tmp_path / "b.csv"
        for path in (first, second):
            code, out, _ = run(
                capsys, "gen", "--dist", "uniform", "--items", "30",
                "--labels", "100", "--p", "0.5", "--seed", "7", "--out", str(path),
            )
            assert code == 0
            assert out.startswith("rows=30 ")
        assert first.read_bytes() == second.read_bytes()

    def test_zipf_generates_loadable_csv(self, tmp_path, capsys):
        path = tmp_path / "z.csv"
        code, _, _ = run(
            capsys, "gen", "--dist", "zipf", "--items", "50", "--labels", "300",
            "--s", "0.8", "--scale", "2.0", "--seed", "3", "--out", str(path),
        )
        assert code == 0
        assert load_csv(path).n_items == 50

    def test_uniform_requires_p(self, tmp_path, capsys):
        code, _, err = run(
            capsys, "gen", "--dist", "uniform", "--items", "5", "--labels", "5",
            "--seed", "1", "--out", str(tmp_path / "x.csv"),
        )
        assert code == 2
        assert "--p" in err

    def test_zipf_requires_s(self, tmp_path, capsys):
        code, _, err = run(
            capsys, "gen", "--dist", "zipf", "--items", "5", "--labels", "5",
            "--seed", "1", "--out", str(tmp_path / "x.csv"),
        )
        assert code == 2

    def test_bad_distribution_is_a_usage_error(self, tmp_path, capsys):
        with pytest.raises(SystemExit) as excinfo:
            main(["gen", "--dist", "normal", "--items", "5", "--labels", "5",
                  "--out", str(tmp_path / "x.csv")])
        assert excinfo.value.code == 2


class TestBuildAndLookup:
    def test_roundtrip_matches_in_memory_lookup(self, tmp_path, capsys, uniform_csv):
        out = tmp_path / "m.bmf"
        code, stdout, _ = run(
            capsys, "build", str(uniform_csv), "--structure", "bm",
            "--fpr", "0.01", "--out", str(out),
        )
        assert code == 0
        assert "stored_bits=" in stdout and "m=" in stdout

        from multibloom import build_matrix

        reference = build_matrix(load_csv(uniform_csv), 0.01)
        label = sorted(load_csv(uniform_csv).label_universe)[0]
        code, stdout, _ = run(capsys, "lookup", str(out), label)
        assert code == 0
        assert stdout.split() == sorted(reference.lookup_label(label))

    def test_fpr_and_explicit_parameters_are_exclusive(self, tmp_path, capsys, uniform_csv):
        code, _, err = run(
            capsys, "build", str(uniform_csv), "--structure", "bm",
            "--fpr", "0.01", "--m", "64", "--k", "2",
            "--out", str(tmp_path / "m.bmf"),
        )
        assert code == 2
        assert "exclusive" in err

    def test_build_needs_some_sizing(self, tmp_path, capsys, uniform_csv):
        code, _, _ = run(
            capsys, "build", str(uniform_csv), "--structure", "bm",
            "--out", str(tmp_path / "m.bmf"),
        )
        assert code == 2

    def test_missing_dataset_is_a_runtime_error(self, tmp_path, capsys):
        code, _, err = run(
            capsys, "build", str(tmp_path / "nope.csv"), "--structure", "bm",
            "--fpr", "0.1", "--out", str(tmp_path / "m.bmf"),
        )
        assert code == 1

    def test_lookup_requires_labels(self, tmp_path, capsys, uniform_csv):
        out = tmp_path / "m.bmf"
        run(capsys, "build", str(uniform_csv), "--structure", "bm",
            "--fpr", "0.1", "--out", str(out))
        code, _, err = run(capsys, "lookup", str(out), "--mode", "and")
        assert code == 2
        assert "label" in err

    def test_lookup_on_corrupt_file(self, tmp_path, capsys):
        bogus = tmp_path / "bad.bmf"
        bogus.write_bytes(b"garbage")
        code, _, err = run(capsys, "lookup", str(bogus), "l1")
        assert code == 1

    def test_worked_example_fixture_file(self, tmp_path, capsys, worked_matrix):
        path = tmp_path / "fixture.bmf"
        save_structure(worked_matrix, path)
        code, stdout, _ = run(capsys, "lookup", str(path), "l1")
        assert code == 0
        assert stdout.split() == ["e2", "e4"]
        code, stdout, _ = run(capsys, "lookup", str(path), "l1", "l2", "--mode", "and")
        assert code == 0
        assert stdout.split() == ["e2"]
        code, stdout, _ = run(capsys, "lookup", str(path), "zz")
        assert code == 0  # empty result still exits cleanly


class TestInfo:
    def test_sparse_build_stores_fewer_bits(self, tmp_path, capsys, uniform_csv):
        dense = tmp_path / "bm.bmf"
        sparse = tmp_path / "sbm.bmf"
        run(capsys, "build", str(uniform_csv), "--structure", "bm",
            "--fpr", "0.01", "--out", str(dense))
        run(capsys, "build", str(uniform_csv), "--structure", "sbm",
            "--fpr", "0.01", "--out", str(sparse))

        def stored(path):
            code, stdout, _ = run(capsys, "info", str(path))
            assert code == 0
            return int(stdout.split("stored_bits=")[1].split()[0])

        assert stored(sparse) < stored(dense)

    def test_vector_info(self, tmp_path, capsys, uniform_csv):
        out = tmp_path / "bv.bmf"
        run(capsys, "build", str(uniform_csv), "--structure", "bv",
            "--fpr", "0.1", "--out", str(out))
        code, stdout, _ = run(capsys, "info", str(out))
        assert code == 0
        assert "kind=bv" in stdout


class TestBenchCommand:
    def test_cartesian_record_count(self, tmp_path, capsys, uniform_csv):
        code, stdout, _ = run(
            capsys, "bench", str(uniform_csv), "--fprs", "0.1,0.01",
            "--structures", "bm,sbm,bv", "--reps", "1", "--probes", "20",
            "--seed", "5",
        )
        assert code == 0
        rows = list(csv.reader(io.StringIO(stdout)))
        assert len(rows) == 1 + 6

    def test_identical_seeds_identical_but_for_timing(self, tmp_path, capsys, uniform_csv):
        outputs = []
        for _ in range(2):
            code, stdout, _ = run(
                capsys, "bench", str(uniform_csv), "--fprs", "0.5,0.1",
                "--structures", "bm,bv", "--reps", "1", "--probes", "30",
                "--seed", "9",
            )
            assert code == 0
            outputs.append(stdout)

        def strip_timing(text):
            rows = list(csv.DictReader(io.StringIO(text)))
            for row in rows:
                for field in TIMING_FIELDS:
                    row.pop(field)
            return rows

        assert strip_timing(outputs[0]) == strip_timing(outputs[1])

    def test_json_output(self, tmp_path, capsys, uniform_csv):
        out = tmp_path / "bench.json"
        code, _, _ = run(
            capsys, "bench", str(uniform_csv), "--fprs", "0.5",
            "--structures", "bm", "--reps", "1", "--probes", "10",
            "--format", "json", "--out", str(out),
        )
        assert code == 0
        import json

        assert json.loads(out.read_text())[0]["structure"] == "BM"


class TestBloomTestCommand:
    def test_verdict_line_on_uniform_data(self, capsys, uniform_csv):
        code, stdout, _ = run(
            capsys, "bloomtest", str(uniform_csv), "--probes", "50", "--seed", "2",
        )
        assert code == 0
        line = stdout.strip().splitlines()[0]
        assert line.startswith("classification=")
        parts = dict(piece.split("=") for piece in line.split())
        assert parts["classification"] in ("Uniform", "NonUniform")
        assert parts["recommendation"] in ("bm", "bv")
        assert float(parts["expected"]) == pytest.approx(1e-3)

    def test_seed_env_default(self, tmp_path, capsys, uniform_csv, monkeypatch):
        monkeypatch.setenv("BMF_SEED", "21")
        code, first, _ = run(capsys, "bloomtest", str(uniform_csv), "--probes", "40")
        assert code == 0
        code, second, _ = run(
            capsys, "bloomtest", str(uniform_csv), "--probes", "40", "--seed", "21",
        )
        assert first == second
