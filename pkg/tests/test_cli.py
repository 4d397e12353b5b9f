import json
import subprocess
import sys

import numpy as np
import pytest

from fundalloc.cli import main
from fundalloc.formats import read_cohort_csv, read_histogram_csv, sidecar_path

DATASET = [
    {
        "researcher_id": f"r{i}",
        "institute_id": "inst",
        "publications": [
            {"id": f"r{i}-a", "year": 2011, "citations_by_year": {"2012": i}},
            {"id": f"r{i}-b", "year": 2013, "citations_by_year": {"2013": 2 * i, "2016": 1}},
            {"id": f"r{i}-c", "year": 2016, "citations_by_year": {"2017": 3 * i}},
        ],
    }
    for i in range(6)
]


@pytest.fixture
def dataset_file(tmp_path):
    path = tmp_path / "dataset.json"
    path.write_text(json.dumps(DATASET))
    return path


@pytest.fixture
def synth_file(tmp_path):
    assert main(["--output-dir", str(tmp_path), "--seed", "3", "synth", "--n", "50", "--rho", "1.0"]) == 0
    return tmp_path / "synth.csv"


class TestAllocate:
    def test_equal_scores_print_thirds(self, capsys):
        assert main(["allocate", "--scores", "1,1,1", "--budget", "1", "--alpha", "0", "--gamma", "2"]) == 0
        assert capsys.readouterr().out.strip() == "0.333333,0.333333,0.333333"

    def test_proportional_shares(self, capsys):
        assert main(["allocate", "--scores", "1,2,3", "--alpha", "0", "--gamma", "1"]) == 0
        assert capsys.readouterr().out.strip() == "0.166667,0.333333,0.500000"

    def test_writes_csv_with_sidecar(self, tmp_path, capsys):
        out = tmp_path / "alloc.csv"
        assert main(["allocate", "--scores", "1,3", "--alpha", "0.5", "--lambda", "1", "--gamma", "2",
                     "--output", str(out)]) == 0
        lines = out.read_text().strip().splitlines()
        assert lines[1].startswith("0,0.3")
        assert json.loads(sidecar_path(out).read_text())["params"]["gamma"] == 2.0

    def test_bad_gamma_is_runtime_error(self, capsys):
        assert main(["allocate", "--scores", "1,2", "--gamma", "0"]) == 1
        assert "gamma" in capsys.readouterr().err

    def test_unknown_flag_is_usage_error(self, capsys):
        assert main(["allocate", "--scores", "1,2", "--no-such-flag"]) == 2
        assert "usage" in capsys.readouterr().err


class TestLottery:
    def test_probabilities_to_stdout(self, capsys):
        assert main(["lottery", "--scores", "1,1,1,1", "--alpha", "1"]) == 0
        assert capsys.readouterr().out.strip() == "0.250000,0.250000,0.250000,0.250000"

    def test_seeded_draw_is_byte_identical(self, tmp_path, synth_file, capsys):
        a = tmp_path / "a.json"
        b = tmp_path / "b.json"
        base = ["--seed", "42", "lottery", "--draw", "--k", "5", "--alpha", "0",
                "--scores-file", str(synth_file)]
        assert main(base + ["--output", str(a)]) == 0
        out1 = capsys.readouterr().out
        assert main(base + ["--output", str(b)]) == 0
        out2 = capsys.readouterr().out
        assert a.read_bytes() == b.read_bytes()
        assert "seed: 42" in out1
        assert out1.replace(str(a), "X") == out2.replace(str(b), "X")

    def test_draw_without_seed_prints_generated_seed(self, tmp_path, synth_file, capsys):
        out = tmp_path / "draw.json"
        assert main(["lottery", "--draw", "--k", "2", "--alpha", "0.5", "--tau", "0.1",
                     "--scores-file", str(synth_file), "--output", str(out)]) == 0
        printed = capsys.readouterr().out
        seed = int(printed.split("seed: ")[1].splitlines()[0])
        assert json.loads(out.read_text())["rng_seed"] == seed


class TestBacktest:
    def test_det_gamma_sweep_monotone_on_persistent_cohort(self, tmp_path, synth_file, capsys):
        out = tmp_path / "bt.csv"
        assert main(["backtest", "--mechanism", "det", "--cohort", str(synth_file),
                     "--alpha-grid", "0", "--lambda-grid", "0", "--gamma-grid", "1,2,4,8",
                     "--output", str(out)]) == 0
        rows = out.read_text().strip().splitlines()[1:]
        utilities = [float(r.split(",")[-1]) for r in rows]
        assert utilities == sorted(utilities)
        summary = json.loads(out.with_suffix(".summary.json").read_text())
        assert summary["best_params"]["gamma"] == 8.0

    def test_stoch_reproducible_with_seed(self, tmp_path, synth_file, capsys):
        a = tmp_path / "a.csv"
        b = tmp_path / "b.csv"
        base = ["--seed", "11", "backtest", "--mechanism", "stoch", "--cohort", str(synth_file),
                "--alpha-grid", "0,0.5", "--tau-grid", "0.1", "--k-grid", "1,3",
                "--seed-grant-grid", "0", "--gamma-cond-grid", "1", "--n-draws", "30"]
        assert main(base + ["--output", str(a)]) == 0
        assert main(base + ["--output", str(b)]) == 0
        assert a.read_bytes() == b.read_bytes()

    def test_det_warns_that_n_draws_is_ignored(self, tmp_path, synth_file, capsys):
        assert main(["--output-dir", str(tmp_path), "backtest", "--mechanism", "det",
                     "--cohort", str(synth_file), "--alpha-grid", "0", "--lambda-grid", "0",
                     "--gamma-grid", "1", "--n-draws", "5"]) == 0
        assert "ignored" in capsys.readouterr().out


class TestCohortPipeline:
    def test_cohort_from_dataset(self, tmp_path, dataset_file, capsys):
        assert main(["--output-dir", str(tmp_path), "cohort", "--dataset", str(dataset_file),
                     "--year", "2015"]) == 0
        c = read_cohort_csv(tmp_path / "cohort.csv")
        assert len(c) == 6
        meta = json.loads(sidecar_path(tmp_path / "cohort.csv").read_text())
        assert meta["reference_window"] == [2010, 2014]
        assert meta["future_window"] == [2015, 2019]

    def test_explicit_windows(self, tmp_path, dataset_file):
        assert main(["--output-dir", str(tmp_path), "cohort", "--dataset", str(dataset_file),
                     "--reference", "2010:2014", "--future", "2015:2019"]) == 0

    def test_ingest_local_file_roundtrip(self, tmp_path, dataset_file, capsys):
        assert main(["--output-dir", str(tmp_path), "ingest", "--input", str(dataset_file)]) == 0
        assert (tmp_path / "dataset.json").exists()

    def test_ingest_fetch_blocked_by_no_network(self, tmp_path, monkeypatch, capsys):
        monkeypatch.setenv("NO_NETWORK", "1")
        assert main(["--output-dir", str(tmp_path), "ingest", "--author", "A5"]) == 1
        assert "NO_NETWORK" in capsys.readouterr().err


class TestSynthCurveHist:
    def test_synth_reproducible(self, tmp_path, capsys):
        a_dir = tmp_path / "a"
        b_dir = tmp_path / "b"
        for d in (a_dir, b_dir):
            assert main(["--output-dir", str(d), "--seed", "9", "synth", "--n", "40", "--rho", "0.5"]) == 0
        assert (a_dir / "synth.csv").read_bytes() == (b_dir / "synth.csv").read_bytes()

    def test_curve_stdout(self, capsys):
        assert main(["curve", "--alpha", "0", "--gamma", "1", "--points", "3"]) == 0
        lines = capsys.readouterr().out.strip().splitlines()
        assert lines[0] == "s,share"
        shares = [float(l.split(",")[1]) for l in lines[1:]]
        assert shares == pytest.approx([0.0, 1 / 3, 2 / 3])

    def test_hist2d(self, tmp_path, synth_file):
        out = tmp_path / "h.csv"
        assert main(["hist2d", "--cohort", str(synth_file), "--bins", "5", "--output", str(out)]) == 0
        grid = read_histogram_csv(out)
        assert grid.sum() == 50


class TestEntryPoint:
    def test_console_script_runs(self):
        proc = subprocess.run(
            [sys.executable, "-m", "fundalloc.cli", "allocate", "--scores", "1,1", "--alpha", "0"],
            capture_output=True, text=True,
        )
        assert proc.returncode == 0
        assert proc.stdout.strip() == "0.500000,0.500000"
