"""Command-line front end: flag validation, report contents, exit codes,
machine-readable output, and the coverage/support subcommands.

All invocations go through main(argv) in-process so exit codes and
captured streams are exact.
"""

import json

import pytest

from binmix import cli
from binmix.ci import RootBracketFailure


def run(capsys, *argv):
    """Invoke the CLI and return (exit_code, stdout, stderr)."""
    try:
        code = cli.main(list(argv))
    except SystemExit as exc:  # argparse-style validation failures
        code = int(exc.code)
    out, err = capsys.readouterr()
    return code, out, err


MODEL = ["--w1", "0.3", "--n1", "20", "--n2", "30"]


class TestCiCommand:
    def test_standard_reference_interval(self, capsys, tmp_path):
        path = tmp_path / "ci.json"
        code, out, _ = run(capsys, "ci", *MODEL, "--k1", "2", "--k2", "0",
                           "--gamma", "0.95", "--method", "standard",
                           "--json", str(path))
        assert code == 0
        doc = json.loads(path.read_text())
        assert doc["lower"] == pytest.approx(0.004672159, abs=1e-4)
        assert doc["upper"] == pytest.approx(0.111730732, abs=1e-4)

    def test_randomized_reference_interval(self, capsys, tmp_path):
        path = tmp_path / "ci.json"
        code, out, _ = run(capsys, "ci", *MODEL, "--k1", "2", "--k2", "0",
                           "--method", "randomized", "--y", "0.2",
                           "--json", str(path))
        assert code == 0
        doc = json.loads(path.read_text())
        assert doc["lower"] == pytest.approx(0.000883203, abs=1e-4)
        assert doc["upper"] == pytest.approx(0.097443898, abs=1e-4)

    def test_report_echoes_every_input(self, capsys):
        code, out, _ = run(capsys, "ci", *MODEL, "--k1", "2", "--k2", "0",
                           "--method", "randomized", "--y", "0.2")
        assert code == 0
        for fragment in ("w1=0.3", "n1=20", "n2=30", "k1=2", "k2=0",
                         "gamma=0.95", "u=0.03", "y=0.2", "gamma1=",
                         "length", "sided="):
            assert fragment in out

    def test_count_above_sample_size_names_flag(self, capsys):
        code, _, err = run(capsys, "ci", *MODEL, "--k1", "21", "--k2", "0",
                           "--method", "standard")
        assert code == 2
        assert "--k1" in err and "21" in err

    def test_randomized_without_draw_or_seed_refuses(self, capsys):
        code, _, err = run(capsys, "ci", *MODEL, "--k1", "2", "--k2", "0",
                           "--method", "randomized")
        assert code == 2
        assert "--y" in err and "--seed" in err

    def test_seeded_draw_reported(self, capsys, tmp_path):
        path = tmp_path / "ci.json"
        code, out, _ = run(capsys, "ci", *MODEL, "--k1", "2", "--k2", "0",
                           "--method", "randomized", "--seed", "7",
                           "--json", str(path))
        assert code == 0
        doc = json.loads(path.read_text())
        assert 0.0 <= doc["y"] <= 1.0

    def test_machine_output_is_deterministic(self, capsys, tmp_path):
        a, b = tmp_path / "a.json", tmp_path / "b.json"
        args = ["ci", *MODEL, "--k1", "2", "--k2", "0", "--method",
                "randomized", "--seed", "7"]
        assert run(capsys, *args, "--json", str(a))[0] == 0
        assert run(capsys, *args, "--json", str(b))[0] == 0
        assert a.read_bytes() == b.read_bytes()

    def test_large_estimate_notes_reflection(self, capsys):
        code, out, _ = run(capsys, "ci", *MODEL, "--k1", "18", "--k2", "28",
                           "--method", "shortest")
        assert code == 0
        assert "reflect" in out.lower()

    def test_gamma_out_of_range_names_flag(self, capsys):
        code, _, err = run(capsys, "ci", *MODEL, "--k1", "2", "--k2", "0",
                           "--gamma", "0.4", "--method", "standard")
        assert code == 2
        assert "--gamma" in err

    def test_bad_weight_names_flag(self, capsys):
        code, _, err = run(capsys, "ci", "--w1", "1.5", "--n1", "20",
                           "--n2", "30", "--k1", "2", "--k2", "0",
                           "--method", "standard")
        assert code == 2
        assert "--w1" in err

    def test_numerical_failure_exits_one(self, capsys, monkeypatch):
        def boom(*args, **kwargs):
            raise RootBracketFailure("endpoint equation lost its bracket")
        monkeypatch.setattr(cli.ci_mod, "standard_ci", boom)
        code, _, err = run(capsys, "ci", *MODEL, "--k1", "2", "--k2", "0",
                           "--method", "standard")
        assert code == 1
        assert "bracket" in err


class TestCoverageCommand:
    def test_writes_csv_and_summary(self, capsys, tmp_path):
        path = tmp_path / "cov.csv"
        code, out, _ = run(capsys, "coverage", "--w1", "0.4", "--n1", "2",
                           "--n2", "3", "--method", "standard",
                           "--grid", "5", "--out", str(path))
        assert code == 0
        lines = path.read_text().strip().split("\n")
        assert lines[0] == "vartheta,coverage,expected_length"
        assert len(lines) == 6
        assert "min=" in out and "max=" in out

    def test_single_point_grid(self, capsys, tmp_path):
        path = tmp_path / "one.csv"
        code, _, _ = run(capsys, "coverage", "--w1", "0.4", "--n1", "2",
                         "--n2", "3", "--method", "standard", "--grid", "1",
                         "--out", str(path))
        assert code == 0
        rows = path.read_text().strip().split("\n")[1:]
        assert len(rows) == 1
        assert rows[0].startswith("0.5,")

    def test_shortest_sweep_dips_below_nominal(self, capsys, tmp_path):
        """The length-minimizing construction trades away the guarantee:
        somewhere on the default grid its exact coverage sits under the
        nominal level."""
        path = tmp_path / "short.csv"
        code, out, _ = run(capsys, "coverage", *MODEL, "--method", "shortest",
                           "--out", str(path))
        assert code == 0
        rows = path.read_text().strip().split("\n")[1:]
        assert len(rows) == 99
        assert min(float(r.split(",")[1]) for r in rows) < 0.95

    def test_randomized_sweep_holds_nominal(self, capsys, tmp_path):
        path = tmp_path / "rand.csv"
        code, _, _ = run(capsys, "coverage", "--w1", "0.4", "--n1", "3",
                         "--n2", "4", "--method", "randomized",
                         "--grid", "19", "--y-nodes", "16",
                         "--out", str(path))
        assert code == 0
        rows = path.read_text().strip().split("\n")[1:]
        assert min(float(r.split(",")[1]) for r in rows) >= 0.948

    def test_bad_grid_names_flag(self, capsys, tmp_path):
        code, _, err = run(capsys, "coverage", *MODEL, "--method", "standard",
                           "--grid", "0", "--out", str(tmp_path / "x.csv"))
        assert code == 2
        assert "--grid" in err


class TestSupportCommand:
    def test_neighbor_triple(self, capsys):
        code, out, _ = run(capsys, "support", *MODEL, "--around", "0.03")
        assert code == 0
        assert "size 497" in out
        triple = out.strip().split("\n")[-1].split()
        assert [float(x) for x in triple] == pytest.approx(
            [0.7 / 30, 0.03, 0.015 + 0.7 / 30], abs=1e-9)

    def test_single_trial_grid(self, capsys):
        code, out, _ = run(capsys, "support", "--w1", "0.5", "--n1", "1",
                           "--n2", "1")
        assert code == 0
        lines = out.strip().split("\n")
        assert lines[0] == "size 3"
        assert [float(x) for x in lines[1:]] == [0.0, 0.5, 1.0]

    def test_collision_heavy_grid_size(self, capsys):
        # 0.4/2 = 0.6/3, so all 12 count pairs land on 6 values
        code, out, _ = run(capsys, "support", "--w1", "0.4", "--n1", "2",
                           "--n2", "3")
        assert code == 0
        assert out.strip().split("\n")[0] == "size 6"

    def test_off_grid_around_value_exits_two(self, capsys):
        code, _, err = run(capsys, "support", *MODEL, "--around", "0.031")
        assert code == 2
        assert "--around" in err
