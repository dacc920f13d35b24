"""Command-line entry points."""

import json

import numpy as np
import pytest

from rqsim.cli import main
from rqsim.diffusion import simulate_si
from rqsim.graphs import make_regular_tree


def run_cli(capsys, *argv) -> tuple[int, str, str]:
    code = main(list(argv))
    captured = capsys.readouterr()
    return code, captured.out, captured.err


class TestRStar:
    def test_reference_value(self, capsys):
        code, out, _ = run_cli(
            capsys, "rstar", "--scheme", "na", "--kind", "sufficient",
            "--d", "3", "--p", "0.6667", "--q", "0.6667", "--k", "200",
        )
        assert code == 0
        assert out.strip() == "3"

    def test_ad_value(self, capsys):
        code, out, _ = run_cli(
            capsys, "rstar", "--scheme", "ad", "--kind", "sufficient",
            "--d", "3", "--p", "0.6667", "--q", "0.6667", "--k", "200",
        )
        assert code == 0
        assert out.strip() == "4"


class TestBudget:
    def test_na_sufficient_row(self, capsys):
        code, out, _ = run_cli(
            capsys, "budget", "--scheme", "na", "--kind", "sufficient",
            "--delta", "0.02", "--d", "3", "--p", "0.75", "--q", "0.6",
        )
        assert code == 0
        lines = out.strip().splitlines()
        assert lines[0] == "scheme,kind,delta,d,p,q,K"
        value = float(lines[1].split(",")[-1])
        assert abs(value - 1.24e4) / 1.24e4 < 0.01

    def test_necessary_with_ht(self, capsys):
        code, out, _ = run_cli(
            capsys, "budget", "--scheme", "ad", "--kind", "necessary",
            "--delta", "0.02", "--d", "3", "--p", "0.8", "--q", "0.7", "--ht", "12",
        )
        assert code == 0
        assert float(out.strip().splitlines()[1].split(",")[-1]) > 0

    def test_necessary_default_entropy_bound(self, capsys):
        # no --ht and no --r: the self-consistent default resolves to a
        # finite order-of-magnitude figure
        code, out, _ = run_cli(
            capsys, "budget", "--scheme", "na", "--kind", "necessary",
            "--delta", "0.02", "--d", "3", "--p", "0.75", "--q", "0.6",
        )
        assert code == 0
        value = float(out.strip().splitlines()[1].split(",")[-1])
        assert value > 1

    def test_domain_error_is_reported(self, capsys):
        code, _, err = run_cli(
            capsys, "budget", "--scheme", "na", "--kind", "sufficient",
            "--delta", "0.9", "--d", "3", "--p", "0.8", "--q", "0.7",
        )
        assert code == 1
        assert "error" in err


class TestSimulate:
    def test_csv_output_and_reproducibility(self, capsys, tmp_path):
        args = (
            "simulate", "--graph", "regular:3", "--n", "30", "--scheme", "ad",
            "--k", "20", "--p", "0.8", "--q", "0.8", "--trials", "5",
            "--seed", "42", "--zero-timing",
        )
        code, out1, _ = run_cli(capsys, *args)
        assert code == 0
        code, out2, _ = run_cli(capsys, *args)
        assert out1 == out2
        header, row = out1.strip().splitlines()
        assert header.startswith("scheme,graph,d,n,K,r,p,q")
        fields = row.split(",")
        assert fields[0] == "ad"
        assert 0.0 <= float(fields[10]) <= 1.0

    def test_json_output_to_file(self, capsys, tmp_path):
        out_path = tmp_path / "rows.json"
        code, _, _ = run_cli(
            capsys, "simulate", "--graph", "regular:3", "--n", "25", "--scheme", "na",
            "--k", "10,20", "--p", "0.9", "--q", "0.9", "--trials", "3",
            "--seed", "1", "--format", "json", "--output", str(out_path),
        )
        assert code == 0
        docs = json.loads(out_path.read_text())
        assert [d["K"] for d in docs] == [10, 20]

    def test_config_file_with_flag_override(self, capsys, tmp_path):
        cfg = tmp_path / "run.json"
        cfg.write_text(json.dumps({
            "graph": "regular:3", "scheme": "na", "k": "15", "p": "0.9",
            "q": "0.9", "n": 20, "trials": 2, "seed": 7,
        }))
        code, out, _ = run_cli(capsys, "simulate", "--config", str(cfg), "--scheme", "ad")
        assert code == 0
        assert out.splitlines()[1].split(",")[0] == "ad"

    def test_missing_required_flags(self, capsys):
        code, _, err = run_cli(capsys, "simulate", "--graph", "regular:3")
        assert code == 2
        assert "required" in err

    def test_bad_flags_exit_nonzero(self, capsys):
        with pytest.raises(SystemExit) as exc:
            main(["simulate", "--nonsense"])
        assert exc.value.code == 2
        assert "usage" in capsys.readouterr().err


class TestSnapshotTools:
    @pytest.fixture
    def snapshot_file(self, tmp_path):
        rng = np.random.default_rng(6)
        snap = simulate_si(make_regular_tree(3), 0, 9, rng)
        path = tmp_path / "snap.json"
        path.write_text(snap.to_json())
        return path, snap

    def test_centrality_table(self, capsys, snapshot_file):
        path, snap = snapshot_file
        code, out, _ = run_cli(capsys, "centrality", "--snapshot", str(path), "--top", "3")
        assert code == 0
        lines = out.strip().splitlines()
        assert lines[0] == "rank,node,log_score,is_center"
        assert len(lines) == 4
        scores = [float(line.split(",")[2]) for line in lines[1:]]
        assert scores == sorted(scores, reverse=True)

    def test_oracle_distance(self, capsys):
        code, out, _ = run_cli(capsys, "oracle", "distance", "--d", "3", "--k", "4")
        assert code == 0
        lines = out.strip().splitlines()
        assert lines[0] == "l,probability"
        assert lines[-1].startswith("sum,")
        assert float(lines[-1].split(",")[1]) == pytest.approx(1.0, abs=1e-9)

    def test_oracle_orderings(self, capsys, snapshot_file):
        path, snap = snapshot_file
        code, out, _ = run_cli(capsys, "oracle", "orderings", "--snapshot", str(path))
        assert code == 0
        lines = out.strip().splitlines()[1:]
        assert len(lines) == snap.n
        counts = {int(a): int(b) for a, b in (line.split(",") for line in lines)}
        assert all(c >= 1 for c in counts.values())
