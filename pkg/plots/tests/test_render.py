import csv
import os
from pathlib import Path

import pytest

from rlncs_plots import MissingColumnError, render, spec_for_kind
from rlncs_plots.cli import main as cli_main

AGG_COLUMNS = ["param", "value", "method", "tnmse_db", "tnmse_roi_db",
               "recall_pct", "action2_pct", "n_seeds", "stderr"]

# representative sweep shapes mirroring the harness outputs
SWEEPS = {
    "tp01": [0.02, 0.2, 0.4, 0.6],
    "m": [20, 30, 40],
    "snr": [5.0, 10.0, 20.0],
    "fault": [0.1, 0.3, 0.6],
}


def write_agg(path: Path, param: str, values, methods=("rlncs", "uniform")):
    with open(path, "w", newline="") as f:
        w = csv.writer(f)
        w.writerow(AGG_COLUMNS)
        for i, v in enumerate(values):
            for m in methods:
                has_agent = m != "uniform"
                w.writerow([
                    param, v, m,
                    -20.0 + 2 * i + (3 if m == "uniform" else 0),
                    -26.0 + 2 * i + (3 if m == "uniform" else 0),
                    90.0 - 5 * i if has_agent else "",
                    10.0 * i if has_agent else "",
                    3, 0.4,
                ])
    return path


@pytest.fixture
def agg_csv(tmp_path):
    return write_agg(tmp_path / "agg.csv", "tp01", SWEEPS["tp01"])


class TestRender:
    @pytest.mark.parametrize("kind", ["tnmse", "recall", "actions"])
    def test_kinds_render(self, tmp_path, agg_csv, kind):
        out = render(spec_for_kind(agg_csv, kind, tmp_path / f"{kind}.png"))
        assert out.exists() and out.stat().st_size > 1000

    @pytest.mark.parametrize("param", sorted(SWEEPS))
    def test_every_sweep_shape(self, tmp_path, param):
        csv_path = write_agg(tmp_path / f"{param}.csv", param, SWEEPS[param])
        out = render(spec_for_kind(csv_path, "tnmse", tmp_path / f"{param}.png"))
        assert out.exists()

    def test_two_point_single_method(self, tmp_path):
        csv_path = write_agg(tmp_path / "one.csv", "m", [20, 40],
                             methods=("uniform",))
        out = render(spec_for_kind(csv_path, "tnmse", tmp_path / "one.png"))
        assert out.exists()

    def test_byte_stable(self, tmp_path, agg_csv):
        a = render(spec_for_kind(agg_csv, "tnmse", tmp_path / "a.png"))
        b = render(spec_for_kind(agg_csv, "tnmse", tmp_path / "b.png"))
        assert a.read_bytes() == b.read_bytes()

    def test_missing_column_named(self, tmp_path):
        path = tmp_path / "trunc.csv"
        with open(path, "w", newline="") as f:
            w = csv.writer(f)
            w.writerow([c for c in AGG_COLUMNS if c != "tnmse_db"])
            w.writerow(["tp01", 0.02, "rlncs", -26.0, 90.0, 10.0, 3, 0.4])
        with pytest.raises(MissingColumnError, match="tnmse_db"):
            render(spec_for_kind(path, "tnmse", tmp_path / "x.png"))

    def test_empty_csv_rejected(self, tmp_path):
        path = tmp_path / "empty.csv"
        with open(path, "w", newline="") as f:
            csv.writer(f).writerow(AGG_COLUMNS)
        with pytest.raises(ValueError, match="no data rows"):
            render(spec_for_kind(path, "tnmse", tmp_path / "x.png"))


class TestHarnessArtifacts:
    """Render the real sweep tables when the harness has produced them."""

    def artifact_dirs(self):
        root = Path(os.environ.get("RLNCS_ARTIFACTS",
                                   Path(__file__).resolve().parents[2] / "artifacts"))
        return sorted(root.glob("sweep_*/agg.csv"))

    def test_render_all_harness_sweeps(self, tmp_path):
        tables = self.artifact_dirs()
        if not tables:
            pytest.skip("no harness artifacts present")
        for table in tables:
            for kind in ("tnmse", "recall", "actions"):
                out = render(spec_for_kind(table, kind,
                                           tmp_path / f"{table.parent.name}-{kind}.png"))
                assert out.exists() and out.stat().st_size > 1000


class TestCli:
    def test_success(self, tmp_path, agg_csv):
        rc = cli_main(["--csv", str(agg_csv), "--kind", "tnmse",
                       "--out", str(tmp_path / "fig.png")])
        assert rc == 0
        assert (tmp_path / "fig.png").exists()

    def test_failure_on_truncated(self, tmp_path, capsys):
        path = tmp_path / "trunc.csv"
        with open(path, "w", newline="") as f:
            w = csv.writer(f)
            w.writerow([c for c in AGG_COLUMNS if c != "action2_pct"])
        rc = cli_main(["--csv", str(path), "--kind", "actions",
                       "--out", str(tmp_path / "fig.png")])
        assert rc == 1
        assert "action2_pct" in capsys.readouterr().err
