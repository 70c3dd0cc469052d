"""Render aggregated sweep tables into publication-style figures.

Input is the sweep harness's agg.csv (columns: param, value, method,
tnmse_db, tnmse_roi_db, recall_pct, action2_pct, n_seeds, stderr). One
figure per call: error-bar curves of a metric against the swept parameter,
one line per method, with a fixed method-to-style mapping so figures are
comparable and byte-stable across runs.
"""

from __future__ import annotations

import csv
from dataclasses import dataclass, field
from pathlib import Path

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt  # noqa: E402

REQUIRED_COLUMNS = ["param", "value", "method"]

# stable method -> (color, marker) assignment across every figure
METHOD_STYLE = {
    "rlncs": ("#1f77b4", "o"),
    "rlncs-2layer": ("#9467bd", "s"),
    "uniform": ("#d62728", "^"),
    "direct-only": ("#2ca02c", "v"),
}
FALLBACK_STYLE = ("#7f7f7f", "x")

RC_STYLE = {
    "figure.figsize": (6.4, 4.2),
    "figure.dpi": 120,
    "savefig.dpi": 120,
    "font.size": 10,
    "axes.grid": True,
    "grid.alpha": 0.35,
    "lines.linewidth": 1.6,
    "lines.markersize": 5.5,
}


class MissingColumnError(KeyError):
    def __init__(self, column: str, path):
        super().__init__(column)
        self.column = column
        self.path = path

    def __str__(self) -> str:
        return f"column '{self.column}' missing from {self.path}"


@dataclass
class FigureSpec:
    csv_path: Path
    x_column: str
    y_columns: dict[str, str]          # column -> legend label suffix
    out_path: Path
    y_label: str = ""
    err_column: str | None = None      # attached to the first y column
    db_scale: bool = False             # annotate that lower is better
    title: str = ""
    methods: tuple[str, ...] = field(default_factory=tuple)  # empty = all


def load_rows(path: Path, needed: list[str]) -> list[dict]:
    with open(path, newline="") as f:
        reader = csv.DictReader(f)
        header = reader.fieldnames or []
        for col in needed:
            if col not in header:
                raise MissingColumnError(col, path)
        rows = list(reader)
    if not rows:
        raise ValueError(f"no data rows in {path}")
    return rows


def render(spec: FigureSpec) -> Path:
    needed = REQUIRED_COLUMNS + [spec.x_column] + list(spec.y_columns)
    if spec.err_column:
        needed.append(spec.err_column)
    rows = load_rows(Path(spec.csv_path), needed)

    methods = spec.methods or tuple(dict.fromkeys(r["method"] for r in rows))
    first_y = next(iter(spec.y_columns))

    with plt.rc_context(RC_STYLE):
        fig, ax = plt.subplots()
        for method in methods:
            series = [r for r in rows if r["method"] == method]
            color, marker = METHOD_STYLE.get(method, FALLBACK_STYLE)
            for y_col, suffix in spec.y_columns.items():
                pts = [(float(r[spec.x_column]), float(r[y_col]),
                        float(r[spec.err_column]) if spec.err_column
                        and y_col == first_y and r[spec.err_column] else 0.0)
                       for r in series if r[y_col] != ""]
                if not pts:
                    continue
                pts.sort()
                xs, ys, es = zip(*pts)
                label = method if not suffix else f"{method} ({suffix})"
                dashed = y_col != first_y
                ax.errorbar(xs, ys, yerr=es if any(es) else None, color=color,
                            marker=marker, capsize=3,
                            linestyle="--" if dashed else "-", label=label)
        ax.set_xlabel(rows[0]["param"] if spec.x_column == "value" else spec.x_column)
        ax.set_ylabel(spec.y_label)
        if spec.db_scale:
            ax.annotate("lower is better", xy=(0.02, 0.03),
                        xycoords="axes fraction", fontsize=8, alpha=0.7)
        if spec.title:
            ax.set_title(spec.title)
        ax.legend()
        fig.tight_layout()
        out = Path(spec.out_path)
        out.parent.mkdir(parents=True, exist_ok=True)
        fig.savefig(out, metadata={"Software": "rlncs-plot"})
        plt.close(fig)
    return out


def spec_for_kind(csv_path: Path, kind: str, out_path: Path) -> FigureSpec:
    if kind == "tnmse":
        return FigureSpec(csv_path=csv_path, x_column="value",
                          y_columns={"tnmse_db": "", "tnmse_roi_db": "ROI"},
                          err_column="stderr", y_label="TNMSE (dB)",
                          db_scale=True, out_path=out_path)
    if kind == "recall":
        return FigureSpec(csv_path=csv_path, x_column="value",
                          y_columns={"recall_pct": ""},
                          y_label="recall (%)", out_path=out_path)
    if kind == "actions":
        return FigureSpec(csv_path=csv_path, x_column="value",
                          y_columns={"action2_pct": ""},
                          y_label="learned-action share (%)", out_path=out_path)
    raise ValueError(f"unknown figure kind {kind!r}")
