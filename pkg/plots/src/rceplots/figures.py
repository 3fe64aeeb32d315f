"""Figure builders over the experiment CSV schemas.

Experiment 1 CSVs become mean-distance line charts (one line per
perturbation op); experiment 2 and 3 CSVs become boxplots with an orange
median line and a dashed green mean line.  One figure is emitted per
(rule, model, model_param) cell found in the CSV, plus a figure manifest.

Every statistic that ends up in a figure is computed here and returned to
the caller, so tests can recompute it independently from the CSV.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from pathlib import Path

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt
import pandas as pd

REQUIRED_COLUMNS = {
    1: ("model", "model_param", "rule", "op", "change_pct", "election_idx",
        "trial_idx", "distance"),
    2: ("model", "model_param", "rule", "op", "change_pct", "election_idx",
        "trial_idx", "dist_lexi", "dist_opt", "diff", "tied_found"),
    3: ("model", "model_param", "rule", "op", "change_pct", "election_idx",
        "round_idx", "member", "replaced_fraction"),
}

CELL_KEYS = ("rule", "model", "model_param")

VALUE_COLUMN = {2: "diff", 3: "replaced_fraction"}
GROUP_COLUMN = {2: "change_pct", 3: "round_idx"}


class SchemaError(ValueError):
    """The CSV lacks columns the figure needs; the message lists them."""


@dataclass(frozen=True)
class FigureSpec:
    """What to plot and where to put it."""

    experiment: int
    csv_path: Path
    out_dir: Path
    formats: tuple[str, ...] = ("pdf", "png")
    group_keys: tuple[str, ...] = CELL_KEYS

    def __post_init__(self):
        if self.experiment not in REQUIRED_COLUMNS:
            raise ValueError(f"unknown experiment {self.experiment}")
        object.__setattr__(self, "csv_path", Path(self.csv_path))
        object.__setattr__(self, "out_dir", Path(self.out_dir))
        for fmt in self.formats:
            if fmt not in ("pdf", "png", "svg"):
                raise ValueError(f"unsupported figure format {fmt!r}")


@dataclass
class FigureResult:
    """Emitted files plus the statistics that were drawn, per cell."""

    files: list[Path] = field(default_factory=list)
    # cell label -> {series label -> {x value -> {stat name -> value}}}
    stats: dict = field(default_factory=dict)


def load_rows(spec: FigureSpec) -> pd.DataFrame:
    frame = pd.read_csv(spec.csv_path)
    missing = [c for c in REQUIRED_COLUMNS[spec.experiment] if c not in frame.columns]
    if missing:
        raise SchemaError(
            f"{spec.csv_path} is missing required columns: {', '.join(missing)}"
        )
    return frame


def _cell_label(keys: tuple, values: tuple) -> str:
    return "_".join(str(v) for v in values)


def _save(fig, spec: FigureSpec, stem: str, result: FigureResult) -> None:
    spec.out_dir.mkdir(parents=True, exist_ok=True)
    for fmt in spec.formats:
        path = spec.out_dir / f"{stem}.{fmt}"
        fig.savefig(path, metadata={} if fmt == "png" else None)
        result.files.append(path)
    plt.close(fig)


def _empty_figure(spec: FigureSpec, stem: str, title: str, result: FigureResult) -> None:
    fig, ax = plt.subplots(figsize=(4.2, 3.2))
    ax.set_title(title)
    ax.set_xticks([])
    ax.set_yticks([])
    _save(fig, spec, stem, result)


def plot_exp1(spec: FigureSpec) -> FigureResult:
    """Mean committee distance vs change percentage, one line per op,
    one figure per (rule, model, model_param) cell."""
    frame = load_rows(spec)
    result = FigureResult()
    if frame.empty:
        _empty_figure(spec, "exp1_empty", "experiment 1 (no rows)", result)
        return result
    for values, cell in frame.groupby(list(spec.group_keys), sort=True):
        label = _cell_label(spec.group_keys, values)
        fig, ax = plt.subplots(figsize=(4.2, 3.2))
        cell_stats: dict = {}
        for op, rows in cell.groupby("op", sort=True):
            means = rows.groupby("change_pct")["distance"].mean().sort_index()
            cell_stats[str(op)] = {
                float(pct): {"mean": float(v)} for pct, v in means.items()
            }
            ax.plot(
                [pct * 100 for pct in means.index],
                means.values,
                marker="o",
                markersize=3,
                label=str(op),
            )
        ax.set_xlabel("change percentage")
        ax.set_ylabel("average committee distance")
        ax.set_title(label.replace("_", " "))
        ax.legend(fontsize=8)
        fig.tight_layout()
        _save(fig, spec, f"exp1_{label}", result)
        result.stats[label] = cell_stats
    return result


def _box_stats(values: list[float]) -> dict:
    series = pd.Series(values, dtype=float)
    q1 = float(series.quantile(0.25))
    q3 = float(series.quantile(0.75))
    iqr = q3 - q1
    lo_limit = q1 - 1.5 * iqr
    hi_limit = q3 + 1.5 * iqr
    inliers = series[(series >= lo_limit) & (series <= hi_limit)]
    return {
        "mean": float(series.mean()),
        "med": float(series.median()),
        "q1": q1,
        "q3": q3,
        "whislo": float(inliers.min()) if not inliers.empty else q1,
        "whishi": float(inliers.max()) if not inliers.empty else q3,
        "fliers": [float(v) for v in series[(series < lo_limit) | (series > hi_limit)]],
    }


def plot_box(spec: FigureSpec) -> FigureResult:
    """Boxplots per cell: experiment 2 groups the tie-breaking price by
    change percentage, experiment 3 groups the replacement frequency by
    selection round.  Median drawn in orange, mean as a dashed green line."""
    if spec.experiment not in (2, 3):
        raise ValueError("plot_box handles experiments 2 and 3")
    frame = load_rows(spec)
    value_col = VALUE_COLUMN[spec.experiment]
    group_col = GROUP_COLUMN[spec.experiment]
    result = FigureResult()
    if frame.empty:
        _empty_figure(spec, f"exp{spec.experiment}_empty",
                      f"experiment {spec.experiment} (no rows)", result)
        return result
    for values, cell in frame.groupby(list(spec.group_keys), sort=True):
        label = _cell_label(spec.group_keys, values)
        fig, ax = plt.subplots(figsize=(4.2, 3.2))
        boxes = []
        cell_stats: dict = {}
        for group_value, rows in cell.groupby(group_col, sort=True):
            stats = _box_stats(list(rows[value_col]))
            tick = (
                f"{float(group_value) * 100:.2g}"
                if group_col == "change_pct"
                else str(int(group_value))
            )
            boxes.append({"label": tick, **stats})
            cell_stats[str(group_value)] = {"mean": stats["mean"], "median": stats["med"]}
        ax.bxp(
            boxes,
            showmeans=True,
            meanline=True,
            medianprops={"color": "tab:orange"},
            meanprops={"color": "tab:green", "linestyle": "--"},
        )
        ax.set_xlabel("change percentage" if group_col == "change_pct" else "selection round")
        ax.set_ylabel(value_col)
        ax.set_title(label.replace("_", " "))
        fig.tight_layout()
        _save(fig, spec, f"exp{spec.experiment}_{label}", result)
        result.stats[label] = cell_stats
    return result


def plot(spec: FigureSpec) -> FigureResult:
    return plot_exp1(spec) if spec.experiment == 1 else plot_box(spec)


def write_figure_manifest(spec: FigureSpec, result: FigureResult) -> Path:
    """Record inputs, grouping, emitted files and the drawn statistics."""
    manifest = {
        "experiment": spec.experiment,
        "input_csv": str(spec.csv_path),
        "group_keys": list(spec.group_keys),
        "figures": [str(p) for p in result.files],
        "stats": result.stats,
    }
    path = spec.out_dir / f"exp{spec.experiment}_figures.manifest.json"
    path.write_text(json.dumps(manifest, indent=2) + "\n", encoding="utf-8")
    return path
