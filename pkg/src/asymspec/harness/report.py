"""CSV and SVG output for sweep records."""

from __future__ import annotations

import csv
import math
import os
from dataclasses import dataclass

from ..errors import ParameterError
from ..metrics import mean_and_sem
from .sweep import CSV_FIELDS, TrialRecord


@dataclass(frozen=True)
class PlotSpec:
    metrics: tuple = ("lambda_err",)
    xlog: bool = True
    ylog: bool = True
    title: str | None = None
    xlabel: str | None = None


@dataclass(frozen=True)
class SeriesPoint:
    sweep_value: float
    mean: float
    sem: float
    count: int


def _fmt(value) -> str:
    if isinstance(value, float):
        return repr(value)
    return str(value)


def emit_csv(records, path) -> None:
    """Write records under the fixed header; an empty list gives a header-only file."""
    try:
        with open(path, "w", newline="", encoding="utf-8") as fh:
            writer = csv.writer(fh, lineterminator="\n")
            writer.writerow(CSV_FIELDS)
            for r in records:
                writer.writerow([_fmt(getattr(r, f)) for f in CSV_FIELDS])
    except OSError as exc:
        raise OSError(f"cannot write CSV to {path}: {exc}") from exc


def read_csv(path) -> list[TrialRecord]:
    try:
        with open(path, newline="", encoding="utf-8") as fh:
            reader = csv.DictReader(fh)
            if tuple(reader.fieldnames or ()) != CSV_FIELDS:
                raise ParameterError(f"{path}: unexpected header {reader.fieldnames}")
            return [TrialRecord(row["experiment_id"], int(row["n"]), float(row["sweep_value"]),
                                int(row["trial"]), row["estimator"], float(row["lambda_err"]),
                                float(row["l2_err"]), float(row["linf_err"]),
                                float(row["linear_form_err"]), float(row["mu"]), int(row["seed"]),
                                row["status"]) for row in reader]
    except OSError as exc:
        raise OSError(f"cannot read CSV from {path}: {exc}") from exc


def aggregate(records, metric: str) -> dict[str, list[SeriesPoint]]:
    """Per-estimator mean and SEM of ``metric`` at each sweep value, failed rows skipped."""
    groups: dict[str, dict[float, list[float]]] = {}
    for r in records:
        per_est = groups.setdefault(r.estimator, {})
        bucket = per_est.setdefault(r.sweep_value, [])
        if r.ok:
            bucket.append(getattr(r, metric))
    out = {}
    for tag, points in groups.items():
        series = []
        for value in sorted(points):
            vals = points[value]
            if vals:
                mean, sem = mean_and_sem(vals)
            else:
                mean, sem = math.nan, math.nan
            series.append(SeriesPoint(value, mean, sem, len(vals)))
        out[tag] = series
    return out


def emit_plot(records, path, spec: PlotSpec | None = None) -> dict[str, dict[str, list[SeriesPoint]]]:
    """Standalone SVG: one panel per metric, one errorbar line per estimator.

    Returns the plotted series keyed by metric then estimator.
    """
    records = list(records)
    if not records:
        raise ParameterError("emit_plot needs at least one record")
    spec = spec or PlotSpec()
    import matplotlib
    matplotlib.use("Agg")
    import matplotlib.pyplot as plt

    plotted = {}
    with matplotlib.rc_context({"svg.hashsalt": "asymspec", "svg.fonttype": "none"}):
        fig, axes = plt.subplots(1, len(spec.metrics), figsize=(4.2 * len(spec.metrics), 3.6),
                                 squeeze=False)
        for ax, metric in zip(axes[0], spec.metrics):
            series = aggregate(records, metric)
            plotted[metric] = series
            for tag, pts in series.items():
                xs = [p.sweep_value for p in pts]
                ys = [p.mean for p in pts]
                es = [p.sem for p in pts]
                ax.errorbar(xs, ys, yerr=es, marker="o", markersize=4, capsize=3, label=tag,
                            linestyle="-" if len(pts) > 1 else "none")
            if spec.xlog:
                ax.set_xscale("log")
            if spec.ylog:
                ax.set_yscale("log")
            ax.set_xlabel(spec.xlabel or _sweep_label(records))
            ax.set_ylabel(metric)
            ax.grid(True, which="both", alpha=0.3)
            ax.legend(fontsize=8)
        if spec.title:
            fig.suptitle(spec.title)
        fig.tight_layout()
        try:
            fig.savefig(path, format="svg", metadata={"Date": None})
        except OSError as exc:
            raise OSError(f"cannot write plot to {path}: {exc}") from exc
        finally:
            plt.close(fig)
    return plotted


def _sweep_label(records) -> str:
    if all(r.sweep_value == r.n for r in records):
        return "n"
    return "sweep value"


def ensure_dir(path) -> None:
    if path:
        os.makedirs(path, exist_ok=True)
