"""Experiment harness: configs, sweeps, CSV/SVG output and the command line."""

from .config import FIGURES, ExperimentConfig, dump_config, eval_expression, load_config, parse_config, preset
from .report import PlotSpec, SeriesPoint, aggregate, emit_csv, emit_plot, read_csv
from .sweep import CSV_FIELDS, METRICS, TrialRecord, failure_rate, run_sweep

__all__ = ["FIGURES", "ExperimentConfig", "dump_config", "eval_expression", "load_config",
           "parse_config", "preset", "PlotSpec", "SeriesPoint", "aggregate", "emit_csv", "emit_plot",
           "read_csv", "CSV_FIELDS", "METRICS", "TrialRecord", "failure_rate", "run_sweep"]
