"""``asymspec`` command line: run a config, reproduce a figure, or probe high-order terms."""

from __future__ import annotations

import argparse
import logging
import math
import os
import sys

from ..errors import AsymSpecError, ConfigError
from ..matcore import RngStream, gen_rank1_symmetric
from ..neumann import probe_high_order
from ..noise import NoiseModel
from .config import FIGURES, load_config, preset
from .report import PlotSpec, emit_csv, emit_plot, ensure_dir
from .sweep import default_jobs, failure_rate, run_sweep

log = logging.getLogger("asymspec")

MAX_FAILURE_RATE = 0.01


def _parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="asymspec", description=__doc__)
    ap.add_argument("-v", "--verbose", action="store_true")
    sub = ap.add_subparsers(dest="command", required=True)

    run = sub.add_parser("run", help="run a sweep described by a config file")
    run.add_argument("--config", required=True)
    run.add_argument("--out", default=None, help="CSV path (default <id>.csv)")
    run.add_argument("--plot", default=None, help="also write an SVG plot here")
    run.add_argument("--seed", type=int, default=None)
    run.add_argument("--trials", type=int, default=None)
    run.add_argument("--jobs", type=int, default=None)

    fig = sub.add_parser("figure", help="reproduce one figure preset")
    fig.add_argument("figure", choices=FIGURES)
    fig.add_argument("--out-dir", default=".")
    fig.add_argument("--seed", type=int, default=None)
    fig.add_argument("--trials", type=int, default=None)
    fig.add_argument("--jobs", type=int, default=None)

    probe = sub.add_parser("probe", help="Monte Carlo law of a' H^s u*")
    probe.add_argument("--s", type=int, required=True)
    probe.add_argument("--n", type=int, required=True)
    probe.add_argument("--model", choices=("iid-gaussian", "symmetric-gaussian"), required=True)
    probe.add_argument("--sigma", type=float, default=None, help="default 1/sqrt(n log n)")
    probe.add_argument("--trials", type=int, default=2000)
    probe.add_argument("--seed", type=int, default=0)
    return ap


def _check(cfg, args):
    if args.trials is not None and args.trials < 1:
        raise ConfigError("--trials must be >= 1")
    if args.jobs is not None and args.jobs < 1:
        raise ConfigError("--jobs must be >= 1")
    return cfg.with_overrides(master_seed=args.seed, trials=args.trials)


def _sweep(cfg, jobs, csv_path, plot_path) -> int:
    records = run_sweep(cfg, jobs=jobs if jobs is not None else default_jobs())
    emit_csv(records, csv_path)
    log.info("wrote %d rows to %s", len(records), csv_path)
    if plot_path:
        xlabel = {"n": "n", "sigma": "sigma", "p": "p"}[cfg.sweep_variable]
        emit_plot(records, plot_path, PlotSpec(metrics=cfg.plot_metrics, title=cfg.experiment_id,
                                               xlabel=xlabel))
        log.info("wrote plot to %s", plot_path)
    rate = failure_rate(records)
    if rate > MAX_FAILURE_RATE:
        print(f"estimator failure rate {rate:.2%} exceeds {MAX_FAILURE_RATE:.0%}", file=sys.stderr)
        return 1
    return 0


def main(argv=None) -> int:
    args = _parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        if args.command == "run":
            cfg = _check(load_config(args.config), args)
            out = args.out or f"{cfg.experiment_id}.csv"
            return _sweep(cfg, args.jobs, out, args.plot)
        if args.command == "figure":
            cfg = _check(preset(args.figure), args)
            ensure_dir(args.out_dir)
            base = os.path.join(args.out_dir, args.figure)
            return _sweep(cfg, args.jobs, base + ".csv", base + ".svg")
        # probe
        if args.s < 1 or args.n < 2 or args.trials < 2:
            raise ConfigError("probe needs s >= 1, n >= 2 and trials >= 2")
        sigma = args.sigma if args.sigma is not None else 1.0 / math.sqrt(args.n * math.log(args.n))
        stream = RngStream(args.seed, (0,))
        truth = gen_rank1_symmetric(args.n, rng=stream.child(0))
        res = probe_high_order(truth.u_star, NoiseModel(args.model, sigma=sigma), truth.u_star,
                               args.s, args.trials, stream.child(1))
        print(f"model={args.model} n={args.n} s={args.s} sigma={sigma:.6g} trials={args.trials}")
        print(f"mean={res.mean:.6g} sem={res.sem:.3g} q95_abs={res.quantile95:.6g}")
        print(f"reference: sigma^2={sigma ** 2:.6g} n*sigma^2={args.n * sigma ** 2:.6g}")
        return 0
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return 2
    except AsymSpecError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
