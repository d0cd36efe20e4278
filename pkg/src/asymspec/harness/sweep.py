"""Monte Carlo sweep execution."""

from __future__ import annotations

import logging
import math
import os
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass

import numpy as np

from .. import estimators as est
from .. import spectral
from ..errors import AsymSpecError
from ..matcore import (GroundTruth, RngStream, gen_rank1_asymmetric, gen_rank1_symmetric,
                       gen_rankr_symmetric, random_unit_vector, rank1_from_vector, unit_vector)
from ..metrics import sign_aligned_errors
from ..noise import NoiseModel, sample_additive, sample_noise
from .config import ExperimentConfig

log = logging.getLogger(__name__)

CSV_FIELDS = ("experiment_id", "n", "sweep_value", "trial", "estimator", "lambda_err", "l2_err",
              "linf_err", "linear_form_err", "mu", "seed", "status")
METRICS = ("lambda_err", "l2_err", "linf_err", "linear_form_err")

# stream keys outside the (sweep index, trial index) range
_FIXED_TRUTH = 2 ** 32
_DIRECTION = 2 ** 32 + 1


@dataclass(frozen=True)
class TrialRecord:
    experiment_id: str
    n: int
    sweep_value: float
    trial: int
    estimator: str
    lambda_err: float
    l2_err: float
    linf_err: float
    linear_form_err: float
    mu: float
    seed: int
    status: str = "ok"

    @property
    def ok(self) -> bool:
        return self.status == "ok"


def _noise_model(cfg: ExperimentConfig, sigma: float, p: float) -> NoiseModel:
    kind = cfg.noise_kind
    if kind == "bounded-uniform":
        return NoiseModel.uniform(sigma * math.sqrt(3.0))
    if kind in ("completion-mask", "symmetric-completion"):
        return NoiseModel(kind, p=p)
    return NoiseModel(kind, sigma=sigma)


def _truth(cfg: ExperimentConfig, n: int, stream: RngStream) -> GroundTruth:
    if cfg.truth_kind == "asymmetric":
        return gen_rank1_asymmetric(n, cfg.secondary_dim(n), cfg.eigenvalues[0], stream)
    if cfg.truth_kind == "covariance":
        d = cfg.secondary_dim(n)
        return rank1_from_vector(random_unit_vector(d, stream), cfg.eigenvalues[0])
    if len(cfg.eigenvalues) == 1:
        return gen_rank1_symmetric(n, cfg.eigenvalues[0], cfg.style, stream, mu_target=cfg.mu_target)
    return gen_rankr_symmetric(n, cfg.eigenvalues, stream)


def _direction(cfg: ExperimentConfig, dim: int, truth: GroundTruth) -> np.ndarray:
    if cfg.direction == "u-aligned":
        return truth.u_star
    if cfg.direction.startswith("basis:"):
        return unit_vector(dim, int(cfg.direction.split(":", 1)[1]))
    # one fixed random direction per dimension, shared by every trial
    return random_unit_vector(dim, RngStream(cfg.master_seed, (_DIRECTION, dim)))


def _estimator_stream(stream: RngStream, tag: str) -> RngStream:
    return stream.child(2 + est.ESTIMATOR_TAGS.index(tag))


def _run_symmetric(cfg, tag, truth, M, model, sigma, p, rng):
    if tag == "eig":
        return est.estimate_eig(M, tol=cfg.tol, rng=rng)
    if tag == "svd":
        return est.estimate_svd(M, tol=cfg.tol, rng=rng)
    if tag == "sym-corrected":
        # the correction is calibrated for asymmetric noise, whose symmetrised
        # entries have variance sigma^2/2; symmetric noise keeps sigma^2
        level = sigma * math.sqrt(2.0) if model.is_symmetric else sigma
        return est.estimate_sym_corrected(M, level, tol=cfg.tol, rng=rng)
    gen = rng.generator()
    if tag == "asym-gaussian-eig":
        return est.estimate_eig(est.asymmetrize_gaussian(M, sigma, gen), tol=cfg.tol, rng=gen)
    if tag == "aggregated-eig":
        return est.estimate_aggregated(M, sigma, cfg.K, gen, tol=cfg.tol)
    if tag == "asym-completion-eig":
        return est.estimate_eig(est.asymmetrize_completion(M, p, gen), tol=cfg.tol, rng=gen)
    raise AsymSpecError(f"estimator {tag} not available here")


def _errors_symmetric(truth, estimate, a):
    return sign_aligned_errors(estimate.u_hat, truth.u_star, a, estimate.lambda_hat,
                               truth.eigenvalues[0])


def _trial(cfg: ExperimentConfig, index: int, value: float, trial: int) -> list[TrialRecord]:
    n, sigma, p = cfg.point(value)
    stream = RngStream(cfg.master_seed, (index, trial))
    truth_stream = RngStream(cfg.master_seed, (index, _FIXED_TRUTH)) if cfg.fixed_truth else stream.child(0)
    noise_stream = stream.child(1)
    truth = _truth(cfg, n, truth_stream)
    model = _noise_model(cfg, sigma, p)

    if cfg.truth_kind == "covariance":
        v = truth.u_star
        d = v.size
        gen = noise_stream.generator()
        spike = math.sqrt(cfg.eigenvalues[0]) * gen.standard_normal(n)
        X = gen.standard_normal((n, d)) + np.outer(spike, v)
        lam_star = cfg.eigenvalues[0] + 1.0
        a = _direction(cfg, d, truth)
        observations = {"cov-asym": est.covariance_asym(X), "cov-sample": est.covariance_sample(X)}
    elif cfg.truth_kind == "asymmetric":
        a = _direction(cfg, n, truth)
        if model.is_completion:
            pooled = sample_noise(model, truth, noise_stream.child(0))
            M1, M2 = est.split_completion(pooled, p, noise_stream.child(1))
        else:
            M1 = truth.matrix + sample_additive(model, truth.matrix.shape, noise_stream.child(0))
            M2 = truth.matrix + sample_additive(model, truth.matrix.shape, noise_stream.child(1))
            pooled = 0.5 * (M1 + M2)
    else:
        a = _direction(cfg, n, truth)
        M = sample_noise(model, truth, noise_stream)

    records = []
    for tag in cfg.estimators:
        rng = _estimator_stream(stream, tag)
        try:
            if cfg.truth_kind == "covariance":
                S = observations[tag]
                if tag == "cov-sample":
                    spec = spectral.symmetric_eigensolver(S, k=1, tol=cfg.tol, rng=rng)
                    e = est.SpectralEstimate(float(spec.values[0].real), spec.vectors[:, 0].real)
                else:
                    e = est.estimate_eig(S, tol=cfg.tol, rng=rng)
                rep = sign_aligned_errors(e.u_hat, truth.u_star, a, e.lambda_hat, lam_star)
                errs = (rep.lambda_err, rep.l2_err, rep.linf_err, rep.linear_form_err)
            elif cfg.truth_kind == "asymmetric":
                lam_star = truth.eigenvalues[0]
                if tag == "dilation-eig":
                    e = est.estimate_dilation(M1, M2, tol=cfg.tol, rng=rng)
                    lam_err = max(abs(e.lambda_hat - lam_star), abs(e.meta["lambda2"] + lam_star))
                else:
                    e = est.estimate_svd(pooled, tol=cfg.tol, rng=rng)
                    lam_err = abs(e.lambda_hat - lam_star)
                ru = sign_aligned_errors(e.u_hat, truth.u_star, a)
                rv = sign_aligned_errors(e.v_hat, truth.v_star)
                errs = (lam_err, max(ru.l2_err, rv.l2_err), max(ru.linf_err, rv.linf_err),
                        ru.linear_form_err)
            else:
                e = _run_symmetric(cfg, tag, truth, M, model, sigma, p, rng)
                rep = _errors_symmetric(truth, e, a)
                errs = (rep.lambda_err, rep.l2_err, rep.linf_err, rep.linear_form_err)
            status = "ok" if all(math.isfinite(x) for x in errs) else "failed:nonfinite"
        except AsymSpecError as exc:
            log.debug("trial %d/%s at %s failed: %s", trial, tag, value, exc)
            errs = (math.nan,) * 4
            status = f"failed:{type(exc).__name__}"
        records.append(TrialRecord(cfg.experiment_id, n, float(value), trial, tag, *map(float, errs),
                                   float(truth.incoherence), cfg.master_seed, status))
    return records


def _task(args):
    cfg, index, value, trial = args
    return _trial(cfg, index, value, trial)


def default_jobs() -> int:
    raw = os.environ.get("ASYMSPEC_JOBS", "1")
    try:
        return max(1, int(raw))
    except ValueError:
        return 1


def run_sweep(cfg: ExperimentConfig, jobs: int | None = None) -> list[TrialRecord]:
    """Run every (sweep point, trial, estimator) of ``cfg``.

    Each trial draws from its own stream keyed by (sweep index, trial index),
    so the output does not depend on ``jobs``.
    """
    jobs = default_jobs() if jobs is None else max(1, int(jobs))
    tasks = [(cfg, i, v, t) for i, v in enumerate(cfg.sweep_values) for t in range(cfg.trials)]
    if jobs == 1 or len(tasks) == 1:
        chunks = [_task(t) for t in tasks]
    else:
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            chunks = list(pool.map(_task, tasks, chunksize=max(1, len(tasks) // (4 * jobs))))
    order = {tag: k for k, tag in enumerate(cfg.estimators)}
    index_of = {v: i for i, v in enumerate(cfg.sweep_values)}
    records = [r for chunk in chunks for r in chunk]
    records.sort(key=lambda r: (index_of.get(r.sweep_value, 0), r.trial, order[r.estimator]))
    return records


def failure_rate(records) -> float:
    if not records:
        return 0.0
    return sum(not r.ok for r in records) / len(records)
