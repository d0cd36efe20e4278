"""Numerical probes of the series expansion behind the eigenvector bounds."""

from __future__ import annotations

from typing import NamedTuple

import numpy as np

from . import spectral
from .errors import ParameterError, PreconditionError
from .matcore import GroundTruth, RngStream, as_generator, rank1_from_vector
from .noise import NoiseModel, sample_noise


def neumann_partial_sum(truth: GroundTruth, H, lambda_l: float, u_l, S: int,
                        check_norm: bool = True) -> np.ndarray:
    """Truncated expansion of the eigenvector ``u_l`` of ``M* + H``.

    ``sum_j (lambda_j*/lambda_l)(u_j*' u_l) sum_{s=0..S} lambda_l^-s H^s u_j*``.
    Powers of ``H`` are applied as repeated mat-vecs.
    """
    H = np.asarray(H, dtype=float)
    u_l = np.asarray(u_l, dtype=float)
    if S < 0:
        raise ParameterError("S must be >= 0")
    if lambda_l == 0:
        raise PreconditionError("lambda_l must be nonzero")
    if check_norm and spectral.spectral_norm(H) >= abs(lambda_l):
        raise PreconditionError("the expansion needs ||H|| < |lambda_l|")
    total = np.zeros_like(u_l)
    for lam_j, u_j in zip(truth.eigenvalues, truth.eigenvectors.T):
        coef = lam_j / lambda_l * float(u_j @ u_l)
        term = u_j.copy()
        acc = u_j.copy()
        for _ in range(S):
            term = (H @ term) / lambda_l
            acc += term
        total += coef * acc
    return total


def neumann_residuals(truth: GroundTruth, H, lambda_l: float, u_l, S_max: int) -> np.ndarray:
    """``||u_l - partial_sum(S)||_2`` for ``S = 0..S_max``, computed incrementally."""
    H = np.asarray(H, dtype=float)
    u_l = np.asarray(u_l, dtype=float)
    if spectral.spectral_norm(H) >= abs(lambda_l):
        raise PreconditionError("the expansion needs ||H|| < |lambda_l|")
    coefs = [lam_j / lambda_l * float(u_j @ u_l)
             for lam_j, u_j in zip(truth.eigenvalues, truth.eigenvectors.T)]
    terms = [u_j.copy() for u_j in truth.eigenvectors.T]
    partial = sum(c * t for c, t in zip(coefs, terms))
    out = [float(np.linalg.norm(u_l - partial))]
    for _ in range(S_max):
        terms = [(H @ t) / lambda_l for t in terms]
        partial = partial + sum(c * t for c, t in zip(coefs, terms))
        out.append(float(np.linalg.norm(u_l - partial)))
    return np.array(out)


class ProbeResult(NamedTuple):
    mean: float
    quantile95: float
    sem: float


def probe_high_order(a, model: NoiseModel, u_star, s: int, trials: int = 2000, rng=None):
    """Monte Carlo law of ``a' H^s u*``.

    Returns the signed mean, the 95th percentile of the absolute value and
    the standard error of the mean.
    """
    if s < 1:
        raise ParameterError("s must be >= 1")
    if trials < 2:
        raise ParameterError("need at least two trials")
    a = np.asarray(a, dtype=float)
    truth = rank1_from_vector(u_star, 1.0)
    u = truth.u_star
    stream = rng if isinstance(rng, RngStream) else None
    gen = None if stream is not None else as_generator(rng)
    values = np.empty(trials)
    for t in range(trials):
        trial_rng = stream.child(t) if stream is not None else gen
        H = sample_noise(model, truth, trial_rng) - truth.matrix
        w = u
        for _ in range(s):
            w = H @ w
        values[t] = a @ w
    mean = float(values.mean())
    sem = float(values.std(ddof=1) / np.sqrt(trials))
    q95 = float(np.quantile(np.abs(values), 0.95))
    return ProbeResult(mean, q95, sem)
