"""Spectral estimators of a low-rank truth from noisy observations."""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass, field

import numpy as np

from . import spectral
from .errors import (ConvergenceError, DegenerateCorrectionError, DimensionError, ParameterError,
                     PartialFailureError)
from .matcore import as_generator

log = logging.getLogger(__name__)

ESTIMATOR_TAGS = ("eig", "svd", "sym-corrected", "dilation-eig", "asym-gaussian-eig",
                  "asym-completion-eig", "aggregated-eig", "cov-asym", "cov-sample")


@dataclass
class SpectralEstimate:
    lambda_hat: float
    u_hat: np.ndarray
    v_hat: np.ndarray | None = None
    meta: dict = field(default_factory=dict)


def estimate_eig(M, tol=spectral.DEFAULT_TOL, max_iter=spectral.DEFAULT_MAX_ITER, rng=None):
    """Leading eigenvalue (real part) and eigenvector of a square, possibly asymmetric, matrix."""
    est = spectral.leading_eigenpair(M, tol, max_iter, rng)
    return SpectralEstimate(est.value_re, est.vector,
                            meta={"value_im": est.value_im, "iterations": est.iterations,
                                  "residual": est.residual, "method": est.method,
                                  "complex_discarded": est.complex_discarded})


def estimate_svd(M, tol=spectral.DEFAULT_TOL, max_iter=spectral.DEFAULT_MAX_ITER, rng=None):
    s, left, right = spectral.leading_singular_triple(M, tol, max_iter, rng)
    return SpectralEstimate(s, left, right, meta={"method": "svd"})


def shrinkage_correction(lambda_sym: float, n: int, sigma: float) -> float:
    """Solve ``lambda_sym = x + n sigma^2 / (2 x)`` for the root nearest ``lambda_sym``."""
    disc = lambda_sym * lambda_sym - 2.0 * n * sigma * sigma
    if disc < 0:
        raise DegenerateCorrectionError(
            f"lambda_sym^2 = {lambda_sym ** 2:.4g} < 2 n sigma^2 = {2 * n * sigma ** 2:.4g}")
    return math.copysign(0.5 * (abs(lambda_sym) + math.sqrt(disc)), lambda_sym)


def estimate_sym_corrected(M, sigma: float, tol=spectral.DEFAULT_TOL, rng=None):
    """Shrinkage-corrected leading eigenvalue of the symmetrised matrix ``(M + M')/2``.

    Needs the noise level ``sigma``; it is not estimated from the data.
    """
    M = np.asarray(M, dtype=float)
    if M.ndim != 2 or M.shape[0] != M.shape[1]:
        raise DimensionError("estimate_sym_corrected needs a square matrix")
    S = 0.5 * (M + M.T)
    spec = spectral.symmetric_eigensolver(S, k=1, tol=tol, rng=rng)
    lam_sym = float(spec.values[0].real)
    lam_c = shrinkage_correction(lam_sym, M.shape[0], sigma)
    return SpectralEstimate(lam_c, spec.vectors[:, 0].real.copy(), meta={"lambda_sym": lam_sym})


class _DilationOperator:
    """Matrix-free ``[[0, M1], [M2', 0]]``."""

    def __init__(self, M1: np.ndarray, M2: np.ndarray):
        self.M1 = M1
        self.M2 = M2
        self.n1, self.n2 = M1.shape

    def __call__(self, x: np.ndarray) -> np.ndarray:
        top = self.M1 @ x[self.n1:]
        bottom = self.M2.T @ x[:self.n1]
        return np.concatenate([top, bottom])

    def dense(self) -> np.ndarray:
        n1, n2 = self.n1, self.n2
        D = np.zeros((n1 + n2, n1 + n2))
        D[:n1, n1:] = self.M1
        D[n1:, :n1] = self.M2.T
        return D


def dilation_matrix(M1, M2) -> np.ndarray:
    M1 = np.asarray(M1, dtype=float)
    M2 = np.asarray(M2, dtype=float)
    if M1.shape != M2.shape or M1.ndim != 2:
        raise DimensionError(f"dilation needs equal shapes, got {M1.shape} and {M2.shape}")
    return _DilationOperator(M1, M2).dense()


def estimate_dilation(M1, M2, tol=spectral.DEFAULT_TOL, max_iter=spectral.DEFAULT_MAX_ITER, rng=None):
    """Top-two eigenpairs of the asymmetric dilation of two independent copies.

    ``lambda_hat`` is the largest real eigenvalue; the most negative one is in
    ``meta["lambda2"]``. The top eigenvector is split into its first ``n1``
    and last ``n2`` coordinates, each renormalised, giving ``u_hat`` and
    ``v_hat``.

    The two eigenvalues of interest have equal modulus, so plain power
    iteration cannot separate them; each is found by power iteration on
    ``M_d + c I`` with ``c = +-||M_d||``. The full QR spectrum is the fallback.
    """
    M1 = np.asarray(M1, dtype=float)
    M2 = np.asarray(M2, dtype=float)
    if M1.shape != M2.shape or M1.ndim != 2:
        raise DimensionError(f"dilation needs equal shapes, got {M1.shape} and {M2.shape}")
    op = _DilationOperator(M1, M2)
    n1, n2 = M1.shape
    n = n1 + n2
    gen = as_generator(rng)
    c = max(spectral.spectral_norm(M1, rng=gen), spectral.spectral_norm(M2, rng=gen))
    if c == 0.0:
        u = np.zeros(n1)
        v = np.zeros(n2)
        u[0] = v[0] = 1.0
        return SpectralEstimate(0.0, u, v, meta={"lambda2": 0.0, "method": "zero"})
    scale = math.sqrt(float(np.sum(M1 * M1) + np.sum(M2 * M2)))
    lam1, x1, it1, res1, stall1 = spectral.power_iteration(op, n, scale, tol, max_iter, gen, shift=c)
    lam2, x2, it2, res2, stall2 = spectral.power_iteration(op, n, scale, tol, max_iter, gen, shift=-c)
    method = "shifted-power"
    if stall1 or stall2:
        log.debug("shifted power iteration stalled; falling back to QR on the dilation")
        try:
            spec = spectral.top_k_eigenpairs(op.dense(), 0, tol)
        except ConvergenceError as exc:
            raise ConvergenceError(f"dilation eigenproblem failed: {exc}", residual=max(res1, res2)) from exc
        real = np.array(sorted(spec.values, key=lambda z: -z.real))
        lam1, lam2 = float(real[0].real), float(real[-1].real)
        D = op.dense()
        x1, res1, _ = spectral.inverse_iteration(D, lam1, tol, gen)
        x1 = np.real(x1)
        method = "qr"
    top, bottom = x1[:n1], x1[n1:]
    u = top / np.linalg.norm(top) if np.linalg.norm(top) > 0 else top
    v = bottom / np.linalg.norm(bottom) if np.linalg.norm(bottom) > 0 else bottom
    u, v = spectral._sign_pair(u, v)
    return SpectralEstimate(lam1, u, v, meta={"lambda2": lam2, "iterations": it1 + it2,
                                              "residual": max(res1, res2), "method": method})


def skew_gaussian(n: int, sigma: float, rng) -> np.ndarray:
    """Skew-symmetric matrix with i.i.d. N(0, sigma^2) strictly above the diagonal."""
    gen = as_generator(rng)
    upper = np.triu(sigma * gen.standard_normal((n, n)), 1)
    return upper - upper.T


def asymmetrize_gaussian(M, sigma: float, rng=None) -> np.ndarray:
    """``M + Delta`` with ``Delta`` skew-symmetric Gaussian (zero diagonal).

    For symmetric Gaussian noise of variance sigma^2 the off-diagonal entries
    of the result are independent with variance 2 sigma^2.
    """
    M = np.asarray(M, dtype=float)
    if M.ndim != 2 or M.shape[0] != M.shape[1]:
        raise DimensionError("asymmetrize_gaussian needs a square matrix")
    if sigma == 0:
        return M.copy()
    return M + skew_gaussian(M.shape[0], sigma, rng)


def asymmetric_rate(p: float) -> float:
    """Per-copy rate ``q`` with ``1 - (1 - q)^2 = p``."""
    if not 0 < p <= 1:
        raise ParameterError(f"sampling rate p must lie in (0, 1], got {p}")
    return p / (1.0 + math.sqrt(1.0 - p))


def asymmetrize_completion(M_sym, p: float, rng=None) -> np.ndarray:
    """Resample a symmetric completion observation into independent asymmetric entries.

    Each observed off-diagonal pair (i, j), i > j, goes to the lower entry
    only, the upper entry only, or both, with probabilities
    ``(1-q)/(2-q)``, ``(1-q)/(2-q)`` and ``q/(2-q)``, rescaled by ``p/q``
    where ``q = p / (1 + sqrt(1 - p))``. Diagonal entries survive with
    probability ``q/p``, also rescaled by ``p/q``.
    """
    M_sym = np.asarray(M_sym, dtype=float)
    if M_sym.ndim != 2 or M_sym.shape[0] != M_sym.shape[1]:
        raise DimensionError("asymmetrize_completion needs a square matrix")
    q = asymmetric_rate(p)
    if q == 1.0:
        return M_sym.copy()
    n = M_sym.shape[0]
    gen = as_generator(rng)
    scale = p / q
    draw = gen.random((n, n))
    one_side = (1.0 - q) / (2.0 - q)
    lower = np.tril(np.ones((n, n), dtype=bool), -1)
    keep_lower = lower & ((draw < one_side) | (draw >= 2 * one_side))
    keep_upper_from_lower = lower & (draw >= one_side)
    out = np.zeros_like(M_sym)
    out[keep_lower] = scale * M_sym[keep_lower]
    out.T[keep_upper_from_lower] = scale * M_sym.T[keep_upper_from_lower]
    diag_keep = gen.random(n) < q / p
    idx = np.arange(n)
    out[idx, idx] = np.where(diag_keep, scale * M_sym[idx, idx], 0.0)
    return out


def estimate_aggregated(M, sigma: float, K: int, rng=None, tol=spectral.DEFAULT_TOL):
    """Leading eigenvector aggregated over ``K`` independent skew-Gaussian asymmetrisations.

    Returns the leading eigenvector of ``(1/K) sum_l u_l u_l'``; ``lambda_hat``
    is the mean of the ``K`` leading eigenvalues.
    """
    if K < 1:
        raise ParameterError("K must be >= 1")
    M = np.asarray(M, dtype=float)
    gen = as_generator(rng)
    vecs = []
    vals = []
    for copy in range(K):
        try:
            est = estimate_eig(asymmetrize_gaussian(M, sigma, gen), tol=tol, rng=gen)
        except ConvergenceError as exc:
            raise PartialFailureError(f"copy {copy + 1} of {K} failed: {exc}") from exc
        u = est.u_hat
        if vecs and float(u @ vecs[0]) < 0:
            u = -u
        vecs.append(u)
        vals.append(est.lambda_hat)
    U = np.column_stack(vecs)
    # the averaged outer product shares its nonzero spectrum with U'U/K
    gram = (U.T @ U) / K
    w_vals, W = spectral.jacobi_eigh(0.5 * (gram + gram.T))
    w = W[:, int(np.argmax(w_vals))]
    u = U @ w
    u = spectral.canonical_sign(u / np.linalg.norm(u))
    return SpectralEstimate(float(np.mean(vals)), u, meta={"K": K, "copy_values": vals})


def aggregate_eigenvectors(M, sigma: float, K: int, rng=None) -> np.ndarray:
    return estimate_aggregated(M, sigma, K, rng).u_hat


def covariance_sample(samples) -> np.ndarray:
    X = np.asarray(samples, dtype=float)
    return X.T @ X / X.shape[0]


def covariance_asym(samples, d: int | None = None) -> np.ndarray:
    """Asymmetrised sample covariance.

    The first half of the samples fills the upper triangle (diagonal
    included), the second half the strict lower triangle, each scaled by 2/n.
    """
    X = np.asarray(samples, dtype=float)
    if X.ndim != 2:
        raise DimensionError("samples must be an n x d array (one sample per row)")
    n, dim = X.shape
    if d is not None and d != dim:
        raise DimensionError(f"samples have dimension {dim}, expected {d}")
    if n % 2:
        raise ParameterError(f"need an even number of samples, got {n}")
    half = n // 2
    first, second = X[:half], X[half:]
    return (2.0 / n) * (np.triu(first.T @ first) + np.tril(second.T @ second, -1))


def split_completion(M_obs, p: float, rng=None) -> tuple[np.ndarray, np.ndarray]:
    """Split one completion observation at rate ``p`` into two independent ones at rate ``q``.

    Each observed entry goes to the first copy only, the second only, or
    both, with the same branch probabilities as :func:`asymmetrize_completion`,
    so that each copy is an independent mask of rate ``q`` (rescaled by ``p/q``).
    """
    M_obs = np.asarray(M_obs, dtype=float)
    if M_obs.ndim != 2:
        raise DimensionError("split_completion needs a matrix")
    q = asymmetric_rate(p)
    if q == 1.0:
        return M_obs.copy(), M_obs.copy()
    gen = as_generator(rng)
    draw = gen.random(M_obs.shape)
    one_side = (1.0 - q) / (2.0 - q)
    scaled = (p / q) * M_obs
    first = np.where((draw < one_side) | (draw >= 2 * one_side), scaled, 0.0)
    second = np.where(draw >= one_side, scaled, 0.0)
    return first, second
