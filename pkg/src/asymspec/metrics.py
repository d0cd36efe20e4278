"""Error functionals and bound evaluators.

All bounds are evaluated with unit constant: the theory only pins them up to
an unspecified multiplicative factor, so they are useful for comparing shapes
and ratios, never as absolute pass/fail thresholds.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import DimensionError, ParameterError


@dataclass(frozen=True)
class ErrorReport:
    lambda_err: float
    l2_err: float
    linf_err: float
    linear_form_err: float
    bound_value: float = float("nan")


def _as_frame(U) -> np.ndarray:
    U = np.asarray(U, dtype=float)
    if U.ndim == 1:
        U = U[:, None]
    elif U.ndim != 2:
        raise DimensionError("expected a vector or an n x r frame")
    if U.size == 0:
        raise DimensionError("incoherence of an empty frame is undefined")
    return U


def incoherence(U) -> float:
    """Entrywise incoherence ``mu = n * max_ij U_ij^2``.

    ``U`` is either a single unit vector or an ``n x r`` array whose columns
    are orthonormal. A list of vectors is accepted and stacked as columns.
    """
    if isinstance(U, (list, tuple)):
        if not U:
            raise DimensionError("incoherence of an empty frame is undefined")
        U = np.column_stack([np.asarray(u, dtype=float) for u in U])
    U = _as_frame(U)
    n = U.shape[0]
    return float(n * np.max(np.abs(U)) ** 2)


def incoherence_row(U) -> float:
    """Row-norm incoherence ``mu0 = (n / r) * max_i ||U_i,:||_2^2``."""
    if isinstance(U, (list, tuple)):
        if not U:
            raise DimensionError("incoherence of an empty frame is undefined")
        U = np.column_stack([np.asarray(u, dtype=float) for u in U])
    U = _as_frame(U)
    n, r = U.shape
    return float(n / r * np.max(np.sum(U * U, axis=1)))


def sign_aligned_errors(u_hat, u_star, a=None, lambda_hat=None, lambda_star=None) -> ErrorReport:
    """Sign-minimised eigenvector errors.

    Each norm is minimised over the global sign independently, so the l2 and
    linf errors may pick different signs. ``a`` defaults to ``u_star``.
    """
    u_hat = np.asarray(u_hat, dtype=float)
    u_star = np.asarray(u_star, dtype=float)
    if u_hat.shape != u_star.shape:
        raise DimensionError(f"shape mismatch {u_hat.shape} vs {u_star.shape}")
    a = u_star if a is None else np.asarray(a, dtype=float)
    if a.shape != u_star.shape:
        raise DimensionError("direction a has the wrong dimension")
    minus = u_hat - u_star
    plus = u_hat + u_star
    l2 = min(np.linalg.norm(minus), np.linalg.norm(plus))
    linf = min(np.max(np.abs(minus)), np.max(np.abs(plus)))
    lin = min(abs(a @ minus), abs(a @ plus))
    if lambda_hat is None or lambda_star is None:
        lam_err = float("nan")
    else:
        lam_err = abs(float(lambda_hat) - float(lambda_star))
    return ErrorReport(lambda_err=lam_err, l2_err=float(l2), linf_err=float(linf),
                       linear_form_err=float(lin))


def _noise_level(sigma: float, B: float, n: int) -> float:
    if n < 2:
        raise ParameterError("bounds need n >= 2")
    logn = math.log(n)
    return max(sigma * math.sqrt(n * logn), B * logn)


def bound_rank1(sigma, B, n, mu, lambda_star, which="eigenvalue", a_inner=0.0) -> float:
    """Variable part of the rank-1 perturbation bounds.

    which:
        ``eigenvalue``   max{s sqrt(n log n), B log n} sqrt(mu/n)
        ``entrywise``    the same divided by |lambda*|
        ``linear-form``  (|a'u*| + sqrt(mu/n)) max{...} / |lambda*|
    """
    level = _noise_level(sigma, B, n)
    spread = math.sqrt(mu / n)
    if which == "eigenvalue":
        return level * spread
    if lambda_star == 0:
        raise ParameterError("lambda_star must be nonzero")
    if which == "entrywise":
        return level * spread / abs(lambda_star)
    if which == "linear-form":
        return (abs(a_inner) + spread) * level / abs(lambda_star)
    raise ParameterError(f"unknown bound kind {which!r}")


def bound_rankr(sigma, B, n, mu, r, kappa, lambda_max=1.0) -> float:
    """Rank-r eigenvalue bound ``max{...} * kappa * r * sqrt(mu/n)``.

    ``lambda_max`` only enters through validation: the eigenvalue bound is
    absolute, not relative.
    """
    if r < 1 or kappa < 1:
        raise ParameterError("need r >= 1 and kappa >= 1")
    if lambda_max == 0:
        raise ParameterError("lambda_max must be nonzero")
    return _noise_level(sigma, B, n) * kappa * r * math.sqrt(mu / n)


def mean_and_sem(values) -> tuple[float, float]:
    """Mean and standard error of the mean, ignoring NaNs."""
    x = np.asarray(values, dtype=float)
    x = x[np.isfinite(x)]
    if x.size == 0:
        return float("nan"), float("nan")
    if x.size == 1:
        return float(x[0]), 0.0
    return float(x.mean()), float(x.std(ddof=1) / math.sqrt(x.size))
