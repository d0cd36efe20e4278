"""Perturbation models and observation operators."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import DimensionError, ParameterError
from .matcore import GroundTruth, as_generator

KINDS = ("iid-gaussian", "bounded-uniform", "completion-mask", "symmetric-gaussian",
         "symmetric-completion")

# Gaussian tail condition P(|H_ij| > B) <= c_b n^-12, taken with c_b = 1
TAIL_EXPONENT = 12


@dataclass(frozen=True)
class NoiseModel:
    """Distribution of ``H = M - M*``.

    ``sigma`` is the per-entry standard deviation for the Gaussian kinds,
    ``magnitude_bound`` the hard bound B for ``bounded-uniform`` (sigma is
    then B / sqrt(3)), and ``p`` the observation probability for the
    completion kinds.
    """

    kind: str
    sigma: float = 0.0
    magnitude_bound: float = math.inf
    p: float = 1.0

    def __post_init__(self):
        if self.kind not in KINDS:
            raise ParameterError(f"unknown noise kind {self.kind!r}")
        if self.sigma < 0:
            raise ParameterError("sigma must be >= 0")
        if self.kind in ("completion-mask", "symmetric-completion") and not 0 < self.p <= 1:
            raise ParameterError(f"sampling rate p must lie in (0, 1], got {self.p}")
        if self.kind == "bounded-uniform" and not math.isfinite(self.magnitude_bound):
            raise ParameterError("bounded-uniform needs a finite magnitude_bound")

    @classmethod
    def gaussian(cls, sigma: float) -> "NoiseModel":
        return cls("iid-gaussian", sigma=sigma)

    @classmethod
    def symmetric_gaussian(cls, sigma: float) -> "NoiseModel":
        return cls("symmetric-gaussian", sigma=sigma)

    @classmethod
    def uniform(cls, bound: float) -> "NoiseModel":
        return cls("bounded-uniform", sigma=bound / math.sqrt(3.0), magnitude_bound=bound)

    @classmethod
    def completion(cls, p: float, symmetric: bool = False) -> "NoiseModel":
        return cls("symmetric-completion" if symmetric else "completion-mask", p=p)

    @property
    def is_symmetric(self) -> bool:
        return self.kind.startswith("symmetric")

    @property
    def is_completion(self) -> bool:
        return self.kind in ("completion-mask", "symmetric-completion")


def _symmetrize_upper(A: np.ndarray) -> np.ndarray:
    upper = np.triu(A)
    return upper + np.triu(A, 1).T


def sample_additive(model: NoiseModel, shape, rng) -> np.ndarray:
    """Draw ``H`` directly for the additive kinds (Gaussian and uniform)."""
    gen = as_generator(rng)
    if model.kind == "iid-gaussian":
        return model.sigma * gen.standard_normal(shape)
    if model.kind == "symmetric-gaussian":
        if shape[0] != shape[1]:
            raise DimensionError("symmetric noise needs a square shape")
        return _symmetrize_upper(model.sigma * gen.standard_normal(shape))
    if model.kind == "bounded-uniform":
        B = model.magnitude_bound
        return gen.uniform(-B, B, size=shape)
    raise ParameterError(f"{model.kind} is not an additive noise kind")


def sample_mask(shape, p: float, rng, symmetric: bool = False) -> np.ndarray:
    """Boolean observation mask; the symmetric variant mirrors the upper triangle."""
    if not 0 < p <= 1:
        raise ParameterError(f"sampling rate p must lie in (0, 1], got {p}")
    gen = as_generator(rng)
    mask = gen.random(shape) < p
    if symmetric:
        upper = np.triu(mask)
        mask = upper | np.triu(mask, 1).T
    return mask


def sample_noise(model: NoiseModel, truth: GroundTruth, rng) -> np.ndarray:
    """Observed matrix ``M`` for ``truth`` under ``model``."""
    Mstar = truth.matrix
    if model.is_symmetric and Mstar.shape[0] != Mstar.shape[1]:
        raise DimensionError("symmetric noise models need a square truth")
    if model.is_completion:
        mask = sample_mask(Mstar.shape, model.p, rng, symmetric=model.is_symmetric)
        return np.where(mask, Mstar / model.p, 0.0)
    if model.sigma == 0 and model.kind != "bounded-uniform":
        return Mstar.copy()
    return Mstar + sample_additive(model, Mstar.shape, rng)


def effective_noise_params(model: NoiseModel, truth: GroundTruth | None = None,
                           n: int | None = None) -> tuple[float, float]:
    """The ``(sigma, B)`` pair the perturbation bounds consume.

    Completion uses ``B = mu/(n p)`` and ``sigma = mu/(n sqrt(p))``; Gaussian
    kinds report the tail-truncation level at which
    ``P(|H_ij| > B) <= c_b n^-12``.
    """
    if n is None:
        if truth is None:
            raise ParameterError("need either truth or n")
        n = truth.matrix.shape[0]
    if model.is_completion:
        if truth is None:
            raise ParameterError("completion bounds need the truth's incoherence")
        if model.p == 1:
            return 0.0, 0.0
        mu = truth.incoherence
        return mu / (n * math.sqrt(model.p)), mu / (n * model.p)
    if model.sigma == 0:
        return 0.0, 0.0
    if model.kind == "bounded-uniform":
        return model.sigma, model.magnitude_bound
    # Mills ratio: P(|Z| > t) <= exp(-t^2/2) once t > 0.8, so t = sqrt(2 k log n) suffices
    level = model.sigma * math.sqrt(2.0 * TAIL_EXPONENT * math.log(n))
    return model.sigma, level
